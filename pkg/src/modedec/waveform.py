"""Sampled RF fields: synthesis, power bookkeeping, baselines, shape export.

A waveform stores the Cartesian field components (wx, wy) on spin I in
rad/s, sampled at midpoints t_i = (i + 1/2)*dt so that piecewise-constant
propagation is second-order accurate in the smoothness of the modulation.
The field is non-periodic in general (the modulation frequencies are
incommensurate), so a waveform is synthesized for the full acquisition
window rather than looped.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .cascade import FrameCascade, ModeDesign

EXPORT_FORMATS = ("bruker_text", "csv", "json")

_CSV_HEADER = "t_s,wx_rad_s,wy_rad_s,amp_rad_s,phase_rad"

# fastest modulation must be sampled at least this many times per period
MIN_SAMPLES_PER_PERIOD = 20


class GuardError(RuntimeError):
    """Numerical guard tripped (undersampling, failed RMS equalization)."""


@dataclass(frozen=True)
class WaveformMeta:
    """Provenance of a waveform: generator name, duration, parameter hash."""

    generator: str
    duration: float
    design_hash: str = ""


@dataclass(frozen=True)
class Waveform:
    dt: float
    wx: np.ndarray
    wy: np.ndarray
    meta: WaveformMeta

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        wx = np.ascontiguousarray(self.wx, dtype=float)
        wy = np.ascontiguousarray(self.wy, dtype=float)
        if wx.ndim != 1 or wx.shape != wy.shape or wx.size == 0:
            raise ValueError("wx and wy must be non-empty 1-d arrays of equal length")
        wx.setflags(write=False)
        wy.setflags(write=False)
        object.__setattr__(self, "wx", wx)
        object.__setattr__(self, "wy", wy)

    @property
    def n_samples(self) -> int:
        return self.wx.size

    @property
    def duration(self) -> float:
        return self.n_samples * self.dt

    @property
    def times(self) -> np.ndarray:
        """Midpoint sample times (i + 1/2)*dt."""
        return (np.arange(self.n_samples) + 0.5) * self.dt

    @property
    def samples(self) -> np.ndarray:
        """(n, 2) array of (wx, wy) pairs."""
        return np.column_stack((self.wx, self.wy))


@dataclass(frozen=True)
class AmpPhaseSample:
    """Polar form of one field sample: amplitude >= 0, phase in [0, 2*pi)."""

    amplitude: float
    phase: float

    @classmethod
    def from_cartesian(cls, wx: float, wy: float) -> "AmpPhaseSample":
        return cls(math.hypot(wx, wy), math.atan2(wy, wx) % (2.0 * math.pi))

    def to_cartesian(self) -> tuple[float, float]:
        return (self.amplitude * math.cos(self.phase),
                self.amplitude * math.sin(self.phase))


def _param_hash(*parts) -> str:
    text = "|".join(repr(p) for p in parts)
    return hashlib.sha1(text.encode()).hexdigest()[:12]


def _n_samples(duration: float, dt: float) -> int:
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if duration < dt:
        raise ValueError("duration must be at least one sample interval")
    return int(round(duration / dt))


def mode_field(design: ModeDesign, cascade: FrameCascade,
               t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the modulated field at times t.

    wx = w_0 constant; wy = sum_k w_k * prod_{j<k} cos(upsilon_j t) *
    sin(upsilon_k t).  Pointwise evaluation, no filtering.
    """
    t = np.asarray(t, dtype=float)
    wy = np.zeros_like(t)
    running = np.ones_like(t)
    for k in range(1, design.n_frames + 1):
        phase = cascade.upsilon[k - 1] * t
        wy += design.w_levels[k] * running * np.sin(phase)
        running *= np.cos(phase)
    wx = np.full_like(t, design.w_levels[0])
    return wx, wy


def synthesize_mode(design: ModeDesign, cascade: FrameCascade,
                    duration: float, dt: float) -> Waveform:
    """Sample the modulated field of a design over [0, duration].

    Raises GuardError if dt undersamples the fastest modulation (fewer
    than MIN_SAMPLES_PER_PERIOD points per upsilon_1 period).
    """
    expected = tuple(w * 2.0 ** -k for k, w in enumerate(design.w_levels))
    if len(cascade.upsilon) != design.n_frames or cascade.wbar != expected:
        raise ValueError("cascade was not built from this design")
    n = _n_samples(duration, dt)
    if cascade.upsilon:
        period = 2.0 * math.pi / cascade.upsilon[0]
        if dt > period / MIN_SAMPLES_PER_PERIOD:
            raise GuardError(
                f"dt={dt:g} s undersamples the fastest modulation "
                f"(period {period:g} s; need dt <= {period / MIN_SAMPLES_PER_PERIOD:g})")
    t = (np.arange(n) + 0.5) * dt
    wx, wy = mode_field(design, cascade, t)
    meta = WaveformMeta("mode", n * dt,
                        _param_hash(design.n_frames, design.w_levels,
                                    design.c0, design.delta_design))
    return Waveform(dt, wx, wy, meta)


def make_cw(amplitude: float, duration: float, dt: float) -> Waveform:
    """Constant field of the given amplitude along x."""
    if amplitude < 0.0:
        raise ValueError("amplitude must be >= 0")
    n = _n_samples(duration, dt)
    meta = WaveformMeta("cw", n * dt, _param_hash(amplitude))
    return Waveform(dt, np.full(n, float(amplitude)), np.zeros(n), meta)


def make_tppm(amplitude: float, tip_duration: float, phase_offset: float,
              duration: float, dt: float) -> Waveform:
    """Constant-amplitude field with phase toggling +-phase_offset/2.

    The phase alternates every tip_duration, giving a square phase
    modulation of period 2*tip_duration.
    """
    if amplitude < 0.0:
        raise ValueError("amplitude must be >= 0")
    if tip_duration < dt:
        raise ValueError("tip_duration must be at least one sample interval")
    n = _n_samples(duration, dt)
    t = (np.arange(n) + 0.5) * dt
    sign = np.where(np.floor(t / tip_duration).astype(int) % 2 == 0, 1.0, -1.0)
    phase = sign * (0.5 * phase_offset)
    meta = WaveformMeta("tppm", n * dt,
                        _param_hash(amplitude, tip_duration, phase_offset))
    return Waveform(dt, amplitude * np.cos(phase), amplitude * np.sin(phase), meta)


def rms_amplitude(waveform: Waveform) -> float:
    """Root-mean-square field amplitude sqrt(mean(wx^2 + wy^2))."""
    return math.sqrt(float(np.mean(waveform.wx ** 2 + waveform.wy ** 2)))


def max_amplitude(waveform: Waveform) -> float:
    """Largest instantaneous field amplitude over the samples."""
    return float(np.max(np.hypot(waveform.wx, waveform.wy)))


def amp_phase_arrays(waveform: Waveform) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude (rad/s) and phase ([0, 2*pi)) arrays of the samples."""
    amp = np.hypot(waveform.wx, waveform.wy)
    phase = np.mod(np.arctan2(waveform.wy, waveform.wx), 2.0 * math.pi)
    return amp, phase


def match_rms(make, target_rms: float, bracket: tuple[float, float],
              rel_tol: float = 0.01, max_iter: int = 50):
    """Bisect a scalar amplitude parameter until rms(make(x)) hits target.

    make(x) must return a Waveform whose RMS grows monotonically with x.
    Returns (x, waveform, rms).  Raises GuardError if the bracket does not
    straddle the target or the bisection fails to converge in max_iter
    steps.
    """
    lo, hi = bracket
    if target_rms <= 0.0:
        raise ValueError("target_rms must be positive")
    rms_lo = rms_amplitude(make(lo))
    rms_hi = rms_amplitude(make(hi))
    if not rms_lo <= target_rms <= rms_hi:
        raise GuardError(
            f"RMS target {target_rms:g} outside bracket [{rms_lo:g}, {rms_hi:g}]")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        wf = make(x)
        rms = rms_amplitude(wf)
        if abs(rms - target_rms) <= rel_tol * target_rms:
            return x, wf, rms
        if rms < target_rms:
            lo = x
        else:
            hi = x
        x = 0.5 * (lo + hi)
    raise GuardError(f"RMS equalization did not converge in {max_iter} bisection steps")


def export_shape(waveform: Waveform, format: str) -> bytes:
    """Serialize a waveform; see the package docs for the exact formats."""
    if format == "bruker_text":
        return _export_bruker(waveform)
    if format == "csv":
        return _export_csv(waveform)
    if format == "json":
        return _export_json(waveform)
    raise ValueError(f"unknown format {format!r}; expected one of {EXPORT_FORMATS}")


def _export_bruker(waveform: Waveform) -> bytes:
    amp, phase = amp_phase_arrays(waveform)
    peak = float(amp.max())
    if peak <= 0.0:
        raise ValueError("cannot normalize a zero-amplitude waveform")
    lines = [
        f"##TITLE= {waveform.meta.generator}",
        f"##NPOINTS= {waveform.n_samples}",
        "##XYPOINTS= (XY..XY)",
    ]
    scaled = 100.0 * amp / peak
    deg = np.degrees(phase) % 360.0
    lines.extend(f"{a:.6f}, {p:.6f}" for a, p in zip(scaled, deg))
    lines.append("##END=")
    return ("\n".join(lines) + "\n").encode()


def _export_csv(waveform: Waveform) -> bytes:
    amp, phase = amp_phase_arrays(waveform)
    rows = [_CSV_HEADER]
    for t, x, y, a, p in zip(waveform.times, waveform.wx, waveform.wy, amp, phase):
        rows.append(f"{t:.17g},{x:.17g},{y:.17g},{a:.17g},{p:.17g}")
    return ("\n".join(rows) + "\n").encode()


def _export_json(waveform: Waveform) -> bytes:
    doc = {
        "dt": waveform.dt,
        "duration": waveform.duration,
        "generator": waveform.meta.generator,
        "samples": [[x, y] for x, y in zip(waveform.wx, waveform.wy)],
    }
    return (json.dumps(doc) + "\n").encode()


def load_waveform(data: bytes, format: str) -> Waveform:
    """Rebuild a waveform from its csv or json serialization."""
    if format == "csv":
        lines = data.decode().strip().split("\n")
        if not lines or lines[0] != _CSV_HEADER:
            raise ValueError("missing or unexpected csv header")
        cols = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        if cols.size == 0:
            raise ValueError("csv contains no samples")
        dt = 2.0 * cols[0, 0]  # first midpoint sits at dt/2
        meta = WaveformMeta("csv_import", cols.shape[0] * dt)
        return Waveform(dt, cols[:, 1], cols[:, 2], meta)
    if format == "json":
        doc = json.loads(data.decode())
        samples = np.asarray(doc["samples"], dtype=float)
        meta = WaveformMeta(doc.get("generator", "json_import"),
                            doc["dt"] * len(samples))
        return Waveform(doc["dt"], samples[:, 0], samples[:, 1], meta)
    raise ValueError(f"cannot import format {format!r}")
