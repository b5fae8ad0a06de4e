"""Command-line front end: design, synth, gap, simulate, sweep, compare.

Configuration lives in a single JSON document; individual flags override
fields.  Frequencies in the config are kHz by default (set
frequency_units to "rad_s" to pass angular frequencies through
unchanged); conversion to internal rad/s happens exactly once, here.

Exit codes: 0 success, 2 configuration error, 3 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .cascade import ModeDesign, alpha_fixed_point, build_cascade
from .resonance import gap_report, min_gap
from .spinsim import (
    Engine,
    SimConfig,
    SpinSystem,
    efficiency,
    inhomogeneity_sweep,
    offset_sweep,
    propagate,
)
from .waveform import (
    GuardError,
    amp_phase_arrays,
    export_shape,
    make_cw,
    make_tppm,
    match_rms,
    max_amplitude,
    rms_amplitude,
    synthesize_mode,
)

KHZ = 2e3 * math.pi  # kHz -> rad/s
HZ = 2.0 * math.pi

SEQUENCES = ("mode", "tppm", "cw")
SHAPE_EXT = {"bruker_text": "brf", "csv": "csv", "json": "json"}
TPPM_TIP_DEG = 170.0  # default flip angle per phase half-cycle


@dataclass
class RunConfig:
    """User-facing configuration; frequencies in kHz unless noted."""

    n_frames: int = 6
    w_khz: float | list = 4.8          # scalar or one value per level
    c0_khz: float = 22.5
    delta: float = 0.0
    j_hz: float = 140.0
    duration_ms: float | None = None   # default: 12/J
    dt_us: float = 0.5
    record_dt_us: float = 10.0
    omega0_khz: float = 6.25           # offset used by `simulate`
    sim_epsilon: float = 1.0           # RF scale used by `simulate`/`compare`
    offsets: str = "-22.5:22.5:41"     # min:max:count, kHz
    epsilon: list = None               # sweep RF scales; default below
    sequence: str = "mode"
    engine: str = "factorized_2x2"
    baseline_amp_khz: float | None = None  # cw/tppm amplitude; default: MODE rms
    tppm_tip_us: float | None = None       # default: TPPM_TIP_DEG flip
    tppm_phase_deg: float = 15.0
    gap_threshold_hz: float = 500.0
    compare_n: list = None             # default below
    rms_tol: float = 0.01
    threads: int = 1
    format: str = "csv"                # shape export: bruker_text | csv | json
    out_dir: str = "."
    frequency_units: str = "khz"       # khz | rad_s

    def __post_init__(self):
        if self.epsilon is None:
            self.epsilon = [0.9, 1.0, 1.1, 1.2]
        if self.compare_n is None:
            self.compare_n = [1, 2, 4, 6]


def _fail(field_name: str, message: str):
    raise ValueError(f"config field '{field_name}': {message}")


def validate_config(cfg: RunConfig) -> None:
    if not isinstance(cfg.n_frames, int) or cfg.n_frames < 0:
        _fail("n_frames", "must be a non-negative integer")
    w = cfg.w_khz if isinstance(cfg.w_khz, list) else [cfg.w_khz]
    if isinstance(cfg.w_khz, list) and len(cfg.w_khz) != cfg.n_frames + 1:
        _fail("w_khz", f"list must have n_frames + 1 = {cfg.n_frames + 1} entries")
    if any(not isinstance(x, (int, float)) or x <= 0 for x in w):
        _fail("w_khz", "amplitudes must be positive numbers")
    if cfg.c0_khz < 0:
        _fail("c0_khz", "must be >= 0")
    if not 0 <= cfg.delta < 1:
        _fail("delta", "must lie in [0, 1)")
    if cfg.j_hz < 0:
        _fail("j_hz", "must be >= 0")
    if cfg.duration_ms is not None and cfg.duration_ms <= 0:
        _fail("duration_ms", "must be positive")
    if cfg.dt_us <= 0:
        _fail("dt_us", "must be positive")
    if cfg.record_dt_us < cfg.dt_us:
        _fail("record_dt_us", "must be >= dt_us")
    if cfg.sim_epsilon <= 0:
        _fail("sim_epsilon", "must be positive")
    try:
        parse_offsets(cfg.offsets)
    except Exception:
        _fail("offsets", "expected 'min:max:count' with count >= 1")
    if not cfg.epsilon or any(e <= 0 for e in cfg.epsilon):
        _fail("epsilon", "must be a non-empty list of positive scales")
    if cfg.sequence not in SEQUENCES:
        _fail("sequence", f"must be one of {SEQUENCES}")
    try:
        Engine(cfg.engine)
    except ValueError:
        _fail("engine", f"must be one of {[e.value for e in Engine]}")
    if cfg.baseline_amp_khz is not None and cfg.baseline_amp_khz <= 0:
        _fail("baseline_amp_khz", "must be positive")
    if cfg.tppm_tip_us is not None and cfg.tppm_tip_us <= 0:
        _fail("tppm_tip_us", "must be positive")
    if cfg.gap_threshold_hz < 0:
        _fail("gap_threshold_hz", "must be >= 0")
    if not cfg.compare_n or any(not isinstance(n, int) or n < 1 for n in cfg.compare_n):
        _fail("compare_n", "must be a non-empty list of positive integers")
    if not 0 < cfg.rms_tol < 1:
        _fail("rms_tol", "must lie in (0, 1)")
    if cfg.threads < 1:
        _fail("threads", "must be >= 1")
    if cfg.format not in SHAPE_EXT:
        _fail("format", f"must be one of {tuple(SHAPE_EXT)}")
    if cfg.frequency_units not in ("khz", "rad_s"):
        _fail("frequency_units", "must be 'khz' or 'rad_s'")


def parse_offsets(spec: str) -> tuple[float, float, int]:
    lo, hi, count = spec.split(":")
    lo, hi, count = float(lo), float(hi), int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    return lo, hi, count


def _freq_scale(cfg: RunConfig) -> float:
    return KHZ if cfg.frequency_units == "khz" else 1.0


def design_from_config(cfg: RunConfig) -> ModeDesign:
    scale = _freq_scale(cfg)
    if isinstance(cfg.w_khz, list):
        levels = tuple(scale * w for w in cfg.w_khz)
        return ModeDesign(cfg.n_frames, levels, scale * cfg.c0_khz, cfg.delta)
    return ModeDesign.equal_levels(cfg.n_frames, scale * cfg.w_khz,
                                   scale * cfg.c0_khz, cfg.delta)


def _duration_s(cfg: RunConfig) -> float:
    if cfg.duration_ms is not None:
        return cfg.duration_ms * 1e-3
    if cfg.j_hz <= 0:
        _fail("duration_ms", "required when j_hz is 0")
    return 12.0 / cfg.j_hz


def _offset_grid(cfg: RunConfig) -> np.ndarray:
    lo, hi, count = parse_offsets(cfg.offsets)
    return np.linspace(lo * _freq_scale(cfg), hi * _freq_scale(cfg), count)


def _baseline_amp(cfg: RunConfig) -> float:
    """Amplitude used for cw/tppm; defaults to the MODE design's RMS."""
    if cfg.baseline_amp_khz is not None:
        return cfg.baseline_amp_khz * _freq_scale(cfg)
    return rms_amplitude(_mode_waveform(cfg))


def _mode_waveform(cfg: RunConfig):
    design = design_from_config(cfg)
    return synthesize_mode(design, build_cascade(design),
                           _duration_s(cfg), cfg.dt_us * 1e-6)


def _sequence_waveform(cfg: RunConfig, sequence: str):
    duration = _duration_s(cfg)
    dt = cfg.dt_us * 1e-6
    if sequence == "mode":
        return _mode_waveform(cfg)
    amp = _baseline_amp(cfg)
    if sequence == "cw":
        return make_cw(amp, duration, dt)
    tip = (cfg.tppm_tip_us * 1e-6 if cfg.tppm_tip_us is not None
           else math.radians(TPPM_TIP_DEG) / amp)
    return make_tppm(amp, tip, math.radians(cfg.tppm_phase_deg), duration, dt)


def _sim_config(cfg: RunConfig, epsilon: float) -> SimConfig:
    return SimConfig(_duration_s(cfg), cfg.dt_us * 1e-6, epsilon,
                     Engine(cfg.engine), cfg.record_dt_us * 1e-6)


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    print(f"wrote {path}")


def _report_json(cfg: RunConfig, payload: dict) -> bytes:
    doc = {"config": asdict(cfg), **payload}
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def cmd_design(cfg: RunConfig) -> int:
    design = design_from_config(cfg)
    cascade = build_cascade(design)
    print(f"{'k':>2s} {'wbar_khz':>10s} {'c_khz':>10s} {'upsilon_khz':>12s} {'alpha':>8s}")
    for k in range(design.n_frames + 1):
        ups = f"{cascade.upsilon[k - 1] / KHZ:12.4f}" if k >= 1 else " " * 12
        print(f"{k:2d} {cascade.wbar[k] / KHZ:10.4f} {cascade.c[k] / KHZ:10.4f}"
              f" {ups} {cascade.alpha[k]:8.4f}")
    payload = {
        "wbar_khz": [w / KHZ for w in cascade.wbar],
        "c_khz": [c / KHZ for c in cascade.c],
        "upsilon_khz": [u / KHZ for u in cascade.upsilon],
        "alpha": list(cascade.alpha),
        "alpha_fixed_point": (alpha_fixed_point(design.delta_design)
                              if design.delta_design > 0 else None),
    }
    if design.delta_design > 0:
        print(f"alpha fixed point: {payload['alpha_fixed_point']:.4f}")
    _write(Path(cfg.out_dir) / "design.json", _report_json(cfg, payload))
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    wf = _sequence_waveform(cfg, cfg.sequence)
    ext = SHAPE_EXT[cfg.format]
    name = "shape" if cfg.format == "bruker_text" else "waveform"
    _write(Path(cfg.out_dir) / f"{name}_{cfg.sequence}.{ext}",
           export_shape(wf, cfg.format))
    amp, phase = amp_phase_arrays(wf)
    rows = ["t_s,amp_khz,phase_deg"]
    rows.extend(f"{t:.17g},{a / KHZ:.9g},{math.degrees(p) % 360.0:.9g}"
                for t, a, p in zip(wf.times, amp, phase))
    _write(Path(cfg.out_dir) / f"amp_phase_{cfg.sequence}.csv",
           ("\n".join(rows) + "\n").encode())
    print(f"samples: {wf.n_samples}  duration: {wf.duration * 1e3:.4f} ms")
    print(f"max amplitude: {max_amplitude(wf) / KHZ:.4f} kHz")
    print(f"rms amplitude: {rms_amplitude(wf) / KHZ:.4f} kHz")
    return 0


def cmd_gap(cfg: RunConfig) -> int:
    cascade = build_cascade(design_from_config(cfg))
    if not cascade.upsilon:
        _fail("n_frames", "gap analysis needs at least one modulation")
    threshold = cfg.gap_threshold_hz * HZ
    result = min_gap(cascade.upsilon, near_threshold=threshold)
    asg = result.assignment
    print(f"minimum gap: {result.delta_min / HZ:.4f} Hz")
    print(f"assignment: k={asg.k} c={list(asg.c)} a={asg.a} d={list(asg.d)}")
    print(f"assignments below {cfg.gap_threshold_hz:g} Hz: {result.near_resonances}")
    near = [
        {"k": a.k, "c": list(a.c), "a": a.a, "d": list(a.d), "delta_hz": v / HZ}
        for a, v in gap_report(cascade.upsilon, threshold)
    ]
    payload = {
        "delta_min_hz": result.delta_min / HZ,
        "assignment": {"k": asg.k, "c": list(asg.c), "a": asg.a, "d": list(asg.d)},
        "near_resonances": near,
    }
    _write(Path(cfg.out_dir) / "gap.json", _report_json(cfg, payload))
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    wf = _sequence_waveform(cfg, cfg.sequence)
    system = SpinSystem(cfg.j_hz, cfg.omega0_khz * _freq_scale(cfg))
    trace = propagate(system, wf, _sim_config(cfg, cfg.sim_epsilon))
    rows = ["t_s,sx"]
    rows.extend(f"{t:.9g},{s:.12g}" for t, s in zip(trace.times, trace.sx))
    _write(Path(cfg.out_dir) / f"trace_{cfg.sequence}.csv",
           ("\n".join(rows) + "\n").encode())
    print(f"eta: {efficiency(trace):.6f}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    wf = _sequence_waveform(cfg, cfg.sequence)
    system = SpinSystem(cfg.j_hz, 0.0)
    grid = _offset_grid(cfg)
    table = inhomogeneity_sweep(system, wf, _sim_config(cfg, 1.0),
                                cfg.epsilon, grid, threads=cfg.threads)
    rows = ["omega0_khz,epsilon,eta"]
    for row in table:
        rows.extend(f"{r.omega0 / KHZ:.9g},{r.epsilon:.9g},{r.eta:.12g}" for r in row)
    _write(Path(cfg.out_dir) / f"sweep_{cfg.sequence}.csv",
           ("\n".join(rows) + "\n").encode())
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    duration = _duration_s(cfg)
    dt = cfg.dt_us * 1e-6
    scale = _freq_scale(cfg)
    target = rms_amplitude(_mode_waveform(cfg))
    grid = _offset_grid(cfg)
    system = SpinSystem(cfg.j_hz, 0.0)
    sim = _sim_config(cfg, cfg.sim_epsilon)

    def mode_maker(n):
        def make(w):
            design = ModeDesign.equal_levels(n, w, cfg.c0_khz * scale, cfg.delta)
            return synthesize_mode(design, build_cascade(design), duration, dt)
        return make

    entries = []
    for n in cfg.compare_n:
        if n == cfg.n_frames and not isinstance(cfg.w_khz, list):
            wf = _mode_waveform(cfg)
            entries.append((f"mode_n{n}", wf, rms_amplitude(wf)))
        else:
            _, wf, rms = match_rms(mode_maker(n), target,
                                   (0.3 * target, 1.5 * target),
                                   rel_tol=cfg.rms_tol)
            entries.append((f"mode_n{n}", wf, rms))
    _, wf, rms = match_rms(lambda a: make_cw(a, duration, dt), target,
                           (0.5 * target, 1.5 * target), rel_tol=cfg.rms_tol)
    entries.append(("cw", wf, rms))

    def tppm_make(a):
        tip = (cfg.tppm_tip_us * 1e-6 if cfg.tppm_tip_us is not None
               else math.radians(TPPM_TIP_DEG) / a)
        return make_tppm(a, tip, math.radians(cfg.tppm_phase_deg), duration, dt)

    _, wf, rms = match_rms(tppm_make, target, (0.5 * target, 1.5 * target),
                           rel_tol=cfg.rms_tol)
    entries.append(("tppm", wf, rms))

    results = []
    for label, wf, rms in entries:
        sweep = offset_sweep(system, wf, sim, grid, threads=cfg.threads)
        etas = [r.eta for r in sweep]
        results.append((label, min(etas), sum(etas) / len(etas), rms))
    results.sort(key=lambda r: -r[1])

    print(f"{'sequence':>10s} {'worst_eta':>10s} {'mean_eta':>10s} {'rms_khz':>8s}")
    rows = ["sequence,worst_eta,mean_eta,rms_khz"]
    for label, worst, mean, rms in results:
        print(f"{label:>10s} {worst:10.4f} {mean:10.4f} {rms / KHZ:8.3f}")
        rows.append(f"{label},{worst:.12g},{mean:.12g},{rms / KHZ:.9g}")
    _write(Path(cfg.out_dir) / "compare.csv", ("\n".join(rows) + "\n").encode())
    return 0


COMMANDS = {
    "design": cmd_design,
    "synth": cmd_synth,
    "gap": cmd_gap,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON configuration file")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--format", choices=["csv", "json", "bruker"],
                    help="shape export format")
    sp.add_argument("--threads", type=int, help="parallel workers for sweeps")
    sp.add_argument("--dt-us", type=float, help="sample interval, microseconds")
    sp.add_argument("--duration-ms", type=float, help="window length, milliseconds")
    sp.add_argument("--epsilon", help="comma-separated RF scales for sweeps")
    sp.add_argument("--offsets", help="offset grid min:max:count in kHz")
    sp.add_argument("--sequence", choices=list(SEQUENCES), help="sequence to run")
    sp.add_argument("--print-config", action="store_true",
                    help="echo the fully resolved configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modedec",
        description="Design and validate multiply-modulated decoupling fields.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common_flags(sub.add_parser(name))
    return parser


def _load_config(path: str) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file is not valid JSON: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return RunConfig(**doc)


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.format is not None:
        fmt = "bruker_text" if args.format == "bruker" else args.format
        cfg = replace(cfg, format=fmt)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    if args.dt_us is not None:
        cfg = replace(cfg, dt_us=args.dt_us)
    if args.duration_ms is not None:
        cfg = replace(cfg, duration_ms=args.duration_ms)
    if args.epsilon is not None:
        try:
            eps = [float(v) for v in args.epsilon.split(",") if v]
        except ValueError:
            _fail("epsilon", "expected comma-separated numbers")
        cfg = replace(cfg, epsilon=eps)
    if args.offsets is not None:
        cfg = replace(cfg, offsets=args.offsets)
    if args.sequence is not None:
        cfg = replace(cfg, sequence=args.sequence)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config) if args.config else RunConfig()
        cfg = _apply_flags(cfg, args)
        validate_config(cfg)
        if args.print_config:
            print(json.dumps(asdict(cfg), indent=2, sort_keys=True))
        return COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
