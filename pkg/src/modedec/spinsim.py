"""Two-spin (IS) propagation under a sampled RF field.

The Hamiltonian is H(t) = omega0*Iz + 2*pi*J*Iz*Sz + eps*(wx(t)*Ix + wy(t)*Iy)
with the observed spin S on resonance.  Sz commutes with H, so the evolution
factorizes into two spin-I unitaries U+- driven by effective fields
(wx, wy, omega0 +- pi*J), and the observed coherence is

    Sx(t) = Re Tr(U+ U-^dag) / 2.

The production engine propagates U+- as unit quaternions with the exact
axis-angle rotation per sample (no series truncation), compiled with numba.
A deliberately independent 4x4 engine diagonalizes the full tensor-product
Hamiltonian per step and serves as the correctness oracle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from numba import njit

from .waveform import Waveform


class Engine(Enum):
    FACTORIZED_2X2 = "factorized_2x2"
    FULL_4X4 = "full_4x4"


@dataclass(frozen=True)
class SpinSystem:
    """Scalar coupling J (Hz) and chemical shift of the irradiated spin (rad/s)."""

    j_coupling: float
    omega0: float = 0.0


@dataclass(frozen=True)
class SimConfig:
    duration: float
    dt: float
    epsilon: float = 1.0
    engine: Engine = Engine.FACTORIZED_2X2
    record_dt: float = 1e-5

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.duration < self.dt:
            raise ValueError("duration must be at least one step")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.record_dt < self.dt:
            raise ValueError("record_dt must be >= dt")
        if not isinstance(self.engine, Engine):
            object.__setattr__(self, "engine", Engine(self.engine))


@dataclass(frozen=True)
class SimTrace:
    """Observed coherence Sx over time; Sx(0) = 1 exactly.

    unitarity_defect is the largest ||det U| - 1| seen at the recorded
    points; the propagators are never re-normalized.
    """

    times: np.ndarray
    sx: np.ndarray
    unitarity_defect: float = 0.0


@dataclass(frozen=True)
class EfficiencyResult:
    omega0: float
    epsilon: float
    eta: float


@njit(cache=True, nogil=True)
def _sx_factorized(wx, wy, n_steps, dt, az_p, az_m, eps, rec, sx_out):
    p0, p1, p2, p3 = 1.0, 0.0, 0.0, 0.0
    m0, m1, m2, m3 = 1.0, 0.0, 0.0, 0.0
    defect = 0.0
    r = 0
    if rec[0] == 0:
        sx_out[0] = 1.0
        r = 1
    for i in range(n_steps):
        ax = eps * wx[i]
        ay = eps * wy[i]

        norm = math.sqrt(ax * ax + ay * ay + az_p * az_p)
        half = 0.5 * dt * norm
        b0 = math.cos(half)
        s = math.sin(half) / norm if norm > 0.0 else 0.0
        b1 = s * ax
        b2 = s * ay
        b3 = s * az_p
        t0 = b0 * p0 - b1 * p1 - b2 * p2 - b3 * p3
        t1 = b0 * p1 + p0 * b1 + b2 * p3 - b3 * p2
        t2 = b0 * p2 + p0 * b2 + b3 * p1 - b1 * p3
        t3 = b0 * p3 + p0 * b3 + b1 * p2 - b2 * p1
        p0, p1, p2, p3 = t0, t1, t2, t3

        norm = math.sqrt(ax * ax + ay * ay + az_m * az_m)
        half = 0.5 * dt * norm
        b0 = math.cos(half)
        s = math.sin(half) / norm if norm > 0.0 else 0.0
        b1 = s * ax
        b2 = s * ay
        b3 = s * az_m
        t0 = b0 * m0 - b1 * m1 - b2 * m2 - b3 * m3
        t1 = b0 * m1 + m0 * b1 + b2 * m3 - b3 * m2
        t2 = b0 * m2 + m0 * b2 + b3 * m1 - b1 * m3
        t3 = b0 * m3 + m0 * b3 + b1 * m2 - b2 * m1
        m0, m1, m2, m3 = t0, t1, t2, t3

        if r < rec.size and i + 1 == rec[r]:
            sx_out[r] = p0 * m0 + p1 * m1 + p2 * m2 + p3 * m3
            dp = abs(p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3 - 1.0)
            dm = abs(m0 * m0 + m1 * m1 + m2 * m2 + m3 * m3 - 1.0)
            if dp > defect:
                defect = dp
            if dm > defect:
                defect = dm
            r += 1
    return defect


def _pauli_half():
    sx = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
    sy = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
    sz = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
    return sx, sy, sz


def _sx_full(wx, wy, n_steps, dt, omega0, two_pi_j, eps, rec):
    sx2, sy2, sz2 = _pauli_half()
    eye2 = np.eye(2, dtype=complex)
    ix = np.kron(sx2, eye2)
    iy = np.kron(sy2, eye2)
    iz = np.kron(sz2, eye2)
    izsz = np.kron(sz2, sz2)
    sx_op = np.kron(eye2, sx2)  # Tr(sx_op @ sx_op) == 1

    h_static = omega0 * iz + two_pi_j * izsz
    u = np.eye(4, dtype=complex)
    out = np.empty(rec.size)
    defect = 0.0
    r = 0
    if rec[0] == 0:
        out[0] = 1.0
        r = 1
    for i in range(n_steps):
        h = h_static + (eps * wx[i]) * ix + (eps * wy[i]) * iy
        evals, vecs = np.linalg.eigh(h)
        step = (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T
        u = step @ u
        if r < rec.size and i + 1 == rec[r]:
            rho = u @ sx_op @ u.conj().T
            out[r] = float(np.real(np.trace(rho @ sx_op)))
            defect = max(defect, abs(abs(np.linalg.det(u)) - 1.0))
            r += 1
    return out, defect


def _record_indices(n_steps: int, stride: int) -> np.ndarray:
    rec = np.arange(0, n_steps + 1, stride, dtype=np.int64)
    if rec[-1] != n_steps:
        rec = np.append(rec, n_steps)
    return rec


def propagate(system: SpinSystem, waveform: Waveform,
              config: SimConfig) -> SimTrace:
    """Piecewise-constant propagation of Sx under shift + coupling + RF."""
    if not math.isclose(waveform.dt, config.dt, rel_tol=1e-12):
        raise ValueError(
            f"config dt {config.dt:g} does not match waveform dt {waveform.dt:g}")
    n_steps = int(round(config.duration / config.dt))
    if n_steps < 1:
        raise ValueError("duration shorter than one step")
    if n_steps > waveform.n_samples:
        raise ValueError("waveform shorter than the requested duration")
    stride = max(1, int(round(config.record_dt / config.dt)))
    rec = _record_indices(n_steps, stride)
    times = rec * config.dt

    pij = math.pi * system.j_coupling
    if config.engine is Engine.FACTORIZED_2X2:
        sx = np.empty(rec.size)
        defect = _sx_factorized(waveform.wx, waveform.wy, n_steps, config.dt,
                                system.omega0 + pij, system.omega0 - pij,
                                config.epsilon, rec, sx)
    else:
        sx, defect = _sx_full(waveform.wx, waveform.wy, n_steps, config.dt,
                              system.omega0, 2.0 * pij, config.epsilon, rec)
    return SimTrace(times, sx, float(defect))


def efficiency(trace: SimTrace) -> float:
    """Time-averaged coherence (1/T) * integral of Sx, trapezoidal rule."""
    if trace.times.size == 0:
        raise ValueError("empty trace")
    if trace.times.size == 1:
        return float(trace.sx[0])
    span = trace.times[-1] - trace.times[0]
    return float(np.trapezoid(trace.sx, trace.times) / span)


def _eta_point(system: SpinSystem, waveform: Waveform, config: SimConfig,
               omega0: float) -> EfficiencyResult:
    trace = propagate(replace(system, omega0=float(omega0)), waveform, config)
    return EfficiencyResult(float(omega0), config.epsilon, efficiency(trace))


def offset_sweep(system: SpinSystem, waveform: Waveform, config: SimConfig,
                 omega_grid, threads: int = 1) -> list[EfficiencyResult]:
    """Efficiency at each offset of the grid; output ordered by grid index."""
    omegas = [float(w) for w in omega_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(
                lambda w: _eta_point(system, waveform, config, w), omegas))
    return [_eta_point(system, waveform, config, w) for w in omegas]


def inhomogeneity_sweep(system: SpinSystem, waveform: Waveform,
                        config: SimConfig, epsilons, omega_grid,
                        threads: int = 1) -> list[list[EfficiencyResult]]:
    """One offset sweep per RF scale; rows follow the epsilon order."""
    return [
        offset_sweep(system, waveform, replace(config, epsilon=float(eps)),
                     omega_grid, threads=threads)
        for eps in epsilons
    ]
