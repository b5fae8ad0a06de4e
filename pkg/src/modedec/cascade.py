"""Rotating-frame cascade for multiply-modulated decoupling fields.

Each modulation level k supplies an effective RF amplitude wbar_k = 2^-k w_k
in the k-th rotating frame.  Demodulating at the center of the spread of
effective precession frequencies halves the residual-shift bound at every
level, so the ratio alpha_k = c_k / wbar_k contracts toward zero (ideal
design) or toward the fixed point 2*delta/(1 - delta) when a margin delta
is reserved against RF amplitude miscalibration.

All frequencies are angular (rad/s).  Unit conversion from kHz happens at
the CLI boundary only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModeDesign:
    """User-facing design parameters of a multiply-modulated field.

    n_frames
        Number of modulations N (0 gives an unmodulated constant field).
    w_levels
        Per-level amplitudes w_0..w_N in rad/s.  The common choice is all
        levels equal; a decreasing ladder moves the robust fixed point
        closer to zero.
    c0
        Half-width of the chemical-shift range [-c0, c0], rad/s.
    delta_design
        Margin absorbed by the robust recursion; 0 for the ideal design.
    """

    n_frames: int
    w_levels: tuple[float, ...]
    c0: float
    delta_design: float = 0.0

    def __post_init__(self):
        if self.n_frames < 0:
            raise ValueError("n_frames must be >= 0")
        if len(self.w_levels) != self.n_frames + 1:
            raise ValueError("w_levels must have n_frames + 1 entries")
        if any(w <= 0.0 for w in self.w_levels):
            raise ValueError("all w_levels must be positive")
        if self.c0 < 0.0:
            raise ValueError("c0 must be >= 0")
        if not 0.0 <= self.delta_design < 1.0:
            raise ValueError("delta_design must lie in [0, 1)")
        object.__setattr__(self, "w_levels", tuple(float(w) for w in self.w_levels))

    @classmethod
    def equal_levels(cls, n_frames: int, w: float, c0: float,
                     delta_design: float = 0.0) -> "ModeDesign":
        """Design with all N+1 amplitude levels equal to w."""
        return cls(n_frames, (float(w),) * (n_frames + 1), c0, delta_design)


@dataclass(frozen=True)
class FrameCascade:
    """Derived per-frame quantities of a design.

    wbar[k] is the effective RF amplitude in frame k, c[k] the residual
    shift bound entering frame k, upsilon[k-1] the modulation frequency
    demodulated on entering frame k, and alpha[k] = c[k] / wbar[k].
    """

    wbar: tuple[float, ...]
    c: tuple[float, ...]
    upsilon: tuple[float, ...]
    alpha: tuple[float, ...]


@dataclass(frozen=True)
class OffsetTrajectory:
    """Frame-by-frame residual shift for one chemical shift omega.

    f[k] is the residual shift entering frame k (f[0] = omega), theta[k-1]
    the tilt of the k-th frame axis, and j_scale = prod cos(theta_k) the
    factor by which the heteronuclear coupling survives the cascade.
    """

    omega: float
    f: tuple[float, ...]
    theta: tuple[float, ...]
    j_scale: float


def build_cascade(design: ModeDesign) -> FrameCascade:
    """Compute the frame cascade (wbar, c, upsilon, alpha) of a design.

    Ideal recursion (delta = 0):

        c_{k+1}      = (sqrt(c_k^2 + wbar_k^2) - wbar_k) / 2
        upsilon_{k+1} = (sqrt(c_k^2 + wbar_k^2) + wbar_k) / 2

    With a margin delta > 0 the spread of effective frequencies runs from
    (1-delta)*wbar_k (zero shift, weakest RF) to
    sqrt(c_k^2 + (1+delta)^2 wbar_k^2) (largest shift, strongest RF), and
    upsilon_{k+1} is placed at its center.
    """
    delta = design.delta_design
    wbar = tuple(w * 2.0 ** -k for k, w in enumerate(design.w_levels))
    c = [float(design.c0)]
    upsilon = []
    for k in range(design.n_frames):
        spread = math.hypot(c[k], (1.0 + delta) * wbar[k])
        c_next = 0.5 * (spread - (1.0 - delta) * wbar[k])
        c.append(c_next)
        # upsilon_{k+1} + c_{k+1} == spread holds exactly in floats
        upsilon.append(spread - c_next)
    alpha = tuple(ck / wk for ck, wk in zip(c, wbar))
    return FrameCascade(wbar, tuple(c), tuple(upsilon), alpha)


def alpha_step(alpha: float, delta: float = 0.0) -> float:
    """One application of the shift-to-field contraction map.

    For delta = 0 this is sqrt(1 + alpha^2) - 1 < alpha (alpha > 0); for
    delta > 0 the map contracts toward alpha_fixed_point(delta) instead of
    toward zero.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    return math.hypot(alpha, 1.0 + delta) - (1.0 - delta)


def alpha_fixed_point(delta: float) -> float:
    """Limiting shift-to-field ratio 2*delta / (1 - delta) of the robust map."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    return 2.0 * delta / (1.0 - delta)


def offset_trajectory(cascade: FrameCascade, omega: float,
                      epsilon: float = 1.0) -> OffsetTrajectory:
    """Track one offset through the frames at realized RF scale epsilon.

    The tilt entering frame k is theta_k = atan2(eps*wbar_{k-1}, f_{k-1});
    the residual shift handed to frame k is

        f_k = sqrt(f_{k-1}^2 + (eps*wbar_{k-1})^2) - upsilon_k

    signed, since upsilon_k sits at the center of the effective-frequency
    spread.  For eps = 1 and the ideal design, |f_k| <= c_k whenever
    |omega| <= c_0.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    f = [float(omega)]
    theta = []
    j_scale = 1.0
    for k in range(len(cascade.upsilon)):
        w_eff = epsilon * cascade.wbar[k]
        tilt = math.atan2(w_eff, f[k])
        theta.append(tilt)
        j_scale *= math.cos(tilt)
        f.append(math.hypot(f[k], w_eff) - cascade.upsilon[k])
    return OffsetTrajectory(float(omega), tuple(f), tuple(theta), j_scale)
