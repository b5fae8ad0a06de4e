"""Minimum-gap certification for the oscillating terms neglected by the cascade.

The neglected oscillating Hamiltonians carry tones at twice the modulation
frequencies, 2*upsilon_k, for every frame k whose oscillating part feeds the
residual sum (k = 1 .. N-1; the last frame contributes no carrier).  A
residual coupling appears if such a tone lands on a tone of the modulated
coupling, so the certificate minimizes

    |Delta| = |sum_{j<k} c_j ups_j + a_k ups_k + sum_{j>k} d_j ups_j|

over the leading-order combinations: one carrier coefficient a_k in {+-2}
and at most one decorating tone, either c_j in {+-1} on a single lower
frame or d_j in {+-1, +-2, +-3} on a single higher frame.  Multi-tone
combinations are higher order in the per-frame small parameters and are
not counted against the certificate.  |Delta| > 0 certifies that no
neglected term becomes secular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

D_COEFFS = (-3, -2, -1, 1, 2, 3)
C_COEFFS = (-1, 1)
A_COEFFS = (-2, 2)


@dataclass(frozen=True)
class GapAssignment:
    """Coefficient tuple achieving a gap value.

    c holds the coefficients on upsilon_1..upsilon_{k-1}, a the carrier
    coefficient on upsilon_k, d the coefficients on upsilon_{k+1}..upsilon_N.
    """

    k: int
    c: tuple[int, ...]
    a: int
    d: tuple[int, ...]


@dataclass(frozen=True)
class GapResult:
    delta_min: float
    assignment: GapAssignment
    near_resonances: int


def assignment_value(assignment: GapAssignment, upsilon: Sequence[float]) -> float:
    """Signed Delta of an assignment against the given frequency list."""
    k = assignment.k
    total = 0.0
    for j, cj in enumerate(assignment.c):
        total += cj * upsilon[j]
    total += assignment.a * upsilon[k - 1]
    for j, dj in enumerate(assignment.d):
        total += dj * upsilon[k + j]
    return total


def _validate(upsilon: Sequence[float]) -> tuple[float, ...]:
    ups = tuple(float(u) for u in upsilon)
    if not ups:
        raise ValueError("upsilon list must be non-empty")
    if any(u <= 0.0 for u in ups):
        raise ValueError("upsilon values must be positive")
    if any(a <= b for a, b in zip(ups, ups[1:])):
        raise ValueError("upsilon list must be strictly decreasing")
    return ups


def _assignments(n: int) -> Iterator[GapAssignment]:
    """Enumerate the operative set in deterministic (k, lexicographic) order."""
    carriers = range(1, n) if n > 1 else range(1, 2)
    for k in carriers:
        zeros_c = (0,) * (k - 1)
        zeros_d = (0,) * (n - k)
        for pos in range(k - 1):
            for cj in C_COEFFS:
                c = zeros_c[:pos] + (cj,) + zeros_c[pos + 1:]
                for a in A_COEFFS:
                    yield GapAssignment(k, c, a, zeros_d)
        for a in A_COEFFS:
            yield GapAssignment(k, zeros_c, a, zeros_d)
        for pos in range(n - k):
            for dj in D_COEFFS:
                d = zeros_d[:pos] + (dj,) + zeros_d[pos + 1:]
                for a in A_COEFFS:
                    yield GapAssignment(k, zeros_c, a, d)


def _key(assignment: GapAssignment) -> tuple:
    return (assignment.k, assignment.c, (assignment.a,), assignment.d)


def min_gap(upsilon: Sequence[float], near_threshold: float = 0.0) -> GapResult:
    """Exhaustively minimize |Delta| over the operative coefficient set.

    Returns the smallest |Delta|, the assignment achieving it (ties broken
    by smallest k, then lexicographically smallest coefficient tuple), and
    the number of assignments with |Delta| below near_threshold.
    """
    ups = _validate(upsilon)
    best_val = None
    best = None
    near = 0
    for asg in _assignments(len(ups)):
        val = abs(assignment_value(asg, ups))
        if val < near_threshold:
            near += 1
        if best_val is None or val < best_val or (
                val == best_val and _key(asg) < _key(best)):
            best_val = val
            best = asg
    return GapResult(best_val, best, near)


def gap_report(upsilon: Sequence[float],
               threshold: float) -> list[tuple[GapAssignment, float]]:
    """All assignments with |Delta| < threshold, in enumeration order."""
    ups = _validate(upsilon)
    out = []
    for asg in _assignments(len(ups)):
        val = assignment_value(asg, ups)
        if abs(val) < threshold:
            out.append((asg, val))
    return out
