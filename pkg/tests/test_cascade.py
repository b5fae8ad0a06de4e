import math

import numpy as np
import pytest

import modedec as m

KHZ = 2e3 * math.pi

# coarsely rounded reference values, kHz
QUOTED_C_KHZ = (9.1, 3.5, 1.23, 0.38, 0.09, 0.01)
# exact recursion output, frozen from a hand iteration of the frame relations
EXACT_C_KHZ = (9.103152, 3.507106, 1.253361, 0.394787, 0.097920, 0.014566)
EXACT_UPS_KHZ = (13.903152, 5.907106, 2.453361, 0.994787, 0.397920, 0.164566)


def test_reference_design_c_values(reference_cascade):
    for ck, ref, exact in zip(reference_cascade.c[1:], QUOTED_C_KHZ, EXACT_C_KHZ):
        assert abs(ck / KHZ - ref) < 0.03
        assert ck / KHZ == pytest.approx(exact, abs=5e-6)


def test_reference_design_upsilon_values(reference_cascade):
    for uk, exact in zip(reference_cascade.upsilon, EXACT_UPS_KHZ):
        assert uk / KHZ == pytest.approx(exact, abs=5e-6)


def test_reference_design_alpha_endpoints(reference_cascade):
    assert reference_cascade.alpha[0] == pytest.approx(22.5 / 4.8)
    # quoted as 0.17 in rounded form; the recursion itself gives ~0.194
    assert reference_cascade.alpha[6] == pytest.approx(0.194213, abs=1e-5)


def test_zero_shift_collapse():
    design = m.ModeDesign.equal_levels(4, 3.0, 0.0)
    cascade = m.build_cascade(design)
    assert all(ck == 0.0 for ck in cascade.c)
    for k, ups in enumerate(cascade.upsilon):
        assert ups == pytest.approx(cascade.wbar[k], rel=1e-15)


def test_spread_split_identity(reference_cascade):
    # upsilon_{k+1} + c_{k+1} recovers the spread radius exactly
    for k in range(6):
        spread = math.hypot(reference_cascade.c[k], reference_cascade.wbar[k])
        assert reference_cascade.upsilon[k] + reference_cascade.c[k + 1] == spread


def test_wbar_halving():
    design = m.ModeDesign(3, (4.0, 3.0, 2.0, 1.0), 10.0)
    cascade = m.build_cascade(design)
    assert cascade.wbar == (4.0, 1.5, 0.5, 0.125)


@pytest.mark.parametrize("kwargs", [
    dict(n_frames=-1, w_levels=(1.0,), c0=1.0),
    dict(n_frames=2, w_levels=(1.0, 1.0), c0=1.0),
    dict(n_frames=1, w_levels=(1.0, 0.0), c0=1.0),
    dict(n_frames=1, w_levels=(1.0, -2.0), c0=1.0),
    dict(n_frames=1, w_levels=(1.0, 1.0), c0=-0.5),
    dict(n_frames=1, w_levels=(1.0, 1.0), c0=1.0, delta_design=1.0),
    dict(n_frames=1, w_levels=(1.0, 1.0), c0=1.0, delta_design=-0.1),
])
def test_design_validation(kwargs):
    with pytest.raises(ValueError):
        m.ModeDesign(**kwargs)


def test_alpha_fixed_point_values():
    assert m.alpha_fixed_point(0.1) == pytest.approx(0.2222, abs=1e-4)
    assert m.alpha_fixed_point(0.0) == 0.0
    assert m.alpha_fixed_point(0.2) == pytest.approx(0.5, rel=1e-12)


@pytest.mark.parametrize("delta", [1.0, 1.5, -0.01])
def test_alpha_fixed_point_rejects_bad_delta(delta):
    with pytest.raises(ValueError):
        m.alpha_fixed_point(delta)
    with pytest.raises(ValueError):
        m.alpha_step(1.0, delta)


def test_alpha_map_monotone_contraction():
    rng = np.random.default_rng(2024)
    for alpha in rng.uniform(1e-6, 100.0, size=60):
        nxt = m.alpha_step(alpha)
        assert 0.0 < nxt < alpha


def test_alpha_map_quadratic_small_limit():
    rng = np.random.default_rng(11)
    for alpha in rng.uniform(1e-5, 1e-2, size=40):
        ratio = m.alpha_step(alpha) / alpha
        assert abs(ratio - alpha / 2.0) < 1e-2 * alpha / 2.0


def test_alpha_map_large_limit():
    rng = np.random.default_rng(12)
    for alpha in rng.uniform(1e2, 1e5, size=40):
        assert abs(m.alpha_step(alpha) - (alpha - 1.0)) < 1e-2


def test_robust_map_converges_to_fixed_point():
    rng = np.random.default_rng(13)
    for _ in range(25):
        delta = rng.uniform(0.01, 0.5)
        target = m.alpha_fixed_point(delta)
        alpha = target + rng.uniform(0.1, 50.0)
        prev = alpha
        for _ in range(200):
            alpha = m.alpha_step(alpha, delta)
            assert alpha <= prev + 1e-15
            prev = alpha
        assert abs(alpha - target) < 1e-6


def test_alpha_sequence_decreasing_in_cascade(reference_cascade):
    diffs = np.diff(reference_cascade.alpha)
    assert np.all(diffs < 0.0)


def test_frequency_ratio_bounds(reference_cascade):
    ups = reference_cascade.upsilon
    for a, b in zip(ups, ups[1:]):
        assert 2.0 < a / b < 3.0
    for k in range(1, 7):
        assert 2.0 * ups[k - 1] / reference_cascade.wbar[k] > 4.0


def test_frequency_bounds_random_equal_level_designs():
    # alpha_0 >= 2 keeps the strict inequalities resolvable in floats out
    # to six frames (alpha contracts quadratically toward zero)
    rng = np.random.default_rng(5)
    for _ in range(20):
        w = rng.uniform(0.5, 20.0)
        design = m.ModeDesign.equal_levels(
            int(rng.integers(2, 7)), w, w * rng.uniform(2.0, 50.0))
        cascade = m.build_cascade(design)
        ups = cascade.upsilon
        assert all(a / b > 2.0 for a, b in zip(ups, ups[1:]))
        assert all(2.0 * ups[k - 1] / cascade.wbar[k] > 4.0
                   for k in range(1, design.n_frames + 1))


def test_on_resonance_trajectory(reference_cascade):
    traj = m.offset_trajectory(reference_cascade, 0.0)
    assert traj.theta[0] == pytest.approx(math.pi / 2, rel=1e-15)
    assert abs(traj.j_scale) < 1e-12


def test_boundary_offset_tracks_bound(reference_cascade):
    traj = m.offset_trajectory(reference_cascade, 22.5 * KHZ)
    for fk, ck in zip(traj.f[1:], reference_cascade.c[1:]):
        assert abs(fk) == pytest.approx(ck, rel=1e-12)


def test_interior_offset_stays_bounded(reference_cascade):
    traj = m.offset_trajectory(reference_cascade, 2.0 * math.pi * 6250.0)
    assert abs(traj.f[6]) <= reference_cascade.c[6]
    assert reference_cascade.c[6] <= 2.0 * math.pi * 15.0  # ~0.015 kHz


def test_bound_holds_on_offset_grid(reference_cascade):
    slack = 1e-9 * reference_cascade.c[0]
    for omega in np.linspace(-22.5 * KHZ, 22.5 * KHZ, 201):
        traj = m.offset_trajectory(reference_cascade, omega)
        for fk, ck in zip(traj.f[1:], reference_cascade.c[1:]):
            assert abs(fk) <= ck + slack


def test_j_scale_range_and_shrinks_with_more_frames():
    for omega_khz in (3.3, 6.25, 11.0, 18.0):
        previous = None
        for n in (2, 4, 6):
            design = m.ModeDesign.equal_levels(n, 4.8 * KHZ, 22.5 * KHZ)
            traj = m.offset_trajectory(m.build_cascade(design), omega_khz * KHZ)
            assert -1.0 <= traj.j_scale <= 1.0
            if previous is not None:
                assert abs(traj.j_scale) < previous
            previous = abs(traj.j_scale)


def test_trajectory_f_can_go_negative(reference_cascade):
    traj = m.offset_trajectory(reference_cascade, 0.0)
    assert traj.f[1] == pytest.approx(-reference_cascade.c[1], rel=1e-12)


def test_trajectory_rejects_bad_epsilon(reference_cascade):
    with pytest.raises(ValueError):
        m.offset_trajectory(reference_cascade, 0.0, epsilon=0.0)


def test_robust_cascade_matches_robust_alpha_map():
    design = m.ModeDesign.equal_levels(5, 2.0, 9.0, delta_design=0.1)
    cascade = m.build_cascade(design)
    alpha = cascade.alpha[0]
    for k in range(1, 6):
        alpha = m.alpha_step(alpha, 0.1)
        assert cascade.alpha[k] == pytest.approx(alpha, rel=1e-12)
