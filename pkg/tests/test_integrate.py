"""Map iteration, reference solving, escape detection and the first integral."""

from fractions import Fraction

import mpmath as mp
import pytest

from canardeq.errors import DivergedError, InvalidInputError
from canardeq.integrate import (
    ManifoldSpec,
    escape_time,
    euler_iterate,
    fold_first_integral,
    fold_integral_drift,
    kahan_iterate,
    reference_solve,
)
from canardeq.vectorfield import SystemName, SystemParams, canonical

TRANS = canonical(SystemName.TRANSCRITICAL)
FOLD = canonical(SystemName.FOLD_SLOW)


def test_euler_single_step_exact():
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    traj = euler_iterate(TRANS, (Fraction(-2), Fraction(-1)), params, 1)
    _, x1, y1 = traj.samples[-1]
    # x + h(x^2 - y^2 + eps) = -2 + (1/10)(4 - 1 + 1/4) = -67/40; y + h*eps
    with mp.workdps(50):
        assert abs(x1 - mp.mpf(-67) / 40) < mp.mpf("1e-40")
        assert abs(y1 - mp.mpf(-39) / 40) < mp.mpf("1e-40")


def test_euler_precision_floor():
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    with pytest.raises(InvalidInputError):
        euler_iterate(TRANS, (0.0, 0.0), params, 1, digits=8)


def test_euler_fold_requires_h_below_eps():
    params = SystemParams(eps=Fraction(1, 100), h=Fraction(1, 10))
    with pytest.raises(InvalidInputError):
        euler_iterate(FOLD, (0.0, 0.0), params, 1)


def test_euler_divergence_carries_partial_trajectory():
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 2))
    with pytest.raises(DivergedError) as exc:
        euler_iterate(TRANS, (100.0, 0.0), params, 50)
    err = exc.value
    assert err.trajectory is not None
    assert 1 <= len(err.trajectory) <= 50
    assert err.step_index >= 1


def test_kahan_single_step_matches_hand_solve():
    """One Kahan step solves (Id - h/2 Df) w = f; check against mpmath lu."""
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    x0, y0 = mp.mpf(-2), mp.mpf(-1)
    traj = kahan_iterate(TRANS, (Fraction(-2), Fraction(-1)), params, 1,
                         digits=30)
    _, x1, y1 = traj.samples[-1]
    with mp.workdps(30):
        eps, h = mp.mpf(1) / 4, mp.mpf(1) / 10
        f = mp.matrix([x0**2 - y0**2 + eps, eps])
        jac = mp.matrix([[2 * x0, -2 * y0], [0, 0]])
        w = mp.lu_solve(mp.eye(2) - (h / 2) * jac, f)
        assert abs(x1 - (x0 + h * w[0])) < mp.mpf("1e-25")
        assert abs(y1 - (y0 + h * w[1])) < mp.mpf("1e-25")


def test_reference_solve_transcritical_slow_component_exact():
    """y' = eps integrates to a straight line; checks solver plumbing."""
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    traj = reference_solve(TRANS, (-2.0, -2.0), params, (0.0, 4.0),
                           t_eval=[0.0, 2.0, 4.0])
    _, x, y = traj.arrays()
    assert abs(y[1] - (-2.0 + 0.25 * 2.0)) < 1e-9
    assert abs(y[2] - (-2.0 + 0.25 * 4.0)) < 1e-9


def test_reference_solve_stop_radius_event():
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    traj = reference_solve(TRANS, (1.0, 0.0), params, (0.0, 10.0),
                           stop_radius=5.0)
    assert traj.meta["terminated_early"]
    t_end, x_end, y_end = traj.samples[-1]
    assert t_end < 10.0
    assert (x_end**2 + y_end**2) ** 0.5 <= 5.0 + 1e-6


def test_escape_time_requires_arming():
    """A trajectory that never approaches the manifold yields no exit."""
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    line = ManifoldSpec.transcritical_line()
    far = euler_iterate(TRANS, (Fraction(-3), Fraction(3)), params, 3,
                        digits=20)
    assert escape_time(far, line, threshold=0.1) is None
    with pytest.raises(InvalidInputError):
        escape_time(far, line, threshold=0.0)


def test_escape_time_detects_departure():
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    line = ManifoldSpec.transcritical_line()
    traj = euler_iterate(TRANS, (Fraction(-2), Fraction(-2) + Fraction(1, 200)),
                         params, 250, digits=30)
    hit = escape_time(traj, line, threshold=0.1)
    assert hit is not None
    t_exit, idx = hit
    assert 0 < t_exit <= 25.0
    assert float(traj.samples[idx][0]) == t_exit


def test_reference_solve_linear_decay_matches_exponential():
    """z' = -z from (1, 1): endpoint must hit (1/e, 1/e) to solver accuracy."""
    import math

    from canardeq.poly import RationalPoly

    from canardeq.vectorfield import PolyVectorField, TimeScale

    decay = PolyVectorField(fx=-RationalPoly.var("x"),
                            fy=-RationalPoly.var("y"),
                            time_scale=TimeScale.FAST)
    params = SystemParams(eps=1, h=Fraction(1, 10))
    traj = reference_solve(decay, (1.0, 1.0), params, (0.0, 1.0),
                           t_eval=[1.0])
    _, x, y = traj.samples[-1]
    assert abs(x - math.exp(-1)) < 1e-10
    assert abs(y - math.exp(-1)) < 1e-10


def test_euler_preserves_transcritical_line_exactly():
    """Starting on y = x the map performs identical arithmetic in x and y."""
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    traj = euler_iterate(TRANS, (Fraction(-2), Fraction(-2)), params, 200,
                         digits=30)
    assert all(x == y for _, x, y in traj.samples)


def test_fold_exit_time_stable_under_extra_precision():
    """Raising 50 -> 60 digits moves the fold exit by less than one step."""
    params = SystemParams(eps=Fraction(1, 10), h=Fraction(1, 100))
    z0 = (Fraction(-1, 2), Fraction(1, 5))
    manifold = ManifoldSpec.fold_slow_manifold()
    exits = []
    for digits in (50, 60):
        try:
            traj = euler_iterate(FOLD, z0, params, 260, digits)
        except DivergedError as err:
            traj = err.trajectory
        exits.append(escape_time(traj, manifold, 0.1)[0])
    assert abs(exits[0] - exits[1]) < float(params.h)


def test_fold_first_integral_conserved_by_reference_flow():
    params = SystemParams(eps=Fraction(1, 10), h=Fraction(1, 100))
    z0 = (-0.5, 0.2)  # on S_eps: y = x^2 - eps/2
    traj = reference_solve(FOLD, z0, params, (0.0, 1.0),
                           t_eval=[0.1 * i for i in range(11)])
    assert fold_integral_drift(traj) < 1e-9


def test_fold_first_integral_invariant_values():
    # on the parabola y = x^2 - eps/2 the second factor is identically 0
    assert abs(fold_first_integral(0.3, 0.3**2 - 0.05, 0.1)) < 1e-18
    assert fold_first_integral(0.0, 0.0, 0.1) > 0
