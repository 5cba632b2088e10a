import math

import numpy as np
import pytest

from helpers import semigroup_max_rel_err

from hetcycle._integrate import StepControl
from hetcycle.errors import BackwardBlowup, StepFailure
from hetcycle.flows import (
    from_polar,
    left_flow,
    numeric_flow,
    radial_blowup_time,
    right_flow,
    to_polar,
)

TIGHT = StepControl(rtol=1e-12, atol=1e-14)

# Oracle values frozen from the adaptive Runge-Kutta integration of the raw
# fields at rtol 1e-13 (see numeric_flow); the closed forms must match.
LEFT_ORACLE_POINT = (-1.2906211912098229, 0.18397358922532037, 0.4481689070338068)
RIGHT_ORACLE_POINT = (2.36859278054147, -0.12298893951994293, 2.0)


def test_left_flow_cycle_invariance(ex1):
    sr = math.sqrt(ex1.rho)
    for t in (-3.0, -0.5, 0.0, 0.7, 12.0):
        x = left_flow((sr, 0.0, 0.0), t, ex1)
        assert math.hypot(x[0], x[1]) == pytest.approx(sr, rel=1e-12)
        assert x[2] == 0.0


def test_left_flow_attracts_to_cycle(ex1):
    for x0 in ((0.3, 0.1, 0.0), (2.0, -1.0, 0.0)):
        x = left_flow(x0, 50.0, ex1)
        assert math.hypot(x[0], x[1]) == pytest.approx(math.sqrt(ex1.rho),
                                                       abs=1e-12)
        assert x[2] == 0.0


def test_left_flow_matches_frozen_oracle(ex1):
    x = left_flow((2.0, 0.0, 0.1), 0.3, ex1)
    np.testing.assert_allclose(x, LEFT_ORACLE_POINT, atol=1e-8)


def test_left_flow_backward_blowup_boundary():
    p = _plain_params()
    t_blow = radial_blowup_time(4.0, p.rho)  # start (2, 0, 0)
    assert t_blow == pytest.approx(math.log(0.75) / 2.0)
    with pytest.raises(BackwardBlowup):
        left_flow((2.0, 0.0, 0.0), t_blow, p)
    with pytest.raises(BackwardBlowup):
        left_flow((2.0, 0.0, 0.0), t_blow - 1e-9, p)
    left_flow((2.0, 0.0, 0.0), t_blow + 1e-3, p)  # just inside: fine


def _plain_params():
    from hetcycle.model import SystemParams

    return SystemParams(rho=1, omega=10, mu=5, b11=-2, b12=1, b21=0, b22=-1,
                        lam=2, q1=1.2, q2=0, q3=0.2, d=1.2)


def test_right_flow_equilibrium(ex3):
    for t in (-2.0, 0.0, 1.5):
        np.testing.assert_allclose(right_flow(ex3.q, t, ex3), ex3.q,
                                   atol=1e-14)


def test_right_flow_stable_plane_invariance(ex3):
    x0 = (0.0, 1.0, ex3.q3)
    for t in (0.3, 2.0, 17.0):
        assert right_flow(x0, t, ex3)[2] == pytest.approx(ex3.q3, abs=1e-13)


def test_right_flow_unstable_line_invariance(ex3):
    x0 = (ex3.q1, ex3.q2, ex3.q3 + 0.4)
    for t in (-3.0, -0.5, 0.8):
        x = right_flow(x0, t, ex3)
        assert x[0] == pytest.approx(ex3.q1, abs=1e-13)
        assert x[1] == pytest.approx(ex3.q2, abs=1e-13)


def test_right_flow_matches_frozen_oracle(ex3):
    x = right_flow((0.0, 1.0, 2.0), 0.5, ex3)
    np.testing.assert_allclose(x, RIGHT_ORACLE_POINT, atol=1e-8)


def test_right_flow_repeated_eigenvalue_branch():
    from hetcycle.model import SystemParams

    p = SystemParams(rho=1, omega=1, mu=1, b11=-1.0, b12=1.0, b21=0.0,
                     b22=-1.0, lam=1, q1=1.2, q2=0, q3=0.2, d=1.2)
    x = right_flow((0.5, 0.5, 0.2), 0.7, p)
    n = numeric_flow((0.5, 0.5, 0.2), 0.7, "right", p, TIGHT)
    np.testing.assert_allclose(x, n, atol=1e-9)


def test_numeric_flow_identity_at_zero(ex1):
    x0 = np.array([0.4, -0.2, 0.7])
    np.testing.assert_array_equal(numeric_flow(x0, 0.0, "left", ex1), x0)


def test_numeric_flow_agrees_left(ex1):
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 100:
        r = rng.uniform(0.2, 1.4)
        th = rng.uniform(0, 2 * math.pi)
        x0 = (r * math.cos(th), r * math.sin(th), rng.uniform(-0.5, 0.5))
        t = rng.uniform(-1.0, 5.0)
        try:
            ref = left_flow(x0, t, ex1)
        except BackwardBlowup:
            continue
        if np.max(np.abs(ref)) > 1e3:
            continue
        got = numeric_flow(x0, t, "left", ex1)
        assert np.max(np.abs(got - ref)) <= 1e-6
        checked += 1


def test_numeric_flow_agrees_right(ex2):
    rng = np.random.default_rng(8)
    for _ in range(100):
        x0 = ex2.q + rng.uniform(-1.5, 1.5, size=3)
        t = rng.uniform(-1.0, 3.0)
        ref = right_flow(x0, t, ex2)
        if np.max(np.abs(ref)) > 1e3:
            continue
        got = numeric_flow(x0, t, "right", ex2)
        assert np.max(np.abs(got - ref)) <= 1e-6


def test_numeric_flow_stepfailure_past_blowup():
    p = _plain_params()
    with pytest.raises(StepFailure):
        numeric_flow((2.0, 0.0, 0.0), -0.2, "left", p)


def test_semigroup_property(ex1, ex3):
    assert semigroup_max_rel_err(ex1, "left", 200, seed=21) <= 1e-9
    assert semigroup_max_rel_err(ex3, "right", 200, seed=22) <= 1e-9


def test_left_flow_preserves_plane_and_vertical_sign(ex1):
    rng = np.random.default_rng(5)
    for _ in range(50):
        x0 = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
        t = rng.uniform(0.0, 2.0)
        x = left_flow(x0, t, ex1)
        if x0[2] == 0:
            assert x[2] == 0.0
        else:
            assert math.copysign(1, x[2]) == math.copysign(1, x0[2])


def test_left_flow_radial_monotonicity(ex1):
    ts = np.linspace(0.0, 2.0, 40)
    inside = [math.hypot(*left_flow((0.3, 0.0, 0.0), t, ex1)[:2]) for t in ts]
    outside = [math.hypot(*left_flow((1.7, 0.0, 0.0), t, ex1)[:2]) for t in ts]
    assert all(b > a for a, b in zip(inside, inside[1:]))
    assert all(b < a for a, b in zip(outside, outside[1:]))


def test_polar_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x1, x2 = rng.uniform(-3, 3, size=2)
        if math.hypot(x1, x2) < 1e-6:
            continue
        y1, y2 = from_polar(to_polar(x1, x2))
        assert y1 == pytest.approx(x1, rel=1e-12, abs=1e-12)
        assert y2 == pytest.approx(x2, rel=1e-12, abs=1e-12)
