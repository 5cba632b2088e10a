"""Acceptance criteria.

Each test pins one acceptance criterion at its stated tolerance and time
budget and prints a single PASS line on success (FAIL surfaces as the
pytest failure itself).  Run with ``pytest tests/test_acceptance.py -s``
to see the lines.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from helpers import (
    brute_affine_stays_above,
    brute_linear_stays,
    brute_vdp_stays,
    random_real_stable_2x2,
    semigroup_max_rel_err,
)

from hetcycle.model import Interval3D, derive_geometry, interval_contains
from hetcycle.hybrid import crosscheck_closed_forms
from hetcycle.orbits import assemble_cycle
from hetcycle.planar import (
    PlanarLinearSystem,
    analyze_vdp_line,
    focus_stay_window,
    forward_stay_set,
    node_stay_check,
)
from hetcycle.verifier import certify


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is None:
            assert elapsed < self.seconds, \
                f"{self.name}: runtime {elapsed:.2f}s exceeds {self.seconds}s"
            print(f"ACCEPTANCE {self.name}: PASS ({elapsed:.2f}s)")
        else:
            print(f"ACCEPTANCE {self.name}: FAIL ({elapsed:.2f}s)")
        return False


def test_criterion_1_example1_reproduction(ex1):
    with Budget("1 example-1 reproduction", 1.0):
        verdict = certify(ex1)
        assert verdict.cycle_count == 1
        geo = derive_geometry(ex1)
        assert geo.sigma_plus == pytest.approx(-0.05314, abs=1e-4)
        assert verdict.v_star[1] == pytest.approx(2.363, abs=5e-3)
        hp = {e.name: e for e in verdict.evidence}["halfplane_p0"]
        assert hp.value == pytest.approx(0.4, abs=1e-12)


def test_criterion_2_example2_reproduction(ex2):
    with Budget("2 example-2 reproduction", 1.0):
        verdict = certify(ex2)
        assert verdict.cycle_count == 1
        geo = derive_geometry(ex2)
        assert geo.sigma_plus == pytest.approx(-0.9045, abs=1e-3)
        assert geo.sigma_minus == pytest.approx(-2.4121, abs=1e-3)
        assert verdict.v_star[1] == pytest.approx(-4.4162, abs=5e-3)
        x_minus, x_plus = verdict.window
        assert x_minus[1] == pytest.approx(-4.848, abs=1e-2)
        assert x_plus[1] == pytest.approx(0.0476, abs=5e-3)
        iv = Interval3D(np.array(x_minus), np.array(x_plus),
                        closed_a=True, closed_b=False)
        p1 = (-math.sqrt(ex2.rho), 0.0, ex2.d + math.sqrt(ex2.rho))
        assert interval_contains(iv, p1, tol=1e-9)


def test_criterion_3_example3_reproduction(ex3):
    with Budget("3 example-3 reproduction", 1.0):
        verdict = certify(ex3)
        assert verdict.cycle_count == 2
        x_minus, x_plus = verdict.window
        np.testing.assert_allclose(x_minus, [0.0, -1.1667, 2.0], atol=1e-3)
        np.testing.assert_allclose(x_plus, [0.0, 27.6586, 2.0], atol=5e-2)
        iv = Interval3D(np.array(x_minus), np.array(x_plus),
                        closed_a=True, closed_b=False)
        assert interval_contains(iv, (0.0, 1.0, 2.0), tol=1e-9)
        assert interval_contains(iv, (0.0, -1.0, 2.0), tol=1e-9)


def test_criterion_4_closed_form_crosscheck(ex1, ex2, ex3):
    with Budget("4 closed-form vs oracle crosscheck", 10.0):
        for params, seed in ((ex1, 101), (ex2, 102), (ex3, 103)):
            rep = crosscheck_closed_forms(params, 100, seed=seed, horizon=5.0)
            assert rep.trials == 100
            assert rep.max_error <= 1e-6, rep.worst_trial


def test_criterion_5_semigroup(ex1, ex3):
    with Budget("5 semigroup property", 5.0):
        assert semigroup_max_rel_err(ex1, "left", 1000, seed=201) <= 1e-9
        assert semigroup_max_rel_err(ex3, "right", 1000, seed=202) <= 1e-9


def test_criterion_6_node_stay_extensional():
    with Budget("6 node stay-criterion extensional check", 30.0):
        rng = np.random.default_rng(301)
        checked = 0
        while checked < 200:
            m, slow = random_real_stable_2x2(rng)
            th = rng.uniform(0.0, 2.0 * math.pi)
            khat = np.array([math.cos(th), math.sin(th)])
            u = np.array([-khat[1], khat[0]])
            drift = float(khat @ (m @ u))
            if abs(drift) < 0.5:
                continue  # keep the tangency geometry well-conditioned
            base = khat  # on the line {khat . x = 1}
            tau_star = -float(khat @ (m @ base)) / drift
            # sample away from the tangency locus by at least 1e-3
            tau = tau_star + rng.choice([-1.0, 1.0]) * rng.uniform(1e-3, 2.0)
            x0 = base + tau * u
            sys = PlanarLinearSystem.from_matrix(m)
            predicted = node_stay_check(sys, khat, x0)
            brute = brute_linear_stays(
                (m[0, 0], m[0, 1], m[1, 0], m[1, 1]), khat, tuple(x0), slow)
            assert predicted == brute, (m, khat, tau - tau_star)
            checked += 1


def test_criterion_7_stay_set_and_window_extensional(ex1, ex2, ex3):
    with Budget("7 stay-set / spiral-window extensional checks", 60.0):
        margin = 1e-3
        # vertical-line stay sets on L1 for each example's oscillator
        for params, lo, hi in ((ex1, -2.0, 4.0), (ex2, -7.0, 2.0),
                               (ex3, -4.0, 4.0)):
            a = analyze_vdp_line(params.rho, params.omega, params.d)
            stay = forward_stay_set(a, strict=True)
            boundaries = []
            if a.regime == "subcritical":
                boundaries = [a.varrho_plus, a.varrho_minus, a.x_star[1]]
            for y in np.linspace(lo, hi, 50):
                if any(abs(y - b) < margin for b in boundaries):
                    continue
                predicted = stay.contains(float(y))
                brute = brute_vdp_stays(params.rho, params.omega, params.d,
                                        float(y))
                assert predicted == brute, (params.d, float(y))

        # spiral stay windows on L2 for the focus examples
        for params in (ex2, ex3):
            c0 = params.d - params.q3 - params.q1
            sys = PlanarLinearSystem.from_matrix(
                [[params.b11, params.b12], [params.b21, params.b22]])
            w = focus_stay_window(sys, (1.0 / c0, 0.0))
            y_lo = w.x_star_in[1] + params.q2
            y_hi = w.x_star_out[1] + params.q2
            span = y_hi - y_lo
            grid = np.linspace(y_lo - 0.15 * span - 0.5,
                               y_hi + 0.15 * span + 0.5, 50)
            line_x1 = params.d - params.q3
            for y in grid:
                if abs(y - y_lo) < margin or abs(y - y_hi) < margin:
                    continue
                predicted = y_lo <= y < y_hi
                brute = brute_affine_stays_above(
                    (params.b11, params.b12, params.b21, params.b22),
                    (params.q1, params.q2), line_x1,
                    (line_x1, float(y)), abs(sys.alpha))
                assert predicted == brute, (params.d, float(y))


def test_criterion_8_orbit_certificates(ex1, ex2, ex3):
    with Budget("8 orbit certificates", 5.0):
        for n, params in ((1, ex1), (2, ex2), (3, ex3)):
            verdict = certify(params)
            certs = assemble_cycle(params, verdict)
            assert len(certs) == verdict.cycle_count
            if n == 3:
                assert len(certs) == 2
            for cert in certs:
                assert cert.containment_ok
                for seg in cert.orbit_segments:
                    if seg.requirement.endswith("strict"):
                        assert seg.containment_margin > 0.0
                    else:
                        assert seg.containment_margin >= -1e-9
                for name, value in cert.endpoint_residuals.items():
                    assert value <= 1e-3, (n, name, value)


def test_criterion_9_negative_controls(ex1, ex3):
    with Budget("9 negative controls", 1.0):
        v = certify(replace(ex1, q3=3.0))
        assert v.cycle_count == 0
        failed = [e for e in v.evidence if not e.passed]
        assert [e.name for e in failed] == ["q3_subcase"]
        assert "coverage" in failed[0].note

        v = certify(replace(ex3, q2=10.0))
        assert v.cycle_count == 0
        failed = {e.name for e in v.evidence if not e.passed}
        assert failed == {"window_p_plus", "window_p_minus"}
