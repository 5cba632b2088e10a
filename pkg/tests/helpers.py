"""Brute-force oracles shared by the unit and acceptance tests.

Everything here goes through the numeric integrator on raw vector fields;
nothing uses the closed forms or the stay-set formulas being tested.
"""

import math

import numpy as np

from hetcycle._integrate import StepControl, hermite, rk45
from hetcycle.errors import BackwardBlowup
from hetcycle.flows import left_flow, right_flow

BRUTE_CTL = StepControl(rtol=1e-10, atol=1e-13)

#: Excursions above this count as "leaves the half-plane" in brute checks.
EXIT_THRESHOLD = 1e-9


def vdp_planar_field(rho, omega):
    def f(x):
        rr = x[0] * x[0] + x[1] * x[1]
        return (rho * x[0] - omega * x[1] - x[0] * rr,
                omega * x[0] + rho * x[1] - x[1] * rr)

    return f


def linear_field(a11, a12, a21, a22):
    def f(x):
        return (a11 * x[0] + a12 * x[1], a21 * x[0] + a22 * x[1])

    return f


def affine_field(a11, a12, a21, a22, c1, c2):
    def f(x):
        y1, y2 = x[0] - c1, x[1] - c2
        return (a11 * y1 + a12 * y2, a21 * y1 + a22 * y2)

    return f


def max_functional(f, x0, t_end, g, ctl=BRUTE_CTL, n_sub=8):
    """Max of g over the trajectory of f from x0 on (0, t_end], evaluated
    on the accepted mesh plus Hermite subsamples (the start itself is
    excluded: these checks are about the forward orbit)."""
    res = rk45(f, x0, 0.0, t_end, control=ctl)
    best = -math.inf
    for i in range(len(res.ts) - 1):
        h = res.ts[i + 1] - res.ts[i]
        for j in range(1, n_sub + 1):
            s = j / n_sub
            best = max(best, g(hermite(res.xs[i], res.fs[i],
                                       res.xs[i + 1], res.fs[i + 1], h, s)))
    return best


def brute_vdp_stays(rho, omega, k, x2_ordinate, horizon=None):
    """Does the forward planar orbit from (k, x2) stay in {x1 < k}?"""
    if horizon is None:
        horizon = math.log(1e4) / (2.0 * rho) + 5.0 * 2.0 * math.pi / omega
    f = vdp_planar_field(rho, omega)
    peak = max_functional(f, (k, x2_ordinate), horizon, lambda p: p[0] - k)
    return peak <= EXIT_THRESHOLD


def brute_linear_stays(a, k_vec, x0, slow_rate, target=1e-6):
    """Does the forward orbit of the linear system stay in {k.x < 1}?"""
    horizon = math.log(1.0 / target) / slow_rate
    f = linear_field(*a)
    g = lambda p: k_vec[0] * p[0] + k_vec[1] * p[1] - 1.0  # noqa: E731
    return max_functional(f, x0, horizon, g) <= EXIT_THRESHOLD


def brute_affine_stays_above(a, center, line_x1, x0, slow_rate, target=1e-6):
    """Does the forward orbit of the affine planar system stay in
    {x1 > line_x1}?  (The spiral-window claims are about the side of the
    in-plane line containing the equilibrium, which is the upper side.)"""
    horizon = math.log(1.0 / target) / slow_rate
    f = affine_field(a[0], a[1], a[2], a[3], center[0], center[1])
    return max_functional(f, x0, horizon,
                          lambda p: line_x1 - p[0]) <= EXIT_THRESHOLD


def random_real_stable_2x2(rng):
    """Random matrix with eigenvalues drawn in [-3, -0.2], conjugated by a
    random well-conditioned similarity."""
    l1, l2 = rng.uniform(-3.0, -0.2, size=2)
    th = rng.uniform(0.0, 2.0 * math.pi)
    c, s = math.cos(th), math.sin(th)
    shear = rng.uniform(-0.6, 0.6)
    p = np.array([[c, -s], [s, c]]) @ np.array([[1.0, shear], [0.0, 1.0]])
    m = p @ np.diag([l1, l2]) @ np.linalg.inv(p)
    return m, min(abs(l1), abs(l2))


def semigroup_max_rel_err(params, side, n, seed):
    """Worst relative violation of flow(x0, s+t) = flow(flow(x0, s), t)
    over n accepted random draws (draws hitting backward blow-up or leaving
    a sane radius are rejected and redrawn)."""
    rng = np.random.default_rng(seed)
    flow = left_flow if side == "left" else right_flow
    sr = params.sqrt_rho
    worst = 0.0
    accepted = 0
    while accepted < n:
        if side == "left":
            r = sr * rng.uniform(0.2, 1.5)
            th = rng.uniform(0.0, 2.0 * math.pi)
            x0 = np.array([r * math.cos(th), r * math.sin(th),
                           rng.uniform(-0.5, 0.5)])
            s, t = rng.uniform(-1.0, 3.0, size=2)
        else:
            x0 = params.q + rng.uniform(-2.0, 2.0, size=3)
            s, t = rng.uniform(-1.0, 1.0, size=2)
        try:
            mid = flow(x0, s, params)
            two_leg = flow(mid, t, params)
            direct = flow(x0, s + t, params)
        except BackwardBlowup:
            continue
        if max(np.max(np.abs(mid)), np.max(np.abs(direct))) > 10.0 * max(1.0, sr, np.max(np.abs(params.q))):
            continue
        rel = float(np.max(np.abs(two_leg - direct)) /
                    max(1.0, float(np.max(np.abs(direct)))))
        worst = max(worst, rel)
        accepted += 1
    return worst
