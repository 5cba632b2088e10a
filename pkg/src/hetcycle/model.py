"""Model parameters, structural hypotheses, and switching-plane geometry.

The system has two zones split by the plane x1 + x3 = d.  The left zone
(x1 + x3 <= d) carries a planar limit-cycle oscillator (rotation rate
``omega``, cycle radius ``sqrt(rho)``) extended by an expanding vertical
axis (rate ``mu``); the right zone is affine with equilibrium ``q``, a
stable planar block ``B0`` and an unstable vertical rate ``lambda``.

Three structural hypotheses gate everything downstream:

* h1 - the right planar block has two negative real eigenvalues (node),
* h2 - the right planar block has a complex pair with negative real part
  (focus); h1 and h2 are mutually exclusive,
* h3 - placement: 0 < sqrt(rho) < d, q1 + q3 > d, and q1 = d, which puts
  the equilibrium strictly in the right zone and the limit cycle strictly
  in the left zone, with the plane geometrically between them.

Everything here is an immutable value; every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    DegenerateInterval,
    HypothesisFailure,
    SingularMatrix,
)

#: Fixed switching-plane normal: the plane is {x : x1 + x3 = d}.
C_NORMAL = (1.0, 0.0, 1.0)

#: Default absolute tolerance for equality-type checks on normalized values.
DEFAULT_TOL = 1e-9


def _ro(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SystemParams:
    """All scalars defining the two-zone system.

    The left zone is fixed-form (rotation + radial cubic + exponential
    axis); the right zone is affine with a block-diagonal matrix: planar
    block [[b11, b12], [b21, b22]] and vertical eigenvalue ``lam`` > 0.
    """

    rho: float
    omega: float
    mu: float
    b11: float
    b12: float
    b21: float
    b22: float
    lam: float
    q1: float
    q2: float
    q3: float
    d: float

    def __post_init__(self):
        for name in ("rho", "omega", "mu", "b11", "b12", "b21", "b22",
                     "lam", "q1", "q2", "q3", "d"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        for name in ("rho", "omega", "mu", "lam", "d"):
            if not getattr(self, name) > 0:
                raise ValueError(
                    f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def q(self) -> np.ndarray:
        return _ro(np.array([self.q1, self.q2, self.q3]))

    @property
    def b0(self) -> np.ndarray:
        """Planar block of the right-zone matrix."""
        return _ro(np.array([[self.b11, self.b12], [self.b21, self.b22]]))

    @property
    def b_full(self) -> np.ndarray:
        return _ro(np.array([
            [self.b11, self.b12, 0.0],
            [self.b21, self.b22, 0.0],
            [0.0, 0.0, self.lam],
        ]))

    @property
    def sqrt_rho(self) -> float:
        return math.sqrt(self.rho)

    def plane_residual(self, x) -> float:
        """Signed offset of x from the switching plane (positive = right zone)."""
        x = np.asarray(x, dtype=float)
        return float(x[0] + x[2] - self.d)


def classify_2x2(a11: float, a12: float, a21: float, a22: float):
    """Spectral classification of a 2x2 real matrix from trace/determinant.

    Returns (spectral_type, (ev1, ev2)) with eigenvalues as complex numbers;
    a complex pair is reported with positive imaginary part first.  The
    quadratic formula is used (never an iterative solver) so the result is
    deterministic and exact up to rounding.
    """
    tr = a11 + a22
    det = a11 * a22 - a12 * a21
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        l1 = 0.5 * (tr - root)
        l2 = 0.5 * (tr + root)
        kind = "real_stable" if (l1 < 0.0 and l2 < 0.0) else "other"
        return kind, (complex(l1, 0.0), complex(l2, 0.0))
    alpha = 0.5 * tr
    beta = 0.5 * math.sqrt(-disc)
    kind = "complex_stable" if alpha < 0.0 else "other"
    return kind, (complex(alpha, beta), complex(alpha, -beta))


@dataclass(frozen=True)
class H3Check:
    name: str
    passed: bool
    margin: float


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the structural hypothesis checks; failure is data here,
    not an error."""

    h1_holds: bool
    h2_holds: bool
    h3_holds: bool
    h3_details: tuple
    eigenvalues: tuple
    spectral_type: str


def validate_hypotheses(params: SystemParams, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Check the three structural hypotheses of the model.

    h1/h2 classify the right planar block's spectrum; h3 bundles three
    placement sub-checks, each reported with its margin:

    * ``sqrt_rho_lt_d``: d - sqrt(rho) > 0 (strict, zero slack),
    * ``cq_gt_d``: q1 + q3 - d > 0 (strict, zero slack),
    * ``q1_eq_d``: |q1 - d| <= tol * max(1, |d|).
    """
    kind, eigs = classify_2x2(params.b11, params.b12, params.b21, params.b22)
    h1 = kind == "real_stable"
    h2 = kind == "complex_stable"

    m1 = params.d - params.sqrt_rho
    m2 = params.q1 + params.q3 - params.d
    m3 = abs(params.q1 - params.d)
    checks = (
        H3Check("sqrt_rho_lt_d", m1 > 0.0, m1),
        H3Check("cq_gt_d", m2 > 0.0, m2),
        H3Check("q1_eq_d", m3 <= tol * max(1.0, abs(params.d)), m3),
    )
    h3 = all(c.passed for c in checks)
    return HypothesisReport(h1, h2, h3, checks, eigs, kind)


@dataclass(frozen=True)
class Line3D:
    """A line inside the switching plane: point + direction."""

    point: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True)
class LimitCycle:
    """The left zone's saddle periodic orbit: the circle of radius
    sqrt(rho) in the plane x3 = 0.  Its stable set is that punctured plane;
    its unstable set is the cylinder x1^2 + x2^2 = rho."""

    radius: float

    @classmethod
    def from_params(cls, params: SystemParams) -> "LimitCycle":
        return cls(params.sqrt_rho)

    def distance(self, x) -> float:
        """Radial-plus-vertical distance |r - radius| + |x3|."""
        x = np.asarray(x, dtype=float)
        return abs(math.hypot(x[0], x[1]) - self.radius) + abs(x[2])


@dataclass(frozen=True)
class DerivedGeometry:
    """Named points and lines on the switching plane.

    ``p0``/``p1`` are where the cycle's unstable cylinder meets the plane
    at its lowest/highest vertical height; ``q0`` is where the equilibrium's
    unstable line meets the plane; ``p_plus``/``p_minus`` are the cylinder-
    plane-stable-plane intersections when q3 lies strictly between the two
    heights; ``x_minus`` is the tangency point of the right-zone spiral on
    the in-plane line L2.  sigma_plus/minus are the ordinates on L1 where
    the left planar field is tangent to the line x1 = d (present only when
    the tangency quadratic has real roots).
    """

    p0: np.ndarray
    p1: np.ndarray
    q0: np.ndarray
    sigma_plus: Optional[float]
    sigma_minus: Optional[float]
    v1: Optional[np.ndarray]
    p_plus: Optional[np.ndarray]
    p_minus: Optional[np.ndarray]
    x_minus: Optional[np.ndarray]
    L1: Line3D
    L2: Line3D


def derive_geometry(params: SystemParams, tol: float = DEFAULT_TOL) -> DerivedGeometry:
    """Compute every switching-plane object by its closed formula.

    Requires the placement hypothesis (h3); raises HypothesisFailure
    otherwise.  ``x_minus`` needs the planar block to be invertible with a
    nonzero in-plane tangency denominator: for a focus-type block that is
    automatic; for other spectra a vanishing denominator simply leaves
    ``x_minus`` unset unless the block itself is singular and the spectrum
    is focus-type, in which case SingularMatrix is raised.
    """
    report = validate_hypotheses(params, tol)
    if not report.h3_holds:
        failed = [c.name for c in report.h3_details if not c.passed]
        raise HypothesisFailure(f"placement hypothesis fails: {', '.join(failed)}")

    d = params.d
    sr = params.sqrt_rho
    p0 = _ro(np.array([sr, 0.0, d - sr]))
    p1 = _ro(np.array([-sr, 0.0, d + sr]))
    q0 = _ro(np.array([d, params.q2, 0.0]))

    disc = params.omega ** 2 - 4.0 * d * d * (d * d - params.rho)
    if disc >= 0.0:
        root = math.sqrt(disc)
        sigma_plus = (-params.omega + root) / (2.0 * d)
        sigma_minus = (-params.omega - root) / (2.0 * d)
        v1 = _ro(np.array([d, sigma_plus, 0.0]))
    else:
        sigma_plus = sigma_minus = None
        v1 = None

    # strict interior with the same tolerance band the subcase selection
    # uses, so q3 values within rounding of a rim height keep p0/p1 instead
    lo, hi = d - sr, d + sr
    band = tol * max(1.0, abs(lo), abs(hi))
    if lo + band < params.q3 < hi - band:
        y = math.sqrt(max(params.rho - (d - params.q3) ** 2, 0.0))
        p_plus = _ro(np.array([d - params.q3, y, params.q3]))
        p_minus = _ro(np.array([d - params.q3, -y, params.q3]))
    else:
        p_plus = p_minus = None

    x_minus = _x_minus_or_none(params, report.spectral_type)

    L1 = Line3D(_ro(np.array([d, 0.0, 0.0])), _ro(np.array([0.0, 1.0, 0.0])))
    L2 = Line3D(_ro(np.array([d - params.q3, 0.0, params.q3])),
                _ro(np.array([0.0, 1.0, 0.0])))
    return DerivedGeometry(p0, p1, q0, sigma_plus, sigma_minus, v1,
                           p_plus, p_minus, x_minus, L1, L2)


def _x_minus_or_none(params: SystemParams, spectral_type: str):
    """Tangency point of the right-zone planar flow on L2, via the inverse
    of the full block matrix applied to the in-plane direction (0, 1, 0)."""
    det = params.b11 * params.b22 - params.b12 * params.b21
    focus = spectral_type == "complex_stable"
    if det == 0.0:
        if focus:  # unreachable for a true focus (det = alpha^2 + beta^2 > 0)
            raise SingularMatrix("right planar block is singular")
        return None
    # B^{-1} (0,1,0) = (B0^{-1} (0,1), 0); first component is -b12/det.
    w1 = -params.b12 / det
    w2 = params.b11 / det
    denom = w1  # = (1,0,1) . B^{-1} (0,1,0)
    if denom == 0.0:
        if focus:
            raise SingularMatrix(
                "degenerate spiral geometry: plane-normal component of "
                "B^{-1} c-perp vanishes")
        return None
    s = (params.d - (params.q1 + params.q3)) / denom
    return _ro(np.array([params.q1 + s * w1, params.q2 + s * w2, params.q3]))


@dataclass(frozen=True)
class Interval3D:
    """A segment between two 3D points with independently open or closed
    endpoints.  Membership is the collinear test: x = a + lam (b - a) with
    lam in [0, 1], respecting the endpoint flags."""

    endpoint_a: np.ndarray
    endpoint_b: np.ndarray
    closed_a: bool = True
    closed_b: bool = True

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return interval_contains(self, x, tol)


def interval_contains(iv: Interval3D, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff x lies within ``tol`` of the segment and its parameter
    respects the open/closed endpoint flags.

    ``tol`` is an absolute distance; at the endpoints it maps to a
    parameter-space band of width tol/|b - a| (closed endpoints include the
    band, open endpoints exclude it).
    """
    a = np.asarray(iv.endpoint_a, dtype=float)
    b = np.asarray(iv.endpoint_b, dtype=float)
    x = np.asarray(x, dtype=float)
    u = b - a
    length = float(np.linalg.norm(u))
    if length <= tol:
        raise DegenerateInterval("interval endpoints coincide within tolerance")
    lam = float(np.dot(x - a, u) / np.dot(u, u))
    perp = x - (a + lam * u)
    if float(np.linalg.norm(perp)) > tol * max(1.0, length):
        return False
    lam_tol = tol / length
    if iv.closed_a:
        if lam < -lam_tol:
            return False
    elif lam <= lam_tol:
        return False
    if iv.closed_b:
        if lam > 1.0 + lam_tol:
            return False
    elif lam >= 1.0 - lam_tol:
        return False
    return True


CONFIG_KEYS = ("rho", "omega", "mu", "b11", "b12", "b21", "b22",
               "lambda", "q1", "q2", "q3", "d")
_POSITIVE_KEYS = ("rho", "omega", "mu", "lambda", "d")


def parse_config(text: str) -> SystemParams:
    """Parse the flat key-value config format.

    One ``key = value`` pair per line; ``#`` starts a comment; all twelve
    keys are required, unknown keys are an error.  Numbers use '.' as the
    decimal separator regardless of locale.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            fval = float(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: invalid number for {key!r}: {val!r}")
        if not math.isfinite(fval):
            raise ConfigError(f"line {lineno}: non-finite value for {key!r}")
        values[key] = fval
    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    return params_from_dict(values)


def params_from_dict(values: dict) -> SystemParams:
    """Build SystemParams from a config-key dict, naming the offending key
    in every error."""
    unknown = [k for k in values if k not in CONFIG_KEYS]
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    for k in _POSITIVE_KEYS:
        if not values[k] > 0:
            raise ConfigError(f"{k} must be positive, got {values[k]!r}")
    return SystemParams(
        rho=values["rho"], omega=values["omega"], mu=values["mu"],
        b11=values["b11"], b12=values["b12"], b21=values["b21"],
        b22=values["b22"], lam=values["lambda"],
        q1=values["q1"], q2=values["q2"], q3=values["q3"], d=values["d"],
    )


def load_config(path) -> SystemParams:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def params_to_dict(params: SystemParams) -> dict:
    return {
        "rho": params.rho, "omega": params.omega, "mu": params.mu,
        "b11": params.b11, "b12": params.b12, "b21": params.b21,
        "b22": params.b22, "lambda": params.lam,
        "q1": params.q1, "q2": params.q2, "q3": params.q3, "d": params.d,
    }
