"""Fixed points, stability thresholds, and bifurcation boundary labels.

The map has the disease-free fixed point E0 = ((r-1)/r, 0) and, once the
transmission strength crosses the fold threshold ``beta0``, the endemic
point E1 with both coordinates positive.  Three threshold curves in the
(r, beta) plane organise the local bifurcations of E1:

* ``beta0``  -- E1 collides with E0 (eigenvalue +1),
* ``beta1``  -- E1 loses stability through eigenvalue -1 (3 < r < r_max),
* ``beta2``  -- a complex pair of eigenvalues crosses the unit circle.

On the ``beta2`` curve the crossing angle degenerates into strong
resonances at three special growth values ``r_bar < r_tilde < r_max``
(eigenvalue angle pi/2, 2*pi/3 and pi respectively).

Everything here is closed-form 2x2 work: eigenvalues come from the
trace/determinant quadratic, never from a general eigensolver.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np

from .core import ModelParams, State, TOL_BOUNDARY, TOL_HYP, jacobian, step

__all__ = [
    "StabilityClass",
    "BoundaryTag",
    "EigenData",
    "FixedPointReport",
    "Thresholds",
    "eigen_from_matrix",
    "disease_free",
    "endemic",
    "beta0_threshold",
    "beta1_formula",
    "beta2_threshold",
    "resonance_growth",
    "thresholds",
    "classify_boundary",
    "period2_branch",
]


class StabilityClass(Enum):
    STABLE_NODE = "stable node"
    STABLE_FOCUS = "stable focus"
    SADDLE = "saddle"
    UNSTABLE_NODE = "unstable node"
    UNSTABLE_FOCUS = "unstable focus"
    NON_HYPERBOLIC = "non-hyperbolic"


class BoundaryTag(Enum):
    FOLD = "fold"
    FLIP = "flip"
    NEIMARK_SACKER = "neimark-sacker"
    FOLD_FLIP = "fold-flip"
    RESONANCE_12 = "1:2 resonance"
    RESONANCE_13 = "1:3 resonance"
    RESONANCE_14 = "1:4 resonance"


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues of a real 2x2 matrix via its trace and determinant.

    ``sigma`` is half the trace; ``omega`` the non-negative imaginary
    part of the pair (zero for real eigenvalues).  ``theta0`` is the
    argument of the eigenvalue with positive imaginary part, recorded
    only when the pair is complex and lies on the unit circle within
    ``TOL_HYP``.
    """

    trace: float
    det: float
    mu1: complex
    mu2: complex
    sigma: float
    omega: float
    theta0: float | None


def eigen_from_matrix(A: np.ndarray, unit_tol: float = TOL_HYP) -> EigenData:
    """Eigen data for a real 2x2 matrix from its characteristic quadratic."""
    T = float(A[0, 0] + A[1, 1])
    D = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    disc = T * T / 4.0 - D
    sigma = T / 2.0
    if disc >= 0.0:
        root = math.sqrt(disc)
        mu1 = complex(sigma + root, 0.0)
        mu2 = complex(sigma - root, 0.0)
        omega = 0.0
        theta0 = None
    else:
        omega = math.sqrt(-disc)
        mu1 = complex(sigma, omega)
        mu2 = complex(sigma, -omega)
        theta0 = None
        if abs(abs(mu1) - 1.0) <= unit_tol:
            theta0 = math.atan2(omega, sigma)
    return EigenData(trace=T, det=D, mu1=mu1, mu2=mu2, sigma=sigma, omega=omega, theta0=theta0)


def _classify(e: EigenData, tol: float = TOL_HYP) -> StabilityClass:
    m1, m2 = abs(e.mu1), abs(e.mu2)
    if abs(m1 - 1.0) <= tol or abs(m2 - 1.0) <= tol:
        return StabilityClass.NON_HYPERBOLIC
    if e.omega > 0.0:
        return StabilityClass.STABLE_FOCUS if m1 < 1.0 else StabilityClass.UNSTABLE_FOCUS
    if m1 < 1.0 and m2 < 1.0:
        return StabilityClass.STABLE_NODE
    if m1 > 1.0 and m2 > 1.0:
        return StabilityClass.UNSTABLE_NODE
    return StabilityClass.SADDLE


FixedPointKind = Literal["disease_free", "endemic", "period2"]


@dataclass(frozen=True)
class FixedPointReport:
    """A located fixed (or periodic) point with its local linearisation."""

    kind: FixedPointKind
    location: State
    eigen: EigenData
    stability: StabilityClass
    residual: float


def _residual(p: ModelParams, x: State) -> float:
    y = step(p, x)
    return max(abs(y.S - x.S), abs(y.I - x.I))


def disease_free(p: ModelParams) -> FixedPointReport:
    """Report on the disease-free fixed point E0 = ((r-1)/r, 0).

    Its eigenvalues are available exactly: ``2 - r`` along the
    susceptible axis and ``1 - K + beta*(r-1)/(r + a*(r-1))`` transverse
    to it.
    """
    r = p.r
    S0 = (r - 1.0) / r
    loc = State(S0, 0.0)
    lam1 = 2.0 - r
    lam2 = 1.0 - p.K + p.beta * (r - 1.0) / (r + p.a * (r - 1.0))
    e = EigenData(
        trace=lam1 + lam2,
        det=lam1 * lam2,
        mu1=complex(lam1),
        mu2=complex(lam2),
        sigma=(lam1 + lam2) / 2.0,
        omega=0.0,
        theta0=None,
    )
    return FixedPointReport(
        kind="disease_free",
        location=loc,
        eigen=e,
        stability=_classify(e),
        residual=_residual(p, loc),
    )


def endemic(p: ModelParams) -> FixedPointReport | None:
    """Report on the endemic fixed point E1, or ``None`` below the fold.

    Requires ``r > 1``.  E1 exists (with both coordinates positive)
    exactly when ``beta > beta0``; at or below the threshold ``None`` is
    returned.
    """
    if not p.r > 1.0:
        raise ValueError(f"endemic analysis requires r > 1, got r={p.r}")
    b0 = beta0_threshold(p.r, p.a, p.K)
    if not p.beta > b0:
        return None
    den = p.beta - p.a * p.K
    S1 = p.K / den
    I1 = (p.r - 1.0) / den - p.r * p.K / (den * den)
    loc = State(S1, I1)
    e = eigen_from_matrix(jacobian(p, loc))
    return FixedPointReport(
        kind="endemic",
        location=loc,
        eigen=e,
        stability=_classify(e),
        residual=_residual(p, loc),
    )


# ---------------------------------------------------------------------------
# threshold curves


def beta0_threshold(r: float, a: float, K: float) -> float:
    """Fold threshold: E1 branches off E0 as beta crosses this value."""
    return K * (r + a * (r - 1.0)) / (r - 1.0)


def beta1_formula(r: float, a: float, K: float) -> float:
    """Raw flip-threshold expression, evaluated without the r-gate.

    The curve is meaningful for 3 < r < r_max, but the closed form is
    defined on a wider range; keeping it separate lets the junctions
    with the other curves be checked directly (it meets ``beta0`` at
    r = 3 and ``beta2`` at r = r_max).
    """
    g = 4.0 + K * (r - 1.0)
    first = K * (2.0 * a * (3.0 + K * (r - 1.0) - r) + (K + 2.0) * r) / g
    inner = (
        (K + 2.0) ** 2 * r * r
        + 4.0 * a * a * (r + 1.0) ** 2
        + 4.0 * a * r * (14.0 - 5.0 * K - 2.0 * r + 3.0 * K * r)
    )
    return 0.5 * (first + math.sqrt(K * K * inner) / g)


def beta2_threshold(r: float, a: float, K: float) -> float:
    """Neimark-Sacker threshold: det of the E1 Jacobian equals one here."""
    q = r / (r - 1.0)
    inner = a * a + 2.0 * a * q * (3.0 * K - 1.0) + q * q * (K + 1.0) ** 2
    return 0.5 * (a * (2.0 * K - 1.0) + q * (K + 1.0) + math.sqrt(inner))


def resonance_growth(x: float, a: float, K: float) -> float:
    """Growth value on the NS curve where ``1 + trace = 2 - x/2``.

    ``x = 2, 3, 4`` give the 1:4, 1:3 and 1:2 resonance loci (eigenvalue
    angles pi/2, 2*pi/3, pi); the last one, ``resonance_growth(4)``, is
    the endpoint r_max of the flip and NS curves.
    """
    lin = (a * x + K * (x + 1.0) + x) / (2.0 * K)
    inner = (
        a * a * x * x
        + 2.0 * a * x * (K * (3.0 * x - 1.0) - x)
        + (K * (x + 1.0) + x) ** 2
    )
    return lin + 0.5 * math.sqrt(inner / (K * K))


@dataclass(frozen=True)
class Thresholds:
    """Threshold curves of E1 at fixed (r, a, K).

    ``beta1`` is populated only on the flip branch 3 < r < r_max; the
    raw expression remains available as :func:`beta1_formula`.
    """

    r: float
    a: float
    K: float
    beta0: float
    beta1: float | None
    beta2: float
    r_bar: float
    r_tilde: float
    r_max: float


def thresholds(r: float, a: float, K: float) -> Thresholds:
    """Evaluate all threshold data at a growth value ``r > 1``."""
    if not r > 1.0:
        raise ValueError(f"thresholds require r > 1, got r={r}")
    if a < 0:
        raise ValueError(f"require a >= 0, got a={a}")
    if not 0 < K < 1:
        raise ValueError(f"require 0 < K < 1, got K={K}")
    r_max = resonance_growth(4.0, a, K)
    b1 = beta1_formula(r, a, K) if 3.0 < r < r_max else None
    return Thresholds(
        r=r,
        a=a,
        K=K,
        beta0=beta0_threshold(r, a, K),
        beta1=b1,
        beta2=beta2_threshold(r, a, K),
        r_bar=resonance_growth(2.0, a, K),
        r_tilde=resonance_growth(3.0, a, K),
        r_max=r_max,
    )


def classify_boundary(
    p: ModelParams,
    which: Literal["E0", "E1"],
    tol: float = TOL_BOUNDARY,
) -> BoundaryTag | None:
    """Label the codimension-1/2 boundary passing through ``p``, if any.

    Matching is absolute within ``tol`` on both r and beta.  Codim-2
    points win over the codim-1 curves meeting there: the fold-flip
    corner at (r, beta) = (3, beta0), and the 1:2 / 1:3 / 1:4 resonances
    on the NS curve at r_max, r_tilde and r_bar.
    """
    r, beta = p.r, p.beta
    if which == "E0":
        if abs(r - 1.0) <= tol:
            return BoundaryTag.FOLD
        if r <= 1.0:
            return None
        b0 = beta0_threshold(r, p.a, p.K)
        if abs(r - 3.0) <= tol and abs(beta - b0) <= tol:
            return BoundaryTag.FOLD_FLIP
        if abs(r - 3.0) <= tol and beta < b0:
            return BoundaryTag.FLIP
        if abs(beta - b0) <= tol and 1.0 < r < 3.0:
            return BoundaryTag.FOLD
        return None
    if which == "E1":
        if r <= 1.0 + tol:
            return None
        th = thresholds(r, p.a, p.K)
        if abs(r - 3.0) <= tol and abs(beta - th.beta0) <= tol:
            return BoundaryTag.FOLD_FLIP
        if abs(beta - th.beta2) <= tol:
            if abs(r - th.r_max) <= tol:
                return BoundaryTag.RESONANCE_12
            if abs(r - th.r_tilde) <= tol:
                return BoundaryTag.RESONANCE_13
            if abs(r - th.r_bar) <= tol:
                return BoundaryTag.RESONANCE_14
            if 1.0 < r < th.r_max:
                return BoundaryTag.NEIMARK_SACKER
        if abs(beta - th.beta0) <= tol and 1.0 < r < 3.0:
            return BoundaryTag.FOLD
        if th.beta1 is not None and abs(beta - th.beta1) <= tol:
            return BoundaryTag.FLIP
        return None
    raise ValueError(f"which must be 'E0' or 'E1', got {which!r}")


def period2_branch(p: ModelParams) -> tuple[FixedPointReport, FixedPointReport]:
    """The axis 2-cycle born at r = 3, as two period-2 reports.

    Requires ``r >= 3``.  The two points sit on the invariant axis
    I = 0 at ``S = (1 + r -/+ sqrt((r-3)*(r+1)))/(2r)``; the first
    report is the smaller-S point.  Eigen data comes from the product
    of the map's Jacobians around the cycle, so one eigenvalue is the
    logistic multiplier ``4 - r*(r-2)`` and the other is transverse.
    """
    r = p.r
    if r < 3.0:
        raise ValueError(f"the 2-cycle branch requires r >= 3, got r={r}")
    d = max((r - 3.0) * (r + 1.0), 0.0)
    root = math.sqrt(d)
    s_minus = (1.0 + r - root) / (2.0 * r)
    s_plus = (1.0 + r + root) / (2.0 * r)
    x_minus = State(s_minus, 0.0)
    x_plus = State(s_plus, 0.0)

    A2 = jacobian(p, x_plus) @ jacobian(p, x_minus)
    e = eigen_from_matrix(A2)
    stab = _classify(e)

    def make(x: State) -> FixedPointReport:
        y = step(p, step(p, x))
        res = max(abs(y.S - x.S), abs(y.I - x.I))
        return FixedPointReport(
            kind="period2", location=x, eigen=e, stability=stab, residual=res
        )

    return make(x_minus), make(x_plus)
