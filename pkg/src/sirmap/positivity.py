"""Forward-invariant positivity regions of the planar map.

One step of the map preserves the identity

    S' + I' = S*(r - 1 + K - r*S) + (1 - K)*(S + I),

whose quadratic part is maximised at S = (r-1+K)/(2r).  That gives the
ceiling ``u* = (r-1+K)^2 / (4*K*r)``: once ``S + I <= u*`` the sum can
never exceed ``u*`` again.  Combining the ceiling with the S-nullcline
``y = (r/beta)*(1-x)*(1+a*x)`` (the exact frontier of ``S' >= 0``)
yields three candidate trapping regions:

* case 1, ``u* <= 1``: the closed triangle ``x, y >= 0, x + y <= u*``;
* case 2, ``u* > 1``: the ceiling line is capped by the nullcline on
  a sub-interval of [0, 1]; the regionis ``0 <= x <= 1, 0 <= y <=
  min(u* - x, nullcline(x))`` and the two caps cross once;
* case 3 (a = 1 only): as case 2 but with both crossings of the line
  and the parabola interior to (0, 1).

``applicable_region`` hands out the region whose sufficient parameter
conditions hold; ``invariance_probe`` bombards a region with uniform
starts and reports any escape (these are findings about the region, not
errors).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import ModelParams

__all__ = [
    "RegionSpec",
    "EscapeRecord",
    "ProbeReport",
    "u_star",
    "applicable_region",
    "contains",
    "invariance_probe",
]

#: Outward slack applied to every membership inequality.
MEMBERSHIP_TOL = 1.0e-12


def u_star(p: ModelParams) -> float:
    """Ceiling of S + I under one map step: ``(r-1+K)^2 / (4*K*r)``."""
    return (p.r - 1.0 + p.K) ** 2 / (4.0 * p.K * p.r)


@dataclass(frozen=True)
class RegionSpec:
    """A candidate forward-invariant region.

    ``case`` is 1 (triangle under the ceiling line), 2 (ceiling capped
    by the nullcline with one interior crossing) or 3 (both crossings
    interior, a = 1).  ``crossings`` holds the x-coordinates where the
    ceiling line meets the nullcline, in increasing order; empty for
    the triangle.  ``v`` is the nullcline height at x = 0, i.e.
    ``r / beta``.
    """

    case: int
    params: ModelParams
    u_star: float
    v: float
    crossings: tuple[float, ...] = ()

    def nullcline(self, x):
        """Height of the S' >= 0 frontier: ``v * (1 - x) * (1 + a*x)``."""
        return self.v * (1.0 - np.asarray(x)) * (1.0 + self.params.a * np.asarray(x))


def applicable_region(p: ModelParams) -> RegionSpec | None:
    """The invariance region whose sufficient conditions hold, if any.

    Case 1 requires ``sqrt(K)+1 <= r <= (sqrt(K)+1)^2`` together with
    ``beta < r`` or ``r < beta < r/u*``.  Case 2 requires
    ``(sqrt(K)+1)^2 < r <= 4`` and ``beta < r/(2u* - 1)``.  Case 3
    requires ``a = 1``, ``1 < r <= 4``, ``u* > 5/4`` and
    ``r/u* < beta < r/v_plus`` with ``v_plus = (u* + sqrt(u*^2-1))/2``,
    which is exactly the condition for the ceiling line and the
    nullcline parabola to cross twice inside (0, 1).

    The case-3 window guarantees the region's shape, not its
    invariance: for beta large relative to K the image of the upper
    boundary can poke above the nullcline near x = 0 (a point on the
    parabola arc lands exactly on x = 0 at height
    ``(r/beta)*(1-x^2)*((1-K)+beta*x/(1+x))``, which can exceed the
    wall height ``r/beta``).
    :func:`invariance_probe` is the authority on whether a returned
    region actually traps orbits at given parameters.
    """
    r, beta, a, K = p.r, p.beta, p.a, p.K
    u = u_star(p)
    v = r / beta
    sq = math.sqrt(K)

    if sq + 1.0 <= r <= (sq + 1.0) ** 2:
        if beta < r or (r < beta < r / u):
            return RegionSpec(case=1, params=p, u_star=u, v=v)
        return None

    if a == 1.0 and 1.0 < r <= 4.0 and u > 1.25:
        v_plus = (u + math.sqrt(u * u - 1.0)) / 2.0
        if r / u < beta < r / v_plus:
            disc = 4.0 * v * v - 4.0 * u * v + 1.0
            root = math.sqrt(disc)
            x1 = (1.0 - root) / (2.0 * v)
            x2 = (1.0 + root) / (2.0 * v)
            return RegionSpec(case=3, params=p, u_star=u, v=v, crossings=(x1, x2))

    if (sq + 1.0) ** 2 < r <= 4.0 and u > 1.0 and beta < r / (2.0 * u - 1.0):
        if a == 0.0:
            xbar = (v - u) / (v - 1.0)
        else:
            # line u - x meets v*(1-x)*(1+a*x): va*x^2 - (va - v + 1)*x + (u - v) = 0
            A = v * a
            Bq = -(v * a - v + 1.0)
            Cq = u - v
            xbar = (-Bq + math.sqrt(Bq * Bq - 4.0 * A * Cq)) / (2.0 * A)
        return RegionSpec(case=2, params=p, u_star=u, v=v, crossings=(xbar,))

    return None


def contains(region: RegionSpec, x, tol: float = MEMBERSHIP_TOL) -> bool:
    """Point membership with outward slack ``tol`` on each inequality."""
    S, I = float(x[0]), float(x[1])
    if S < -tol or I < -tol:
        return False
    if S + I > region.u_star + tol:
        return False
    if region.case == 1:
        return True
    if S > 1.0 + tol:
        return False
    return I <= float(region.nullcline(S)) + tol


class EscapeRecord(NamedTuple):
    """First exit of one probe orbit: where, when, and which constraint."""

    index: int
    step: int
    point: tuple[float, float]
    constraint: str


@dataclass(frozen=True)
class ProbeReport:
    region: RegionSpec
    samples: int
    steps: int
    seed: int
    escape_count: int
    escapes: list[EscapeRecord]


def _violation_labels(region: RegionSpec, S, I, tol):
    """Per-point first-violated-constraint labels ('' = inside)."""
    n = S.shape[0]
    labels = np.full(n, "", dtype=object)
    checks = [
        ("S<0", S < -tol),
        ("I<0", I < -tol),
        ("S+I>u*", S + I > region.u_star + tol),
    ]
    if region.case != 1:
        checks.append(("S>1", S > 1.0 + tol))
        with np.errstate(invalid="ignore"):
            checks.append(("I>nullcline", I > region.nullcline(S) + tol))
    for name, mask in checks:
        fresh = mask & (labels == "")
        labels[fresh] = name
    return labels


def _sample_region(region: RegionSpec, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points of the region by rejection from its bounding box."""
    u = region.u_star
    if region.case == 1:
        x_hi, y_hi = u, u
    else:
        x_hi, y_hi = 1.0, min(u, region.v)
    S = np.empty(n)
    I = np.empty(n)
    got = 0
    for _ in range(10_000):
        need = n - got
        if need <= 0:
            break
        cand_S = rng.uniform(0.0, x_hi, size=2 * need + 16)
        cand_I = rng.uniform(0.0, y_hi, size=2 * need + 16)
        good = cand_S + cand_I <= u
        if region.case != 1:
            good &= cand_I <= region.nullcline(cand_S)
        take = min(int(good.sum()), need)
        idx = np.nonzero(good)[0][:take]
        S[got : got + take] = cand_S[idx]
        I[got : got + take] = cand_I[idx]
        got += take
    if got < n:
        raise RuntimeError("rejection sampling failed to fill the region")
    return S, I


def invariance_probe(
    p: ModelParams,
    samples: int = 1000,
    steps: int = 1000,
    seed: int = 0,
    region: RegionSpec | None = None,
    max_records: int = 50,
) -> ProbeReport:
    """Iterate uniform region starts and report every first escape.

    Escapes are findings, not errors: each is recorded with the sample
    index, step number, exiting point, and the violated constraint (at
    most ``max_records`` detailed records are kept; the count is exact).
    The ``region`` override lets a caller probe a hand-built region.
    """
    if region is None:
        region = applicable_region(p)
        if region is None:
            raise ValueError(
                "no invariance region applies at these parameters; "
                "pass an explicit region to probe one anyway"
            )
    if samples < 1 or steps < 1:
        raise ValueError("samples and steps must be positive")
    rng = np.random.default_rng(seed)
    S, I = _sample_region(region, samples, rng)
    alive = np.ones(samples, dtype=bool)
    escapes: list[EscapeRecord] = []
    escape_count = 0
    r, beta, a, K = p.r, p.beta, p.a, p.K

    with np.errstate(all="ignore"):
        for k in range(1, steps + 1):
            force = beta * S * I / (1.0 + a * S)
            S_new = r * S * (1.0 - S) - force
            I_new = (1.0 - K) * I + force
            S = np.where(alive, S_new, S)
            I = np.where(alive, I_new, I)
            labels = _violation_labels(region, S, I, MEMBERSHIP_TOL)
            out = alive & (labels != "")
            if out.any():
                for idx in np.nonzero(out)[0]:
                    escape_count += 1
                    if len(escapes) < max_records:
                        escapes.append(
                            EscapeRecord(
                                index=int(idx),
                                step=k,
                                point=(float(S[idx]), float(I[idx])),
                                constraint=str(labels[idx]),
                            )
                        )
                alive &= labels == ""
            if not alive.any():
                break

    return ProbeReport(
        region=region,
        samples=samples,
        steps=steps,
        seed=seed,
        escape_count=escape_count,
        escapes=escapes,
    )
