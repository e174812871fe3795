"""Orbit-level machinery: Lyapunov exponents, periods, scans, cycle births.

Heavy loops are written either as plain-float Python (per-orbit work,
where numpy array overhead would dominate) or as numpy-vectorised code
over many seeds at once (the tangent-system Newton solver, region
probes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    DEFAULT_MAX_PERIOD,
    DEFAULT_TRANSIENT,
    DIVERGENCE_BOUND,
    DivergenceError,
    ModelParams,
    Orbit,
    TOL_CYCLE,
    iterate,
)
from .equilibria import beta0_threshold

__all__ = [
    "lyapunov",
    "detect_period",
    "ScanResult",
    "scan",
    "CycleBirth",
    "find_cycle_births",
    "sharkovskii_precedes",
    "reproduction_candidates",
    "decay_envelope_check",
]


def lyapunov(
    p: ModelParams,
    x0,
    n: int = 100_000,
    transient: int = DEFAULT_TRANSIENT,
) -> tuple[float, float]:
    """Both Lyapunov exponents along the orbit of ``x0``.

    Accumulates QR factorisations of Jacobian products over ``n`` steps
    after discarding ``transient`` iterations.  Returns exponents in
    descending order.  Requires ``n >= 1000``; raises
    :class:`DivergenceError` (carrying the step index) if the orbit
    escapes.
    """
    if n < 1000:
        raise ValueError(f"need n >= 1000 for a meaningful estimate, got n={n}")
    if transient < 0:
        raise ValueError("transient must be non-negative")
    S, I = float(x0[0]), float(x0[1])
    r, beta, a, K = p.r, p.beta, p.a, p.K
    bound = DIVERGENCE_BOUND

    for k in range(transient):
        if not (abs(S) + abs(I) <= bound):
            raise DivergenceError(k)
        force = beta * S * I / (1.0 + a * S)
        S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force

    q11, q21 = 1.0, 0.0
    q12, q22 = 0.0, 1.0
    s1 = 0.0
    s2 = 0.0
    tiny = 1.0e-300
    # Warm up the orthonormal frame before averaging.  Starting from the
    # identity next to an invariant coordinate direction, the frame can
    # need O(10^3) steps to swing onto the dominant direction (the
    # misalignment may start at denormal size), which would otherwise
    # leak a 1/n bias into both exponents.
    q_warm = 2000
    for k in range(q_warm + n):
        if not (abs(S) + abs(I) <= bound):
            raise DivergenceError(transient + k)
        den = 1.0 + a * S
        phi = beta * S / den
        dphi = beta / (den * den)
        j11 = r - 2.0 * r * S - I * dphi
        j12 = -phi
        j21 = I * dphi
        j22 = 1.0 - K + phi

        force = phi * I
        S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force

        m11 = j11 * q11 + j12 * q21
        m21 = j21 * q11 + j22 * q21
        m12 = j11 * q12 + j12 * q22
        m22 = j21 * q12 + j22 * q22
        r11 = math.hypot(m11, m21)
        if r11 < tiny:
            r11 = tiny
        q11, q21 = m11 / r11, m21 / r11
        r12 = q11 * m12 + q21 * m22
        v1 = m12 - r12 * q11
        v2 = m22 - r12 * q21
        r22 = math.hypot(v1, v2)
        if r22 < tiny:
            r22 = tiny
        q12, q22 = v1 / r22, v2 / r22
        if k >= q_warm:
            s1 += math.log(r11)
            s2 += math.log(r22)

    l1, l2 = s1 / n, s2 / n
    return (l1, l2) if l1 >= l2 else (l2, l1)


def detect_period(
    orbit,
    max_period: int = DEFAULT_MAX_PERIOD,
    tol: float = TOL_CYCLE,
) -> int | None:
    """Smallest period ``<= max_period`` the samples settle on, else None.

    A period ``q`` is accepted when ``|x[i+q] - x[i]|`` stays below
    ``tol`` in the sup norm across the whole sample window.  The window
    must hold at least ``4 * max_period`` samples.
    """
    pts = orbit.states if isinstance(orbit, Orbit) else np.asarray(orbit, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("orbit must be an (n, 2) array of samples")
    if pts.shape[0] < 4 * max_period:
        raise ValueError(
            f"need at least {4 * max_period} samples to resolve periods up to "
            f"{max_period}, got {pts.shape[0]}"
        )
    for q in range(1, max_period + 1):
        if float(np.max(np.abs(pts[q:] - pts[:-q]))) <= tol:
            return q
    return None


@dataclass(frozen=True)
class ScanResult:
    """Output of a one-parameter attractor scan.

    Rows are ordered by parameter value.  Escaped rows carry NaN samples
    and a ``(row, step)`` entry in ``escapes``, where ``step`` counts
    iterations from that row's starting state.
    """

    parameter: str
    values: np.ndarray
    s_samples: np.ndarray
    i_samples: np.ndarray
    lyap_max: np.ndarray
    escapes: list[tuple[int, int]] = field(default_factory=list)


_SCANNABLE = ("r", "beta", "a", "K")


def scan(
    p: ModelParams,
    parameter_name: str,
    prange: tuple[float, float],
    steps: int,
    x0=(0.5, 0.1),
    transient: int = DEFAULT_TRANSIENT,
    keep: int = 100,
) -> ScanResult:
    """Sweep one parameter, recording attractor samples and lyap_max.

    Each row warm-starts from the previous row's final state so that
    attractor branches are followed continuously; after an escape the
    next row falls back to the cold start ``x0``.
    """
    if parameter_name not in _SCANNABLE:
        raise ValueError(f"parameter_name must be one of {_SCANNABLE}, got {parameter_name!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if keep < 1:
        raise ValueError("keep must be >= 1")
    values = np.linspace(prange[0], prange[1], steps)
    s_samples = np.full((steps, keep), np.nan)
    i_samples = np.full((steps, keep), np.nan)
    lyap_max = np.full(steps, np.nan)
    escapes: list[tuple[int, int]] = []

    state = (float(x0[0]), float(x0[1]))
    n_lyap = max(keep, 1000)
    for row, val in enumerate(values):
        q = replace(p, **{parameter_name: float(val)})
        S, I = state
        r, beta, a, K = q.r, q.beta, q.a, q.K
        escaped_at: int | None = None

        for k in range(transient):
            if not (abs(S) + abs(I) <= DIVERGENCE_BOUND):
                escaped_at = k
                break
            force = beta * S * I / (1.0 + a * S)
            S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force

        if escaped_at is None:
            q11, q21, q12, q22 = 1.0, 0.0, 0.0, 1.0
            acc1 = 0.0
            tiny = 1.0e-300
            for k in range(n_lyap):
                if not (abs(S) + abs(I) <= DIVERGENCE_BOUND):
                    escaped_at = transient + k
                    break
                if k < keep:
                    s_samples[row, k] = S
                    i_samples[row, k] = I
                den = 1.0 + a * S
                phi = beta * S / den
                dphi = beta / (den * den)
                j11 = r - 2.0 * r * S - I * dphi
                j12 = -phi
                j21 = I * dphi
                j22 = 1.0 - K + phi
                force = phi * I
                S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force
                m11 = j11 * q11 + j12 * q21
                m21 = j21 * q11 + j22 * q21
                m12 = j11 * q12 + j12 * q22
                m22 = j21 * q12 + j22 * q22
                r11 = math.hypot(m11, m21)
                if r11 < tiny:
                    r11 = tiny
                q11, q21 = m11 / r11, m21 / r11
                r12 = q11 * m12 + q21 * m22
                v1 = m12 - r12 * q11
                v2 = m22 - r12 * q21
                r22 = math.hypot(v1, v2)
                if r22 < tiny:
                    r22 = tiny
                q12, q22 = v1 / r22, v2 / r22
                acc1 += math.log(r11)
            if escaped_at is None:
                lyap_max[row] = acc1 / n_lyap

        if escaped_at is not None:
            escapes.append((row, escaped_at))
            s_samples[row, :] = np.nan
            i_samples[row, :] = np.nan
            lyap_max[row] = np.nan
            state = (float(x0[0]), float(x0[1]))
        else:
            state = (S, I)

    return ScanResult(
        parameter=parameter_name,
        values=values,
        s_samples=s_samples,
        i_samples=i_samples,
        lyap_max=lyap_max,
        escapes=escapes,
    )


@dataclass(frozen=True)
class CycleBirth:
    """Tangency parameter values where period-n orbits are born."""

    n: int
    r_values: np.ndarray


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


def find_cycle_births(
    n: int,
    r_window: tuple[float, float] = (3.0, 4.0),
    n_r_seeds: int = 400,
    n_x_seeds: int = 400,
    newton_iters: int = 60,
) -> CycleBirth:
    """Solve the tangency system for the axis (logistic) restriction.

    On the invariant axis I = 0 the map reduces to ``x -> r x (1 - x)``.
    A period-n orbit is born where ``f^n(x) = x`` and ``(f^n)'(x) = 1``
    hold simultaneously; this routine solves that 2x2 system in (x, r)
    with a damped Newton iteration over a dense seed grid, keeps roots
    whose orbit has minimal period exactly n, and merges r-values closer
    than 1e-6.

    ``n`` must lie in 3..8 and the window inside (3, 4].
    """
    if not isinstance(n, int) or not 3 <= n <= 8:
        raise ValueError(f"n must be an integer in 3..8, got {n}")
    lo, hi = float(r_window[0]), float(r_window[1])
    if not (3.0 <= lo < hi <= 4.0):
        raise ValueError(f"r_window must sit inside (3, 4], got {r_window}")

    r_seeds = np.linspace(lo + 1.0e-4, hi, n_r_seeds)
    x_seeds = np.linspace(0.005, 0.995, n_x_seeds)
    R, X = np.meshgrid(r_seeds, x_seeds)
    R = R.ravel().copy()
    X = X.ravel().copy()

    def tangency_residual(xx, rr):
        """G = (f^n(x) - x, (f^n)'(x) - 1) with forward sensitivities.

        Returns (G1, G2, s, v, m) where the Newton Jacobian is
        [[G2', s], [v, m]] with G2' = d(x_n)/dx0 - 1 = G2.
        """
        x = xx.copy()
        u = np.ones_like(x)      # d x_n / d x_0
        s = np.zeros_like(x)     # d x_n / d r
        v = np.zeros_like(x)     # d u / d x_0
        m = np.zeros_like(x)     # d u / d r
        for _ in range(n):
            fx = rr * (1.0 - 2.0 * x)
            fxx = -2.0 * rr
            fr = x * (1.0 - x)
            fxr = 1.0 - 2.0 * x
            v = fxx * u * u + fx * v
            m = fxx * u * s + fxr * u + fx * m
            s = fx * s + fr
            u = fx * u
            x = rr * x * (1.0 - x)
        return x - xx, u - 1.0, s, v, m

    with np.errstate(all="ignore"):
        for _ in range(newton_iters):
            g1, g2, s_, v_, m_ = tangency_residual(X, R)
            j11, j12, j21, j22 = g2, s_, v_, m_
            det = j11 * j22 - j12 * j21
            det = np.where(np.abs(det) < 1.0e-14, np.nan, det)
            dx = -(j22 * g1 - j12 * g2) / det
            dr = -(-j21 * g1 + j11 * g2) / det
            np.clip(dx, -0.05, 0.05, out=dx)
            np.clip(dr, -0.05, 0.05, out=dr)
            X += dx
            R += dr
            np.clip(X, 1.0e-6, 1.0 - 1.0e-6, out=X)
            np.clip(R, lo - 0.05, hi + 0.05, out=R)

        g1, g2, _, _, _ = tangency_residual(X, R)
        ok = (
            np.isfinite(g1)
            & np.isfinite(g2)
            & (np.abs(g1) <= 1.0e-12)
            & (np.abs(g2) <= 1.0e-10)
            & (R >= lo)
            & (R <= hi)
            & (X > 0.0)
            & (X < 1.0)
        )

    roots_x = X[ok]
    roots_r = R[ok]

    # keep only orbits whose minimal period is exactly n
    keep = np.ones(roots_x.shape[0], dtype=bool)
    for d in _divisors(n):
        y = roots_x.copy()
        for _ in range(d):
            y = roots_r * y * (1.0 - y)
        keep &= np.abs(y - roots_x) > 1.0e-9
    roots_r = roots_r[keep]

    roots_r.sort()
    merged: list[float] = []
    cluster: list[float] = []
    for rv in roots_r:
        if cluster and rv - cluster[-1] > 1.0e-6:
            merged.append(float(np.mean(cluster)))
            cluster = []
        cluster.append(float(rv))
    if cluster:
        merged.append(float(np.mean(cluster)))

    return CycleBirth(n=n, r_values=np.array(merged))


def _decompose(k: int) -> tuple[int, int]:
    s = 0
    while k % 2 == 0:
        k //= 2
        s += 1
    return s, k


def sharkovskii_precedes(m: int, n: int) -> bool:
    """Whether m comes strictly before n in the Sharkovskii order.

    The order runs through the odd numbers, then 2x the odds, then 4x
    the odds, and so on, finishing with the powers of two in descending
    order (..., 8, 4, 2, 1).  Irreflexive: k never precedes itself.
    """
    if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    if m == n:
        return False
    sm, qm = _decompose(m)
    sn, qn = _decompose(n)
    if qm > 1 and qn > 1:
        return (sm, qm) < (sn, qn)
    if qm > 1:
        return True
    if qn > 1:
        return False
    return sm > sn


def reproduction_candidates(p: ModelParams) -> tuple[float, float]:
    """Two candidate reproduction numbers, requires r > 1.

    The first is ``beta * (r-1) / (K * (r + a*(r-1)))``, i.e. the ratio
    of beta to the fold threshold, so it crosses 1 exactly when the
    endemic point appears.  The second, ``beta / ((a+1)*K)``, bounds the
    first from above and is 1-homogeneous in beta.
    """
    if not p.r > 1.0:
        raise ValueError(f"reproduction candidates require r > 1, got r={p.r}")
    ra = p.beta / beta0_threshold(p.r, p.a, p.K)
    rb = p.beta / ((p.a + 1.0) * p.K)
    return float(ra), float(rb)


def decay_envelope_check(p: ModelParams, x0, n: int = 200) -> bool:
    """Verify geometric decay of the infected mass along an orbit.

    Preconditions: ``beta < (1+a)*K`` and ``0 < S0 < 1`` (violations
    raise ``ValueError``); ``I0 >= 0``.  For ``I0 = 0`` the claim is
    trivially true.  Otherwise the orbit is iterated ``n`` steps and
    the checks are strict monotone decay, positivity, and the envelope

        (1-K)^k * I0  <=  I_k  <=  (beta/(1+a) + 1 - K)^k * I0.

    Returns False as soon as any inequality fails (a tiny relative
    slack of 1e-12 absorbs rounding).
    """
    if not p.beta < (1.0 + p.a) * p.K:
        raise ValueError(
            f"decay regime requires beta < (1+a)*K = {(1.0 + p.a) * p.K:.6g}, "
            f"got beta={p.beta}"
        )
    S0, I0 = float(x0[0]), float(x0[1])
    if not 0.0 < S0 < 1.0:
        raise ValueError(f"require 0 < S0 < 1, got S0={S0}")
    if I0 < 0.0:
        raise ValueError(f"require I0 >= 0, got I0={I0}")
    if I0 == 0.0:
        return True

    g1 = 1.0 - p.K
    g2 = p.beta / (1.0 + p.a) + 1.0 - p.K
    env_lo = 1.0
    env_hi = 1.0
    S, I = S0, I0
    slack = 1.0 + 1.0e-12
    for _ in range(n):
        if not (abs(S) + abs(I) <= DIVERGENCE_BOUND):
            return False
        force = p.beta * S * I / (1.0 + p.a * S)
        S, I_next = p.r * S * (1.0 - S) - force, (1.0 - p.K) * I + force
        env_lo *= g1
        env_hi *= g2
        if not (0.0 < I_next < I):
            return False
        if I_next * slack < env_lo * I0 or I_next > env_hi * I0 * slack:
            return False
        I = I_next
    return True
