"""Planar SIR map with saturated incidence, and its three-compartment parent.

The working object is the two-dimensional map

    S' = r*S*(1 - S) - beta*S*I/(1 + a*S)
    I' = (1 - K)*I + beta*S*I/(1 + a*S)

acting on scaled susceptible/infected pairs ``(S, I)``.  Logistic growth
drives the susceptible pool, a saturating incidence term moves mass from
S to I, and a fixed fraction ``K`` of the infected pool is removed each
step.  The three-compartment parent model (with carrying capacity and an
explicit removed class) lives in :func:`step_full`; :func:`scale_params`
collapses it onto the planar map.

All arithmetic is double precision.  Orbits are guarded against
divergence: once ``|S| + |I|`` exceeds :data:`DIVERGENCE_BOUND` the
iteration stops and the escape step is reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

__all__ = [
    "DIVERGENCE_BOUND",
    "TOL_HYP",
    "TOL_BOUNDARY",
    "TOL_CYCLE",
    "DEFAULT_TRANSIENT",
    "DEFAULT_WINDOW",
    "DEFAULT_MAX_PERIOD",
    "DivergenceError",
    "ModelParams",
    "UnscaledParams",
    "State",
    "FullState",
    "Orbit",
    "scale_params",
    "step",
    "step_full",
    "incidence",
    "jacobian",
    "iterate",
]

#: Orbit is declared escaped once |S| + |I| exceeds this.
DIVERGENCE_BOUND = 1.0e6
#: Half-width of the band around |mu| = 1 treated as non-hyperbolic.
TOL_HYP = 1.0e-9
#: Absolute tolerance for matching a point to a bifurcation boundary.
TOL_BOUNDARY = 1.0e-9
#: Recurrence tolerance (sup norm) for period detection.
TOL_CYCLE = 1.0e-7
#: Default number of discarded warm-up iterations.
DEFAULT_TRANSIENT = 10_000
#: Default number of retained post-transient samples.
DEFAULT_WINDOW = 1_000
#: Default largest period that detection will report.
DEFAULT_MAX_PERIOD = 64


class DivergenceError(RuntimeError):
    """Raised when an orbit leaves the guard region.

    Attributes
    ----------
    step : int
        Global iteration index (0-based, counted from the initial state)
        at which the guard triggered.
    """

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"orbit escaped the guard region at step {step}")


class State(NamedTuple):
    """A point of the planar map: scaled susceptible and infected mass."""

    S: float
    I: float


class FullState(NamedTuple):
    """A point of the three-compartment model."""

    S: float
    I: float
    R: float


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the planar map.

    Parameters
    ----------
    r : float
        Intrinsic growth factor of the susceptible pool, ``r > 0``.
        The fixed-point analysis is only meaningful for ``r > 1``.
    beta : float
        Transmission strength, ``beta > 0``.
    a : float
        Incidence saturation (inhibition) coefficient, ``a >= 0``.
    K : float
        Removed fraction of the infected pool per step, ``0 < K < 1``.
    """

    r: float
    beta: float
    a: float
    K: float

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ValueError(f"require r > 0, got r={self.r}")
        if not self.beta > 0:
            raise ValueError(f"require beta > 0, got beta={self.beta}")
        if self.a < 0:
            raise ValueError(f"require a >= 0, got a={self.a}")
        if not 0 < self.K < 1:
            raise ValueError(f"require 0 < K < 1, got K={self.K}")


@dataclass(frozen=True)
class UnscaledParams:
    """Parameters of the three-compartment model.

    ``rho`` is the intrinsic growth rate, ``c`` the carrying capacity,
    ``beta``/``a`` the transmission and saturation coefficients in
    original units, ``mu`` and ``gamma`` the death and recovery rates of
    the infected class, and ``lam`` the removal rate of the recovered
    class.  ``mu + gamma`` must lie in (0, 1); it becomes ``K`` after
    scaling.
    """

    rho: float
    c: float
    beta: float
    a: float
    mu: float
    gamma: float
    lam: float

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"require rho > 0, got rho={self.rho}")
        if not self.c > 0:
            raise ValueError(f"require c > 0, got c={self.c}")
        if not self.beta > 0:
            raise ValueError(f"require beta > 0, got beta={self.beta}")
        if self.a < 0:
            raise ValueError(f"require a >= 0, got a={self.a}")
        if self.mu < 0 or self.gamma < 0:
            raise ValueError("require mu >= 0 and gamma >= 0")
        if not 0 < self.mu + self.gamma < 1:
            raise ValueError(
                f"require 0 < mu + gamma < 1, got mu + gamma = {self.mu + self.gamma}"
            )
        if not 0 < self.lam < 1:
            raise ValueError(f"require 0 < lam < 1, got lam={self.lam}")


def scale_params(u: UnscaledParams) -> tuple[ModelParams, float]:
    """Collapse the three-compartment parameters onto the planar map.

    Returns ``(params, alpha)`` where ``alpha`` is the common scale
    factor for S and I: a trajectory of :func:`step_full` divided by
    ``alpha`` coincides with the trajectory of :func:`step` under
    ``params``.  The growth factor becomes ``r = 1 + rho`` and the
    removed fraction ``K = mu + gamma``.
    """
    alpha = u.c * (1.0 + u.rho) / u.rho
    p = ModelParams(
        r=1.0 + u.rho,
        beta=alpha * u.beta,
        a=alpha * u.a,
        K=u.mu + u.gamma,
    )
    return p, alpha


def incidence(p: ModelParams, S: float) -> float:
    """Saturating incidence factor ``beta*S/(1 + a*S)``."""
    return p.beta * S / (1.0 + p.a * S)


def step(p: ModelParams, x: tuple[float, float]) -> State:
    """One iteration of the planar map."""
    S, I = x
    force = p.beta * S * I / (1.0 + p.a * S)
    return State(
        S=p.r * S * (1.0 - S) - force,
        I=(1.0 - p.K) * I + force,
    )


def step_full(u: UnscaledParams, x: tuple[float, float, float]) -> FullState:
    """One iteration of the three-compartment model.

    The susceptible update composes retention with net logistic growth,
    ``S' = S + rho*S*(1 - S/c) - incidence``, which is the form whose
    rescaling (see :func:`scale_params`) reproduces the planar map with
    ``r = 1 + rho``.  Infected mass decays by the combined removal rate
    ``mu + gamma`` and gains the incidence; the removed class collects
    ``gamma*I`` and loses a fraction ``lam`` per step.
    """
    S, I, R = x
    force = u.beta * S * I / (1.0 + u.a * S)
    K = u.mu + u.gamma
    return FullState(
        S=S + u.rho * S * (1.0 - S / u.c) - force,
        I=(1.0 - K) * I + force,
        R=u.gamma * I + (1.0 - u.lam) * R,
    )


def jacobian(p: ModelParams, x: tuple[float, float]) -> np.ndarray:
    """Jacobian matrix of :func:`step` at ``x``, as a (2, 2) float array.

    Uses the closed-form partial derivatives; the saturating term
    contributes ``beta*I/(1 + a*S)**2`` to the S-row and its negative
    image to the I-row.  Raises ``ValueError`` if any entry fails to be
    finite (e.g. on the pole ``1 + a*S = 0``).
    """
    S, I = x
    den = 1.0 + p.a * S
    phi = p.beta * S / den
    dphi = p.beta / (den * den)
    J = np.array(
        [
            [p.r - 2.0 * p.r * S - I * dphi, -phi],
            [I * dphi, 1.0 - p.K + phi],
        ],
        dtype=np.float64,
    )
    if not np.all(np.isfinite(J)):
        raise ValueError(f"Jacobian is not finite at (S, I) = ({S}, {I})")
    return J


@dataclass(frozen=True)
class Orbit:
    """Post-transient orbit samples.

    ``states`` holds the retained samples as an (m, 2) array.  If the
    divergence guard triggered, ``escaped_at`` is the global iteration
    index of the offending step and the sample array is truncated at the
    last in-bounds state; otherwise ``escaped_at`` is ``None``.
    """

    states: np.ndarray
    escaped_at: int | None = None

    def __len__(self) -> int:
        return self.states.shape[0]

    def __getitem__(self, i) -> State:
        row = self.states[i]
        if row.ndim == 1:
            return State(float(row[0]), float(row[1]))
        return row

    def __iter__(self) -> Iterator[State]:
        for row in self.states:
            yield State(float(row[0]), float(row[1]))

    @property
    def S(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def I(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def escaped(self) -> bool:
        return self.escaped_at is not None


def iterate(
    p: ModelParams,
    x0: tuple[float, float],
    n_transient: int = DEFAULT_TRANSIENT,
    n_keep: int = DEFAULT_WINDOW,
) -> Orbit:
    """Iterate the planar map and keep the last ``n_keep`` states.

    The first ``n_transient`` iterations are discarded.  Escape is a
    distinguished outcome, not an error: the returned orbit carries the
    escape step and whatever in-bounds samples were collected before it.
    """
    if n_transient < 0 or n_keep < 0:
        raise ValueError("n_transient and n_keep must be non-negative")
    S, I = float(x0[0]), float(x0[1])
    r, beta, a, K = p.r, p.beta, p.a, p.K
    bound = DIVERGENCE_BOUND

    # `not (total <= bound)` also catches NaN
    for n in range(n_transient):
        if not (abs(S) + abs(I) <= bound):
            return Orbit(states=np.empty((0, 2)), escaped_at=n)
        force = beta * S * I / (1.0 + a * S)
        S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force

    out = np.empty((n_keep, 2), dtype=np.float64)
    for k in range(n_keep):
        if not (abs(S) + abs(I) <= bound):
            return Orbit(states=out[:k].copy(), escaped_at=n_transient + k)
        out[k, 0] = S
        out[k, 1] = I
        force = beta * S * I / (1.0 + a * S)
        S, I = r * S * (1.0 - S) - force, (1.0 - K) * I + force
    return Orbit(states=out, escaped_at=None)
