"""Model parameters and closed-form decay-rate envelopes.

The model operator on the collar cylinder [0, x_max] x M is

    -d^2/dx^2 + C/x^2 + mu x^beta        per boundary mode mu,

with C = (beta*n/4) * (1 + beta*n/4) >= 3/4 determined by the boundary
dimension n and the metric-degeneracy exponent beta (beta * n >= 2 standing).
The envelope A(lambda) against which boundary-concentration observables are
measured depends only on (n, beta, p) and is evaluated here in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ModelParams",
    "RateSpec",
    "c_beta",
    "theoretical_rate",
    "eval_rate",
]

# RateSpec.kind values
POWER = "power"
LOGLOG_OVER_LOG = "loglog-over-log"
ONE_OVER_LOG = "one-over-log"
LOG_OVER_LINEAR = "log-over-linear"

_RATE_KINDS = (POWER, LOGLOG_OVER_LOG, ONE_OVER_LOG, LOG_OVER_LINEAR)


def c_beta(n: int, beta: float) -> float:
    """Singular-potential coupling (beta*n/4)(1 + beta*n/4).

    Minimum 3/4, attained exactly at beta*n = 2 (the critical case).
    """
    _check_n_beta(n, beta)
    q = beta * n / 4.0
    return q * (1.0 + q)


def _check_n_beta(n, beta) -> None:
    if not isinstance(n, (int,)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"boundary dimension n must be a positive integer, got {n!r}")
    if not beta > 0:
        raise ValueError(f"degeneracy exponent beta must be positive, got {beta!r}")
    if beta * n < 2:
        raise ValueError(
            f"beta*n = {beta * n:g} < 2: outside the standing assumption beta >= 2/n"
        )


@dataclass(frozen=True)
class ModelParams:
    """Immutable model configuration.

    n           boundary dimension (positive integer)
    beta        metric degeneracy exponent, beta*n >= 2
    eps         collar depth used by region preconditions, 0 < eps <= x_max
    x_max       right end of the radial interval (artificial interior cut)
    mesh_nodes  floor on interior mesh nodes per assembled operator
    mesh_kappa  mesh density factor: nodes >= kappa * (b-a) * sqrt(lambda)
    delta_slack localisation slack delta >= 0; trace shift is 2*(1+delta)^2*lambda
    """

    n: int = 1
    beta: float = 2.0
    eps: float = 1.0
    x_max: float = 1.0
    mesh_nodes: int = 64
    mesh_kappa: float = 10.0
    delta_slack: float = 0.0

    def __post_init__(self):
        _check_n_beta(self.n, self.beta)
        if not (0.0 < self.eps <= self.x_max):
            raise ValueError(f"eps must lie in (0, x_max], got eps={self.eps!r}")
        if not self.x_max > 0:
            raise ValueError(f"x_max must be positive, got {self.x_max!r}")
        if self.mesh_nodes < 3:
            raise ValueError(f"mesh_nodes floor must be >= 3, got {self.mesh_nodes!r}")
        if not self.mesh_kappa > 0:
            raise ValueError(f"mesh_kappa must be positive, got {self.mesh_kappa!r}")
        if self.delta_slack < 0:
            raise ValueError(f"delta_slack must be >= 0, got {self.delta_slack!r}")

    @property
    def c_beta(self) -> float:
        return c_beta(self.n, self.beta)

    @property
    def d(self) -> float:
        """Effective dimension n*(1 + beta/2) governing the counting asymptotics."""
        return self.n * (1.0 + self.beta / 2.0)

    @property
    def gamma(self) -> float:
        """Bootstrap exponent 1/(n*beta)."""
        return 1.0 / (self.n * self.beta)

    @property
    def critical(self) -> bool:
        """True in the borderline case beta*n = 2 (log-corrected envelopes)."""
        return self.beta * self.n == 2.0


@dataclass(frozen=True)
class RateSpec:
    """A closed-form envelope lambda -> A(lambda).

    kind is one of 'power' (lambda**exponent), 'loglog-over-log',
    'one-over-log', 'log-over-linear'; p records the moment order it bounds.
    """

    kind: str
    p: float
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in _RATE_KINDS:
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if self.kind == POWER and self.exponent is None:
            raise ValueError("power rate needs an exponent")
        if self.kind != POWER and self.exponent is not None:
            raise ValueError(f"{self.kind} rate takes no exponent")


def theoretical_rate(params: ModelParams, p: float) -> RateSpec:
    """Envelope for the p-th boundary-concentration observable.

    p = 1 bounds the first moment / distance form; p >= 2 bounds the p-th
    moment of the radial marginal. Orders in (1, 2) carry no envelope and
    are rejected, as is p < 1.
    """
    if p < 1:
        raise ValueError(f"moment order p must be >= 1, got {p!r}")
    if 1 < p < 2:
        raise ValueError(f"no envelope for moment orders in (1, 2), got p={p!r}")
    bn = params.beta * params.n
    if p == 1:
        if bn == 2:
            return RateSpec(LOGLOG_OVER_LOG, p=1.0)
        return RateSpec(POWER, p=1.0, exponent=-0.5 + 1.0 / bn)
    # p >= 2
    if bn == 2:
        return RateSpec(ONE_OVER_LOG, p=p)
    if bn == 6 and p == 2:
        return RateSpec(LOG_OVER_LINEAR, p=2.0)
    return RateSpec(POWER, p=p, exponent=max(0.5 - bn / 4.0, -1.0))


def eval_rate(rate: RateSpec, lam: float) -> float:
    """Evaluate A(lambda). Requires lambda > e so the log forms are positive."""
    if not lam > math.e:
        raise ValueError(f"rate evaluation needs lambda > e, got {lam!r}")
    if rate.kind == POWER:
        return lam ** rate.exponent
    log_l = math.log(lam)
    if rate.kind == LOGLOG_OVER_LOG:
        return math.log(log_l) / log_l
    if rate.kind == ONE_OVER_LOG:
        return 1.0 / log_l
    return log_l / lam  # LOG_OVER_LINEAR
