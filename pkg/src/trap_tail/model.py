"""Closed-form quantities of the biased walk in a geometric trap.

The walk lives on {0, ..., k} with edge conductance beta**l on {l, l+1},
reflection at both ends, and is averaged over a geometric trap size k.
Everything in this module is an explicit formula; the heavy machinery
(dynamic programming, simulation, asymptotics) lives elsewhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


class Infinite:
    """Singleton marker for an infinite moment.

    Deliberately not a float so callers cannot feed it into arithmetic by
    accident; the heavy-tail regimes have to be handled explicitly.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __bool__(self):
        return True


INFINITE = Infinite()


@dataclass(frozen=True)
class ModelParams:
    """Trap-size parameter alpha, drift parameter beta and the derived
    tail exponent rho = -log(alpha)/log(beta).

    rho is stored once at construction so every module sees bit-identical
    values; use :func:`make_params` instead of constructing directly.
    """

    alpha: float
    beta: float
    rho: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (self.beta > 1.0):
            raise DomainError(f"beta must be > 1, got {self.beta}")
        expected = -math.log(self.alpha) / math.log(self.beta)
        if not math.isclose(self.rho, expected, rel_tol=1e-15, abs_tol=0.0):
            raise DomainError(
                f"stored rho {self.rho!r} inconsistent with alpha, beta "
                f"(expected {expected!r})"
            )


def make_params(alpha: float, beta: float) -> ModelParams:
    """Validate (alpha, beta) and attach the derived exponent rho."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if not (beta > 1.0):
        raise DomainError(f"beta must be > 1, got {beta}")
    rho = -math.log(alpha) / math.log(beta)
    return ModelParams(alpha=alpha, beta=beta, rho=rho)


class WalkKind(enum.Enum):
    """Which of the walks of the trap construction is meant.

    Free is the walk on Z drifting towards 0 (first step forced away from
    0); FreeReversed is its mirror image.  ConditionedToZero is the trap
    walk conditioned to return to 0 before reaching k; ConditionedToK is
    the walk started at k and conditioned to come back to k before 0.
    """

    Free = "free"
    FreeReversed = "free_reversed"
    ConditionedToZero = "conditioned_to_zero"
    ConditionedToK = "conditioned_to_k"


def _pow_minus_one(beta: float, k: float) -> float:
    """beta**k - 1 without cancellation, raising OverflowError when huge."""
    return math.expm1(k * math.log(beta))


def expected_excursion_fixed(beta: float, k: int) -> float:
    """Mean excursion length 2*(beta**k - 1)/(beta - 1) for a trap of size k."""
    if beta <= 1.0:
        raise DomainError(f"beta must be > 1, got {beta}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0:
        return 0.0
    return 2.0 * _pow_minus_one(beta, k) / (beta - 1.0)


def expected_excursion(params: ModelParams) -> float | Infinite:
    """Mean excursion length averaged over the geometric trap size.

    Finite (equal to 2*alpha/(1 - alpha*beta)) exactly when rho > 1.
    """
    if params.rho > 1.0:
        return 2.0 * params.alpha / (1.0 - params.alpha * params.beta)
    return INFINITE


def second_moment_finite(params: ModelParams) -> bool:
    """Whether the mixed excursion length has a finite second moment (rho > 2)."""
    return params.rho > 2.0


def reach_far_end_prob(beta: float, k: int) -> float:
    """P_k[A]: probability of hitting k before returning to 0.

    Effective-resistance formula (beta - 1)/(beta - beta**(1-k)); always at
    least (beta - 1)/beta.
    """
    if beta <= 1.0:
        raise DomainError(f"beta must be > 1, got {beta}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return (beta - 1.0) / (beta - beta ** (1.0 - k))


def return_before_zero_prob(beta: float, k: int) -> float:
    """P_k[B]: an excursion from k comes back to k before hitting 0."""
    if beta <= 1.0:
        raise DomainError(f"beta must be > 1, got {beta}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return 1.0 - (beta - 1.0) / _pow_minus_one(beta, k)


def excursion_count_mean(params_or_beta, k: int | None = None) -> float | Infinite:
    """Mean number of non-final excursions from k, given the walk got there.

    With a fixed k this is (beta**k - beta)/(beta - 1).  Averaged over the
    geometric trap size (with geometric weights on the per-k conditional
    means) it is alpha**2*beta/(1 - alpha*beta), infinite if alpha*beta >= 1.
    """
    if k is not None:
        beta = params_or_beta.beta if isinstance(params_or_beta, ModelParams) else params_or_beta
        if beta <= 1.0:
            raise DomainError(f"beta must be > 1, got {beta}")
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        return (_pow_minus_one(beta, k) - (beta - 1.0)) / (beta - 1.0)
    params = params_or_beta
    if not isinstance(params, ModelParams):
        raise DomainError("mixed-k mean requires ModelParams")
    ab = params.alpha * params.beta
    if ab >= 1.0:
        return INFINITE
    return params.alpha ** 2 * params.beta / (1.0 - ab)


class FreeWalkReturnTime:
    """Return time of the free walk on Z drifting towards the start.

    Conditioned on the first step moving away, the moment generating
    function is (beta + 1 - sqrt((beta+1)**2 - 4*beta*exp(2*lambda)))/2 for
    lambda up to log((beta+1)/(2*sqrt(beta))) (boundary included; the
    discriminant vanishes there).
    """

    def __init__(self, beta: float):
        if beta <= 1.0:
            raise DomainError(f"beta must be > 1, got {beta}")
        self.beta = beta

    @property
    def lambda_max(self) -> float:
        return math.log((self.beta + 1.0) / (2.0 * math.sqrt(self.beta)))

    def mgf(self, lam: float) -> float:
        b = self.beta
        disc = (b + 1.0) ** 2 - 4.0 * b * math.exp(2.0 * lam)
        if disc < 0.0:
            raise DomainError(
                f"lambda={lam} beyond the radius of convergence "
                f"(max {self.lambda_max})"
            )
        return 0.5 * (b + 1.0 - math.sqrt(disc))

    def mean(self) -> float:
        return 2.0 * self.beta / (self.beta - 1.0)

    def variance(self) -> float:
        b = self.beta
        return 4.0 * b * (b + 1.0) / (b - 1.0) ** 3


def free_walk_return_mgf(beta: float, lam: float) -> float:
    return FreeWalkReturnTime(beta).mgf(lam)


def conditioned_up_prob(kind: WalkKind, beta: float, k: int, l: int) -> float:
    """One-step up-probability of the h-transformed walk at interior site l.

    ConditionedToZero: (1/(beta+1)) * (1 - (beta-1)/(beta**(k-l) - 1)).
    ConditionedToK:    (beta/(beta+1)) * (beta**(l+1) - 1)/(beta**(l+1) - beta).
    """
    if beta <= 1.0:
        raise DomainError(f"beta must be > 1, got {beta}")
    if not 1 <= l <= k - 1:
        raise DomainError(f"site l={l} outside interior {{1,...,{k - 1}}}")
    if kind is WalkKind.ConditionedToZero:
        return (1.0 - (beta - 1.0) / _pow_minus_one(beta, k - l)) / (beta + 1.0)
    if kind is WalkKind.ConditionedToK:
        num = _pow_minus_one(beta, l + 1)
        return beta / (beta + 1.0) * num / (num - (beta - 1.0))
    raise DomainError(f"walk kind {kind} has no trap-conditioned transition")
