"""Machine-precision return-time laws: per-k dynamic programming and the
geometric mixture survival function, plus truncated moments with exact
tail corrections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError
from .model import ModelParams

PROVENANCE_EXACT = "Exact"
PROVENANCE_SIMULATED = "Simulated"
PROVENANCE_ASYMPTOTIC = "Asymptotic"


@dataclass
class FixedKDistribution:
    """Exact law of the return time T for a fixed trap size k.

    pmf[t] = P_k[T = t] for t = 0..t_max; remainder is the mass beyond
    t_max.  final_state[l] is the not-yet-returned mass sitting at site l
    after t_max steps; it makes the truncated moments exactly correctable.
    """

    k: int
    beta: float
    pmf: np.ndarray
    remainder: float
    final_state: np.ndarray = field(repr=False)

    @property
    def t_max(self) -> int:
        return len(self.pmf) - 1

    def survival(self, t: float) -> float:
        """P_k[T > t]."""
        ti = int(math.floor(t))
        if ti < 0:
            return 1.0
        if ti >= self.t_max:
            return self.remainder
        # summed from the far end so deep tails do not cancel
        return self.remainder + float(np.sum(self.pmf[ti + 1:]))


@dataclass
class TailTable:
    """Survival values P[T > t] on an ascending time grid with provenance."""

    t_grid: np.ndarray
    survival: np.ndarray
    provenance: str
    ci_halfwidth: np.ndarray | None = None
    truncation_bound: float | None = None

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.survival = np.asarray(self.survival, dtype=float)
        if self.t_grid.shape != self.survival.shape:
            raise DomainError("t_grid and survival must have the same shape")
        if np.any(np.diff(self.t_grid) <= 0):
            raise DomainError("t_grid must be strictly ascending")
        if np.any((self.survival < 0) | (self.survival > 1)):
            raise DomainError("survival values must lie in [0, 1]")
        if np.any(np.diff(self.survival) > 1e-15):
            raise DomainError("survival must be nonincreasing along the grid")
        if self.provenance == PROVENANCE_SIMULATED:
            if self.ci_halfwidth is None:
                raise DomainError("Simulated tables need ci_halfwidth")
            self.ci_halfwidth = np.asarray(self.ci_halfwidth, dtype=float)
            if np.any(self.ci_halfwidth <= 0):
                raise DomainError("ci_halfwidth must be positive")

    def to_csv(self, path) -> None:
        """Write `t,survival,provenance,bound` rows at full precision."""
        with open(path, "w") as fh:
            fh.write("t,survival,provenance,bound\n")
            for i in range(len(self.t_grid)):
                if self.provenance == PROVENANCE_SIMULATED:
                    bound = self.ci_halfwidth[i]
                elif self.truncation_bound is not None:
                    bound = self.truncation_bound
                else:
                    bound = 0.0
                fh.write(
                    f"{self.t_grid[i]:.17g},{self.survival[i]:.17g},"
                    f"{self.provenance},{bound:.17g}\n"
                )

    @staticmethod
    def from_csv(path) -> "TailTable":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "t,survival,provenance,bound":
                raise DomainError(f"unexpected tail CSV header: {header!r}")
            for line in fh:
                line = line.strip()
                if line:
                    rows.append(line.split(","))
        if not rows:
            raise DomainError(f"tail file {path} has no data rows")
        t = np.array([float(r[0]) for r in rows])
        s = np.array([float(r[1]) for r in rows])
        prov = rows[0][2]
        bounds = np.array([float(r[3]) for r in rows])
        if prov == PROVENANCE_SIMULATED:
            return TailTable(t, s, prov, ci_halfwidth=bounds)
        return TailTable(t, s, prov, truncation_bound=float(bounds[0]))


def log_grid(t_min: float, t_max: float, beta: float,
             points_per_period: int = 32) -> np.ndarray:
    """Logarithmic grid with a fixed point count per multiplicative
    beta-period, so one oscillation of the log-periodic factor is resolved."""
    if not (t_min >= 1 and t_max > t_min):
        raise DomainError("need 1 <= t_min < t_max")
    if points_per_period < 1:
        raise DomainError("points_per_period must be >= 1")
    n_periods = math.log(t_max / t_min) / math.log(beta)
    n = int(math.ceil(n_periods * points_per_period)) + 1
    return t_min * beta ** (np.arange(n) / points_per_period)


def fixed_k_return_distribution(beta: float, k: int, t_max: int) -> FixedKDistribution:
    """Exact forward-DP law of the first return time to 0, truncated at t_max."""
    if beta <= 1.0:
        raise DomainError(f"beta must be > 1, got {beta}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if t_max < 2:
        raise DomainError(f"t_max must be >= 2, got {t_max}")
    if k * math.log(beta) > 700:
        raise OverflowError(f"beta**k overflows for k={k}")
    pmf = np.zeros(t_max + 1)
    empty_grid = np.empty(0, dtype=np.int64)
    remainder, _m1, _m2, _surv, state = kernels.dp_fixed_k(
        float(beta), int(k), int(t_max), empty_grid, pmf, True
    )
    return FixedKDistribution(k=k, beta=beta, pmf=pmf,
                              remainder=float(remainder), final_state=state)


def _k_max_for_eps(alpha: float, eps: float) -> int:
    if eps <= 0:
        raise DomainError("eps must be positive")
    return max(0, int(math.ceil(math.log(eps) / math.log(alpha))))


def mixture_tail(params: ModelParams, t_grid, eps: float = 1e-12,
                 points_per_period: int = 32) -> TailTable:
    """P[T > t] of the geometric mixture, truncated at k_max with omitted
    mass at most alpha**(k_max + 1) <= eps.

    t_grid may be an array of times or a (t_min, t_max) pair, in which case
    a log grid is generated.  Per-k DP runs in ascending k; the reduction
    uses compensated summation so results do not depend on scheduling.
    """
    alpha, beta = params.alpha, params.beta
    if isinstance(t_grid, tuple) and len(t_grid) == 2:
        t_grid = log_grid(t_grid[0], t_grid[1], beta, points_per_period)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise DomainError("grid times must be >= 0")
    k_max = _k_max_for_eps(alpha, eps)
    grid_int = np.floor(t_grid).astype(np.int64)
    order = np.argsort(grid_int, kind="stable")
    sorted_grid = grid_int[order]
    t_cap = int(sorted_grid[-1]) if len(sorted_grid) else 2
    t_cap = max(t_cap, 2)
    dummy_pmf = np.empty(1)

    per_k_surv = np.zeros((k_max + 1, len(t_grid)))
    for k in range(1, k_max + 1):
        _rem, _m1, _m2, surv_sorted, _state = kernels.dp_fixed_k(
            float(beta), int(k), t_cap, sorted_grid, dummy_pmf, False
        )
        per_k_surv[k, order] = surv_sorted
    # k = 0 contributes the atom T = 0: survival 0 for t >= 0.
    weights = (1.0 - alpha) * alpha ** np.arange(k_max + 1)
    survival = np.array(
        [math.fsum(weights[k] * per_k_surv[k, j] for k in range(k_max + 1))
         for j in range(len(t_grid))]
    )
    bound = alpha ** (k_max + 1)
    # the omitted k > k_max mass can only add to the survival; clip tiny
    # negative rounding noise and enforce exact monotonicity of the sums
    survival = np.minimum.accumulate(np.clip(survival, 0.0, 1.0))
    return TailTable(t_grid=t_grid, survival=survival,
                     provenance=PROVENANCE_EXACT, truncation_bound=bound)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def hit_zero_time_moments(beta: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form first and second moments of the time to hit 0 from each
    site of the trap {0, ..., k}; used to correct truncated moments exactly.

    Returns (m, s) with m[l] = E_l[T_0] and s[l] = E_l[T_0**2].
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    # one-level descent times e_j = E[j -> j-1] = 2*(beta**k - beta**(j-1))
    #                                             / ((beta-1)*beta**(j-1)) + 1
    j = np.arange(1, k + 1, dtype=float)
    e = 2.0 * (beta ** k - beta ** (j - 1)) / ((beta - 1.0) * beta ** (j - 1)) - 1.0
    m = np.zeros(k + 1)
    m[1:] = np.cumsum(e)
    # second moments solve (I - Q) s = 2 m - 1 over interior states
    p_up = beta / (1.0 + beta)
    p_dn = 1.0 / (1.0 + beta)
    Q = np.zeros((k, k))  # states 1..k
    for l in range(1, k + 1):
        if l == k:
            if k >= 2:
                Q[l - 1, l - 2] = 1.0
        else:
            if l + 1 <= k:
                Q[l - 1, l] = p_up if l < k else 0.0
            if l - 1 >= 1:
                Q[l - 1, l - 2] = p_dn
    rhs = 2.0 * m[1:] - 1.0
    s = np.zeros(k + 1)
    s[1:] = np.linalg.solve(np.eye(k) - Q, rhs)
    return m, s


def truncated_moment(dist: FixedKDistribution, order: int) -> tuple[float, float]:
    """Moment of T for the fixed-k law, with the beyond-horizon mass resolved
    exactly through the closed-form hitting-time moments of the final state.

    Returns (value, bound) where bound envelopes the accumulated float
    rounding of the DP sweep.
    """
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    t = np.arange(len(dist.pmf), dtype=float)
    head = float(np.dot(t ** order, dist.pmf))
    if dist.k == 0:
        return 0.0, 0.0
    tail = 0.0
    if dist.remainder > 0.0:
        m, s = hit_zero_time_moments(dist.beta, dist.k)
        v = dist.final_state
        t_max = float(dist.t_max)
        if order == 1:
            tail = float(np.sum(v[1:] * (t_max + m[1:])))
        else:
            tail = float(np.sum(v[1:] * (t_max ** 2 + 2.0 * t_max * m[1:] + s[1:])))
    value = head + tail
    # envelope for float rounding accumulated over the t_max DP steps
    bound = 1e-12 * float(dist.t_max) ** order
    return value, bound


def mixture_moment(params: ModelParams, order: int, t_max: int,
                   eps: float = 1e-9) -> tuple[float, float]:
    """Moment of T under the geometric mixture, k-truncated so that the
    omitted trap sizes contribute at most ~eps (requires alpha*beta**order < 1
    for finiteness).  Returns (value, bound)."""
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    alpha, beta = params.alpha, params.beta
    ab = alpha * beta ** order
    if ab >= 1.0:
        raise DomainError(
            f"order-{order} mixture moment is infinite for alpha*beta**{order} >= 1"
        )
    # E_k[T**order] grows like beta**(order*k); pick k_max so the omitted
    # geometric tail sum is below eps
    if order == 1:
        c = 2.0 * (1.0 - alpha) / ((beta - 1.0) * (1.0 - ab))
    else:
        c = 16.0 * (1.0 - alpha) * beta ** 2 / ((beta - 1.0) ** 4 * (1.0 - ab))
    k_max = int(math.ceil(math.log(eps / max(c, 1e-300)) / math.log(ab))) + 1
    k_max = max(k_max, _k_max_for_eps(alpha, eps))
    total = 0.0
    bound = c * ab ** (k_max + 1)
    parts = []
    for k in range(1, k_max + 1):
        dist = fixed_k_return_distribution(beta, k, t_max)
        val, b = truncated_moment(dist, order)
        w = (1.0 - alpha) * alpha ** k
        parts.append(w * val)
        bound += w * b
    total = math.fsum(parts)
    return total, bound
