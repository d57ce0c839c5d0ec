"""Seeded Monte Carlo simulation of trap excursions and the conditioned
walks, with reproducible per-sample random streams."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import kernels, model
from .errors import DomainError, EmptyInputError, IterationLimitError
from .exact import PROVENANCE_SIMULATED, TailTable
from .model import ModelParams, WalkKind

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int = 0
    workers: int = 1
    fixed_k: int | None = None
    step_cap: int = 10 ** 9

    def __post_init__(self):
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.fixed_k is not None and self.fixed_k < 0:
            raise DomainError("fixed_k must be >= 0")
        if self.step_cap < 2:
            raise DomainError("step_cap must be >= 2")


@dataclass(frozen=True)
class ExcursionSample:
    """One simulated excursion and its decomposition."""

    k: int
    reached_far_end: bool
    T: int
    T_in: int
    T_exc: int
    T_out: int
    N: int

    def __post_init__(self):
        if self.reached_far_end and self.T != self.T_in + self.T_exc + self.T_out:
            raise DomainError("decomposition identity violated")


@dataclass
class ExcursionBatch:
    """Column-oriented collection of excursion samples."""

    k: np.ndarray
    reached: np.ndarray
    T: np.ndarray
    T_in: np.ndarray
    T_exc: np.ndarray
    T_out: np.ndarray
    N: np.ndarray
    exc_sq: np.ndarray = field(repr=False)  # sum of squared excursion lengths

    def __len__(self):
        return len(self.T)

    def __getitem__(self, i: int) -> ExcursionSample:
        return ExcursionSample(
            k=int(self.k[i]), reached_far_end=bool(self.reached[i]),
            T=int(self.T[i]), T_in=int(self.T_in[i]), T_exc=int(self.T_exc[i]),
            T_out=int(self.T_out[i]), N=int(self.N[i]),
        )

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,reached,T,T_in,T_exc,T_out,N\n")
            for i in range(len(self)):
                fh.write(
                    f"{self.k[i]},{self.reached[i]},{self.T[i]},{self.T_in[i]},"
                    f"{self.T_exc[i]},{self.T_out[i]},{self.N[i]}\n"
                )


def _run_threads(workers: int, fn, *args):
    prev = numba.get_num_threads()
    numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
    try:
        fn(*args)
    finally:
        numba.set_num_threads(prev)


def sample_excursions(params: ModelParams, config: SimConfig) -> ExcursionBatch:
    """Simulate config.n_samples independent excursions.

    Deterministic given (seed, n_samples); the worker count only affects
    wall time, never values."""
    n = config.n_samples
    fixed_k = -1 if config.fixed_k is None else config.fixed_k
    if fixed_k >= 0 and fixed_k * math.log(params.beta) > 60 * math.log(2):
        raise DomainError("fixed_k too large to simulate")
    k_out = np.zeros(n, dtype=np.int16)
    reached = np.zeros(n, dtype=np.int8)
    T = np.zeros(n, dtype=np.int64)
    T_in = np.zeros(n, dtype=np.int32)
    T_exc = np.zeros(n, dtype=np.int64)
    T_out = np.zeros(n, dtype=np.int32)
    N = np.zeros(n, dtype=np.int64)
    exc_sq = np.zeros(n, dtype=np.int64)
    fail = np.zeros(n, dtype=np.int8)
    _run_threads(
        config.workers, kernels.excursion_batch,
        n, config.seed, math.log(params.alpha), params.beta, fixed_k,
        config.step_cap, k_out, reached, T, T_in, T_exc, T_out, N, exc_sq, fail,
    )
    if fail.any():
        idx = int(np.flatnonzero(fail)[0])
        raise IterationLimitError(
            f"excursion sample {idx} exceeded step cap {config.step_cap}"
        )
    return ExcursionBatch(k=k_out, reached=reached, T=T, T_in=T_in,
                          T_exc=T_exc, T_out=T_out, N=N, exc_sq=exc_sq)


def sample_excursion(params: ModelParams, config: SimConfig,
                     stream_index: int = 0) -> ExcursionSample:
    """Single excursion drawn from the stream of the given sample index."""
    one = SimConfig(n_samples=stream_index + 1, seed=config.seed,
                    workers=1, fixed_k=config.fixed_k, step_cap=config.step_cap)
    # only the requested stream is needed, but streams are index-keyed so
    # simulating up to it is the cheap, obviously-correct route
    batch = sample_excursions(params, one)
    return batch[stream_index]


def wilson_interval(successes: np.ndarray, n: int,
                    z: float = _WILSON_Z) -> tuple[np.ndarray, np.ndarray]:
    """Wilson score interval; behaves sanely for tiny tail probabilities."""
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return center, half


def estimate_tail(params: ModelParams, t_grid, config: SimConfig) -> TailTable:
    """Empirical survival of T on the grid with Wilson 95% half-widths."""
    t_grid = np.asarray(t_grid, dtype=float)
    batch = sample_excursions(params, config)
    T_sorted = np.sort(batch.T)
    n = len(T_sorted)
    counts = n - np.searchsorted(T_sorted, t_grid, side="right")
    center, half = wilson_interval(counts.astype(float), n)
    survival = counts / n
    # the Wilson band is centered off the raw proportion; report the raw
    # estimate and a half-width covering the whole interval
    hw = np.maximum(np.abs(center - survival) + half, 1.0 / (2 * n))
    return TailTable(t_grid=t_grid, survival=survival,
                     provenance=PROVENANCE_SIMULATED, ci_halfwidth=hw)


def sample_conditioned_return(kind: WalkKind, beta: float, k: int,
                              config: SimConfig) -> np.ndarray:
    """First-passage durations of the conditioned (or free) walks.

    ConditionedToK: time of return to k of the walk conditioned away from 0
    (one excursion, started at k).  ConditionedToZero: final-descent time
    from k of the walk conditioned away from k.  Free / FreeReversed: return
    time of the drift-to-origin walk on Z given the first step moves away.
    """
    n = config.n_samples
    dur = np.zeros(n, dtype=np.int64)
    fail = np.zeros(n, dtype=np.int8)
    if kind in (WalkKind.Free, WalkKind.FreeReversed):
        if beta <= 1.0:
            raise DomainError("beta must be > 1")
        _run_threads(config.workers, kernels.free_return_batch,
                     n, config.seed, beta, config.step_cap, dur, fail)
    elif kind is WalkKind.ConditionedToK:
        if k < 2:
            raise DomainError("ConditionedToK requires k >= 2")
        up = np.zeros(k, dtype=float)
        for l in range(1, k):
            up[l] = model.conditioned_up_prob(kind, beta, k, l)
        _run_threads(config.workers, kernels.conditioned_batch,
                     n, config.seed, k, up, config.step_cap, True, dur, fail)
    elif kind is WalkKind.ConditionedToZero:
        if k < 1:
            raise DomainError("ConditionedToZero requires k >= 1")
        up = np.zeros(max(k, 1), dtype=float)
        for l in range(1, k):
            up[l] = model.conditioned_up_prob(kind, beta, k, l)
        _run_threads(config.workers, kernels.conditioned_batch,
                     n, config.seed, k, up, config.step_cap, False, dur, fail)
    else:
        raise DomainError(f"unsupported walk kind {kind}")
    if fail.any():
        idx = int(np.flatnonzero(fail)[0])
        raise IterationLimitError(
            f"conditioned sample {idx} exceeded step cap {config.step_cap}"
        )
    return dur


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


@dataclass
class GroupStats:
    n: int
    n_reached: int
    p_reached: float
    p_reached_se: float
    mean_n_exc: float | None
    mean_n_exc_se: float | None
    mean_t_in: float | None
    mean_t_in_se: float | None
    mean_t_out: float | None
    mean_t_out_se: float | None
    mean_exc_len: float | None
    var_exc_len: float | None


@dataclass
class StatsRecord:
    """Pooled and per-k summaries of an excursion batch.

    mean_n_exc_weighted is the geometric-weight mixture of the per-k
    conditional means E_k[N | A] (the quantity with the closed form
    alpha**2*beta/(1-alpha*beta)); it is estimated unbiasedly from
    N / P_k[A] per sample.
    """

    pooled: GroupStats
    per_k: dict[int, GroupStats]
    mean_n_exc_weighted: float | None = None
    mean_n_exc_weighted_se: float | None = None

    def to_json_dict(self) -> dict:
        def grp(g: GroupStats) -> dict:
            return {k: v for k, v in g.__dict__.items()}
        return {
            "pooled": grp(self.pooled),
            "per_k": {str(k): grp(v) for k, v in sorted(self.per_k.items())},
            "mean_n_exc_weighted": self.mean_n_exc_weighted,
            "mean_n_exc_weighted_se": self.mean_n_exc_weighted_se,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_json_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _mean_se(x: np.ndarray) -> tuple[float | None, float | None]:
    if len(x) == 0:
        return None, None
    m = float(np.mean(x))
    if len(x) == 1:
        return m, 0.0
    return m, float(np.std(x, ddof=1) / math.sqrt(len(x)))


def _group_stats(batch: ExcursionBatch, idx: np.ndarray) -> GroupStats:
    n = len(idx)
    reached = batch.reached[idx].astype(bool)
    nr = int(np.count_nonzero(reached))
    p = nr / n
    p_se = math.sqrt(p * (1.0 - p) / n) if n > 1 else 0.0
    a = idx[reached]
    mean_n, mean_n_se = _mean_se(batch.N[a])
    mean_ti, mean_ti_se = _mean_se(batch.T_in[a])
    mean_to, mean_to_se = _mean_se(batch.T_out[a])
    total_n = int(np.sum(batch.N[a])) if nr else 0
    if total_n > 0:
        mean_len = float(np.sum(batch.T_exc[a]) / total_n)
        var_len = float(np.sum(batch.exc_sq[a]) / total_n - mean_len ** 2)
    else:
        mean_len = None
        var_len = None
    return GroupStats(
        n=n, n_reached=nr, p_reached=p, p_reached_se=p_se,
        mean_n_exc=mean_n, mean_n_exc_se=mean_n_se,
        mean_t_in=mean_ti, mean_t_in_se=mean_ti_se,
        mean_t_out=mean_to, mean_t_out_se=mean_to_se,
        mean_exc_len=mean_len, var_exc_len=var_len,
    )


def summarize(batch: ExcursionBatch, beta: float | None = None) -> StatsRecord:
    """Aggregate an excursion batch; pass beta to also get the
    geometric-weight mixture of E_k[N | A] (needs the closed-form P_k[A])."""
    if len(batch) == 0:
        raise EmptyInputError("cannot summarize an empty batch")
    pooled = _group_stats(batch, np.arange(len(batch)))
    per_k = {}
    for k in np.unique(batch.k):
        per_k[int(k)] = _group_stats(batch, np.flatnonzero(batch.k == k))
    w = w_se = None
    if beta is not None:
        w, w_se = weighted_excursion_count_mean(batch, beta)
    return StatsRecord(pooled=pooled, per_k=per_k,
                       mean_n_exc_weighted=w, mean_n_exc_weighted_se=w_se)


def weighted_excursion_count_mean(batch: ExcursionBatch,
                                  beta: float) -> tuple[float, float]:
    """Unbiased estimate (and SE) of the geometric mixture of E_k[N | A],
    the closed form of which is alpha**2*beta/(1 - alpha*beta)."""
    if len(batch) == 0:
        raise EmptyInputError("empty batch")
    z = np.zeros(len(batch))
    ks = batch.k.astype(int)
    pos = ks >= 1
    if pos.any():
        uniq = np.unique(ks[pos])
        pa = {int(k): model.reach_far_end_prob(beta, int(k)) for k in uniq}
        factors = np.array([pa[int(k)] for k in ks[pos]])
        z[pos] = batch.N[pos] / factors
    m, se = _mean_se(z)
    return m, se
