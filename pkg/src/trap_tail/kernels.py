"""Numba kernels: exact forward DP and the Monte Carlo walk samplers.

The random draws are counter based: draw j of sample i is a pure function
of (seed, i, j) via a double splitmix64 finalizer.  That makes every
sample its own stream, so results are bit-identical regardless of how
many threads run the prange loop.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MUL1 = U64(0xBF58476D1CE4E5B9)
_MUL2 = U64(0x94D049BB133111EB)
_STEP = U64(0xA0761D6478BD642F)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _mix64(x):
    x = (x + _GOLDEN) * _MUL1
    x = (x ^ (x >> U64(30))) * _MUL2
    x = x ^ (x >> U64(27))
    x = x * _MUL1
    return x ^ (x >> U64(31))


@njit(cache=True, inline="always")
def _stream_key(seed, i):
    return _mix64(_mix64(U64(seed)) ^ (U64(i) * _GOLDEN))


@njit(cache=True, inline="always")
def _uniform(key, j):
    # in [0, 1)
    x = _mix64(key ^ (U64(j) * _STEP))
    return float(x >> U64(11)) * _INV53


# ---------------------------------------------------------------------------
# exact forward DP
# ---------------------------------------------------------------------------


@njit(cache=True)
def dp_fixed_k(beta, k, t_max, grid_t, pmf_out, want_pmf):
    """Forward DP of the first-return-time law on the trap {0, ..., k}.

    Propagates the not-yet-returned mass over states 1..k (survival form,
    no CDF differencing).  Fills `surv[g] = P[T > grid_t[g]]` for the
    ascending integer grid, accumulates the truncated first and second
    moments of T, and returns the final state vector for exact tail
    corrections.

    Returns (remainder, m1, m2, surv, state) where state[l] is the mass
    sitting at site l after t_max steps.
    """
    n_grid = grid_t.shape[0]
    surv = np.empty(n_grid)
    state = np.zeros(k + 1)
    m1 = 0.0
    m2 = 0.0
    gi = 0
    if k == 0:
        # T == 0: survival is zero on t >= 0
        for g in range(n_grid):
            surv[g] = 0.0
        if want_pmf:
            pmf_out[0] = 1.0
        return 0.0, 0.0, 0.0, surv, state

    p_up = beta / (1.0 + beta)
    p_dn = 1.0 / (1.0 + beta)
    v = np.zeros(k + 1)
    v[1] = 1.0
    cum = 0.0
    while gi < n_grid and grid_t[gi] < 2:
        surv[gi] = 1.0
        gi += 1
    new = np.zeros(k + 1)
    for t in range(2, t_max + 1):
        if k == 1:
            ret = v[1]
        else:
            ret = p_dn * v[1]
        for l in range(1, k + 1):
            x = 0.0
            if l >= 2:
                x += p_up * v[l - 1]
            if l + 1 <= k:
                if l + 1 == k:
                    x += v[l + 1]
                else:
                    x += p_dn * v[l + 1]
            new[l] = x
        for l in range(1, k + 1):
            v[l] = new[l]
        cum += ret
        m1 += t * ret
        m2 += float(t) * float(t) * ret
        if want_pmf:
            pmf_out[t] = ret
        while gi < n_grid and grid_t[gi] == t:
            surv[gi] = 1.0 - cum
            gi += 1
        if 1.0 - cum < 1e-305:
            break
    while gi < n_grid:
        surv[gi] = 1.0 - cum
        gi += 1
    for l in range(1, k + 1):
        state[l] = v[l]
    return 1.0 - cum, m1, m2, surv, state


# ---------------------------------------------------------------------------
# Monte Carlo samplers
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def excursion_batch(n, seed, log_alpha, beta, fixed_k, step_cap,
                    k_out, reached_out, t_out, t_in_out, t_exc_out,
                    t_out_out, n_exc_out, exc_sq_out, fail_out):
    """Simulate n excursions of the raw trap walk.

    fixed_k < 0 means: draw k geometric(1 - alpha) on {0, 1, ...} by
    inverse CDF on the first uniform of the sample's stream.
    exc_sq_out accumulates the sum of squared non-final excursion lengths
    (needed for the variance diagnostics without storing paths).
    """
    p_up = beta / (1.0 + beta)
    for i in prange(n):
        key = _stream_key(seed, i)
        j = U64(0)
        if fixed_k >= 0:
            k = fixed_k
        else:
            u = _uniform(key, j)
            j += U64(1)
            if u <= 0.0:
                k = 0
            else:
                k = int(np.log(1.0 - u) / log_alpha)
        k_out[i] = k
        if k == 0:
            reached_out[i] = 0
            t_out[i] = 0
            t_in_out[i] = 0
            t_exc_out[i] = 0
            t_out_out[i] = 0
            n_exc_out[i] = 0
            exc_sq_out[i] = 0
            continue
        pos = 1
        t = 1
        t_first = -1
        t_last = -1
        arrivals = 0
        exc_sq = 0
        if pos == k:
            arrivals = 1
            t_first = 1
            t_last = 1
        failed = False
        while pos != 0:
            if t >= step_cap:
                failed = True
                break
            if pos == k:
                pos -= 1
            else:
                u = _uniform(key, j)
                j += U64(1)
                if u < p_up:
                    pos += 1
                else:
                    pos -= 1
            t += 1
            if pos == k:
                arrivals += 1
                if arrivals == 1:
                    t_first = t
                else:
                    d = t - t_last
                    exc_sq += d * d
                t_last = t
        if failed:
            fail_out[i] = 1
            continue
        reached = 1 if arrivals > 0 else 0
        reached_out[i] = reached
        t_out[i] = t
        if reached:
            t_in_out[i] = t_first
            t_exc_out[i] = t_last - t_first
            t_out_out[i] = t - t_last
            n_exc_out[i] = arrivals - 1
            exc_sq_out[i] = exc_sq
        else:
            t_in_out[i] = 0
            t_exc_out[i] = 0
            t_out_out[i] = 0
            n_exc_out[i] = 0
            exc_sq_out[i] = 0


@njit(cache=True, parallel=True)
def conditioned_batch(n, seed, k, up_prob, step_cap, to_k, dur_out, fail_out):
    """First-passage durations of the h-transformed walk started at k.

    to_k selects the target: return to k (the per-excursion time T1) or
    absorption at 0 (the final descent).  up_prob[l] is the one-step up
    probability at interior site l; the boundary moves are forced.
    """
    for i in prange(n):
        key = _stream_key(seed, i)
        j = U64(0)
        pos = k - 1
        t = 1
        failed = False
        while True:
            if to_k:
                if pos == k:
                    break
            else:
                if pos == 0:
                    break
            if t >= step_cap:
                failed = True
                break
            if pos == k:
                pos -= 1
            else:
                u = _uniform(key, j)
                j += U64(1)
                if u < up_prob[pos]:
                    pos += 1
                else:
                    pos -= 1
            t += 1
        if failed:
            fail_out[i] = 1
        dur_out[i] = t


@njit(cache=True, parallel=True)
def free_return_batch(n, seed, beta, step_cap, dur_out, fail_out):
    """Return time to 0 of the drift-to-zero walk on Z, first step forced up."""
    p_away = 1.0 / (1.0 + beta)
    for i in prange(n):
        key = _stream_key(seed, i)
        j = U64(0)
        pos = 1
        t = 1
        failed = False
        while pos != 0:
            if t >= step_cap:
                failed = True
                break
            u = _uniform(key, j)
            j += U64(1)
            if u < p_away:
                pos += 1
            else:
                pos -= 1
            t += 1
        if failed:
            fail_out[i] = 1
        dur_out[i] = t
