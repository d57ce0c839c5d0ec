#!/usr/bin/env python3
"""Decade-by-decade convergence of the rescaled tail ratio.

For each decade of t, prints the min/max/worst deviation of
t^rho P[T>t] / g((beta-1)^2 t / (2 beta)), which should approach 1 as t
grows.  Useful for judging how deep the exact engine has to sweep before
the limit statement becomes visible.
"""

import argparse
import math

import numpy as np

import trap_tail as tt
from trap_tail import asympt, exact


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--t-max", type=float, default=1e6)
    ap.add_argument("--eps", type=float, default=1e-12)
    args = ap.parse_args()

    params = tt.make_params(args.alpha, args.beta)
    spec = asympt.oscillation_spectrum(params, 10)
    table = exact.mixture_tail(params, (10.0, args.t_max), eps=args.eps)
    t = table.t_grid
    arg = (params.beta - 1.0) ** 2 * t / (2.0 * params.beta)
    ratio = t ** params.rho * table.survival / np.asarray(spec.g(arg), float)

    print(f"alpha={params.alpha} beta={params.beta} rho={params.rho:.6g}")
    print(f"{'decade':>16} {'min':>10} {'max':>10} {'worst dev':>10}")
    decades = int(math.ceil(math.log10(args.t_max)))
    for d in range(1, decades):
        sel = (t >= 10.0 ** d) & (t < 10.0 ** (d + 1))
        if not sel.any():
            continue
        r = ratio[sel]
        print(f"[1e{d:d}, 1e{d + 1:d}) {r.min():>12.5f} {r.max():>10.5f} "
              f"{np.max(np.abs(r - 1.0)):>10.2e}")


if __name__ == "__main__":
    main()
