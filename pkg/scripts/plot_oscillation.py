#!/usr/bin/env python3
"""Render the log-periodic oscillation figure.

Plots t^rho P[T>t] from the exact engine against the periodic prediction
g((beta-1)^2 t / (2 beta)) and the flat prefactor, over several log-beta
periods.  Output: oscillation.svg (override with --out).
"""

import argparse

import numpy as np

import trap_tail as tt
from trap_tail import asympt, exact, svgplot


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--t-min", type=float, default=1e3)
    ap.add_argument("--t-max", type=float, default=1e5)
    ap.add_argument("--modes", type=int, default=10)
    ap.add_argument("--out", default="oscillation.svg")
    args = ap.parse_args()

    params = tt.make_params(args.alpha, args.beta)
    grid = exact.log_grid(args.t_min, args.t_max, params.beta, 48)
    table = exact.mixture_tail(params, grid, eps=1e-12)
    spec = asympt.oscillation_spectrum(params, args.modes)

    rescaled = grid ** params.rho * table.survival
    arg = (params.beta - 1.0) ** 2 * grid / (2.0 * params.beta)
    svgplot.line_chart_svg(
        args.out,
        [
            ("t^rho P[T>t] (exact)", grid, rescaled),
            ("periodic prediction", grid, np.asarray(spec.g(arg), float)),
            ("prefactor", grid, np.full_like(grid, spec.prefactor)),
        ],
        title=(f"log-periodic tail oscillation, alpha={params.alpha} "
               f"beta={params.beta}"),
        x_label="t (log scale)", y_label="rescaled survival",
    )
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
