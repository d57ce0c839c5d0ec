"""Command-line front end.

Commands: exact, simulate, asympt, coefficients, mellin, verify, plot.
Exit codes: 0 success, 1 verification failure, 2 usage / domain error.
The TRAP_TAIL_LOG environment variable sets log verbosity only.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import asympt, exact, sim, svgplot, verify
from .errors import DomainError
from .model import make_params

log = logging.getLogger("trap_tail")


def parse_grid_spec(spec: str, beta: float) -> np.ndarray:
    """Parse `log:<t_min>:<t_max>:<points-per-beta-period>`."""
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] != "log":
        raise DomainError(
            f"grid spec must look like log:<t_min>:<t_max>:<ppp>, got {spec!r}"
        )
    t_min, t_max = float(parts[1]), float(parts[2])
    ppp = int(parts[3])
    if t_min < 1 or t_max <= t_min:
        raise DomainError("grid needs 1 <= t_min < t_max")
    return exact.log_grid(t_min, t_max, beta, ppp)


def _load_defaults(path: str) -> dict:
    """Plain key=value defaults file; command-line flags win."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"bad defaults line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _add_common(p, *, grid_default="log:1:100000:32"):
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--grid", default=grid_default,
                   help="log:<t_min>:<t_max>:<points-per-beta-period>")
    p.add_argument("--out", default=None)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--modes", type=int, default=10)
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fixed-k", type=int, default=None)
    p.add_argument("--config", default=None,
                   help="optional key=value defaults file (flags win)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trap-tail",
        description="Excursion-time tails of a biased walk in a geometric trap",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("exact", "exact mixture tail P[T>t] by dynamic programming"),
        ("simulate", "Monte Carlo tail estimate and excursion statistics"),
        ("asympt", "asymptotic tail prediction t**-rho g(...)"),
        ("coefficients", "oscillation spectrum as JSON"),
        ("mellin", "evaluate the Mellin transform f*(z)"),
        ("verify", "run the cross-engine verification suite"),
        ("plot", "SVG chart of the rescaled tail against its prediction"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "simulate":
            p.add_argument("--raw-out", default=None,
                           help="write per-sample CSV here")
            p.add_argument("--stats-out", default=None,
                           help="write summary statistics JSON here")
        if name == "mellin":
            p.add_argument("--z-re", type=float, required=True)
            p.add_argument("--z-im", type=float, default=0.0)
        if name == "plot":
            p.add_argument("--tail", default=None,
                           help="existing tail CSV; generated exactly if absent")
    return ap


def _apply_config_defaults(args, argv):
    if getattr(args, "config", None):
        defaults = _load_defaults(args.config)
        explicit = {a.split("=")[0].lstrip("-").replace("-", "_")
                    for a in argv if a.startswith("--")}
        for key, val in defaults.items():
            if key in explicit or not hasattr(args, key):
                continue
            current = getattr(args, key)
            cast = type(current) if current is not None else str
            setattr(args, key, cast(val) if cast is not bool else val == "true")
    return args


def cmd_exact(args) -> int:
    params = make_params(args.alpha, args.beta)
    grid = parse_grid_spec(args.grid, params.beta)
    table = exact.mixture_tail(params, grid, eps=args.eps)
    out = args.out or "tail_exact.csv"
    table.to_csv(out)
    print(f"wrote {out}; truncation bound {table.truncation_bound:.6g}")
    return 0


def cmd_simulate(args) -> int:
    params = make_params(args.alpha, args.beta)
    grid = parse_grid_spec(args.grid, params.beta)
    config = sim.SimConfig(n_samples=args.samples, seed=args.seed,
                           workers=args.workers, fixed_k=args.fixed_k)
    batch = sim.sample_excursions(params, config)
    T_sorted = np.sort(batch.T)
    counts = len(batch) - np.searchsorted(T_sorted, grid, side="right")
    center, half = sim.wilson_interval(counts.astype(float), len(batch))
    survival = counts / len(batch)
    hw = np.maximum(np.abs(center - survival) + half, 0.5 / len(batch))
    table = exact.TailTable(grid, survival, exact.PROVENANCE_SIMULATED,
                            ci_halfwidth=hw)
    out = args.out or "tail_sim.csv"
    table.to_csv(out)
    print(f"wrote {out}")
    if args.raw_out:
        batch.to_csv(args.raw_out)
        print(f"wrote {args.raw_out}")
    if args.stats_out:
        sim.summarize(batch, beta=params.beta).to_json(args.stats_out)
        print(f"wrote {args.stats_out}")
    return 0


def cmd_asympt(args) -> int:
    params = make_params(args.alpha, args.beta)
    grid = parse_grid_spec(args.grid, params.beta)
    spec = asympt.oscillation_spectrum(params, args.modes)
    arg = (params.beta - 1.0) ** 2 * grid / (2.0 * params.beta)
    survival = np.minimum(grid ** (-params.rho) * spec.g(arg), 1.0)
    table = exact.TailTable(np.asarray(grid, float),
                            np.minimum.accumulate(survival),
                            exact.PROVENANCE_ASYMPTOTIC)
    out = args.out or "tail_asympt.csv"
    table.to_csv(out)
    print(f"wrote {out}")
    return 0


def cmd_coefficients(args) -> int:
    params = make_params(args.alpha, args.beta)
    spec = asympt.oscillation_spectrum(params, args.modes)
    text = json.dumps(spec.to_json_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_mellin(args) -> int:
    params = make_params(args.alpha, args.beta)
    mv = asympt.mellin_f_star(params, complex(args.z_re, args.z_im))
    print(json.dumps({
        "re": mv.value.real, "im": mv.value.imag,
        "in_fundamental_strip": mv.in_fundamental_strip,
    }, indent=2))
    return 0


def cmd_verify(args) -> int:
    params = make_params(args.alpha, args.beta)
    grid = parse_grid_spec(args.grid, params.beta)
    report = verify.run_verify(
        params, grid=grid, eps=args.eps, modes_max=args.modes,
        n_samples=args.samples, seed=args.seed, workers=args.workers,
    )
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        print(f"FAILED checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_plot(args) -> int:
    params = make_params(args.alpha, args.beta)
    if args.tail:
        table = exact.TailTable.from_csv(args.tail)
    else:
        grid = parse_grid_spec(args.grid, params.beta)
        table = exact.mixture_tail(params, grid, eps=args.eps)
    spec = asympt.oscillation_spectrum(params, args.modes)
    t = table.t_grid
    rescaled = t ** params.rho * table.survival
    arg = (params.beta - 1.0) ** 2 * t / (2.0 * params.beta)
    g_curve = spec.g(arg)
    curves = [
        ("t^rho P[T>t]", t, rescaled),
        ("g((b-1)^2 t/2b)", t, g_curve),
    ]
    if args.modes == 0:
        curves[1] = ("prefactor", t, np.full_like(t, spec.prefactor))
    out = args.out or "oscillation.svg"
    svgplot.line_chart_svg(
        out, curves,
        title=f"alpha={params.alpha} beta={params.beta} rho={params.rho:.4g}",
        x_label="t (log scale)", y_label="rescaled tail",
    )
    print(f"wrote {out}")
    return 0


_COMMANDS = {
    "exact": cmd_exact,
    "simulate": cmd_simulate,
    "asympt": cmd_asympt,
    "coefficients": cmd_coefficients,
    "mellin": cmd_mellin,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    level = os.environ.get("TRAP_TAIL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(argv)
        args = _apply_config_defaults(args, argv)
        return _COMMANDS[args.command](args)
    except (DomainError, OverflowError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
