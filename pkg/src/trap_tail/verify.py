"""End-to-end verification checks tying the exact, simulated and
asymptotic engines together, with a JSON report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import asympt, exact, sim
from .model import ModelParams

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return dict(name=self.name, passed=bool(self.passed),
                    observed=self.observed, expected=self.expected,
                    tolerance=self.tolerance, detail=self.detail)


@dataclass
class VerificationReport:
    params: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "params": self.params,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_json_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def check_theorem_ratio(table: exact.TailTable,
                        spectrum: asympt.OscillationSpectrum,
                        band: tuple[float, float] = (0.90, 1.10)) -> CheckResult:
    """Tail ratio t**rho P[T>t] / g((beta-1)**2 t / (2 beta)) inside the band
    on the top decade of the grid, with the maximum deviation shrinking
    relative to the decade before."""
    beta, rho = spectrum.beta, spectrum.rho
    t = table.t_grid
    arg = (beta - 1.0) ** 2 * t / (2.0 * beta)
    ratio = t ** rho * table.survival / spectrum.g(arg)
    t_hi = t[-1]
    top = t >= t_hi / 10.0
    prev = (t >= t_hi / 100.0) & ~top
    dev_top = float(np.max(np.abs(ratio[top] - 1.0)))
    ok = band[0] <= ratio[top].min() and ratio[top].max() <= band[1]
    detail = f"max deviation on top decade {dev_top:.4g}"
    if prev.any():
        dev_prev = float(np.max(np.abs(ratio[prev] - 1.0)))
        ok = ok and dev_top < dev_prev
        detail += f", previous decade {dev_prev:.4g}"
    return CheckResult(
        name="theorem_ratio_band", passed=ok, observed=dev_top,
        expected=0.0, tolerance=band[1] - 1.0, detail=detail,
    )


def check_series_vs_asymptotic(params: ModelParams, t_lo: float = 1e3,
                               t_hi: float = 1e6, modes_max: int = 10,
                               eps: float = 1e-16,
                               tol: float = 1e-6) -> CheckResult:
    grid = exact.log_grid(t_lo, t_hi, params.beta, 32)
    fs = asympt.f_series(params, grid, eps=eps)
    fa = asympt.f_asymptotic(params, grid, modes_max=modes_max)
    rel = float(np.max(np.abs(fs / fa - 1.0)))
    return CheckResult(name="series_vs_asymptotic", passed=rel < tol,
                       observed=rel, expected=0.0, tolerance=tol)


def sandwich_constants(params: ModelParams) -> tuple[float, float]:
    """(C1, C2) with C1 t**-rho <= f(t) <= C2 t**-rho for t > 1.

    C1 = (1-alpha) e**-1 beta**-rho; C2 is the two-sided comparison sum
    alpha**-1 sum_{k in Z} (1-alpha) alpha**k exp(-beta**-k)."""
    alpha, beta, rho = params.alpha, params.beta, params.rho
    c1 = (1.0 - alpha) * math.exp(-1.0) * beta ** (-rho)
    terms = []
    k = 0
    while True:  # k >= 0 branch: plain geometric decay
        t = (1.0 - alpha) * alpha ** k * math.exp(-beta ** (-k))
        terms.append(t)
        if t < 1e-20 * alpha ** -1:
            break
        k += 1
    k = -1
    while True:  # k < 0 branch: crushed by exp(-beta**|k|)
        e = -beta ** float(-k)
        t = (1.0 - alpha) * alpha ** k * math.exp(e) if e > -700 else 0.0
        if t == 0.0 or t < 1e-20:
            break
        terms.append(t)
        k -= 1
    c2 = math.fsum(terms) / alpha
    return c1, c2


def check_sandwich(params: ModelParams, t_lo: float = 10.0,
                   t_hi: float = 1e6) -> CheckResult:
    c1, c2 = sandwich_constants(params)
    grid = exact.log_grid(t_lo, t_hi, params.beta, 64)
    h = grid ** params.rho * asympt.f_series(params, grid, eps=1e-16)
    ok = bool(np.all((h >= c1) & (h <= c2)))
    return CheckResult(
        name="sandwich_bounds", passed=ok,
        observed=float(np.min(h)), expected=c1, tolerance=c2 - c1,
        detail=f"t**rho f(t) in [{np.min(h):.6g}, {np.max(h):.6g}], "
               f"bounds [{c1:.6g}, {c2:.6g}]",
    )


def check_oscillation_amplitude(params: ModelParams, t_ref: float = 1e6,
                                rel_tol: float = 0.05,
                                n_points: int = 4096) -> CheckResult:
    """(max - min) of t**rho f(t) over one log-beta period matches twice the
    first mode amplitude; the persistence of this swing is the witness that
    the tail is not regularly varying."""
    spec = asympt.oscillation_spectrum(params, modes_max=10)
    u = np.arange(n_points) / n_points
    grid = t_ref * params.beta ** u
    h = grid ** params.rho * asympt.f_series(params, grid, eps=1e-16)
    swing = float(np.max(h) - np.min(h))
    expected = 2.0 * spec.modes[0].c * spec.series_constant
    rel = abs(swing / expected - 1.0)
    return CheckResult(name="oscillation_amplitude", passed=rel < rel_tol,
                       observed=swing, expected=expected, tolerance=rel_tol,
                       detail=f"relative mismatch {rel:.4g}")


def n_tail_ratio_points(params: ModelParams, n_values: np.ndarray,
                        t_grid: np.ndarray) -> dict:
    """Per grid point: simulated P[N>t] * beta/(beta-1) / f((beta-1) t) with
    the 95% band of the ratio induced by the Wilson interval of P[N>t]."""
    beta = params.beta
    n = len(n_values)
    srt = np.sort(n_values)
    counts = (n - np.searchsorted(srt, t_grid, side="right")).astype(float)
    center, half = sim.wilson_interval(counts, n)
    f_ref = asympt.f_series(params, (beta - 1.0) * t_grid, eps=1e-16)
    scale = beta / ((beta - 1.0) * f_ref)
    p_hat = counts / n
    return {
        "t": t_grid,
        "ratio": p_hat * scale,
        "lo": np.maximum(center - half, 0.0) * scale,
        "hi": (center + half) * scale,
    }


def check_n_tail_reduction(params: ModelParams, n_values: np.ndarray,
                           t_lo: float = 3e2, t_hi: float = 1e4,
                           points_per_period: int = 8) -> CheckResult:
    grid = exact.log_grid(t_lo, t_hi, params.beta, points_per_period)
    pts = n_tail_ratio_points(params, n_values, grid)
    inside = (pts["lo"] <= 1.0) & (1.0 <= pts["hi"])
    ok = bool(np.all(inside))
    worst = float(np.max(np.abs(pts["ratio"] - 1.0)))
    detail = f"{int(np.count_nonzero(inside))}/{len(grid)} grid points cover 1"
    if not ok:
        bad = np.flatnonzero(~inside)
        detail += f"; first miss at t={grid[bad[0]]:.6g} ratio={pts['ratio'][bad[0]]:.6g}"
    return CheckResult(name="n_tail_reduction", passed=ok, observed=worst,
                       expected=0.0, tolerance=0.0, detail=detail)


def check_decomposition_negligible(batch: sim.ExcursionBatch, t_ref: float,
                                   c: float = 8.0) -> CheckResult:
    """Qualitative: given A, P[T_in > c log t] and P[T_out > c log t] are
    tiny and keep shrinking when the threshold doubles."""
    reached = batch.reached.astype(bool)
    n_a = int(np.count_nonzero(reached))
    tau = c * math.log(t_ref)
    obs = 0.0
    ok = n_a > 0
    detail_parts = []
    for name, col in (("T_in", batch.T_in), ("T_out", batch.T_out)):
        vals = col[reached]
        p1 = float(np.count_nonzero(vals > tau)) / n_a
        p2 = float(np.count_nonzero(vals > 2 * tau)) / n_a
        floor = 5.0 / n_a
        ok = ok and p1 < 0.02 and (p2 <= max(0.7 * p1, floor))
        obs = max(obs, p1)
        detail_parts.append(f"P[{name}>{tau:.0f}|A]={p1:.3g}, >2tau={p2:.3g}")
    return CheckResult(name="decomposition_negligible", passed=ok,
                       observed=obs, expected=0.0, tolerance=0.02,
                       detail="; ".join(detail_parts))


def run_verify(params: ModelParams, *, grid=(1e3, 1e5),
               points_per_period: int = 32, eps: float = 1e-12,
               modes_max: int = 10, n_samples: int = 10 ** 6,
               seed: int = 1, workers: int = 1,
               spectrum: asympt.OscillationSpectrum | None = None,
               ) -> VerificationReport:
    """Run the full cross-engine verification suite.

    A custom spectrum may be injected (the negative-control tests corrupt
    one deliberately); by default it is computed from params.
    """
    if spectrum is None:
        spectrum = asympt.oscillation_spectrum(params, modes_max)
    report = VerificationReport(params={
        "alpha": params.alpha, "beta": params.beta, "rho": params.rho,
        "eps": eps, "modes_max": modes_max, "n_samples": n_samples,
        "seed": seed,
    })
    table = exact.mixture_tail(params, grid, eps=eps,
                               points_per_period=points_per_period)
    report.checks.append(check_theorem_ratio(table, spectrum))
    report.checks.append(check_series_vs_asymptotic(params, modes_max=modes_max))
    report.checks.append(check_sandwich(params))
    report.checks.append(check_oscillation_amplitude(params))
    batch = sim.sample_excursions(
        params, sim.SimConfig(n_samples=n_samples, seed=seed, workers=workers))
    t_hi = min(1e4, n_samples / 100.0)
    report.checks.append(check_n_tail_reduction(
        params, batch.N, t_lo=max(3e2, t_hi / 30.0), t_hi=t_hi))
    report.checks.append(check_decomposition_negligible(batch, t_ref=t_hi))
    return report
