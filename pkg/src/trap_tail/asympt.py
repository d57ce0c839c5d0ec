"""Analytic core: complex Gamma, the log-periodic oscillation spectrum,
the harmonic sum f and its asymptotic expansion, the Mellin transform of f
and its residues, and the tail-vs-prediction ratio.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .model import ModelParams

# Lanczos approximation, g = 7, 9 coefficients (the widely used double
# precision set, e.g. GSL / Boost); validated in the test suite against the
# recurrence Gamma(z+1) = z*Gamma(z) and known closed values rather than
# taken on faith.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z: complex) -> complex:
    """Euler's Gamma on the complex plane (Lanczos, reflection for re < 1/2)."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"gamma argument must be finite, got {z}")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleError(f"gamma pole at nonpositive integer {z.real}")
    if z.real < 0.5:
        # reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    out = math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DomainError(f"gamma overflow at {z + 1.0}")
    return out


@dataclass(frozen=True)
class Mode:
    k: int
    c: float  # amplitude 2*|Gamma(chi_k)| / Gamma(rho)
    d: float  # phase: principal argument of Gamma(chi_k), in (-pi, pi]
    chi: complex  # pole location rho + 2*pi*i*k/log(beta)


@dataclass(frozen=True)
class OscillationSpectrum:
    """Prefactor, exponent and Fourier modes of the log-periodic factor.

    `prefactor` multiplies the bracket in the tail prediction g;
    `series_constant` = (1-alpha)*Gamma(rho)/log(beta) is the corresponding
    constant of the harmonic-sum asymptotics.
    """

    alpha: float
    beta: float
    rho: float
    prefactor: float
    series_constant: float
    modes: tuple[Mode, ...]

    def bracket(self, t):
        """1 + sum_k c_k cos(2 pi k log(t)/log(beta) - d_k), vectorized in t."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("bracket requires t > 0")
        u = 2.0 * math.pi * np.log(t) / math.log(self.beta)
        out = np.ones_like(u)
        for m in self.modes:
            out += m.c * np.cos(m.k * u - m.d)
        return out if out.ndim else float(out)

    def g(self, t):
        """The tail prediction factor g(t) = prefactor * bracket(t)."""
        return self.prefactor * self.bracket(t)

    def f_asym(self, t):
        """Asymptotic harmonic sum: series_constant * t**-rho * bracket(t)."""
        t = np.asarray(t, dtype=float)
        out = self.series_constant * t ** (-self.rho) * self.bracket(t)
        return out if out.ndim else float(out)

    def mode_sum(self) -> float:
        return sum(m.c for m in self.modes)

    def to_json_dict(self) -> dict:
        return {
            "rho": self.rho,
            "prefactor": self.prefactor,
            "modes": [
                {"k": m.k, "c": m.c, "d": m.d,
                 "chi_re": m.chi.real, "chi_im": m.chi.imag}
                for m in self.modes
            ],
        }


def chi_pole(params: ModelParams, k: int) -> complex:
    """Pole location chi_k = rho + 2*pi*i*k/log(beta) of the Mellin transform."""
    return complex(params.rho, 2.0 * math.pi * k / math.log(params.beta))


def oscillation_spectrum(params: ModelParams, modes_max: int = 10) -> OscillationSpectrum:
    if modes_max < 0:
        raise DomainError("modes_max must be >= 0")
    alpha, beta, rho = params.alpha, params.beta, params.rho
    log_beta = math.log(beta)
    gamma_rho = complex_gamma(rho).real
    series_constant = (1.0 - alpha) * gamma_rho / log_beta
    prefactor = ((beta - 1.0) / beta) * series_constant \
        * (2.0 * beta / (beta - 1.0) ** 2) ** rho
    modes = []
    for k in range(1, modes_max + 1):
        gz = complex_gamma(chi_pole(params, k))
        c = 2.0 * abs(gz) / gamma_rho
        d = cmath.phase(gz)  # principal value in (-pi, pi]
        modes.append(Mode(k=k, c=c, d=d, chi=chi_pole(params, k)))
    spec = OscillationSpectrum(
        alpha=alpha, beta=beta, rho=rho, prefactor=prefactor,
        series_constant=series_constant, modes=tuple(modes),
    )
    if spec.mode_sum() >= 1.0:
        warnings.warn(
            f"mode amplitudes sum to {spec.mode_sum():.3g} >= 1; the "
            "oscillating bracket is not guaranteed positive for these "
            "parameters", RuntimeWarning, stacklevel=2,
        )
    return spec


def g_eval(params: ModelParams, t, modes_max: int = 10):
    """The tail prediction g(t) of the oscillating asymptotics."""
    return oscillation_spectrum(params, modes_max).g(t)


def _f_series_kmax(params: ModelParams, t_max: float, eps: float) -> int:
    if eps <= 0:
        raise DomainError("eps must be positive")
    k_eps = max(0, int(math.ceil(math.log(eps) / math.log(params.alpha))))
    # extra terms keep the remainder below eps *relative to* f ~ t**-rho
    if t_max > 1.0:
        k_eps += int(math.ceil(math.log(t_max) / math.log(params.beta)))
    return k_eps


def f_series(params: ModelParams, t, eps: float = 1e-16):
    """The harmonic sum f(t) = sum_k (1-alpha) alpha**k exp(-beta**-k t),
    truncated with remainder below eps both absolutely and relative to the
    t**-rho scale of f.  Vectorized in t."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("f is defined for t >= 0")
    t_max = float(np.max(t_arr)) if t_arr.size else 1.0
    k_max = _f_series_kmax(params, t_max, eps)
    k = np.arange(k_max + 1, dtype=float)
    weights = (1.0 - params.alpha) * params.alpha ** k
    # terms span many orders of magnitude: sum ascending k = ascending decay
    rates = params.beta ** (-k)
    vals = np.exp(-np.outer(t_arr, rates)) @ weights
    if np.ndim(t) == 0:
        return float(vals[0] if vals.ndim else vals)
    return vals


def f_series_bound(params: ModelParams, t, eps: float = 1e-16) -> float:
    """Upper bound on the k-truncation remainder of :func:`f_series`."""
    t_arr = np.asarray(t, dtype=float)
    t_max = float(np.max(t_arr)) if t_arr.size else 1.0
    k_max = _f_series_kmax(params, t_max, eps)
    return params.alpha ** (k_max + 1)


def f_asymptotic(params: ModelParams, t, modes_max: int = 10,
                 regime_guard: float = 2.0):
    """Oscillating power-law asymptotics of the harmonic sum f."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < regime_guard):
        raise DomainError(
            f"f_asymptotic is meaningless below t = {regime_guard}; the "
            "left-half-plane poles dominate there"
        )
    return oscillation_spectrum(params, modes_max).f_asym(t)


@dataclass(frozen=True)
class MellinValue:
    value: complex
    in_fundamental_strip: bool


def mellin_f_star(params: ModelParams, z: complex) -> MellinValue:
    """Meromorphic continuation Gamma(z)*(1-alpha)/(1 - alpha*beta**z) of the
    Mellin transform of f; the integral representation is valid only inside
    the strip 0 < re(z) < rho (flagged on the result)."""
    z = complex(z)
    alpha, beta, rho = params.alpha, params.beta, params.rho
    denom = 1.0 - alpha * beta ** z
    # alpha*beta**z = 1 exactly on the pole lattice chi_k
    period = 2.0 * math.pi / math.log(beta)
    if abs(z.real - rho) < 1e-12 and \
            abs(z.imag / period - round(z.imag / period)) < 1e-12:
        raise PoleError(f"Mellin transform has a pole at {z} (chi lattice)")
    gz = complex_gamma(z)  # raises PoleError at nonpositive integers
    strip = 0.0 < z.real < rho
    return MellinValue(value=gz * (1.0 - alpha) / denom, in_fundamental_strip=strip)


def residue_at_chi(params: ModelParams, k: int) -> complex:
    """Residue of the Mellin transform at the simple pole chi_k:
    -(1-alpha)*Gamma(chi_k)/log(beta)."""
    return -(1.0 - params.alpha) * complex_gamma(chi_pole(params, k)) \
        / math.log(params.beta)


def theorem_ratio(params: ModelParams, t: float, tail_value: float,
                  modes_max: int = 10) -> float:
    """t**rho * P[T > t] divided by the predicted g((beta-1)**2 t / (2 beta));
    converges to 1 as t grows."""
    if t <= 0:
        raise DomainError("t must be positive")
    if not (0.0 < tail_value <= 1.0):
        raise DomainError(f"tail_value must be in (0, 1], got {tail_value}")
    beta = params.beta
    arg = (beta - 1.0) ** 2 * t / (2.0 * beta)
    return t ** params.rho * tail_value / g_eval(params, arg, modes_max)
