"""Tail asymptotics, exact computation and Monte Carlo simulation of the
excursion time of a biased random walk in a geometrically sized trap."""

from .errors import (DomainError, EmptyInputError, IterationLimitError,
                     PoleError)
from .model import (INFINITE, FreeWalkReturnTime, Infinite, ModelParams,
                    WalkKind, conditioned_up_prob, excursion_count_mean,
                    expected_excursion, expected_excursion_fixed,
                    free_walk_return_mgf, make_params, reach_far_end_prob,
                    return_before_zero_prob, second_moment_finite)
from .exact import (FixedKDistribution, TailTable, fixed_k_return_distribution,
                    log_grid, mixture_moment, mixture_tail, truncated_moment)
from .sim import (ExcursionBatch, ExcursionSample, SimConfig, StatsRecord,
                  estimate_tail, sample_conditioned_return, sample_excursion,
                  sample_excursions, summarize)
from .asympt import (MellinValue, Mode, OscillationSpectrum, chi_pole,
                     complex_gamma, f_asymptotic, f_series, f_series_bound,
                     g_eval, mellin_f_star, oscillation_spectrum,
                     residue_at_chi, theorem_ratio)
from .verify import VerificationReport, run_verify

__version__ = "0.1.0"
