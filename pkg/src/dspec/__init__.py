"""Schrodinger boundary value problems on (0, pi) whose endpoints carry either
an inverse-square singularity or a rational Herglotz-Nevanlinna boundary
condition, plus the Darboux-type ladder between them: remove the smallest
eigenvalue (t_hat) or insert one below the spectrum (t_tilde)."""

from .analysis import (AsymptoticsFit, TraceReport, count_zeros, data_chain,
                       fit_asymptotics, hat_data_map, lemma_invariant_check,
                       oscillation_check, regularized_trace_series,
                       sigma_quadrature, symmetric_check, trace_closed_form)
from .herglotz import (BoundaryObject, Inf, PolyPair, RationalHN,
                       boundary_close, ell, evaluate, evaluate_derivative,
                       index, omega, pole_count_upto, poly_pair, smallest_pole,
                       theta_hat, theta_roundtrip_check, theta_tilde)
from .ode import (CharValue, Problem, SolutionTrace, char_derivative,
                  char_function, char_function_batch, default_grid,
                  left_regular, right_regular)
from .potential import (Potential, analytic, eval_q, full_potential, sampled,
                        symmetrize_check)
from .presets import PRESET_PROBLEMS, preset_problem
from .spectrum import (SpectralData, beta, eigenvalues, norming_constants,
                       norming_integral_check, product_representation_check,
                       spectral_data)
from .transform import ChainRecord, apply_chain, t_hat, t_tilde

__version__ = "0.1.0"
