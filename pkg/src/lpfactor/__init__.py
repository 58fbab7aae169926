"""Numerical laboratory for factoring the identity on l_p^n (0 < p <= 1) through l_inf^K."""

from .errors import (AllDrawsFailed, DegenerateInput, DegenerateInstance, Infeasible,
                     LabError, NotFound, PivotInstability, RankDeficient)
from .factorization import (Factorization, KernelRepresentation, build_explicit_factorization,
                            kernel_basis, kernel_representation, pad_factorization,
                            random_factorization, rref, validate_factorization)
from .quasinorm import (check_p, identity_embedding_norm, norm_P_linf_to_lp_bounds,
                        norm_P_linf_to_lp_exact, norm_P_linf_to_lp_search,
                        norm_P_linf_to_lp_vertex, norm_T_lp_to_linf, p_quasinorm, sup_norm)
from .signs import (TailEstimate, khintchine_moment_check, khintchine_tail_exact,
                    khintchine_tail_mc, balanced_sign_search, rademacher_matrix,
                    random_sign_matrix, sylvester_hadamard)
from .study import (StudyConfig, StudyResult, StudyRow, fit_loglog_slope, read_csv,
                    run_scaling_study)
from .witness import (ExtensionProblem, WitnessResult, build_R, construct_witness,
                      witness_scaling_bound, lower_bound_from_witness, min_sup_norm_extension,
                      restricted_functional_norm, search_witness, validate_certificate)

__version__ = "0.1.0"
