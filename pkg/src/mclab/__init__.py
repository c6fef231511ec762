"""Numerical toolkit for commuting row contractions, their characteristic
functions, ball automorphisms and truncated Drury-Arveson models."""
from .arveson import (ClassificationReport, ModelData, TruncatedSpace, a_infinity, classify,
                      identity_LA_partial, identity_Lth_truncated, kernel_invariance_checks, L_matrix,
                      model_space, multiplier_matrix, rho, spherical_check, spherical_preservation,
                      truncated_multishift)
from .ball import (Automorphism, apply_automorphism, apply_unitary, eval_automorphism, eval_inverse,
                   phi_point, phi_tuple)
from .charfn import (CharacteristicFunction, CoincidenceCertificate, TaylorTable, coincidence_residual,
                     lemma_omega_check, sigma_r_member, spectrum_charfn_consistency, theorem_theta_check,
                     theta_eval, theta_taylor)
from .errors import *  # noqa: F401,F403
from .fractional import FractionalResult, OmegaPair, omega_pair, psi
from .opcore import (DefectPair, OperatorTuple, defect_pair, defects, psd_sqrt, random_commuting_tuple,
                     validate_tuple, word_trace_invariants)
from .serialize import dumps_tuple, load_tuple, loads_tuple, save_tuple
from .suites import REGISTRY, SuiteConfig, VerificationReport, run_all, run_suite

__version__ = "0.1.0"
