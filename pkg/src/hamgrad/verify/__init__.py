from .battery import closed_form_battery, closed_form_cases, pde_battery, pde_runs, refinement_study
from .functional import functional_fd_check
from .harnack import (CRITICAL_EXACT, critical_constant, exponent_coefficient, family_scan,
                      harnack_check, minimal_constant)
from .kernel import h3_ball_volume, kernel_check, li_yau_check
from .lower import hmap, lower_search, psi_gauss
from .modulus import check_implication, implication_counterexamples, maximal_radius_constant, modulus_check
from .pairs import family_source, run_source
from .upper import RatioRecord, VerificationReport, combine, verify_upper

__all__ = [
    "CRITICAL_EXACT", "RatioRecord", "VerificationReport", "check_implication", "closed_form_battery",
    "closed_form_cases", "combine", "critical_constant", "exponent_coefficient", "family_scan",
    "family_source", "functional_fd_check", "h3_ball_volume", "harnack_check", "hmap",
    "implication_counterexamples", "kernel_check", "li_yau_check", "lower_search",
    "maximal_radius_constant", "minimal_constant", "modulus_check", "pde_battery", "pde_runs",
    "psi_gauss", "refinement_study", "run_source", "verify_upper",
]
