"""Exact and floating point verification of dualities between many-body
integrable systems, Gaudin models and spin chains."""

from .errors import (DegenerateSpectrumError, DualityLabError, GaugeError, GenericityError,
                     NumericError, PoleError, RankError)
from .manybody import ModelKind, PhasePoint, hamiltonian, lax, moment_residual
from .pq_duality import DualityResult, check_anticanonical, dualize, involution_check
from .report import CheckRow, DualityReport
from .spectral_duality import (BivariatePoly, curve_residual, dual_rational_gaudin,
                               dual_tgaudin_to_xxx, dual_xxz_chain, fictitious_lax,
                               pq_via_spectral, spectral_poly)
from .spectral_models import MultiPoleLax, PoleForm, RVariant, SpectralKind
from .suites import SuiteConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "BivariatePoly", "CheckRow", "DegenerateSpectrumError", "DualityLabError", "DualityReport",
    "DualityResult", "GaugeError", "GenericityError", "ModelKind", "MultiPoleLax", "NumericError",
    "PhasePoint", "PoleError", "PoleForm", "RVariant", "RankError", "SpectralKind", "SuiteConfig",
    "check_anticanonical", "curve_residual", "dual_rational_gaudin", "dual_tgaudin_to_xxx",
    "dual_xxz_chain", "dualize", "fictitious_lax", "hamiltonian", "involution_check", "lax",
    "moment_residual", "pq_via_spectral", "run_suite", "spectral_poly",
]
