"""Dirichlet inversion - general divisor functions and the series solution of L(s - w f) = exp(f)"""

__version__ = "0.1.0"
__author__ = "Dirichlet Inversion Team"

from .config import Settings, settings
from .errors import (
    BoundViolationError,
    DirichletError,
    DomainError,
    NonConvergenceError,
    SeriesDivergenceError,
    TruncationCapError,
)
from .multiplicative import PrimeSieve, d, d_exact, d_tilde, d_tilde_polynomial, factorize, prime_sieve
from .spec_models import MultiplicativeSpec, RunConfig
from .lfunction import EvalMode, LFunctionContext, SeriesValue, L_eval, ln_L, make_context
from .inversion import f_eval, newton_oracle, shifted_series, verify_functional_equation, verify_theorem_grid
from .exact_poly import RationalPolynomial, semigroup_identity_check, semigroup_report
from .kendall_sim import SubordinatorModel, build_model, kendall_integral_check, passage_law_check
from .report_pipeline import ReportPipeline, report_pipeline

__all__ = [
    "Settings",
    "settings",
    "DirichletError",
    "DomainError",
    "SeriesDivergenceError",
    "TruncationCapError",
    "NonConvergenceError",
    "BoundViolationError",
    "PrimeSieve",
    "prime_sieve",
    "factorize",
    "d",
    "d_exact",
    "d_tilde",
    "d_tilde_polynomial",
    "MultiplicativeSpec",
    "RunConfig",
    "EvalMode",
    "LFunctionContext",
    "SeriesValue",
    "make_context",
    "L_eval",
    "ln_L",
    "f_eval",
    "shifted_series",
    "newton_oracle",
    "verify_functional_equation",
    "verify_theorem_grid",
    "RationalPolynomial",
    "semigroup_identity_check",
    "semigroup_report",
    "SubordinatorModel",
    "build_model",
    "passage_law_check",
    "kendall_integral_check",
    "ReportPipeline",
    "report_pipeline",
]
