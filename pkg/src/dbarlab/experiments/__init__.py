"""Reproducible experiments built on the exact core."""
from .config import ExperimentConfig, QuadratureConfig, Tolerances
from .generators import random_form, random_poly, random_qi, random_rational
from .lempert import lempert_example, psi
from .montecarlo import mc_norm_check
from .sweep import CSV_COLUMNS, diagonal_family, dimension_sweep
from .verify import verify_suite

__all__ = [
    "ExperimentConfig", "QuadratureConfig", "Tolerances",
    "random_form", "random_poly", "random_qi", "random_rational",
    "lempert_example", "psi", "mc_norm_check",
    "CSV_COLUMNS", "diagonal_family", "dimension_sweep", "verify_suite",
]
