"""Postulation of general lines in P^3 via Castelnuovo specialization."""

from .model import (BScheme, SpecMove, SubStar, TScheme, VScheme, dim_forms, dim_forms_p2, dim_forms_p3,
                    main_theorem_scheme, surplus, virtual_conditions)
from .oracle import OracleConfig, Verdict, verify_empty
from .search import Policy, SearchFailure, search_certificate

__all__ = [
    "BScheme", "SpecMove", "SubStar", "TScheme", "VScheme", "dim_forms", "dim_forms_p2", "dim_forms_p3",
    "main_theorem_scheme", "surplus", "virtual_conditions", "OracleConfig", "Verdict", "verify_empty",
    "Policy", "SearchFailure", "search_certificate",
]
