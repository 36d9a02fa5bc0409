"""
Analysis module - Singularidades, Painlevé, resolución y verificación.
"""

from .painleve import Balance, balance_to_chart, dominant_balances
from .resolve import (
    ParameterFamily,
    ParameterTriple,
    apply_resolution,
    check_resolvable,
    resolution_sequence_p4,
    resolution_sequence_p5,
    solve_conditions,
)
from .singular import Classification, classify, local_index, singularity_census
from .verify import AtlasSpec, uniqueness_search, verify_atlas, verify_first_integral, verify_reduction

__all__ = [
    "AtlasSpec",
    "Balance",
    "Classification",
    "ParameterFamily",
    "ParameterTriple",
    "apply_resolution",
    "balance_to_chart",
    "check_resolvable",
    "classify",
    "dominant_balances",
    "local_index",
    "resolution_sequence_p4",
    "resolution_sequence_p5",
    "singularity_census",
    "solve_conditions",
    "uniqueness_search",
    "verify_atlas",
    "verify_first_integral",
    "verify_reduction",
]
