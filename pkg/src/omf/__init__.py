"""Orbit matrices for symmetric designs with a prescribed automorphism group."""
from .design import ContractError, DesignParams, OrbitDistribution, PartialOrbitMatrix
from .search import SearchReport, SearchSpec, extend_one_row, max_completable_rows, run_search
from .verify import verify, verify_complete, verify_partial

__all__ = [
    "ContractError",
    "DesignParams",
    "OrbitDistribution",
    "PartialOrbitMatrix",
    "SearchReport",
    "SearchSpec",
    "extend_one_row",
    "max_completable_rows",
    "run_search",
    "verify",
    "verify_complete",
    "verify_partial",
]
