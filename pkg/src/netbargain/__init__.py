"""Exact toolkit for network bargaining games with vertex capacities.

Agents on a weighted graph each hold up to a capacity's worth of contracts;
a solution picks a degree-constrained edge set and splits each chosen edge's
value between its endpoints.  This package computes and certifies stable and
balanced splits, reduces capacitated games to unit-capacity games on a copy
expansion, and analyzes the associated cooperative matching game (coalition
values, powers, core, prekernel, gadgets).  All arithmetic is exact.
"""

from .balancing import (
    BalancedOutcome,
    SolverConfig,
    VerifyTranscript,
    exact_verify,
    rebalance_targets,
    solve_balanced_unit,
    stable_exists_unit,
)
from .casebook import (
    certify_expansion_case,
    certify_gap_case,
    expansion_instance,
    gap_balanced_solution,
    gap_even_split_solution,
    gap_instance,
    gap_outer_cycle,
    gap_uniform_allocation,
)
from .coop import (
    CoalitionValueTable,
    CorrespondenceReport,
    GadgetReport,
    PowerEntry,
    PowerMatrix,
    check_correspondence,
    coalition_table,
    coalition_value,
    detect_bad_vertices,
    in_core,
    in_prekernel,
    power,
    power_matrix,
)
from .matching import (
    LPRelaxationResult,
    is_acyclic,
    is_unique_optimum,
    lp_integrality_check,
    max_weight_c_matching,
)
from .model import (
    Allocation,
    CMatching,
    Instance,
    ParseError,
    SizeGuardError,
    Solution,
    ValidationError,
    allocation_of,
    dump_allocation,
    dump_instance,
    dump_solution,
    is_c_matching,
    load_allocation,
    load_instance,
    load_solution,
    make_allocation,
    make_instance,
    make_matching,
    make_solution,
)
from .reduction import (
    AuxiliaryBundle,
    PreservationReport,
    build_auxiliary,
    phi,
    phi_inverse,
    to_copy_payoffs,
    to_splits,
    verify_preservation,
)
from .semantics import (
    BalanceReport,
    OutsideOptionReport,
    StabilityReport,
    alpha,
    is_balanced,
    is_stable,
    outside_option,
    unit_outside_option,
    unit_solution,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AuxiliaryBundle",
    "BalanceReport",
    "BalancedOutcome",
    "CMatching",
    "CoalitionValueTable",
    "CorrespondenceReport",
    "GadgetReport",
    "Instance",
    "LPRelaxationResult",
    "OutsideOptionReport",
    "ParseError",
    "PowerEntry",
    "PowerMatrix",
    "PreservationReport",
    "SizeGuardError",
    "Solution",
    "SolverConfig",
    "StabilityReport",
    "ValidationError",
    "VerifyTranscript",
    "allocation_of",
    "alpha",
    "build_auxiliary",
    "certify_expansion_case",
    "certify_gap_case",
    "check_correspondence",
    "coalition_table",
    "coalition_value",
    "detect_bad_vertices",
    "dump_allocation",
    "dump_instance",
    "dump_solution",
    "exact_verify",
    "expansion_instance",
    "gap_balanced_solution",
    "gap_even_split_solution",
    "gap_instance",
    "gap_outer_cycle",
    "gap_uniform_allocation",
    "in_core",
    "in_prekernel",
    "is_acyclic",
    "is_balanced",
    "is_c_matching",
    "is_stable",
    "is_unique_optimum",
    "load_allocation",
    "load_instance",
    "load_solution",
    "lp_integrality_check",
    "make_allocation",
    "make_instance",
    "make_matching",
    "make_solution",
    "max_weight_c_matching",
    "outside_option",
    "phi",
    "phi_inverse",
    "power",
    "power_matrix",
    "rebalance_targets",
    "solve_balanced_unit",
    "stable_exists_unit",
    "to_copy_payoffs",
    "to_splits",
    "unit_outside_option",
    "unit_solution",
    "verify_preservation",
]
