"""Steering with no-signalling boxes: remote ensemble preparation,
hidden-constituent (blind) steering, exact vertex decomposition, and a
seeded protocol simulator with a verifying Referee.

All probabilities are exact rationals (`fractions.Fraction`); floats
only ever appear in empirical frequencies and test statistics.
"""

from .blind import (
    BlindReport,
    BlindSteeringPlan,
    BlindSteeringSolution,
    ConstraintSystem,
    Relabeling,
    TargetState,
    TriangleDecompositions,
    bob_posterior,
    build_nonlocal_ensemble,
    canonicalize,
    lower_triangle_weights,
    plan_blind_steering,
    referee_infer,
    solve_constraints,
    triangle_decompositions,
    upper_triangle_weights,
    verify_blind_steering,
)
from .boxes import (
    BipartiteBox,
    DetLocalBox,
    LocalBox,
    PRBox,
    SBox,
    alice_marginal,
    as_prob,
    bob_outcome_distribution,
    condition_on_bob,
    enumerate_det_boxes,
    is_no_signalling,
    no_signalling_violations,
    product_box,
)
from .ensembles import (
    AliceReduction,
    Ensemble,
    Member,
    NonlocalEnsemble,
    PRMember,
    ProductMember,
    ReductionRecord,
    constituent_after_measurement,
    ensembles_equal,
    mix,
    mix_nonlocal,
    posterior_alice_ensemble,
    posterior_alice_reduction,
    realizes,
)
from .errors import (
    BoxWorldError,
    DegenerateRegionWarning,
    IncompatibleEnsemblesError,
    InfeasibleError,
    RegionError,
    SignallingError,
    ValidationError,
    ZeroProbabilityError,
)
from .polytope import (
    catalog_hash,
    catalog_labels,
    catalog_prs,
    catalog_products,
    decompose,
    is_local,
)
from .reports import CheckResult, VerificationReport
from .serialize import (
    audit_verdict_to_json,
    bipartite_box_from_json,
    bipartite_box_to_json,
    blind_report_to_json,
    dumps,
    ensemble_from_json,
    ensemble_to_json,
    fraction_from_json,
    fraction_to_json,
    input_policy_from_json,
    input_policy_to_json,
    local_box_from_json,
    local_box_to_json,
    logs_from_ndjson,
    logs_to_ndjson,
    nonlocal_ensemble_from_json,
    nonlocal_ensemble_to_json,
    round_log_from_json,
    round_log_to_json,
    sbox_from_json,
    sbox_to_json,
    simulation_report_to_json,
    target_from_json,
    target_to_json,
    verification_report_to_json,
)
from .simulate import (
    AuditVerdict,
    FrequencyCell,
    InputPolicy,
    RoundLog,
    SimulationReport,
    estimate_box,
    referee_audit,
    run_protocol,
)
from .steering import (
    SteeringState,
    bob_identifies_constituent,
    check_common_mixture,
    check_conditioning,
    check_no_signalling_box,
    check_probability_table,
    construct_steering_state,
    round_trips,
    steered_ensemble,
    verify_steering_state,
)

__version__ = "0.1.0"

__all__ = [
    "AliceReduction",
    "AuditVerdict",
    "BipartiteBox",
    "BlindReport",
    "BlindSteeringPlan",
    "BlindSteeringSolution",
    "BoxWorldError",
    "CheckResult",
    "ConstraintSystem",
    "DegenerateRegionWarning",
    "DetLocalBox",
    "Ensemble",
    "FrequencyCell",
    "IncompatibleEnsemblesError",
    "InfeasibleError",
    "InputPolicy",
    "LocalBox",
    "Member",
    "NonlocalEnsemble",
    "PRBox",
    "PRMember",
    "ProductMember",
    "ReductionRecord",
    "RegionError",
    "Relabeling",
    "RoundLog",
    "SBox",
    "SignallingError",
    "SimulationReport",
    "SteeringState",
    "TargetState",
    "TriangleDecompositions",
    "ValidationError",
    "VerificationReport",
    "ZeroProbabilityError",
    "alice_marginal",
    "as_prob",
    "audit_verdict_to_json",
    "bipartite_box_from_json",
    "bipartite_box_to_json",
    "blind_report_to_json",
    "bob_identifies_constituent",
    "bob_outcome_distribution",
    "bob_posterior",
    "build_nonlocal_ensemble",
    "canonicalize",
    "catalog_hash",
    "catalog_labels",
    "catalog_products",
    "catalog_prs",
    "check_common_mixture",
    "check_conditioning",
    "check_no_signalling_box",
    "check_probability_table",
    "condition_on_bob",
    "constituent_after_measurement",
    "construct_steering_state",
    "decompose",
    "dumps",
    "ensemble_from_json",
    "ensemble_to_json",
    "ensembles_equal",
    "enumerate_det_boxes",
    "estimate_box",
    "fraction_from_json",
    "fraction_to_json",
    "input_policy_from_json",
    "input_policy_to_json",
    "is_local",
    "is_no_signalling",
    "local_box_from_json",
    "local_box_to_json",
    "logs_from_ndjson",
    "logs_to_ndjson",
    "lower_triangle_weights",
    "mix",
    "mix_nonlocal",
    "no_signalling_violations",
    "nonlocal_ensemble_from_json",
    "nonlocal_ensemble_to_json",
    "plan_blind_steering",
    "posterior_alice_ensemble",
    "posterior_alice_reduction",
    "product_box",
    "realizes",
    "referee_audit",
    "referee_infer",
    "round_log_from_json",
    "round_log_to_json",
    "round_trips",
    "run_protocol",
    "sbox_from_json",
    "sbox_to_json",
    "simulation_report_to_json",
    "solve_constraints",
    "steered_ensemble",
    "target_from_json",
    "target_to_json",
    "triangle_decompositions",
    "upper_triangle_weights",
    "verification_report_to_json",
    "verify_blind_steering",
    "verify_steering_state",
]
