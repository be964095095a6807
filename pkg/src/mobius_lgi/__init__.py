"""Leggett-Garg K3 and macrorealism tests for qubits evolved by Mobius maps."""

from .correlations import (
    CorrelationFactors,
    LGResult,
    Protocol,
    TwoTimeJoint,
    correlation,
    factors,
    joint_12,
    joint_13,
    joint_23,
    k3,
    k3_arrays,
    one_time_probs,
)
from .extended import DOWN, INFINITY, UP, QubitState, as_point, point_to_state, polar_point, state_to_point, weight
from .macrorealism import (
    LambdaPair,
    MacrorealismReport,
    TripleJoint,
    check_aot,
    check_nsit,
    symmetric_protocol,
    macrorealism_report,
    nsit123_analytic,
    triple_joint,
)
from .maps import (
    IDENTITY,
    SWAP,
    FlcMap,
    MapClass,
    MapKind,
    PauliParams,
    classify,
    compose,
    from_pauli,
    nonlinearity_witness,
    ratio_constraint_satisfied,
    ratio_form_map,
)
from .sweep import (
    ConstrainedParams,
    SweepConfig,
    SweepResult,
    UnitaryAngles,
    constrained_k3,
    luders_violation_search,
    optimal_k3_surface,
    unitary_k3,
    verify_c6_relation,
)

__version__ = "0.1.0"
