"""Exact simulator and verifier for the n-player pair and parity games."""

__version__ = "0.1.0"

from .qsim import (
    QUBIT_CAP,
    ExactAmplitude,
    ExactnessError,
    MeasBasis,
    MeasurementRecord,
    StateVector,
    basis_state,
    make_ghz,
    measure_qubit,
    outcome_probability,
)
from .games import (
    Action,
    GameInstance,
    GameSpec,
    Grouping,
    Inbox,
    ProtocolViolation,
    RunResult,
    SplitMix64,
    StepLimitExceeded,
    Strategy,
    TapeDraws,
    TapeExhausted,
    Transcript,
    broadcast_complexity,
    enumerate_branches,
    make_general_game,
    make_simple_game,
    run_game,
)
from .strategies import (
    ClassicalAtomStrategy,
    LabelTable,
    QuantumSharedState,
    StrategyAssignment,
    classical_atom_strategy_assignment,
    classical_label_strategy,
    general_strategy_forbidden_mass,
    general_strategy_output_distribution,
    losing_probability_formula,
    quantum_general_strategy,
    quantum_simple_strategy,
    simple_strategy_losing_mass,
    strategy_from_name,
)
from .bounds import (
    AssignmentSearchResult,
    GF2Family,
    LemmaChainReport,
    ResponseTable,
    appendix_bound,
    check_gf2_condition,
    exhaustive_min_loss,
    find_gf2_family,
    find_response_table,
    min_dimension_general,
    min_transcripts_simple,
    verify_lemma_chain,
)

__all__ = [
    "__version__",
    "QUBIT_CAP",
    "ExactAmplitude",
    "ExactnessError",
    "MeasBasis",
    "MeasurementRecord",
    "StateVector",
    "basis_state",
    "make_ghz",
    "measure_qubit",
    "outcome_probability",
    "Action",
    "GameInstance",
    "GameSpec",
    "Grouping",
    "Inbox",
    "ProtocolViolation",
    "RunResult",
    "SplitMix64",
    "StepLimitExceeded",
    "Strategy",
    "TapeDraws",
    "TapeExhausted",
    "Transcript",
    "broadcast_complexity",
    "enumerate_branches",
    "make_general_game",
    "make_simple_game",
    "run_game",
    "ClassicalAtomStrategy",
    "LabelTable",
    "QuantumSharedState",
    "StrategyAssignment",
    "classical_atom_strategy_assignment",
    "classical_label_strategy",
    "general_strategy_forbidden_mass",
    "general_strategy_output_distribution",
    "losing_probability_formula",
    "quantum_general_strategy",
    "quantum_simple_strategy",
    "simple_strategy_losing_mass",
    "strategy_from_name",
    "AssignmentSearchResult",
    "GF2Family",
    "LemmaChainReport",
    "ResponseTable",
    "appendix_bound",
    "check_gf2_condition",
    "exhaustive_min_loss",
    "find_gf2_family",
    "find_response_table",
    "min_dimension_general",
    "min_transcripts_simple",
    "verify_lemma_chain",
]
