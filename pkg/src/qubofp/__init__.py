"""Interaction-fingerprint search for regression stumps via QUBO annealing."""

from .dataset import (
    COMPLEMENT_PREFIX,
    Dataset,
    augment_complements,
    center_targets,
    load_dataset,
    subsample,
)
from .errors import (
    AugmentError,
    BudgetError,
    DegenerateError,
    EmptyInputError,
    EmptySelectionError,
    FormatError,
    IoError,
    QubofpError,
    RangeError,
    ShapeError,
    TooLargeError,
)
from .experiment import (
    ImportanceReport,
    OverlapMatrix,
    TrialConfig,
    TrialResult,
    effectiveness,
    emit_report,
    fingerprint_string,
    importance,
    overlap_matrix,
    run_trials,
    validate_report,
)
from .qubo import (
    Assignment,
    DecodedSolution,
    PenaltyWeights,
    QuboModel,
    VariableLayout,
    build_qubo,
    check_constraints,
    decode,
    energy,
    export_qubo,
    valid_assignment,
)
from .search import SearchResult, count_combinations, full_search
from .solver import (
    AnnealSchedule,
    default_beta_range,
    exhaustive_solve,
    refine_local,
    simulated_anneal,
)
from .stump import (
    FingerprintSet,
    SplitStats,
    StumpModel,
    best_single_baseline,
    fit_stump,
    interaction_values,
    mse,
    split_stats,
    swmse,
)

__version__ = "0.1.0"
