"""Crisp and fuzzy TOPSIS candidate ranking with AHP weights and ranking evaluation."""

__version__ = "0.1.0"

from .errors import (
    ComputationError,
    ConvergenceError,
    DegenerateProblemError,
    MCDMError,
    ValidationError,
)
from .fuzzy import (
    DEFAULT_VOCABULARY,
    TFN,
    LinguisticVocabulary,
    TriangularFuzzyNumber,
    defuzzify_centroid,
    lookup_linguistic,
    tfn_aggregate,
    tfn_distance,
    tfn_new,
)
from .metrics import (
    ConfusionMatrix,
    EvaluationReport,
    classification_metrics,
    compare_labels,
    compare_rankings,
    ranking_metrics,
    score_agreement,
)
from .profiles import (
    CandidateRecord,
    LabelMapping,
    ScoreRecord,
    build_score_table,
    fuzzify_records,
    fuzzify_score_table,
    label_to_score,
    read_candidates,
    read_scores,
    score_to_label,
)
from .topsis import ScoreTable, TopsisResult, apply_weights, ideal_solutions, normalize, run_topsis
from .weighting import (
    PAPER_WEIGHTS,
    PairwiseComparisonMatrix,
    WeightVector,
    aggregate_judgments,
    derive_weights,
    fuzzify_weights,
)
