"""Token-level detection of machine-generated passages in scientific text.

The pipeline runs whitespace words through a subtoken aligner, chunks long
documents under a subtoken budget, scores each chunk with a pluggable
classifier, folds subtoken scores back onto words, and optionally ensembles
several classifiers by majority vote. Evaluation is macro-averaged F1 over
the four token classes.
"""

from .ablation import (
    FROZEN_LAYER_GRID,
    PRESET_ORDER,
    AblationGrid,
    AblationRecord,
    grid_columns,
    load_records_dir,
    parse_csv,
    render_csv,
    render_markdown,
)
from .alignment import (
    AGGREGATION_STRATEGIES,
    CharPieceSubtokenizer,
    Chunk,
    SubtokenAlignment,
    Subtokenizer,
    VocabSubtokenizer,
    aggregate_to_words,
    align,
    chunk_alignment,
    effective_alignment,
    project_word_labels,
)
from .artifacts import (
    Arch,
    SerializedScorer,
    TaggerGraph,
    load_artifact_dir,
    load_serialized_scorer,
    random_weights,
    save_artifact,
)
from .corpus import (
    DEFAULT_LABEL_NAMES,
    NUM_CLASSES,
    Dataset,
    Document,
    LabelMap,
    SpanAnnotation,
    dataset_to_jsonl,
    document_to_json,
    labels_to_spans,
    load_dataset,
    parse_dataset,
    spans_to_labels,
    whitespace_tokenize,
    write_dataset,
)
from .ensemble import (
    DEFAULT_TIE_POLICY,
    TIE_POLICIES,
    EnsembleConfig,
    EnsemblePrediction,
    ensemble_predict,
    majority_vote,
    select_top_k,
    vote_tallies,
)
from .errors import DataError, PipelineError, ValidationError
from .evaluation import (
    CLASS_POLICIES,
    ClassMetrics,
    EvalReport,
    confusion_counts,
    evaluate_dataset,
    evaluate_report,
    format_pct,
    macro_f1,
)
from .reporting import (
    PredictionRecord,
    disagreement_spans,
    read_predictions,
    render_span_report,
    write_predictions,
)
from .scoring import (
    INPUT_LENGTH_GRID,
    PRESETS,
    ChunkScores,
    DocumentPrediction,
    MockScorer,
    ModelPreset,
    Scorer,
    mock_scorer,
    predict_document,
)
from .synthetic import class_vocabulary, synthetic_dataset

__version__ = "0.1.0"

__all__ = [
    "AGGREGATION_STRATEGIES",
    "AblationGrid",
    "AblationRecord",
    "Arch",
    "CLASS_POLICIES",
    "CharPieceSubtokenizer",
    "Chunk",
    "ChunkScores",
    "ClassMetrics",
    "DEFAULT_LABEL_NAMES",
    "DEFAULT_TIE_POLICY",
    "DataError",
    "Dataset",
    "Document",
    "DocumentPrediction",
    "EnsembleConfig",
    "EnsemblePrediction",
    "EvalReport",
    "FROZEN_LAYER_GRID",
    "INPUT_LENGTH_GRID",
    "LabelMap",
    "MockScorer",
    "ModelPreset",
    "NUM_CLASSES",
    "PRESETS",
    "PRESET_ORDER",
    "PipelineError",
    "PredictionRecord",
    "Scorer",
    "SerializedScorer",
    "SpanAnnotation",
    "SubtokenAlignment",
    "Subtokenizer",
    "TIE_POLICIES",
    "TaggerGraph",
    "ValidationError",
    "VocabSubtokenizer",
    "aggregate_to_words",
    "align",
    "chunk_alignment",
    "class_vocabulary",
    "confusion_counts",
    "dataset_to_jsonl",
    "disagreement_spans",
    "document_to_json",
    "effective_alignment",
    "ensemble_predict",
    "evaluate_dataset",
    "evaluate_report",
    "format_pct",
    "grid_columns",
    "labels_to_spans",
    "load_artifact_dir",
    "load_dataset",
    "load_records_dir",
    "load_serialized_scorer",
    "macro_f1",
    "majority_vote",
    "mock_scorer",
    "parse_csv",
    "parse_dataset",
    "predict_document",
    "project_word_labels",
    "random_weights",
    "read_predictions",
    "render_csv",
    "render_markdown",
    "render_span_report",
    "save_artifact",
    "select_top_k",
    "spans_to_labels",
    "synthetic_dataset",
    "vote_tallies",
    "whitespace_tokenize",
    "write_dataset",
    "write_predictions",
]
