from .metrics import (
    MetricConfig,
    MetricError,
    average_precision_at_k,
    corpus_bleu,
    detection_metrics,
    exact_match,
    false_positive_rate_at_k,
    localization_metrics,
    localization_report,
    normalize_ws,
    reciprocal_rank_at_k,
    repair_metrics,
)
from .protocol import (
    SamplePrediction,
    end_to_end_eval,
    evaluate_model,
    is_single_line_dataset,
    per_pattern_breakdown,
    predict_samples,
)
from .report import MetricsReport

__all__ = [
    "MetricConfig",
    "MetricError",
    "MetricsReport",
    "SamplePrediction",
    "average_precision_at_k",
    "corpus_bleu",
    "detection_metrics",
    "end_to_end_eval",
    "evaluate_model",
    "exact_match",
    "false_positive_rate_at_k",
    "is_single_line_dataset",
    "localization_metrics",
    "localization_report",
    "normalize_ws",
    "per_pattern_breakdown",
    "predict_samples",
    "reciprocal_rank_at_k",
    "repair_metrics",
]
