"""Correlation-based multimodal feature fusion.

Learns joint per-modality projections that maximize within-class and
minimize between-class cross-modal correlation, alongside unsupervised and
concatenation baselines, and evaluates them with a nearest-neighbour
classifier in the fused space.
"""

from .dataset import (
    ClassLabels,
    FeatureSet,
    MultimodalDataset,
    apply_centering,
    center,
    load_dataset,
    save_dataset,
)
from .errors import (
    AlignmentError,
    ConfigError,
    CorrFusionError,
    DimensionError,
    LabelError,
    NumericError,
    ParseError,
    ValidationError,
)
from .evaluation import (
    EvalConfig,
    EvalReport,
    compare_methods,
    evaluate,
    j_criterion,
    nn_classify,
    sweep_dimensions,
    write_report,
)
from .linalg import (
    CorrelationBlocks,
    EigenSolution,
    between_class_corr,
    build_block_matrices,
    class_indicator_matrix,
    count_positive,
    positive_count,
    solve_generalized,
    within_class_corr,
)
from .models import (
    METHODS,
    ProjectedData,
    ProjectionModel,
    fit,
    load_model,
    project,
    rescale_to_constraint,
    save_model,
    validate_method,
)
from .synth import SynthConfig, generate, standard_benchmark

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ClassLabels",
    "ConfigError",
    "CorrelationBlocks",
    "CorrFusionError",
    "DimensionError",
    "EigenSolution",
    "EvalConfig",
    "EvalReport",
    "FeatureSet",
    "LabelError",
    "METHODS",
    "MultimodalDataset",
    "NumericError",
    "ParseError",
    "ProjectedData",
    "ProjectionModel",
    "SynthConfig",
    "ValidationError",
    "apply_centering",
    "between_class_corr",
    "build_block_matrices",
    "center",
    "class_indicator_matrix",
    "compare_methods",
    "count_positive",
    "evaluate",
    "fit",
    "generate",
    "j_criterion",
    "load_dataset",
    "load_model",
    "nn_classify",
    "positive_count",
    "project",
    "rescale_to_constraint",
    "save_dataset",
    "save_model",
    "solve_generalized",
    "standard_benchmark",
    "sweep_dimensions",
    "validate_method",
    "within_class_corr",
    "write_report",
]
