"""Multi-resolution fractal texture descriptors and their evaluation harness."""

from .imagery import (
    DatasetManifest,
    ManifestEntry,
    load_grayscale,
    scan_dataset,
    tile_fixed,
    write_pgm,
)
from .dilation import (
    DEFAULT_MEMORY_BUDGET,
    DilationCurve,
    RadiusSet,
    achievable_distances,
    dilation_curve,
    dilation_curve_oracle,
)
from .descriptors import DescriptorVector, FdEstimate, bm_descriptors, estimate_fd
from .multilevel import (
    MultilevelFeatures,
    build_efv,
    decompose,
    decomposition_plan,
    level_descriptors,
    shannon_entropy,
)
from .classify import (
    FeatureMatrix,
    LDAModel,
    MetricsReport,
    SelectionResult,
    confusion_metrics,
    evaluate,
    fit_lda,
    predict_lda,
    rank_features,
    select_mld,
    stratified_holdout,
)
from .config import RunConfig
from .synth import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "load_grayscale",
    "scan_dataset",
    "tile_fixed",
    "write_pgm",
    "DEFAULT_MEMORY_BUDGET",
    "DilationCurve",
    "RadiusSet",
    "achievable_distances",
    "dilation_curve",
    "dilation_curve_oracle",
    "DescriptorVector",
    "FdEstimate",
    "bm_descriptors",
    "estimate_fd",
    "MultilevelFeatures",
    "build_efv",
    "decompose",
    "decomposition_plan",
    "level_descriptors",
    "shannon_entropy",
    "FeatureMatrix",
    "LDAModel",
    "MetricsReport",
    "SelectionResult",
    "confusion_metrics",
    "evaluate",
    "fit_lda",
    "predict_lda",
    "rank_features",
    "select_mld",
    "stratified_holdout",
    "RunConfig",
    "generate_synthetic",
    "__version__",
]
