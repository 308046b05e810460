"""Content-based leaf image retrieval.

Segmentation, polar Fourier shape descriptors, color moments, and vein
features over a species-labeled image corpus, with a persisted index and
weighted top-n search.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .appearance import VeinConfig, color_moments, vein_features, vein_image
from .config import PipelineConfig, Weights, parse_config_file
from .errors import (
    CorpusError,
    DegenerateShapeError,
    EmptyIndexError,
    EmptySegmentationError,
    ExtractionError,
    IndexFormatError,
    LeafSearchError,
    MalformedIndexError,
    SplitError,
    UnimodalHistogramError,
    VersionMismatchError,
)
from .index import (
    Index,
    IndexRecord,
    NormalizationStats,
    build_index,
    extract_features,
    ingest_dataset,
    load_index,
    normalize_vector,
    save_index,
    split_dataset,
)
from .ranking import evaluate, query_top_n, rank_records
from .segmentation import LeafRegion, SegmentationConfig, segment_leaf
from .shape import PftConfig, shape_descriptor

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "PipelineConfig",
    "Weights",
    "SegmentationConfig",
    "PftConfig",
    "VeinConfig",
    "LeafRegion",
    "Index",
    "IndexRecord",
    "NormalizationStats",
    "segment_leaf",
    "shape_descriptor",
    "color_moments",
    "vein_features",
    "vein_image",
    "extract_features",
    "ingest_dataset",
    "split_dataset",
    "build_index",
    "save_index",
    "load_index",
    "normalize_vector",
    "rank_records",
    "query_top_n",
    "evaluate",
    "parse_config_file",
    "LeafSearchError",
    "UnimodalHistogramError",
    "EmptySegmentationError",
    "DegenerateShapeError",
    "CorpusError",
    "SplitError",
    "ExtractionError",
    "IndexFormatError",
    "VersionMismatchError",
    "MalformedIndexError",
    "EmptyIndexError",
    "__version__",
]
