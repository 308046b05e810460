"""Exception types shared across the pipeline.

Every pipeline failure carries a short ``stage`` code so callers (and the
CLI) can name the stage that rejected an image without parsing messages.
"""


class LeafSearchError(Exception):
    """Base class for all domain errors raised by this package."""

    stage = "pipeline"


class UnimodalHistogramError(LeafSearchError):
    """The intensity histogram has no two separated peaks to threshold between."""

    stage = "unimodal-histogram"


class EmptySegmentationError(LeafSearchError):
    """Segmentation produced no usable foreground region."""

    stage = "empty-segmentation"


class DegenerateShapeError(LeafSearchError):
    """The mask is too small for polar analysis (maximum radius is zero)."""

    stage = "degenerate-shape"


class CorpusError(LeafSearchError):
    """The corpus directory is missing, empty, or malformed."""

    stage = "corpus"


class SplitError(LeafSearchError):
    """A species has too few images for the requested reference/test split."""

    stage = "split"


class IndexFormatError(LeafSearchError):
    """An index file violates the documented on-disk format."""

    stage = "index-format"


class VersionMismatchError(IndexFormatError):
    """The index file magic or version is not one this build understands."""

    stage = "index-version"


class MalformedIndexError(IndexFormatError):
    """An index file line is truncated, unparseable, or inconsistent."""

    stage = "index-malformed"


class EmptyIndexError(LeafSearchError):
    """A query was issued against an index with no records."""

    stage = "empty-index"


class ExtractionError(LeafSearchError):
    """Feature extraction failed for a specific corpus file.

    Wraps the underlying pipeline error and remembers which file and which
    stage failed.
    """

    def __init__(self, path, cause):
        self.path = str(path)
        self.stage = getattr(cause, "stage", "extraction")
        super().__init__(f"{self.path}: {self.stage}: {cause}")
        self.__cause__ = cause
