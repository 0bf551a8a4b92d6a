"""Exception hierarchy shared across the package.

Two broad families matter for the CLI exit-code mapping: ``DataError``
(malformed or inconsistent input files, exit 3) and ``NumericError``
(invalid values or shapes fed to the math layer, exit 4).
"""


class RunaError(Exception):
    """Base class for all package errors."""


class DataError(RunaError):
    """Malformed, truncated, or inconsistent input data."""


class NumericError(RunaError):
    """Invalid numeric arguments (shapes, domains, degenerate values)."""


# --- numeric layer ---------------------------------------------------------

class DimMismatch(NumericError):
    pass


class ZeroVector(NumericError):
    pass


class ShapeMismatch(NumericError):
    pass


class NonFiniteValue(NumericError):
    pass


# --- raster layer ----------------------------------------------------------

class MalformedHeader(DataError):
    pass


class TruncatedPixelData(DataError):
    pass


class BoxOutOfBounds(NumericError):
    pass


class NonPositiveRadius(NumericError):
    pass


class EmptyRaster(NumericError):
    pass


# --- encoders / bank -------------------------------------------------------

class EmptyPrompt(NumericError):
    pass


class DuplicateLabel(DataError):
    pass


class BadTemplate(DataError):
    pass


# --- scoring ---------------------------------------------------------------

class EmptySims(NumericError):
    pass


class NonPositiveTau(NumericError):
    pass


# --- training --------------------------------------------------------------

class EmptyBatch(NumericError):
    pass


class InsufficientShots(DataError):
    def __init__(self, label, have, need):
        super().__init__(f"class {label!r} has {have} candidates, need {need}")
        self.label = label
        self.have = have
        self.need = need


# --- metrics ---------------------------------------------------------------

class EmptyScores(NumericError):
    pass


# --- files / harness -------------------------------------------------------

class FormatError(DataError):
    pass


class UnknownLabel(DataError):
    pass


class MissingEmbedding(DataError):
    pass


class BadConfig(DataError):
    pass


class NoIDRecords(DataError):
    pass


class SplitOverlap(DataError):
    """Few-shot train pool and evaluation split share records."""
