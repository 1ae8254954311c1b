"""Exception hierarchy shared across the pipeline.

Every error carries an ``exit_code`` so the CLI can map failures onto its
stable contract: 2 for input/format problems, 3 for insufficient data.
"""


class MotionLofError(Exception):
    exit_code = 2


class FormatError(MotionLofError):
    """Malformed input file (bad header, unparsable line, bad container)."""


class OrderingError(FormatError):
    """Timestamps not strictly increasing."""


class DataValueError(FormatError):
    """A field holds NaN/Inf or an otherwise invalid value."""


class CoverageError(MotionLofError):
    """Sample and frame time ranges do not overlap."""


class InsufficientDataError(MotionLofError):
    """Not enough samples/windows/points for the requested operation."""

    exit_code = 3


class ShapeError(MotionLofError):
    """Dimension mismatch between a vector/matrix and the model."""


class ConfigError(MotionLofError):
    """Invalid configuration value or combination."""


class ModelFormatError(FormatError):
    """Model file is not a valid container (magic/truncation)."""


class ModelVersionError(MotionLofError):
    """Model file version is not supported by this build."""


class ModelChecksumError(MotionLofError):
    """Model file payload fails its CRC32 check."""
