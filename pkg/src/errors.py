"""Exception hierarchy and failure bookkeeping for calibration runs."""

from enum import StrEnum
from typing import ClassVar


class FailureReason(StrEnum):
    """Why a slave calibration did not produce a trusted result."""

    DEGENERATE_SCENE = "degenerate-scene"
    NO_OVERLAP = "no-overlap"
    CORRESPONDENCE_STARVATION = "correspondence-starvation"
    AMBIGUOUS_GROUND = "ambiguous-ground"
    NO_GROUND = "no-ground"
    INACCURATE = "inaccurate"
    NONE = "none"


class CalibrationStage(StrEnum):
    GROUND = "ground"
    PLANAR_SEARCH = "planar-search"
    ICPN = "icpn"
    OCTREE = "octree"
    VERIFICATION = "verification"


class InvalidArgumentError(ValueError):
    """An operation was called outside its preconditions."""


class DegenerateDecompositionError(ValueError):
    """Euler decomposition requested too close to gimbal lock."""


class ConfigError(ValueError):
    """A JSON spec or config file is malformed."""


class CloudParseError(ValueError):
    """A point-cloud file could not be parsed."""

    def __init__(self, path: str, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class CalibrationError(Exception):
    """Base class for failures that end a single slave calibration."""

    reason: ClassVar[FailureReason]
    stage: CalibrationStage | None = None


class NoGroundFoundError(CalibrationError):
    reason = FailureReason.NO_GROUND


class AmbiguousGroundError(CalibrationError):
    reason = FailureReason.AMBIGUOUS_GROUND


class DegenerateSceneError(CalibrationError):
    reason = FailureReason.DEGENERATE_SCENE


class NoOverlapError(CalibrationError):
    reason = FailureReason.NO_OVERLAP


class CorrespondenceStarvationError(CalibrationError):
    reason = FailureReason.CORRESPONDENCE_STARVATION
