"""Exception types shared across the rclc package."""


class RclcError(Exception):
    """Base class for all rclc errors."""


# --- raster / video I/O ---

class MalformedHeader(RclcError):
    pass


class UnsupportedColorSpace(RclcError):
    pass


class TruncatedFrame(RclcError):
    pass


class OutOfBounds(RclcError):
    pass


class OddCoordinateWithChroma(RclcError):
    pass


class DimensionMismatch(RclcError):
    pass


# --- geometry ---

class EmptyIntersection(RclcError):
    pass


# --- scheduler ---

class CalledOnBu(RclcError):
    pass


# --- detector ---

class ParseError(RclcError):
    pass


class InvalidBox(RclcError):
    pass


# --- codec ---

class CorruptPayload(RclcError):
    pass


class CommandFailed(RclcError):
    pass


class OutputMissing(RclcError):
    pass


class BadTemplate(RclcError):
    pass


# --- container ---

class InconsistentCount(RclcError):
    pass


class BoxOutOfFrame(RclcError):
    pass


class BadMagic(RclcError):
    pass


class UnsupportedVersion(RclcError):
    pass


class Truncated(RclcError):
    pass


# --- pipeline ---

class MissingReference(RclcError):
    pass


class EnhancerError(RclcError):
    pass


# --- metrics ---

class NoOverlap(RclcError):
    pass


class DegenerateFit(RclcError):
    pass


class MismatchedLengths(RclcError):
    pass


# --- synth ---

class SpecInvalid(RclcError):
    pass
