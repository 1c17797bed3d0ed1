class EnhancerTrainingError(Exception):
    """Base class for training/data errors."""


class EmptySource(EnhancerTrainingError):
    pass


class PhaseOrderViolation(EnhancerTrainingError):
    pass
