"""Exception types shared across the toolkit."""


class DeocError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(DeocError):
    """Array dims incompatible with the operation's contract."""


class LengthMismatch(DeocError):
    """Attribute vector length does not match the declared schema."""


class NoValidPlacement(DeocError):
    """No occluder offset satisfies the placement constraints."""


class UnknownSplit(DeocError):
    """Requested split is not present in the dataset manifest."""


class InvalidTap(DeocError):
    """Requested (stage, conv) tap does not exist in the feature extractor."""


class ImageTooSmall(DeocError):
    """Image smaller than the metric's window."""


class IOFailure(DeocError):
    """Filesystem read/write failed."""


class ConfigError(DeocError):
    """Bad or unknown configuration key/value."""


class DatasetMissing(DeocError):
    """Dataset root or manifest not found."""


class MissingDependencyCheckpoint(DeocError):
    """A required upstream checkpoint (classifier, extractor) is absent."""


class NonFiniteLoss(DeocError):
    """Training produced a NaN/inf loss; carries the offending step and batch ids."""

    def __init__(self, message, step=None, batch_ids=None):
        super().__init__(message)
        self.step = step
        self.batch_ids = list(batch_ids) if batch_ids is not None else None
