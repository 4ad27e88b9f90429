"""Exception types raised across the pipeline."""


class CoinRecError(Exception):
    """Base class for all coinrec errors."""


class ImageTooSmall(CoinRecError, ValueError):
    pass


class CircleOutOfBounds(CoinRecError, ValueError):
    pass


class NoCircleFound(CoinRecError):
    pass


class BadTopology(CoinRecError, ValueError):
    pass


class DimensionMismatch(CoinRecError, ValueError):
    pass


class EmptyDataset(CoinRecError, ValueError):
    pass


class EmptyDenomination(CoinRecError, ValueError):
    pass


class BadStep(CoinRecError, ValueError):
    pass


class UnsupportedFormat(CoinRecError):
    pass


class CorruptImage(CoinRecError):
    pass


class ModelFormatError(CoinRecError):
    """Raised when a model file cannot be decoded."""
