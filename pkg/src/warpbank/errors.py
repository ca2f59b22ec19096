"""Exception hierarchy shared by all warpbank modules."""


class WarpbankError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(WarpbankError):
    """An input value violates a precondition (non-finite data, layout
    mismatch, length mismatch, missing frames)."""


class ConfigurationError(WarpbankError):
    """A parameter combination is invalid (bad window/hop pair, b <= 0,
    infeasible redundancy, dimension mismatch)."""


class DegenerateInputError(WarpbankError):
    """An input is structurally valid but degenerate for the requested
    operation (zero-energy signal in SNR mixing, all-zero PSD with no
    regularization)."""


class NonInvertibleFrameError(WarpbankError):
    """The analysis frame cannot be inverted: some signal positions or
    frequency bins are not covered by any window."""
