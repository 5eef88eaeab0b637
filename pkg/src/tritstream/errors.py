"""Exception hierarchy shared by all tritstream modules."""


class TritstreamError(Exception):
    """Base class for all tritstream errors."""


class DegenerateInterval(TritstreamError):
    """Interval probability underflowed the configured floor.

    Callers substitute the interval midpoint (bounded case) or the finite
    boundary (half-open case) as the reconstruction level.
    """


class InvalidTrit(TritstreamError, ValueError):
    """A refinement symbol outside the coding alphabet."""


class ZeroFrequencySymbol(TritstreamError):
    """The symbol to encode has quantized frequency 0 under its model.

    Only reachable when the sample sits in a child interval whose model
    probability is below the quantization floor, i.e. the value is wildly
    off-model for its sigma.
    """


class EndOfPrefix(TritstreamError):
    """The next symbol is not determined by the available byte prefix.

    This is the fine-granular-scalability stop signal, not a failure.
    """


class ShapeMismatch(TritstreamError, ValueError):
    """Latent and model tensors disagree in shape."""


class NonPositiveSigma(TritstreamError, ValueError):
    """A model standard deviation is zero, negative, or non-finite."""


class DimensionOverflow(TritstreamError, ValueError):
    """A header field does not fit its fixed-width container slot."""


class BelowMinimumLength(TritstreamError, ValueError):
    """Truncation target shorter than header plus side info."""


class DigestMismatch(TritstreamError):
    """Stream was produced against a different (mu, sigma) model."""


class CorruptHeader(TritstreamError):
    """Stream header failed magic/version/consistency checks."""


class FormatError(TritstreamError):
    """Malformed tensor or stream file."""
