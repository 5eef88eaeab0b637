"""tritstream: fine-granular-scalable trit-plane compression of Gaussian latents.

A quantized, mean-removed latent tensor is coded trit-plane by trit-plane
with RD-prioritized ordering into a single bitstream that stays decodable
under truncation at any byte.
"""

__version__ = "0.1.0"

from .codec import (
    DecodeResult,
    EncodeResult,
    EncoderOptions,
    GaussianModel,
    RDRecord,
    StrategyId,
    decode,
    decode_sweep,
    encode,
    rd_sweep,
)
from .container import (
    StreamHeader,
    load_tensors,
    model_digest,
    read_stream,
    save_tensors,
    truncate_stream,
    write_stream,
)
from .errors import (
    BelowMinimumLength,
    CorruptHeader,
    DegenerateInterval,
    DigestMismatch,
    DimensionOverflow,
    EndOfPrefix,
    FormatError,
    InvalidTrit,
    NonPositiveSigma,
    ShapeMismatch,
    TritstreamError,
    ZeroFrequencySymbol,
)
from .harness import SigmaLaw, SyntheticSpec, evaluate, generate, write_csv
from .tritplane import PlaneConfig, TritState

__all__ = [
    "__version__",
    "GaussianModel",
    "EncoderOptions",
    "EncodeResult",
    "DecodeResult",
    "RDRecord",
    "StrategyId",
    "encode",
    "decode",
    "decode_sweep",
    "rd_sweep",
    "StreamHeader",
    "write_stream",
    "read_stream",
    "truncate_stream",
    "save_tensors",
    "load_tensors",
    "model_digest",
    "SigmaLaw",
    "SyntheticSpec",
    "generate",
    "evaluate",
    "write_csv",
    "PlaneConfig",
    "TritState",
    "TritstreamError",
    "DegenerateInterval",
    "InvalidTrit",
    "ZeroFrequencySymbol",
    "EndOfPrefix",
    "ShapeMismatch",
    "NonPositiveSigma",
    "DimensionOverflow",
    "BelowMinimumLength",
    "DigestMismatch",
    "CorruptHeader",
    "FormatError",
]
