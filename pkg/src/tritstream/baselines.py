"""Ablation coders sharing the codec plumbing.

Each baseline swaps exactly one scheduling or refinement choice:

  * bit-plane: binary interval splits instead of ternary (an element
    quantized to 0 no longer reconstructs to 0 at partial depth);
  * channel-wise sorting: whole channels to full depth, ordered by the
    channel's aggregate rate/distortion ratio;
  * latent-wise sorting: whole elements to full depth, best ratio first;
  * raster / reverse variants live on StrategyId directly.

All baselines are lossless at full rate and reuse the container format,
so any of them can be truncated and swept the same way.
"""

from __future__ import annotations

import numpy as np

from .codec import EncodeResult, EncoderOptions, GaussianModel, StrategyId, encode

__all__ = [
    "StrategyId",
    "encode_bitplane",
    "encode_channel_sorted",
    "encode_latent_sorted",
    "encode_raster",
]


def _with_strategy(options: EncoderOptions | None, strategy: StrategyId) -> EncoderOptions:
    opts = options or EncoderOptions()
    return EncoderOptions(
        num_planes=opts.num_planes,
        clip_pct=opts.clip_pct,
        pixel_count=opts.pixel_count,
        strategy=strategy,
    )


def encode_bitplane(
    y_c: np.ndarray,
    model: GaussianModel,
    options: EncoderOptions | None = None,
    sideinfo: bytes = b"",
) -> EncodeResult:
    """Bit-plane coding with priority-sorted planes (binary refinement)."""
    return encode(y_c, model, _with_strategy(options, StrategyId.BIT_PLANE_PRIORITY), sideinfo)


def encode_channel_sorted(
    y_c: np.ndarray,
    model: GaussianModel,
    options: EncoderOptions | None = None,
    sideinfo: bytes = b"",
) -> EncodeResult:
    """Whole channels to full depth, ordered by aggregate RD ratio."""
    return encode(y_c, model, _with_strategy(options, StrategyId.CHANNEL_SORT), sideinfo)


def encode_latent_sorted(
    y_c: np.ndarray,
    model: GaussianModel,
    options: EncoderOptions | None = None,
    sideinfo: bytes = b"",
) -> EncodeResult:
    """Whole elements to full depth, ordered by per-element RD ratio."""
    return encode(y_c, model, _with_strategy(options, StrategyId.LATENT_SORT), sideinfo)


def encode_raster(
    y_c: np.ndarray,
    model: GaussianModel,
    options: EncoderOptions | None = None,
    sideinfo: bytes = b"",
) -> EncodeResult:
    """No prioritization at all: elements to full depth in raster order."""
    return encode(y_c, model, _with_strategy(options, StrategyId.RASTER_NO_SORT), sideinfo)
