"""Ternary interval refinement of quantized latent elements.

A value quantized to q in [-M, M] with M = (3^L - 1)/2 is described by L
trits, most significant first.  The root interval [-3^L/2, 3^L/2) is split
into three equal children per trit; after L trits the interval is the unit
bin [q - 1/2, q + 1/2).

Every boundary that ever occurs is an exact half-integer (the root width
3^L is divisible by 3^n at depth n), so intervals are stored as *doubled*
integer bounds (lo2, hi2) = (2*lo, 2*hi) and all partition arithmetic is
exact integer arithmetic.  Floats appear only when boundaries are handed
to the Gaussian statistics, at which point the two global extremes are
widened to -inf/+inf so the outermost bins absorb the tails (clamped
outliers carry their true tail mass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import gaussian_stats as gstats
from .errors import DegenerateInterval, InvalidTrit

__all__ = [
    "PlaneConfig",
    "BinInterval",
    "TritState",
    "initial_interval",
    "partition",
    "quantize",
    "quantize_array",
    "encode_trits",
    "encode_trits_array",
    "refine",
    "reconstruct",
    "choose_num_planes",
    "trit_bit_costs",
    "direct_bit_cost",
    "trit_bit_costs_hp",
    "direct_bit_cost_hp",
]

#: Largest supported trit-plane count; keeps doubled boundaries and their
#: partition intermediates inside exact int64 range for array code.
MAX_PLANES = 38


@dataclass(frozen=True)
class PlaneConfig:
    """Number of trit-planes L and the derived magnitude cap (3^L - 1)/2."""

    num_planes: int

    def __post_init__(self) -> None:
        if not 1 <= self.num_planes <= MAX_PLANES:
            raise ValueError(f"num_planes must be in [1, {MAX_PLANES}], got {self.num_planes}")

    @property
    def max_magnitude(self) -> int:
        return (3**self.num_planes - 1) // 2

    @property
    def root_bound2(self) -> int:
        """Doubled magnitude of the nominal root boundary, i.e. 3^L."""
        return 3**self.num_planes


@dataclass(frozen=True)
class BinInterval:
    """Half-open interval with exact doubled-integer bounds [lo2/2, hi2/2)."""

    lo2: int
    hi2: int

    def __post_init__(self) -> None:
        if self.lo2 >= self.hi2:
            raise ValueError(f"empty interval: lo2={self.lo2}, hi2={self.hi2}")

    @property
    def lo(self) -> float:
        return self.lo2 / 2.0

    @property
    def hi(self) -> float:
        return self.hi2 / 2.0

    @property
    def width2(self) -> int:
        return self.hi2 - self.lo2

    def prob_interval(self, cfg: PlaneConfig) -> gstats.Interval:
        """Real-valued interval for statistics, tails widened to +-inf."""
        bound2 = cfg.root_bound2
        lo = -math.inf if self.lo2 <= -bound2 else self.lo2 / 2.0
        hi = math.inf if self.hi2 >= bound2 else self.hi2 / 2.0
        return gstats.Interval(lo, hi)


def initial_interval(cfg: PlaneConfig) -> BinInterval:
    """Nominal root interval [-3^L/2, 3^L/2)."""
    return BinInterval(-cfg.root_bound2, cfg.root_bound2)


def partition(iv: BinInterval) -> tuple[BinInterval, BinInterval, BinInterval]:
    """Split into three equal children; exact because width2 = 2 * 3^m."""
    step, rem = divmod(iv.width2, 3)
    if rem != 0 or step == 0:
        raise ValueError(f"interval {iv} is not partitionable into thirds")
    c1 = iv.lo2 + step
    c2 = iv.lo2 + 2 * step
    return (BinInterval(iv.lo2, c1), BinInterval(c1, c2), BinInterval(c2, iv.hi2))


def quantize(y: float, cfg: PlaneConfig) -> int:
    """Round half away from zero, then clamp to [-max_magnitude, max_magnitude]."""
    if not math.isfinite(y):
        raise ValueError(f"cannot quantize non-finite value {y!r}")
    q = math.floor(y + 0.5) if y >= 0.0 else math.ceil(y - 0.5)
    m = cfg.max_magnitude
    return max(-m, min(m, q))


def quantize_array(y: np.ndarray, cfg: PlaneConfig) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("cannot quantize non-finite values")
    q = np.where(y >= 0.0, np.floor(y + 0.5), np.ceil(y - 0.5)).astype(np.int64)
    m = cfg.max_magnitude
    return np.clip(q, -m, m)


def encode_trits(q: int, cfg: PlaneConfig) -> tuple[int, ...]:
    """The L-trit path selecting q's unit bin, most significant first.

    Equivalently the base-3 digits of q + max_magnitude.
    """
    m = cfg.max_magnitude
    if abs(q) > m:
        raise ValueError(f"|q|={abs(q)} exceeds max magnitude {m}")
    v = q + m
    digits = []
    for _ in range(cfg.num_planes):
        v, d = divmod(v, 3)
        digits.append(d)
    return tuple(reversed(digits))


def encode_trits_array(q: np.ndarray, cfg: PlaneConfig) -> np.ndarray:
    """(K, L) trit matrix, column n-1 holding the nth trit of each element."""
    v = np.asarray(q, dtype=np.int64) + cfg.max_magnitude
    out = np.empty(v.shape + (cfg.num_planes,), dtype=np.int8)
    for col in range(cfg.num_planes - 1, -1, -1):
        out[..., col] = v % 3
        v //= 3
    return out


@dataclass(frozen=True)
class TritState:
    """Per-element coding state: current interval plus the emitted trits."""

    cfg: PlaneConfig
    sigma: float
    interval: BinInterval
    trits: tuple[int, ...] = field(default=())

    @classmethod
    def root(cls, cfg: PlaneConfig, sigma: float) -> "TritState":
        return cls(cfg=cfg, sigma=sigma, interval=initial_interval(cfg))

    @property
    def depth(self) -> int:
        return len(self.trits)


def refine(state: TritState, t: int) -> TritState:
    """Descend into child t; the inverse of one encoding step."""
    if t not in (0, 1, 2):
        raise InvalidTrit(f"trit must be 0, 1 or 2, got {t!r}")
    if state.depth >= state.cfg.num_planes:
        raise ValueError("state already refined to full depth")
    child = partition(state.interval)[t]
    return TritState(state.cfg, state.sigma, child, state.trits + (t,))


def reconstruct(state: TritState) -> float:
    """MMSE level E[y | y in current interval]; interval midpoint on underflow."""
    iv = state.interval.prob_interval(state.cfg)
    try:
        return gstats.truncated_mean(iv, state.sigma)
    except DegenerateInterval:
        return gstats.degenerate_level(iv)


def choose_num_planes(q: np.ndarray, clip_pct: float = 100.0) -> int:
    """Smallest L whose magnitude cap covers the quantized tensor.

    ``clip_pct`` below 100 sizes the cap from that magnitude percentile
    instead of the maximum; values beyond the cap are then clamped by
    :func:`quantize` (the lossy outlier-truncation knob).
    """
    if not 0.0 < clip_pct <= 100.0:
        raise ValueError(f"clip_pct must be in (0, 100], got {clip_pct}")
    mags = np.abs(np.asarray(q, dtype=np.int64))
    if mags.size == 0:
        raise ValueError("cannot size planes for an empty tensor")
    if clip_pct >= 100.0:
        target = int(mags.max())
    else:
        target = int(math.ceil(float(np.percentile(mags, clip_pct))))
    num_planes = 1
    while (3**num_planes - 1) // 2 < target:
        num_planes += 1
    return num_planes


def _interval_walk(q: int, cfg: PlaneConfig) -> list[BinInterval]:
    """Root-to-bin interval chain selected by q's trits (length L + 1)."""
    iv = initial_interval(cfg)
    chain = [iv]
    for t in encode_trits(q, cfg):
        iv = partition(iv)[t]
        chain.append(iv)
    return chain


def trit_bit_costs(q: int, sigma: float, cfg: PlaneConfig) -> list[float]:
    """Per-trit ideal bit costs -log2 P(t_n | t_1..t_{n-1}) along q's path."""
    chain = _interval_walk(q, cfg)
    levels = [gstats.neg_log2_interval_prob(iv.prob_interval(cfg), sigma) for iv in chain]
    return [levels[n] - levels[n - 1] for n in range(1, len(levels))]


def direct_bit_cost(q: int, sigma: float, cfg: PlaneConfig) -> float:
    """Ideal bit cost -log2 P(q - 1/2 <= y < q + 1/2) of straightforward coding."""
    chain = _interval_walk(q, cfg)
    return gstats.neg_log2_interval_prob(chain[-1].prob_interval(cfg), sigma)


def trit_bit_costs_hp(q: int, sigma: float, cfg: PlaneConfig, dps: int = 45) -> list[mpmath.mpf]:
    """High-precision per-trit bit costs (see neg_log2_interval_prob_hp).

    Differences are taken at the working precision; callers comparing the
    sum against :func:`direct_bit_cost_hp` should also accumulate under
    ``mpmath.workdps``.
    """
    chain = _interval_walk(q, cfg)
    with mpmath.workdps(dps):
        levels = [
            gstats.neg_log2_interval_prob_hp(iv.prob_interval(cfg), sigma, dps=dps)
            for iv in chain
        ]
        return [levels[n] - levels[n - 1] for n in range(1, len(levels))]


def direct_bit_cost_hp(q: int, sigma: float, cfg: PlaneConfig, dps: int = 45) -> mpmath.mpf:
    chain = _interval_walk(q, cfg)
    return gstats.neg_log2_interval_prob_hp(chain[-1].prob_interval(cfg), sigma, dps=dps)
