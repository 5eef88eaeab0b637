"""Orchestration: full encode and byte-budgeted progressive decode.

The encoder quantizes the centered latent, derives a transmission schedule
(an ordering of refinement symbols) from information both sides share
(sigma and already-coded symbols), and entropy-codes the symbols in
schedule order into a single payload.  The decoder re-derives the same
schedule step by step, consumes symbols until the byte budget stops
determining them, and reconstructs every element at the MMSE level of its
current interval.

Schedules come in two families:

  * plane-major: refinement level n of every element is coded before
    level n+1 of any element; within a plane the order is descending RD
    priority (default), raster, or ascending priority.
  * element-major: each element is coded to full depth in one run;
    elements are ordered by whole-element priority, by channel-aggregated
    priority, or not at all (the ablation baselines).

Priorities at plane n depend only on plane n-1 history, so mid-plane
truncation never needs knowledge of undecoded symbols; that is what makes
the schedule replayable from a prefix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import gaussian_stats as gstats
from . import priority as prio
from .container import (
    CODER_RANGE48,
    StreamHeader,
    model_digest,
    read_stream,
    write_stream,
)
from .errors import (
    BelowMinimumLength,
    CorruptHeader,
    DigestMismatch,
    EndOfPrefix,
    NonPositiveSigma,
    ShapeMismatch,
    ZeroFrequencySymbol,
)
from .rangecoder import FREQ_TOTAL, RangeDecoder, RangeEncoder, quantize_model
from .tritplane import MAX_PLANES, choose_num_planes

__all__ = [
    "StrategyId",
    "GaussianModel",
    "EncoderOptions",
    "EncodeResult",
    "DecodeResult",
    "RDRecord",
    "encode",
    "decode",
    "rd_sweep",
]

_MAX_BIT_LEVELS = 60
_MAX_TABLE_CELLS = 25_000_000


class StrategyId(enum.Enum):
    """Transmission schedule variants (the ablation axes)."""

    TRIT_PLANE_PRIORITY = 1
    TRIT_PLANE_RASTER = 2
    TRIT_PLANE_REVERSE = 3
    BIT_PLANE_PRIORITY = 4
    CHANNEL_SORT = 5
    LATENT_SORT = 6
    RASTER_NO_SORT = 7

    @property
    def token(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_token(cls, token: str) -> "StrategyId":
        name = token.strip().replace("-", "_").upper()
        try:
            return cls[name]
        except KeyError:
            raise ValueError(
                f"unknown strategy {token!r}; choose from "
                f"{', '.join(s.token for s in cls)}"
            ) from None

    @property
    def radix(self) -> int:
        return 2 if self is StrategyId.BIT_PLANE_PRIORITY else 3

    @property
    def plane_major(self) -> bool:
        return self in (
            StrategyId.TRIT_PLANE_PRIORITY,
            StrategyId.TRIT_PLANE_RASTER,
            StrategyId.TRIT_PLANE_REVERSE,
            StrategyId.BIT_PLANE_PRIORITY,
        )


@dataclass(frozen=True)
class GaussianModel:
    """Per-element means and standard deviations shared by both sides."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=np.float32)
        sigma = np.asarray(self.sigma, dtype=np.float32)
        if mu.shape != sigma.shape:
            raise ShapeMismatch(f"mu shape {mu.shape} != sigma shape {sigma.shape}")
        if mu.ndim != 3:
            raise ShapeMismatch(f"model tensors must be C*H*W, got shape {mu.shape}")
        if not np.all(np.isfinite(mu)):
            raise ValueError("mu must be finite")
        if not np.all(np.isfinite(sigma) & (sigma > 0)):
            raise NonPositiveSigma("sigma must be positive and finite elementwise")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.mu.shape)

    @property
    def digest(self) -> bytes:
        return model_digest(self.mu, self.sigma)


@dataclass(frozen=True)
class EncoderOptions:
    """Knobs for :func:`encode`.

    num_planes: refinement levels; None sizes them from the data (for the
        bit-plane strategy this counts binary levels).
    clip_pct: magnitude percentile used when auto-sizing planes; values
        beyond the resulting cap are clamped (lossy outlier truncation).
    pixel_count: source pixels for bpp accounting; defaults to 256*H*W,
        the footprint of a x16-downsampling analysis transform.
    """

    num_planes: int | None = None
    clip_pct: float = 100.0
    pixel_count: int | None = None
    strategy: StrategyId = StrategyId.TRIT_PLANE_PRIORITY


@dataclass(frozen=True)
class _Scheme:
    """Refinement geometry: radix, depth and exact root bounds (doubled)."""

    radix: int
    num_levels: int
    root_lo2: int
    root_hi2: int
    qmin: int
    qmax: int


def _trit_scheme(num_levels: int) -> _Scheme:
    if not 1 <= num_levels <= MAX_PLANES:
        raise ValueError(f"trit planes must be in [1, {MAX_PLANES}], got {num_levels}")
    m = (3**num_levels - 1) // 2
    return _Scheme(3, num_levels, -(3**num_levels), 3**num_levels, -m, m)


def _bit_scheme(num_levels: int) -> _Scheme:
    if not 1 <= num_levels <= _MAX_BIT_LEVELS:
        raise ValueError(f"bit levels must be in [1, {_MAX_BIT_LEVELS}], got {num_levels}")
    half = 2 ** (num_levels - 1)
    return _Scheme(2, num_levels, -2 * half - 1, 2 * half - 1, -half, half - 1)


def _auto_levels(target: int, strategy: StrategyId) -> int:
    if strategy.radix == 3:
        n = 1
        while (3**n - 1) // 2 < target:
            n += 1
        return n
    n = 1
    while 2 ** (n - 1) - 1 < target:
        n += 1
    return n


def _scheme_for(strategy: StrategyId, num_levels: int) -> _Scheme:
    return _bit_scheme(num_levels) if strategy.radix == 2 else _trit_scheme(num_levels)


def _digits(q: np.ndarray, scheme: _Scheme) -> np.ndarray:
    v = np.asarray(q, dtype=np.int64) - scheme.qmin
    out = np.empty((v.shape[0], scheme.num_levels), dtype=np.int8)
    for col in range(scheme.num_levels - 1, -1, -1):
        out[:, col] = v % scheme.radix
        v //= scheme.radix
    return out


def _unit_bin_bits(q: np.ndarray, sigma: np.ndarray, scheme: _Scheme) -> np.ndarray:
    lo2 = 2 * np.asarray(q, dtype=np.int64) - 1
    hi2 = lo2 + 2
    z_lo = prio.standardized_bounds(lo2, sigma, scheme.root_lo2, scheme.root_hi2)
    z_hi = prio.standardized_bounds(hi2, sigma, scheme.root_lo2, scheme.root_hi2)
    return gstats.neg_log2_prob_z(z_lo, z_hi)


def _reconstruct_centered(
    lo2: np.ndarray, hi2: np.ndarray, sigma: np.ndarray, scheme: _Scheme
) -> np.ndarray:
    """Vectorized MMSE levels with the degenerate-interval fallbacks."""
    z_lo = prio.standardized_bounds(lo2, sigma, scheme.root_lo2, scheme.root_hi2)
    z_hi = prio.standardized_bounds(hi2, sigma, scheme.root_lo2, scheme.root_hi2)
    p, m, _ = gstats.stats_z(z_lo, z_hi)
    level = m * sigma
    degenerate = ~(p >= gstats.PROB_FLOOR) | ~np.isfinite(level)
    if np.any(degenerate):
        lo_inf = np.isinf(z_lo)
        hi_inf = np.isinf(z_hi)
        mid = (lo2 + hi2) / 4.0
        fallback = np.where(
            lo_inf & hi_inf, 0.0, np.where(lo_inf, hi2 / 2.0, np.where(hi_inf, lo2 / 2.0, mid))
        )
        level = np.where(degenerate, fallback, level)
    return level


@dataclass(frozen=True)
class EncodeResult:
    stream: bytes
    header: StreamHeader
    per_plane_offsets: tuple[int, ...]
    total_bits: float
    quantized: np.ndarray
    schedule: list[np.ndarray] | None = None

    @property
    def payload_bytes(self) -> int:
        return len(self.stream) - self.header.min_length


@dataclass(frozen=True)
class DecodeResult:
    latent: np.ndarray
    reconstruction: np.ndarray
    trits_consumed: int
    planes_completed: float
    depths: np.ndarray
    schedule: list[np.ndarray] | None = None


@dataclass(frozen=True)
class RDRecord:
    strategy: StrategyId
    stream_bytes: int
    payload_bytes: int
    bits_per_pixel: float
    mse: float


class _Schedule:
    """Round-structured symbol schedule shared by encoder and decoder.

    A round is (element order, freq rows provider); plane-major schedules
    have one round per plane whose order depends on the evolving interval
    state, element-major schedules have a single round with L symbols per
    element driven by precomputed node tables.
    """

    def __init__(self, scheme: _Scheme, sigma: np.ndarray, strategy: StrategyId):
        self.scheme = scheme
        self.sigma = sigma
        self.strategy = strategy
        self.k = sigma.shape[0]

    def element_order(self, shape: tuple[int, int, int]) -> np.ndarray:
        """Whole-element transmission order for element-major strategies."""
        s = self.strategy
        if s is StrategyId.RASTER_NO_SORT:
            return np.arange(self.k, dtype=np.int64)
        delta_r, delta_d, fp = prio.full_depth_costs(
            self.sigma,
            self.scheme.num_levels,
            self.scheme.root_lo2,
            self.scheme.root_hi2,
            self.scheme.radix,
        )
        if s is StrategyId.LATENT_SORT:
            return np.argsort(-fp, kind="stable").astype(np.int64)
        if s is StrategyId.CHANNEL_SORT:
            c, h, w = shape
            per_ch_gain = (-delta_d).reshape(c, h * w).sum(axis=1)
            per_ch_rate = delta_r.reshape(c, h * w).sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = per_ch_gain / per_ch_rate
            ratio = np.where(per_ch_rate > 1e-12, ratio, np.inf)
            fp_ch = np.rint(np.where(np.isfinite(ratio), ratio, np.inf) * float(1 << 40))
            fp_ch = np.minimum(np.nan_to_num(fp_ch, posinf=2.0**62), 2.0**62).astype(np.int64)
            ch_order = np.argsort(-fp_ch, kind="stable")
            within = np.arange(h * w, dtype=np.int64)
            return np.concatenate([ch * h * w + within for ch in ch_order])
        raise ValueError(f"{s} is not element-major")

    def plane_order(self, costs: prio.PlaneCosts) -> np.ndarray:
        s = self.strategy
        if s is StrategyId.TRIT_PLANE_RASTER:
            return np.arange(self.k, dtype=np.int64)
        if s is StrategyId.TRIT_PLANE_REVERSE:
            payload, skipped = prio.reverse_plane_order(costs.priority_fp, costs.skip)
        else:
            payload, skipped = prio.plane_order(costs.priority_fp, costs.skip)
        return np.concatenate([payload, skipped])


def _node_freq_tables(sigma: np.ndarray, scheme: _Scheme) -> list[np.ndarray]:
    """Per-depth (K, radix^n, radix) frequency tables for element-major runs.

    Node j at depth n is the interval reached by the digit path written in
    base radix as j; both sides derive the same tables from sigma alone.
    """
    radix, levels = scheme.radix, scheme.num_levels
    k = sigma.shape[0]
    cells = k * radix * (radix**levels - 1) // (radix - 1)
    if cells > _MAX_TABLE_CELLS:
        raise ValueError(
            "tensor too large for an element-granularity strategy "
            f"({cells} model cells); use a plane-major strategy"
        )
    width2 = scheme.root_hi2 - scheme.root_lo2
    tables: list[np.ndarray] = []
    for n in range(levels):
        nodes = radix**n
        node_w2 = width2 // nodes
        step = node_w2 // radix
        node_lo2 = scheme.root_lo2 + node_w2 * np.arange(nodes, dtype=np.int64)
        bounds2 = node_lo2[None, :, None] + step * np.arange(radix + 1, dtype=np.int64)
        z = prio.standardized_bounds(
            bounds2, sigma[:, None, None], scheme.root_lo2, scheme.root_hi2
        )
        p, _, _ = gstats.stats_z(z[..., :-1], z[..., 1:])
        parent = p.sum(axis=-1)
        degenerate = ~(parent >= gstats.PROB_FLOOR)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = p / parent[..., None]
        if np.any(degenerate):
            onehot = np.zeros((1, 1, radix))
            onehot[..., radix // 2] = 1.0
            q = np.where(degenerate[..., None], onehot, q)
        freq = quantize_model(q.reshape(-1, radix)).astype(np.int32).reshape(k, nodes, radix)
        tables.append(freq)
    return tables


def _refine(
    lo2: np.ndarray, hi2: np.ndarray, child: np.ndarray, radix: int
) -> tuple[np.ndarray, np.ndarray]:
    step = (hi2 - lo2) // radix
    new_lo = lo2 + step * child
    return new_lo, new_lo + step


def encode(
    y_c: np.ndarray,
    model: GaussianModel,
    options: EncoderOptions | None = None,
    sideinfo: bytes = b"",
    capture_schedule: bool = False,
) -> EncodeResult:
    """Compress a centered latent tensor into a scalable stream."""
    opts = options or EncoderOptions()
    y = np.asarray(y_c, dtype=np.float64)
    if y.shape != model.shape:
        raise ShapeMismatch(f"latent shape {y.shape} != model shape {model.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("latent tensor must be finite")
    shape = model.shape
    k = y.size
    y_flat = y.reshape(-1)
    sigma = model.sigma.astype(np.float64).reshape(-1)
    strategy = opts.strategy

    q_pre = np.where(y_flat >= 0.0, np.floor(y_flat + 0.5), np.ceil(y_flat - 0.5)).astype(np.int64)
    if opts.num_planes is not None:
        levels = int(opts.num_planes)
    else:
        mags = np.abs(q_pre)
        if opts.clip_pct >= 100.0:
            target = int(mags.max(initial=0))
        else:
            target = int(math.ceil(float(np.percentile(mags, opts.clip_pct))))
        levels = _auto_levels(target, strategy)
    scheme = _scheme_for(strategy, levels)
    q = np.clip(q_pre, scheme.qmin, scheme.qmax)
    digits = _digits(q, scheme)
    total_bits = float(_unit_bin_bits(q, sigma, scheme).sum())

    sched = _Schedule(scheme, sigma, strategy)
    enc = RangeEncoder()
    offsets: list[int] = []
    schedule_log: list[np.ndarray] | None = [] if capture_schedule else None

    if strategy.plane_major:
        lo2 = np.full(k, scheme.root_lo2, dtype=np.int64)
        hi2 = np.full(k, scheme.root_hi2, dtype=np.int64)
        for n in range(scheme.num_levels):
            costs = prio.plane_costs(
                lo2, hi2, sigma, scheme.root_lo2, scheme.root_hi2, scheme.radix
            )
            order = sched.plane_order(costs)
            if schedule_log is not None:
                schedule_log.append(order.copy())
            freq = quantize_model(costs.q)
            freq_rows = freq.tolist()
            cum_rows = np.concatenate(
                [np.zeros((k, 1), dtype=np.int64), np.cumsum(freq[:, :-1], axis=1)], axis=1
            ).tolist()
            plane_digits = digits[:, n].tolist()
            offsets.append(enc.bytes_emitted)
            for el in order.tolist():
                t = plane_digits[el]
                f = freq_rows[el][t]
                if f == 0:
                    raise ZeroFrequencySymbol(
                        f"element {el} holds an off-model value at plane {n + 1}"
                    )
                enc.encode(cum_rows[el][t], f)
            lo2, hi2 = _refine(lo2, hi2, digits[:, n].astype(np.int64), scheme.radix)
    else:
        order = sched.element_order(shape)
        if schedule_log is not None:
            schedule_log.append(order.copy())
        offsets.append(0)
        tables = [t.tolist() for t in _node_freq_tables(sigma, scheme)]
        digit_rows = digits.tolist()
        radix = scheme.radix
        for el in order.tolist():
            node = 0
            row = digit_rows[el]
            for n in range(scheme.num_levels):
                t = row[n]
                freqs = tables[n][el][node]
                f = freqs[t]
                if f == 0:
                    raise ZeroFrequencySymbol(
                        f"element {el} holds an off-model value at depth {n + 1}"
                    )
                enc.encode(sum(freqs[:t]), f)
                node = node * radix + t
    payload = enc.finish()

    header = StreamHeader(
        shape=shape,
        num_planes=scheme.num_levels,
        pixel_count=opts.pixel_count if opts.pixel_count is not None else 256 * shape[1] * shape[2],
        sigma_digest=model.digest,
        sideinfo_len=len(sideinfo),
        coder_id=CODER_RANGE48,
        strategy_id=strategy.value,
    )
    stream = write_stream(header, sideinfo, payload)
    return EncodeResult(
        stream=stream,
        header=header,
        per_plane_offsets=tuple(offsets),
        total_bits=total_bits,
        quantized=q.reshape(shape),
        schedule=schedule_log,
    )


class _Replayer:
    """Budget-resumable decoder that replays the encoder's schedule."""

    def __init__(self, header: StreamHeader, payload: bytes, model: GaussianModel):
        self.header = header
        self.strategy = StrategyId(header.strategy_id)
        self.scheme = _scheme_for(self.strategy, header.num_planes)
        self.sigma = model.sigma.astype(np.float64).reshape(-1)
        self.mu = model.mu.astype(np.float64)
        self.shape = model.shape
        self.k = self.sigma.shape[0]
        self.payload = payload
        self.lo2 = np.full(self.k, self.scheme.root_lo2, dtype=np.int64)
        self.hi2 = np.full(self.k, self.scheme.root_hi2, dtype=np.int64)
        self.depths = np.zeros(self.k, dtype=np.int16)
        self.trits_consumed = 0
        self.schedule_log: list[np.ndarray] = []

    def result(self, capture_schedule: bool = False) -> DecodeResult:
        latent = _reconstruct_centered(self.lo2, self.hi2, self.sigma, self.scheme)
        latent = latent.reshape(self.shape)
        return DecodeResult(
            latent=latent,
            reconstruction=latent + self.mu,
            trits_consumed=self.trits_consumed,
            planes_completed=self.trits_consumed / self.k,
            depths=self.depths.reshape(self.shape).copy(),
            schedule=[s.copy() for s in self.schedule_log] if capture_schedule else None,
        )

    def run(self, payload_budgets: list[int], on_snapshot) -> None:
        """Decode under each budget in ascending order.

        ``on_snapshot(i)`` is invoked once per budget, exactly when the
        decoder has consumed every symbol determined by that budget.
        """
        dec = RangeDecoder(self.payload, budget=payload_budgets[0])
        bidx = 0

        def advance_budget() -> bool:
            # Returns False when all budgets are exhausted.
            nonlocal bidx
            on_snapshot(bidx)
            bidx += 1
            if bidx >= len(payload_budgets):
                return False
            dec.extend_budget(payload_budgets[bidx])
            return True

        scheme, sched = self.scheme, _Schedule(self.scheme, self.sigma, self.strategy)
        if self.strategy.plane_major:
            for _n in range(scheme.num_levels):
                costs = prio.plane_costs(
                    self.lo2, self.hi2, self.sigma, scheme.root_lo2, scheme.root_hi2, scheme.radix
                )
                order = sched.plane_order(costs)
                self.schedule_log.append(order)
                freq = quantize_model(costs.q)
                freq_rows = [tuple(r) for r in freq.tolist()]
                order_list = order.tolist()
                step = (self.hi2 - self.lo2) // scheme.radix
                i = 0
                while i < len(order_list):
                    el = order_list[i]
                    try:
                        t = dec.decode(freq_rows[el])
                    except EndOfPrefix:
                        if not advance_budget():
                            return
                        continue
                    new_lo = self.lo2[el] + step[el] * t
                    self.lo2[el] = new_lo
                    self.hi2[el] = new_lo + step[el]
                    self.depths[el] += 1
                    self.trits_consumed += 1
                    i += 1
        else:
            order = sched.element_order(self.shape)
            self.schedule_log.append(order)
            tables = [[tuple(r) for r in t.reshape(-1, scheme.radix).tolist()] for t in
                      _node_freq_tables(self.sigma, scheme)]
            radix = scheme.radix
            order_list = order.tolist()
            i = 0
            node = 0
            depth = 0
            while i < len(order_list):
                el = order_list[i]
                nodes_at_depth = radix**depth
                try:
                    t = dec.decode(tables[depth][el * nodes_at_depth + node])
                except EndOfPrefix:
                    if not advance_budget():
                        return
                    continue
                w2 = (self.hi2[el] - self.lo2[el]) // radix
                self.lo2[el] += w2 * t
                self.hi2[el] = self.lo2[el] + w2
                self.depths[el] += 1
                self.trits_consumed += 1
                node = node * radix + t
                depth += 1
                if depth == scheme.num_levels:
                    depth = 0
                    node = 0
                    i += 1
        # Schedule exhausted: every remaining budget sees the full decode.
        while advance_budget():
            pass


def _open_stream(stream: bytes, model: GaussianModel) -> tuple[StreamHeader, bytes, bytes]:
    header, sideinfo, payload = read_stream(stream)
    if header.coder_id != CODER_RANGE48:
        raise CorruptHeader(f"unknown coder id {header.coder_id}")
    try:
        StrategyId(header.strategy_id)
    except ValueError:
        raise CorruptHeader(f"unknown strategy id {header.strategy_id}") from None
    if header.shape != model.shape:
        raise ShapeMismatch(f"stream shape {header.shape} != model shape {model.shape}")
    if header.sigma_digest != model.digest:
        raise DigestMismatch("stream was encoded against a different model")
    return header, sideinfo, payload


def decode(
    stream: bytes,
    model: GaussianModel,
    budget_bytes: int | None = None,
    capture_schedule: bool = False,
) -> DecodeResult:
    """Reconstruct from a stream prefix of ``budget_bytes`` total bytes."""
    header, _sideinfo, payload = _open_stream(stream, model)
    if budget_bytes is None:
        budget = len(payload)
    else:
        if budget_bytes < header.min_length:
            raise BelowMinimumLength(
                f"budget {budget_bytes} below header+sideinfo ({header.min_length})"
            )
        budget = min(budget_bytes, len(stream)) - header.min_length
    rep = _Replayer(header, payload, model)
    results: list[DecodeResult] = []
    rep.run([budget], lambda i: results.append(rep.result(capture_schedule)))
    return results[0]


def decode_sweep(
    stream: bytes,
    model: GaussianModel,
    budgets: list[int],
    snapshot=None,
):
    """Decode once, snapshotting at several ascending stream-byte budgets.

    ``snapshot(budget_bytes, replayer)`` maps decoder state to whatever the
    caller wants per budget (defaults to a full DecodeResult).  Equivalent
    to independent truncated decodes at each budget, in a single pass.
    """
    header, _sideinfo, payload = _open_stream(stream, model)
    budgets = sorted(int(b) for b in budgets)
    if budgets and budgets[0] < header.min_length:
        raise BelowMinimumLength(
            f"budget {budgets[0]} below header+sideinfo ({header.min_length})"
        )
    payload_budgets = [min(b, len(stream)) - header.min_length for b in budgets]
    rep = _Replayer(header, payload, model)
    out = []
    fn = snapshot if snapshot is not None else (lambda b, r: r.result())
    rep.run(payload_budgets, lambda i: out.append(fn(budgets[i], rep)))
    return out


def rd_sweep(
    stream: bytes,
    model: GaussianModel,
    y_ref: np.ndarray,
    points: int,
) -> list[RDRecord]:
    """(rate, latent MSE) samples at evenly spaced byte prefixes."""
    if points < 2:
        raise ValueError("need at least 2 sweep points")
    header, _sideinfo, _payload = read_stream(stream)
    y_ref = np.asarray(y_ref, dtype=np.float64)
    if y_ref.shape != model.shape:
        raise ShapeMismatch(f"reference shape {y_ref.shape} != model shape {model.shape}")
    strategy = StrategyId(header.strategy_id)
    budgets = np.linspace(header.min_length, len(stream), points).round().astype(int).tolist()

    def to_record(budget: int, rep: _Replayer) -> RDRecord:
        latent = _reconstruct_centered(rep.lo2, rep.hi2, rep.sigma, rep.scheme)
        mse = float(np.mean((latent - y_ref.reshape(-1)) ** 2))
        payload_bytes = budget - header.min_length
        return RDRecord(
            strategy=strategy,
            stream_bytes=budget,
            payload_bytes=payload_bytes,
            bits_per_pixel=8.0 * payload_bytes / header.pixel_count,
            mse=mse,
        )

    return decode_sweep(stream, model, budgets, snapshot=to_record)
