"""Synthetic latents, RD-curve evaluation across strategies, CSV emission.

Synthetic tensors stand in for the latent statistics a trained analysis
transform would produce: per-element sigmas follow a configurable law and
y_c[i] ~ N(0, sigma[i]^2).  Generation is bitwise reproducible from the
seed.  Evaluation is a pure function of (specs, strategies, points); rows
are ordered by (seed, strategy, bytes) so reruns emit identical CSVs.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .codec import EncoderOptions, GaussianModel, StrategyId, encode, rd_sweep

__all__ = [
    "SigmaLaw",
    "SyntheticSpec",
    "EvalRecord",
    "generate",
    "evaluate",
    "write_csv",
    "read_csv",
    "CSV_FIELDS",
]

CSV_FIELDS = ("strategy", "bytes", "bpp", "mse", "seed")


@dataclass(frozen=True)
class SigmaLaw:
    """Per-element scale distribution.

    kind: "constant" (sigma_value), "log_uniform" (sigma_min..sigma_max),
    or "channel_decay" (sigma_max * decay^c for channel c, floored at
    sigma_min).
    """

    kind: str = "log_uniform"
    sigma_value: float = 1.0
    sigma_min: float = 0.05
    sigma_max: float = 8.0
    decay: float = 0.8

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "log_uniform", "channel_decay"):
            raise ValueError(f"unknown sigma law {self.kind!r}")

    def draw(self, rng: np.random.Generator, dims: tuple[int, int, int]) -> np.ndarray:
        c, h, w = dims
        if self.kind == "constant":
            return np.full(dims, self.sigma_value)
        if self.kind == "log_uniform":
            lo, hi = np.log(self.sigma_min), np.log(self.sigma_max)
            return np.exp(rng.uniform(lo, hi, size=dims))
        per_channel = np.maximum(self.sigma_max * self.decay ** np.arange(c), self.sigma_min)
        return np.broadcast_to(per_channel[:, None, None], dims).copy()


@dataclass(frozen=True)
class SyntheticSpec:
    """One reproducible synthetic tensor (or a seeded family via count)."""

    dims: tuple[int, int, int] = (192, 32, 48)
    sigma_law: SigmaLaw = field(default_factory=SigmaLaw)
    seed: int = 0
    count: int = 1
    points: int = 16

    @classmethod
    def from_json(cls, path: str) -> "SyntheticSpec":
        with open(path) as fh:
            raw = json.load(fh)
        law = SigmaLaw(**raw.get("sigma_law", {}))
        return cls(
            dims=tuple(raw.get("dims", (192, 32, 48))),
            sigma_law=law,
            seed=int(raw.get("seed", 0)),
            count=int(raw.get("count", 1)),
            points=int(raw.get("points", 16)),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        return d

    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.count)]

    def with_seed(self, seed: int) -> "SyntheticSpec":
        return SyntheticSpec(self.dims, self.sigma_law, seed, 1, self.points)


def generate(spec: SyntheticSpec) -> tuple[np.ndarray, GaussianModel]:
    """Deterministic (y_c, model) pair for the spec's seed.

    Draw order is fixed (sigma, then y, then mu) so outputs are bitwise
    stable for a given numpy generation.
    """
    rng = np.random.default_rng(spec.seed)
    sigma = spec.sigma_law.draw(rng, spec.dims).astype(np.float32)
    y = (rng.standard_normal(spec.dims) * sigma).astype(np.float32)
    mu = rng.standard_normal(spec.dims).astype(np.float32)
    return y, GaussianModel(mu=mu, sigma=sigma)


@dataclass(frozen=True)
class EvalRecord:
    strategy: str
    bytes: int
    bpp: float
    mse: float
    seed: int


def _worker_count() -> int:
    env = os.environ.get("DPTS_THREADS")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 8)


def _eval_one(
    spec: SyntheticSpec, strategies: tuple[StrategyId, ...], points: int
) -> list[EvalRecord]:
    y, model = generate(spec)
    rows: list[EvalRecord] = []
    for strategy in strategies:
        res = encode(y, model, EncoderOptions(strategy=strategy))
        for rec in rd_sweep(res.stream, model, y.astype(np.float64), points):
            rows.append(
                EvalRecord(
                    strategy=strategy.token,
                    bytes=rec.payload_bytes,
                    bpp=rec.bits_per_pixel,
                    mse=rec.mse,
                    seed=spec.seed,
                )
            )
    return rows


def evaluate(
    strategies: list[StrategyId],
    specs: list[SyntheticSpec],
    points: int,
) -> list[EvalRecord]:
    """Full strategies x tensors x truncation-points cross product.

    Tensors run in parallel (capped by DPTS_THREADS); the row order is
    canonical regardless of scheduling.
    """
    strategies = tuple(strategies)
    workers = min(_worker_count(), max(1, len(specs)))
    if workers == 1:
        nested = [_eval_one(s, strategies, points) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            nested = list(pool.map(lambda s: _eval_one(s, strategies, points), specs))
    rows = [r for chunk in nested for r in chunk]
    rows.sort(key=lambda r: (r.seed, r.strategy, r.bytes))
    return rows


def write_csv(rows: list[EvalRecord], path: str, descriptor: dict | None = None) -> None:
    """Emit the fixed-schema CSV plus a sidecar run descriptor."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in rows:
            writer.writerow([r.strategy, r.bytes, f"{r.bpp:.10g}", f"{r.mse:.10g}", r.seed])
    if descriptor is not None:
        with open(path + ".meta.json", "w") as fh:
            json.dump(descriptor, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_csv(path: str) -> list[EvalRecord]:
    out: list[EvalRecord] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV schema {reader.fieldnames}")
        for row in reader:
            out.append(
                EvalRecord(
                    strategy=row["strategy"],
                    bytes=int(row["bytes"]),
                    bpp=float(row["bpp"]),
                    mse=float(row["mse"]),
                    seed=int(row["seed"]),
                )
            )
    return out
