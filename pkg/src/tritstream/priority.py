"""Per-refinement rate/distortion deltas and greedy in-plane ordering.

For an element whose interval is about to be split into children k with
conditional probabilities q_k, child MMSE levels m_k and pooled level
m = sum_k q_k m_k:

    delta_r = -sum_k q_k log2 q_k            (expected bits for the symbol)
    delta_d = -sum_k q_k (m_k - m)^2         (expected MSE change)
    priority = -delta_d / delta_r

delta_d is evaluated in the law-of-total-variance form above, which makes
``delta_d <= 0`` hold exactly, not merely up to rounding.

Both sides of the codec must derive the *same* transmission order, so
priorities are quantized to fixed point (2^-40) before sorting and ties
break on raster index.  Symbols whose model is a certainty (max q_k at
least 1 - 1e-12, or a parent interval with vanishing mass) cost nothing,
are excluded from the sorted payload order, and ride along afterwards in
raster order as coder no-ops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from . import gaussian_stats as gstats
from .rangecoder import DETERMINISTIC_MIN
from .tritplane import TritState, partition

__all__ = [
    "PRIORITY_FRAC_BITS",
    "PlaneCosts",
    "TritCost",
    "plane_costs",
    "trit_cost",
    "plane_order",
    "reverse_plane_order",
    "full_depth_costs",
]

PRIORITY_FRAC_BITS = 40
_PRIORITY_MAX_FP = np.int64(1) << 62
_LOG2E = np.log2(np.e)


@dataclass(frozen=True)
class PlaneCosts:
    """Vectorized costs for one refinement step of K elements.

    q:        (K, R) conditional child probabilities (rows sum to 1;
              degenerate parents get a one-hot middle child)
    delta_r:  (K,) expected bits, 0 for skipped symbols
    delta_d:  (K,) expected distortion change, <= 0
    priority_fp: (K,) int64 fixed-point priorities (2^-40 quantum)
    skip:     (K,) bool, True where the symbol is a coder no-op
    refine_child: (K,) argmax child; the mandated branch for skip rows
    """

    q: np.ndarray
    delta_r: np.ndarray
    delta_d: np.ndarray
    priority_fp: np.ndarray
    skip: np.ndarray
    refine_child: np.ndarray


@dataclass(frozen=True)
class TritCost:
    """Scalar cost record for a single element (test/inspection surface)."""

    delta_r: float
    delta_d: float
    priority: float
    skip: bool


def standardized_bounds(
    bounds2: np.ndarray, sigma: np.ndarray, root_lo2: int, root_hi2: int
) -> np.ndarray:
    """Standardize doubled-integer bounds, widening global extremes to inf."""
    z = (bounds2 / 2.0) / sigma
    z = np.where(bounds2 <= root_lo2, -np.inf, z)
    z = np.where(bounds2 >= root_hi2, np.inf, z)
    return z


def plane_costs(
    lo2: np.ndarray,
    hi2: np.ndarray,
    sigma: np.ndarray,
    root_lo2: int,
    root_hi2: int,
    radix: int = 3,
) -> PlaneCosts:
    """Costs of refining each element's current interval one level."""
    lo2 = np.asarray(lo2, dtype=np.int64)
    hi2 = np.asarray(hi2, dtype=np.int64)
    sigma = np.asarray(sigma, dtype=np.float64)
    k = lo2.shape[0]
    step = (hi2 - lo2) // radix
    bounds2 = lo2[:, None] + step[:, None] * np.arange(radix + 1, dtype=np.int64)
    z = standardized_bounds(bounds2, sigma[:, None], root_lo2, root_hi2)

    p, m, _ = gstats.stats_z(z[:, :-1], z[:, 1:])
    parent_p = p.sum(axis=1)
    degenerate = ~(parent_p >= gstats.PROB_FLOOR)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = p / parent_p[:, None]
    if np.any(degenerate):
        onehot = np.zeros((k, radix))
        onehot[:, radix // 2] = 1.0
        q = np.where(degenerate[:, None], onehot, q)
        m = np.where(degenerate[:, None], 0.0, m)

    delta_r = -xlogy(q, q).sum(axis=1) * _LOG2E
    with np.errstate(invalid="ignore"):
        qm = np.where(q > 0.0, q * m, 0.0)
        mbar = qm.sum(axis=1)
        dev = np.where(q > 0.0, q * (m - mbar[:, None]) ** 2, 0.0)
    delta_d = -dev.sum(axis=1) * sigma * sigma

    skip = degenerate | (q.max(axis=1) >= DETERMINISTIC_MIN)
    with np.errstate(divide="ignore", invalid="ignore"):
        priority = np.where(skip, 0.0, -delta_d / delta_r)
    priority = np.where(np.isfinite(priority), priority, 0.0)
    delta_r = np.where(skip, 0.0, delta_r)

    fp = np.rint(priority * float(1 << PRIORITY_FRAC_BITS))
    priority_fp = np.minimum(fp, float(_PRIORITY_MAX_FP)).astype(np.int64)
    refine_child = np.argmax(q, axis=1).astype(np.int64)
    return PlaneCosts(q, delta_r, delta_d, priority_fp, skip, refine_child)


def trit_cost(state: TritState) -> TritCost:
    """Scalar view of plane_costs for one TritState."""
    if state.depth >= state.cfg.num_planes:
        raise ValueError("state is already at full depth")
    costs = plane_costs(
        np.array([state.interval.lo2]),
        np.array([state.interval.hi2]),
        np.array([state.sigma]),
        -state.cfg.root_bound2,
        state.cfg.root_bound2,
    )
    return TritCost(
        delta_r=float(costs.delta_r[0]),
        delta_d=float(costs.delta_d[0]),
        priority=float(costs.priority_fp[0]) / float(1 << PRIORITY_FRAC_BITS),
        skip=bool(costs.skip[0]),
    )


def plane_order(priority_fp: np.ndarray, skip: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(payload order, trailing no-op order) for one plane.

    Payload symbols sort by descending priority, ties by raster index;
    skipped symbols follow in raster order.
    """
    payload = np.flatnonzero(~skip)
    payload = payload[np.argsort(-priority_fp[payload], kind="stable")]
    return payload, np.flatnonzero(skip)


def reverse_plane_order(priority_fp: np.ndarray, skip: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending-priority variant (the 'reverse priority' ablation)."""
    payload = np.flatnonzero(~skip)
    payload = payload[np.argsort(priority_fp[payload], kind="stable")]
    return payload, np.flatnonzero(skip)


def full_depth_costs(
    sigma: np.ndarray,
    num_levels: int,
    root_lo2: int,
    root_hi2: int,
    radix: int = 3,
    chunk: int = 512,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-element expected rate and distortion change at full depth.

    Returns (delta_r, delta_d, priority_fp) per element, where delta_r is
    the entropy of the element's quantization-bin distribution and
    -delta_d is the variance explained by knowing the bin.  Used by the
    element-granularity orderings, which transmit each element to full
    depth in one go.  Computable from sigma alone, hence identically on
    both codec sides.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    nbins = radix**num_levels
    if nbins > 200_000:
        raise ValueError(f"bin enumeration over {nbins} levels is unreasonable")
    edges2 = root_lo2 + 2 * np.arange(nbins + 1, dtype=np.int64)
    assert edges2[-1] == root_hi2
    k = sigma.shape[0]
    delta_r = np.empty(k)
    explained = np.empty(k)
    for start in range(0, k, chunk):
        s = sigma[start : start + chunk]
        z = (edges2[None, :] / 2.0) / s[:, None]
        z[:, 0] = -np.inf
        z[:, -1] = np.inf
        p, m, _ = gstats.stats_z(z[:, :-1], z[:, 1:])
        p = p / p.sum(axis=1, keepdims=True)
        delta_r[start : start + chunk] = -xlogy(p, p).sum(axis=1) * _LOG2E
        with np.errstate(invalid="ignore"):
            pm2 = np.where(p > 0.0, p * m * m, 0.0)
        explained[start : start + chunk] = pm2.sum(axis=1) * s * s
    with np.errstate(divide="ignore", invalid="ignore"):
        priority = explained / delta_r
    priority = np.where(delta_r > 1e-12, priority, np.inf)
    fp = np.rint(np.where(np.isfinite(priority), priority, np.inf) * float(1 << PRIORITY_FRAC_BITS))
    priority_fp = np.where(np.isfinite(fp), fp, float(_PRIORITY_MAX_FP))
    priority_fp = np.minimum(priority_fp, float(_PRIORITY_MAX_FP)).astype(np.int64)
    return delta_r, -explained, priority_fp
