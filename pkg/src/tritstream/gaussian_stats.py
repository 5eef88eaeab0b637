"""Statistics of the zero-mean Gaussian N(0, sigma^2) restricted to intervals.

Everything the codec needs reduces to three quantities of a standardized
interval [z_lo, z_hi) under N(0, 1):

    prob   P  = Phi(z_hi) - Phi(z_lo)
    mean   m  = (phi(z_lo) - phi(z_hi)) / P
    var    v  = 1 + (z_lo*phi(z_lo) - z_hi*phi(z_hi)) / P - m^2

computed so that

  * tail probabilities are formed from erfc on the tail side (never as a
    difference of two CDF values close to 1), keeping results meaningful
    down to ~1e-300;
  * symmetric intervals [-a, a) give mean exactly 0.0 (the two phi terms
    are bit-identical, so the numerator cancels exactly);
  * the expression order is fixed (plain numpy arithmetic, no FMA), so the
    encoder and the decoder derive bit-identical values from equal inputs.

The scalar API mirrors the array API one-to-one; scalars go through the
same vectorized code path.  Probabilities below ``PROB_FLOOR`` mark an
interval degenerate: moment queries raise :class:`DegenerateInterval` and
callers substitute :func:`degenerate_level`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import erf, erfc, log_ndtr

from .errors import DegenerateInterval, NonPositiveSigma

__all__ = [
    "PROB_FLOOR",
    "Interval",
    "interval_prob",
    "truncated_mean",
    "truncated_second_moment_about",
    "neg_log2_interval_prob",
    "neg_log2_interval_prob_hp",
    "degenerate_level",
    "prob_z",
    "stats_z",
    "neg_log2_prob_z",
]

#: Intervals with less probability mass than this are treated as degenerate.
PROB_FLOOR = 1e-12

#: Below this, probabilities leave the comfortably-normal float64 range and
#: bit costs switch to the log-domain path.
_LOG_PATH_THRESHOLD = 1e-280

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_SQRT_2 = 1.0 / math.sqrt(2.0)
_LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class Interval:
    """Half-open interval [lo, hi) on the extended real line."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval bounds must not be NaN")
        if not lo < hi:
            raise ValueError(f"interval requires lo < hi, got [{lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def _check_sigma(sigma: float) -> float:
    s = float(sigma)
    if not (s > 0.0 and math.isfinite(s)):
        raise NonPositiveSigma(f"sigma must be positive and finite, got {sigma!r}")
    return s


def _phi(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) * _INV_SQRT_2PI


def _zphi(z: np.ndarray) -> np.ndarray:
    # z*phi(z) with the inf*0 indeterminate form resolved to its limit 0.
    z = np.asarray(z, dtype=np.float64)
    zf = np.where(np.isinf(z), 0.0, z)
    return np.where(np.isinf(z), 0.0, zf * _phi(zf))


def prob_z(z_lo, z_hi) -> np.ndarray:
    """P(z_lo <= Z < z_hi) for Z ~ N(0, 1), elementwise.

    Uses erfc on whichever side of the origin the interval lies, and erf
    for intervals straddling 0, to avoid catastrophic cancellation.
    """
    z_lo = np.asarray(z_lo, dtype=np.float64)
    z_hi = np.asarray(z_hi, dtype=np.float64)
    upper = 0.5 * (erfc(z_lo * _INV_SQRT_2) - erfc(z_hi * _INV_SQRT_2))
    lower = 0.5 * (erfc(-z_hi * _INV_SQRT_2) - erfc(-z_lo * _INV_SQRT_2))
    middle = 0.5 * (erf(z_hi * _INV_SQRT_2) - erf(z_lo * _INV_SQRT_2))
    p = np.where(z_lo >= 0.0, upper, np.where(z_hi <= 0.0, lower, middle))
    return np.maximum(p, 0.0)


def stats_z(z_lo, z_hi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(prob, mean, var) of Z ~ N(0, 1) conditioned on [z_lo, z_hi).

    Where prob underflows to 0 the mean/var lanes hold NaN; callers mask
    against their probability floor before using them.
    """
    z_lo = np.asarray(z_lo, dtype=np.float64)
    z_hi = np.asarray(z_hi, dtype=np.float64)
    p = prob_z(z_lo, z_hi)
    num_m = _phi(z_lo) - _phi(z_hi)
    num_v = _zphi(z_lo) - _zphi(z_hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = num_m / p
        v = 1.0 + num_v / p - m * m
    m = np.clip(m, z_lo, z_hi)
    v = np.maximum(v, 0.0)
    return p, m, v


def neg_log2_prob_z(z_lo, z_hi) -> np.ndarray:
    """-log2 P(z_lo <= Z < z_hi), finite even when P underflows float64.

    For deeply-subnormal probabilities the value is assembled from
    ``log_ndtr`` differences; otherwise it is -log2 of the linear-domain
    probability.
    """
    z_lo = np.asarray(z_lo, dtype=np.float64)
    z_hi = np.asarray(z_hi, dtype=np.float64)
    p = prob_z(z_lo, z_hi)
    with np.errstate(divide="ignore"):
        bits = -np.log2(p)
    need_log = p < _LOG_PATH_THRESHOLD
    if np.any(need_log):
        # Tiny mass cannot straddle 0; reflect right-tail intervals to the
        # left tail where log_ndtr is the accurate primitive.
        right = z_lo >= 0.0
        a = np.where(right, -z_hi, z_lo)
        b = np.where(right, -z_lo, z_hi)
        la = log_ndtr(a)
        lb = log_ndtr(b)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = lb + np.log1p(-np.exp(la - lb))
        bits = np.where(need_log, -log_p * _LOG2E, bits)
    return bits


def interval_prob(iv: Interval, sigma: float) -> float:
    """Probability that N(0, sigma^2) lands in ``iv``."""
    s = _check_sigma(sigma)
    return float(prob_z(iv.lo / s, iv.hi / s))


def truncated_mean(iv: Interval, sigma: float, floor: float = PROB_FLOOR) -> float:
    """E[y | y in iv] for y ~ N(0, sigma^2).

    Raises DegenerateInterval when the interval mass is below ``floor``;
    the caller decides the substitute level (see :func:`degenerate_level`).
    """
    s = _check_sigma(sigma)
    p, m, _ = stats_z(iv.lo / s, iv.hi / s)
    if not p >= floor or not np.isfinite(m):
        raise DegenerateInterval(f"P(y in [{iv.lo}, {iv.hi})) = {float(p):.3e} < {floor:.1e}")
    return float(m) * s


def truncated_second_moment_about(
    iv: Interval, sigma: float, center: float, floor: float = PROB_FLOOR
) -> float:
    """E[(y - center)^2 | y in iv] for y ~ N(0, sigma^2).

    Evaluated as conditional variance plus the squared mean offset, which
    is exact-in-form and makes the conditional mean the provable minimizer.
    """
    s = _check_sigma(sigma)
    p, m, v = stats_z(iv.lo / s, iv.hi / s)
    if not p >= floor or not np.isfinite(m):
        raise DegenerateInterval(f"P(y in [{iv.lo}, {iv.hi})) = {float(p):.3e} < {floor:.1e}")
    mean_y = float(m) * s
    var_y = float(v) * s * s
    d = mean_y - float(center)
    return var_y + d * d


def neg_log2_interval_prob(iv: Interval, sigma: float) -> float:
    """Ideal bit cost -log2 P(y in iv), finite far beyond float64 underflow."""
    s = _check_sigma(sigma)
    return float(neg_log2_prob_z(iv.lo / s, iv.hi / s))


def neg_log2_interval_prob_hp(iv: Interval, sigma: float, dps: int = 45) -> mpmath.mpf:
    """High-precision -log2 P(y in iv) (mpmath).

    float64 cannot express deep-tail bit costs to the absolute accuracy the
    bit-equivalence check demands (a cost of ~4e7 bits has a float64 ulp of
    ~7e-9 bits), so the identity checks evaluate both sides through this
    path.  Production coding uses the float64 path.
    """
    s = _check_sigma(sigma)
    with mpmath.workdps(dps):
        z_lo = mpmath.mpf(iv.lo) / s
        z_hi = mpmath.mpf(iv.hi) / s
        rt2 = mpmath.sqrt(2)
        # Same tail-side arrangement as prob_z: erfc of the near boundary
        # keeps full precision however deep the interval sits.
        if z_lo >= 0:
            p = (mpmath.erfc(z_lo / rt2) - mpmath.erfc(z_hi / rt2)) / 2
        elif z_hi <= 0:
            p = (mpmath.erfc(-z_hi / rt2) - mpmath.erfc(-z_lo / rt2)) / 2
        else:
            p = (mpmath.erf(z_hi / rt2) - mpmath.erf(z_lo / rt2)) / 2
        if p <= 0:
            raise DegenerateInterval(f"hp probability non-positive on [{iv.lo}, {iv.hi})")
        return -mpmath.log(p) / mpmath.log(2)


def degenerate_level(iv: Interval) -> float:
    """Reconstruction substitute for an interval with vanishing mass."""
    lo_f, hi_f = math.isfinite(iv.lo), math.isfinite(iv.hi)
    if lo_f and hi_f:
        return 0.5 * (iv.lo + iv.hi)
    if lo_f:
        return iv.lo
    if hi_f:
        return iv.hi
    return 0.0
