"""Prefix-decodable range coder over small alphabets with 16-bit models.

This is a FIFO binary-fraction range coder (48-bit state, byte-at-a-time
renormalization, carries propagated back into the output buffer), chosen
so that *any byte prefix of the payload decodes to a maximal symbol
prefix*.  A stack-based ANS coder cannot offer that without per-chunk
flushing, which is why this codec does not use one.

Truncation semantics: the decoder models bytes beyond the available
prefix as the interval [0x00, 0xFF] and accepts a symbol only when every
completion of the prefix decodes it identically.  Decoding a longer
prefix therefore never contradicts a shorter one, and a complete stream
(whose tail the encoder aligned to implicit zero bytes) decodes every
encoded symbol.

Wire invariants (fixed; a stream is bit-exact across platforms):
  * frequencies are 16-bit (sum ``FREQ_TOTAL`` = 65536);
  * the state is 48 bits, renormalized one byte at a time while
    range < 2^40; emitted bytes are the successive top bytes;
  * the symbol holding the top of the cumulative range absorbs the
    range-division remainder;
  * a symbol with frequency 65536 is a no-op on the byte stream;
  * ``finish`` emits the shortest byte tail that pins every encoded
    symbol (at most 2 bytes beyond the information content).
"""

from __future__ import annotations

import numpy as np

from .errors import EndOfPrefix, ZeroFrequencySymbol

__all__ = ["FREQ_TOTAL", "RangeEncoder", "RangeDecoder", "quantize_model", "DETERMINISTIC_MIN"]

FREQ_BITS = 16
FREQ_TOTAL = 1 << FREQ_BITS

_STATE_BITS = 48
_WINDOW = _STATE_BITS // 8
_TOP = 1 << _STATE_BITS
_MASK = _TOP - 1
_BOT = 1 << (_STATE_BITS - 8)

#: Probabilities at or above this are coded as exact certainties.
DETERMINISTIC_MIN = 1.0 - 1e-12

#: Probabilities below this floor may quantize to frequency zero.
_FREQ_PROB_FLOOR = 1e-12


class RangeEncoder:
    """Streaming encoder; feed (cum, freq) pairs, then call finish()."""

    def __init__(self) -> None:
        self._low = 0
        self._range = _TOP
        self._out = bytearray()
        self._finished = False

    @property
    def bytes_emitted(self) -> int:
        return len(self._out)

    def encode(self, cum: int, freq: int) -> None:
        if freq == FREQ_TOTAL:
            return  # certainty: exact no-op
        if freq == 0:
            raise ZeroFrequencySymbol("symbol has zero quantized frequency")
        r = self._range >> FREQ_BITS
        self._low += r * cum
        if cum + freq == FREQ_TOTAL:
            self._range -= r * cum
        else:
            self._range = r * freq
        if self._low >= _TOP:
            self._low -= _TOP
            self._carry()
        while self._range < _BOT:
            self._out.append((self._low >> (_STATE_BITS - 8)) & 0xFF)
            self._low = (self._low << 8) & _MASK
            self._range <<= 8

    def _carry(self) -> None:
        i = len(self._out) - 1
        while self._out[i] == 0xFF:
            self._out[i] = 0
            i -= 1
        self._out[i] += 1

    def finish(self) -> bytes:
        """Close the stream with the shortest zero-extendable tail."""
        if self._finished:
            raise RuntimeError("finish() called twice")
        self._finished = True
        if not self._out and self._range == _TOP:
            return b""  # nothing but no-ops was encoded (range untouched)
        # Pick x in [low, low + range) whose trailing `missing` bytes are
        # zero with 2^(8*missing + 1) <= range, so that the decoder's
        # [0x00, 0xFF] padding of those bytes still pins every symbol.
        missing = min((self._range.bit_length() - 2) // 8, _WINDOW - 1)
        align = 1 << (8 * missing)
        x = -(-self._low // align) * align
        if x >= _TOP:
            x -= _TOP
            self._carry()
        for k in range(_WINDOW - 1, missing - 1, -1):
            self._out.append((x >> (8 * k)) & 0xFF)
        return bytes(self._out)


class RangeDecoder:
    """Mirror of RangeEncoder with budgeted exact-determination decoding.

    ``budget`` caps how many payload bytes are considered known; the rest
    (and anything beyond the payload) are unknown.  decode() raises
    :class:`EndOfPrefix` when the next symbol is not uniquely determined,
    leaving the state untouched; the budget can then be raised and the
    same symbol retried, which is how a single pass serves many
    truncation points.
    """

    def __init__(self, payload: bytes, budget: int | None = None) -> None:
        self._data = bytes(payload)
        self._known = len(self._data) if budget is None else min(int(budget), len(self._data))
        self._range = _TOP
        self._wpos = _WINDOW  # window covers conceptual bytes [wpos-6, wpos)
        self._adj = 0  # total subtracted from the code value, mod 2^48
        self.symbols_decoded = 0

    def extend_budget(self, budget: int) -> None:
        budget = min(int(budget), len(self._data))
        if budget < self._known:
            raise ValueError("budget can only grow")
        self._known = budget

    def _code_interval(self) -> tuple[int, int]:
        start = self._wpos - _WINDOW
        end = min(self._wpos, self._known)
        chunk = self._data[start:end] if end > start else b""
        m = _WINDOW - len(chunk)
        raw_lo = int.from_bytes(chunk, "big") << (8 * m)
        return (raw_lo - self._adj) & _MASK, (1 << (8 * m)) - 1

    def decode(self, freqs: tuple[int, ...]) -> int:
        for k, f in enumerate(freqs):
            if f == FREQ_TOTAL:
                return k  # certainty: consumes nothing
        r = self._range >> FREQ_BITS
        c_lo, u = self._code_interval()
        if c_lo + u >= _TOP:
            raise EndOfPrefix("code interval wraps; symbol undetermined")
        cf_lo = min(c_lo // r, FREQ_TOTAL - 1)
        cf_hi = min((c_lo + u) // r, FREQ_TOTAL - 1)
        cum = 0
        sym = len(freqs) - 1
        for k, f in enumerate(freqs):
            if cf_lo < cum + f:
                sym = k
                break
            cum += f
        if cf_hi >= cum + freqs[sym]:
            raise EndOfPrefix("prefix does not determine the next symbol")
        freq = freqs[sym]
        self._adj = (self._adj + r * cum) & _MASK
        if cum + freq == FREQ_TOTAL:
            self._range -= r * cum
        else:
            self._range = r * freq
        while self._range < _BOT:
            self._range <<= 8
            self._adj = (self._adj << 8) & _MASK
            self._wpos += 1
        self.symbols_decoded += 1
        return sym


def quantize_model(q: np.ndarray) -> np.ndarray:
    """Quantize probability rows (..., A) to integer frequency rows.

    Largest-remainder rounding to a row sum of FREQ_TOTAL.  A probability
    of DETERMINISTIC_MIN or more becomes the full budget (its siblings
    drop to zero); otherwise every probability >= 1e-12 keeps frequency
    >= 1.  Identical inputs quantize identically on encoder and decoder.
    """
    q = np.asarray(q, dtype=np.float64)
    scaled = q * FREQ_TOTAL
    base = np.floor(scaled).astype(np.int64)
    rem = scaled - base
    deficit = FREQ_TOTAL - base.sum(axis=-1)
    if np.any(deficit < 0):
        raise ValueError("probability rows must sum to 1")
    order = np.argsort(-rem, axis=-1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(q.shape[-1]), q.shape), axis=-1)
    freq = base + (ranks < deficit[..., None])

    needs_floor = (q >= _FREQ_PROB_FLOOR) & (freq == 0)
    freq += needs_floor
    excess = freq.sum(axis=-1) - FREQ_TOTAL
    top = np.argmax(freq, axis=-1)
    np.put_along_axis(
        freq,
        top[..., None],
        np.take_along_axis(freq, top[..., None], axis=-1) - excess[..., None],
        axis=-1,
    )

    certain = q.max(axis=-1) >= DETERMINISTIC_MIN
    if np.any(certain):
        onehot = np.zeros_like(freq)
        np.put_along_axis(onehot, np.argmax(q, axis=-1)[..., None], FREQ_TOTAL, axis=-1)
        freq = np.where(certain[..., None], onehot, freq)
    return freq
