"""Numeric primitives shared by template training and scoring.

Conventions used throughout the package:

* A window of half-length ``m`` has ``2m + 1`` samples; lags run ``-m..m``.
* ``circular_shift(v, t)[j] == v[(j + t) % L]`` (left rotation by ``t``).
* ``circular_correlation(w, t)[lag] == sum_j w[j] * t[(j + lag) % L]``, so a
  window equal to ``circular_shift(t, r)`` peaks at ``lag == r`` and the
  aligned template for a lag is ``circular_shift(t, lag)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidLength, LengthMismatch


@dataclass(frozen=True, eq=False)
class SignalRecord:
    """A uniformly sampled real signal and its sampling rate (Hz)."""

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidInput(f"samples must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidInput("samples contain NaN or Inf")
        fs = float(self.fs)
        if not (np.isfinite(fs) and fs > 0):
            raise InvalidInput(f"fs must be a positive finite number, got {self.fs!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "fs", fs)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.fs

    def slice(self, start: int, end: int | None = None) -> SignalRecord:
        return SignalRecord(self.samples[start:end].copy(), self.fs)


@dataclass(frozen=True, eq=False)
class CorrSequence:
    """Correlation values indexed by lag ``-m..m``."""

    values: np.ndarray
    lags: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        n = values.shape[0]
        if n == 0 or n % 2 == 0:
            raise InvalidLength(f"correlation length must be odd and nonzero, got {n}")
        m = (n - 1) // 2
        lags = np.arange(-m, m + 1) if self.lags is None else np.asarray(self.lags)
        if lags.shape != values.shape:
            raise LengthMismatch("values and lags differ in length")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "lags", lags)

    @property
    def m(self) -> int:
        return (self.values.shape[0] - 1) // 2

    def at(self, lag: int) -> float:
        return float(self.values[lag + self.m])


def _as_1d(v, name: str = "input") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be 1-D")
    return arr


def _odd_length(v: np.ndarray) -> int:
    n = v.shape[0]
    if n == 0 or n % 2 == 0:
        raise InvalidLength(f"window length must be odd (2M+1), got {n}")
    return n


def half_length(n: int) -> int:
    """M for a window of length ``n = 2M + 1``."""
    if n < 1 or n % 2 == 0:
        raise InvalidLength(f"window length must be odd (2M+1), got {n}")
    return (n - 1) // 2


def extract_window(samples, center: int, m: int) -> np.ndarray:
    """Return ``samples[center - m : center + m + 1]`` with bounds checking."""
    samples = _as_1d(samples, "samples")
    lo, hi = center - m, center + m + 1
    if lo < 0 or hi > samples.shape[0]:
        raise InvalidLength(
            f"window centered at {center} with M={m} exceeds record of length {samples.shape[0]}"
        )
    return samples[lo:hi].copy()


def circular_shift(v, t: int) -> np.ndarray:
    """Left-rotate ``v`` by ``t`` positions (``t`` is reduced modulo the length)."""
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] == 0:
        raise InvalidLength("circular_shift needs a nonempty 1-D sequence")
    return np.roll(v, -(int(t) % v.shape[0]))


def _circulant_rows(t: np.ndarray) -> np.ndarray:
    # row for lag index q holds circular_shift(t, q - m)
    n = t.shape[0]
    m = (n - 1) // 2
    idx = (np.arange(n)[None, :] + np.arange(-m, m + 1)[:, None]) % n
    return t[idx]


def circular_correlation(w, t) -> CorrSequence:
    """Exhaustive circular correlation of a window against a template.

    ``values[lag] = sum_j w[j] * t[(j + lag) % L]`` for ``lag`` in ``-M..M``.
    """
    w = _as_1d(w, "window")
    t = _as_1d(getattr(t, "coeffs", t), "template")
    if w.shape != t.shape:
        raise LengthMismatch(f"window length {w.shape[0]} != template length {t.shape[0]}")
    _odd_length(w)
    return CorrSequence(_circulant_rows(t) @ w)


def linear_cross_correlation(a, b) -> np.ndarray:
    """Full zero-padded cross-correlation, lags ``-(L-1)..(L-1)``.

    ``out[lag + L - 1] = sum_j a[j] * b[j - lag]`` with out-of-range ``b`` terms
    taken as zero.
    """
    a = _as_1d(a, "a")
    b = _as_1d(b, "b")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise InvalidLength("linear_cross_correlation needs nonempty inputs")
    if a.shape != b.shape:
        raise LengthMismatch(f"length {a.shape[0]} != {b.shape[0]}")
    return np.correlate(a, b, mode="full")


def mean_removed_variance(v) -> float:
    """Population variance ``mean((v - mean(v))**2)``."""
    v = _as_1d(v)
    if v.shape[0] < 2:
        raise InvalidLength("variance needs at least 2 samples")
    d = v - v.mean()
    return float(np.dot(d, d) / v.shape[0])


def lag_preference_order(m: int) -> np.ndarray:
    """Lags ordered for tie-breaking: 0, -1, 1, -2, 2, ..., -m, m."""
    order = np.empty(2 * m + 1, dtype=np.int64)
    order[0] = 0
    order[1::2] = -np.arange(1, m + 1)
    order[2::2] = np.arange(1, m + 1)
    return order


def argmax_lag(c: CorrSequence) -> int:
    """Lag of the largest signed value; ties go to the smallest ``|lag|``,
    then to the negative lag."""
    values = c.values
    if values.shape[0] == 0:
        raise InvalidLength("empty correlation sequence")
    m = c.m
    order = lag_preference_order(m)
    best = values[order + m]
    return int(order[int(np.argmax(best))])
