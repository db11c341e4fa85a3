"""Streaming cSQI scorer.

A primed :class:`EngineState` holds the live window in a ring buffer and the
circular correlation of that window against the template. Each new sample
updates the correlation in O(M) (rotate, subtract the departing sample's
row, add the arriving sample's row), picks the best lag and scores the
window as the reciprocal of the mean-removed variance of
``window - circular_shift(template, lag)``.

The raw score for window center ``i`` is emitted when sample ``i + M``
arrives, so streaming output lags input by M samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import SignalRecord, circular_shift, mean_removed_variance
from .errors import (
    DegenerateTemplate,
    InsufficientData,
    InvalidConfig,
    InvalidSample,
    LengthMismatch,
    NotPrimed,
)
from .template import Template

DEFAULT_EPS = 1e-12
DEFAULT_REFRESH_INTERVAL = 4096


def csqi_value(window, template: Template, lag: int, eps: float = DEFAULT_EPS) -> float:
    """Score one window at a given template rotation."""
    w = np.asarray(window, dtype=np.float64)
    t = template.coeffs
    if w.shape != t.shape:
        raise LengthMismatch(f"window length {w.shape[0]} != template length {t.shape[0]}")
    return 1.0 / max(mean_removed_variance(w - circular_shift(t, lag)), eps)


class EngineState:
    """Single-owner scoring state; drive it with :meth:`prime` then :meth:`step`."""

    def __init__(
        self,
        template: Template,
        refresh_interval: int = DEFAULT_REFRESH_INTERVAL,
        eps: float = DEFAULT_EPS,
    ):
        if refresh_interval < 1:
            raise InvalidConfig("refresh_interval must be >= 1")
        if not eps > 0:
            raise InvalidConfig("eps must be > 0")
        if not mean_removed_variance(template.coeffs) > 0:
            raise DegenerateTemplate("template is flat")
        self.template = template
        self.refresh_interval = int(refresh_interval)
        self.eps = float(eps)
        self.c_max = 1.0 / self.eps
        L = template.length
        self._t = np.ascontiguousarray(template.coeffs, dtype=np.float64)
        self._buf = np.zeros(L)
        self._corr = np.zeros(L)
        self._d = np.zeros(L)
        self._w = np.zeros(L)
        self._head = 0
        self._off = 0
        self.samples_seen = 0
        self.steps_since_refresh = 0
        self.primed = False

    @property
    def m(self) -> int:
        return self.template.m

    @property
    def window(self) -> np.ndarray:
        """The live window, oldest sample first."""
        return np.roll(self._buf, -self._head)

    @property
    def corr(self) -> np.ndarray:
        """Running correlation indexed by lag ``-M..M``."""
        return np.roll(self._corr, -self._off)

    def prime(self, first_window) -> float:
        """Load a full window, compute its correlation directly and return c[0]."""
        w = np.asarray(first_window, dtype=np.float64)
        if w.shape != self._buf.shape:
            raise LengthMismatch(f"window length {w.shape[0]} != template length {self._buf.shape[0]}")
        if not np.all(np.isfinite(w)):
            raise InvalidSample("window contains NaN or Inf")
        k = _kernels.FAST
        self._buf[:] = w
        self._head = 0
        self._off = 0
        k.circ_xcorr(self._buf, self._t, self._corr)
        q = k.best_lag_index(self._corr, 0)
        c = k.score(self._buf, 0, self._t, q - self.m, self._d, self.eps)
        self.samples_seen = w.shape[0]
        self.steps_since_refresh = 0
        self.primed = True
        return float(c)

    def step(self, new_sample: float) -> float:
        """Consume one sample and return c for the window it completes."""
        x = float(new_sample)
        if not math.isfinite(x):
            raise InvalidSample(f"non-finite sample {new_sample!r}")
        return float(self.run(np.array([x]))[0])

    def run(self, samples) -> np.ndarray:
        """Consume a block of samples; one c per sample, same arithmetic as :meth:`step`."""
        if not self.primed:
            raise NotPrimed("engine must be primed with a full window first")
        s = np.ascontiguousarray(samples, dtype=np.float64)
        if s.ndim != 1:
            raise InvalidSample("samples must be 1-D")
        if not np.all(np.isfinite(s)):
            raise InvalidSample("samples contain NaN or Inf")
        out = np.empty(s.shape[0])
        if s.shape[0] == 0:
            return out
        self._head, self._off, self.steps_since_refresh = _kernels.FAST.run(
            s,
            self._buf,
            self._head,
            self._corr,
            self._off,
            self._t,
            self._d,
            self._w,
            self.eps,
            self.refresh_interval,
            self.steps_since_refresh,
            out,
        )
        self.samples_seen += s.shape[0]
        return out


def init(template: Template, first_window, **kwargs) -> tuple[EngineState, float]:
    """Create an engine primed on ``first_window``; returns ``(state, c0)``."""
    state = EngineState(template, **kwargs)
    return state, state.prime(first_window)


def step(state: EngineState, new_sample: float) -> float:
    return state.step(new_sample)


def smooth(raw_c, ma_window: int, mode: str = "centered") -> np.ndarray:
    """Moving average of raw scores.

    ``centered`` (offline) averages ``ma_window`` values around each point,
    with the window truncated at the record edges. ``trailing``
    (streaming) averages the last ``min(ma_window, available)`` values.
    Both keep the input length.
    """
    if not isinstance(ma_window, (int, np.integer)) or ma_window < 1 or ma_window % 2 == 0:
        raise InvalidConfig(f"ma_window must be a positive odd integer, got {ma_window!r}")
    c = np.asarray(raw_c, dtype=np.float64)
    n = c.shape[0]
    if n == 0:
        return c.copy()
    # direct sums, not cumsum differences: c spans many decades
    ones = np.ones(ma_window)
    if mode == "centered":
        h = ma_window // 2
        total = np.convolve(np.pad(c, h), ones, mode="valid")
        count = np.convolve(np.pad(np.ones(n), h), ones, mode="valid")
    elif mode == "trailing":
        total = np.convolve(c, ones)[:n]
        count = np.minimum(np.arange(1, n + 1), ma_window).astype(np.float64)
    else:
        raise InvalidConfig(f"unknown smoothing mode {mode!r}")
    out = total / count
    # rounding can leave residue; an average never leaves the input range
    return np.clip(out, c.min(), c.max())


class TrailingAverage:
    """Streaming counterpart of ``smooth(..., mode="trailing")``."""

    def __init__(self, ma_window: int):
        if ma_window < 1 or ma_window % 2 == 0:
            raise InvalidConfig(f"ma_window must be a positive odd integer, got {ma_window!r}")
        self.ma_window = ma_window
        self._ring = np.zeros(ma_window)
        self._n = 0

    def push(self, c: float) -> float:
        self._ring[self._n % self.ma_window] = c
        self._n += 1
        return float(self._ring[: min(self._n, self.ma_window)].mean())


@dataclass(frozen=True, eq=False)
class SqiSeries:
    """Per-sample scores; ``raw_c[k]`` belongs to record index ``first_scored_index + k``."""

    raw_c: np.ndarray
    csqi: np.ndarray
    first_scored_index: int
    ma_window: int

    def __len__(self) -> int:
        return self.raw_c.shape[0]

    @property
    def indices(self) -> np.ndarray:
        return self.first_scored_index + np.arange(len(self))


def process_record(
    record: SignalRecord,
    template: Template,
    ma_window: int | None = None,
    refresh_interval: int = DEFAULT_REFRESH_INTERVAL,
    eps: float = DEFAULT_EPS,
) -> SqiSeries:
    """Score every full window of ``record`` and smooth the result (centered)."""
    L = template.length
    if ma_window is None:
        ma_window = L
    if len(record) < L:
        raise InsufficientData(f"record of {len(record)} samples is shorter than the template ({L})")
    x = record.samples
    state, c0 = init(template, x[:L], refresh_interval=refresh_interval, eps=eps)
    raw = np.empty(len(record) - L + 1)
    raw[0] = c0
    raw[1:] = state.run(x[L:])
    return SqiSeries(raw_c=raw, csqi=smooth(raw, ma_window), first_scored_index=template.m, ma_window=ma_window)
