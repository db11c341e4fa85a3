"""One-time template training from a clean stretch of signal.

Fiducial peaks give the average period, the period fixes the template
half-length M, and windows of length 2M+1 are aligned against the running
template and averaged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.signal import find_peaks

from . import _kernels
from .core import CorrSequence, SignalRecord, argmax_lag, circular_shift, mean_removed_variance
from .errors import (
    DegenerateTemplate,
    InsufficientData,
    InsufficientFiducials,
    InvalidConfig,
    NoFiducials,
    PeriodTooShort,
    TemplateTrainingFailed,
)

log = logging.getLogger(__name__)

MIN_TRAINING_SECONDS = 2.0


@dataclass(frozen=True, eq=False)
class Template:
    """Trained single-cycle waveform of length ``2m + 1``.

    ``source_span`` and ``period`` are training metadata; they are not part
    of the template file and do not take part in equality.
    """

    coeffs: np.ndarray
    m: int
    fs: float
    accepted_count: int
    source_span: tuple[int, int] | None = None
    period: int | None = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.m < 1 or coeffs.shape != (2 * self.m + 1,):
            raise InvalidConfig(f"template needs 2M+1 = {2 * self.m + 1} coefficients, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidConfig("template coefficients must be finite")
        if self.accepted_count < 1:
            raise InvalidConfig("accepted_count must be >= 1")
        if not mean_removed_variance(coeffs) > 0:
            raise DegenerateTemplate("template is flat (zero variance)")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def length(self) -> int:
        return 2 * self.m + 1

    def __eq__(self, other):
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.m == other.m
            and self.fs == other.fs
            and self.accepted_count == other.accepted_count
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None


@dataclass(frozen=True)
class TrainConfig:
    n_cycles: int = 10
    period_fraction: float = 0.7
    accept_lag_tolerance_fraction: float = 0.25
    min_normalized_corr: float = 0.5
    min_accepted: int = 3
    peak_threshold_fraction: float = 0.6
    refractory_fraction: float = 0.4
    window_stride: Literal["template_length", "period"] = "template_length"

    def __post_init__(self):
        if self.n_cycles < 2:
            raise InvalidConfig("n_cycles must be >= 2")
        if not 0 < self.period_fraction <= 1:
            raise InvalidConfig("period_fraction must lie in (0, 1]")
        if not 0 < self.accept_lag_tolerance_fraction < 1:
            raise InvalidConfig("accept_lag_tolerance_fraction must lie in (0, 1)")
        if not 0 < self.min_normalized_corr < 1:
            raise InvalidConfig("min_normalized_corr must lie in (0, 1)")
        if self.min_accepted < 1:
            raise InvalidConfig("min_accepted must be >= 1")
        if not 0 < self.peak_threshold_fraction <= 1:
            raise InvalidConfig("peak_threshold_fraction must lie in (0, 1]")
        if not 0 < self.refractory_fraction < 1:
            raise InvalidConfig("refractory_fraction must lie in (0, 1)")
        if self.window_stride not in ("template_length", "period"):
            raise InvalidConfig(f"unknown window_stride {self.window_stride!r}")


def detect_fiducials(record: SignalRecord, cfg: TrainConfig = TrainConfig()) -> np.ndarray:
    """Per-cycle maxima of a clean record.

    Candidates are local maxima at or above ``peak_threshold_fraction`` of the
    global maximum. A candidate closer than ``refractory_fraction`` periods to
    the last kept peak replaces it only if it is higher. The period estimate
    starts from the first two candidates and then tracks the median kept
    interval.
    """
    if record.duration < MIN_TRAINING_SECONDS:
        raise InsufficientData(
            f"need >= {MIN_TRAINING_SECONDS} s of signal for fiducial detection, got {record.duration:.3f} s"
        )
    x = record.samples
    gmax = float(x.max())
    if gmax <= 0:
        raise NoFiducials("record has no positive maximum")
    candidates, _ = find_peaks(x, height=cfg.peak_threshold_fraction * gmax)
    if candidates.size == 0:
        raise NoFiducials("no local maximum above threshold")
    if candidates.size == 1:
        raise InsufficientFiducials("only one peak found")

    period = float(candidates[1] - candidates[0])
    kept = [int(candidates[0])]
    for p in candidates[1:]:
        p = int(p)
        if p - kept[-1] >= cfg.refractory_fraction * period:
            kept.append(p)
            period = float(np.median(np.diff(kept)))
        elif x[p] > x[kept[-1]]:
            kept[-1] = p
    if len(kept) < 2:
        raise InsufficientFiducials("fewer than two peaks survived the refractory rule")
    return np.asarray(kept, dtype=np.int64)


def estimate_period(fiducials: Sequence[int]) -> int:
    """Median fiducial spacing in samples, rounded half up."""
    fid = np.asarray(fiducials, dtype=np.int64)
    if fid.size < 2:
        raise InsufficientFiducials("need at least two fiducials to estimate a period")
    p = int(math.floor(float(np.median(np.diff(fid))) + 0.5))
    if p < 2:
        raise PeriodTooShort(f"estimated period {p} < 2 samples")
    return p


def derive_half_length(period: int, period_fraction: float = 0.7) -> int:
    """M such that the template spans ``period_fraction`` of a period."""
    if period < 4:
        raise PeriodTooShort(f"period {period} < 4 samples")
    if not 0 < period_fraction <= 1:
        raise InvalidConfig("period_fraction must lie in (0, 1]")
    # guard against 0.7 * 100 landing a hair below an integer
    return max(1, int(math.floor(period_fraction * period / 2 + 1e-9)))


def _best_linear_lag(xc, m: int) -> int:
    # xc holds lags -(L-1)..(L-1); only comparisons here
    vals = np.fromiter((float(v) for v in xc), dtype=np.float64, count=len(xc))
    return argmax_lag(CorrSequence(vals))


def _best_circular_lag(cc) -> int:
    vals = np.fromiter((float(v) for v in cc), dtype=np.float64, count=len(cc))
    return argmax_lag(CorrSequence(vals))


def align_and_average(windows, min_corr: float, lag_tolerance: float, kernels=_kernels.FAST):
    """Align each window to the running template and average the accepted ones.

    ``windows`` is a sequence of equal-length arrays, the first of which seeds
    the template. A window is accepted when its peak normalized linear
    correlation with the running template reaches ``min_corr`` at a lag no
    larger than ``lag_tolerance`` samples, and the rotation that undoes that
    lag also maximizes the circular correlation.

    Returns ``(coeffs, accepted_count, accepted_mask)``. Works on float arrays
    (jitted kernels) and on object arrays of counting scalars (plain kernels).
    """
    T = windows[0].copy()  # running sum, same argmax/rho as the running mean
    L = T.shape[0]
    m = (L - 1) // 2
    accepted = 1
    mask = [True]
    xc = np.zeros(2 * L - 1, dtype=T.dtype)
    cc = np.zeros(L, dtype=T.dtype)
    for X in windows[1:]:
        kernels.lin_xcorr(T, X, xc)
        lag = _best_linear_lag(xc, m)
        denom2 = kernels.dot(T, T) * kernels.dot(X, X)
        ok = float(denom2) > 0
        if ok:
            rho = xc[lag + L - 1] / math.sqrt(float(denom2))
            ok = rho >= min_corr and abs(lag) <= lag_tolerance
        if ok:
            aligned = circular_shift(X, -lag)
            kernels.circ_xcorr(aligned, T, cc)
            residual = _best_circular_lag(cc)
            ok = residual == 0
            if not ok:
                log.debug("window rejected: circular alignment residual lag %d", residual)
        if ok:
            kernels.accumulate_rotated(T, X, -lag)
            accepted += 1
        mask.append(ok)
    return T / accepted, accepted, mask


def build_template(
    record: SignalRecord,
    cfg: TrainConfig = TrainConfig(),
    fiducials: Sequence[int] | None = None,
) -> Template:
    """Train a template from ``record``.

    ``fiducials`` bypasses the built-in peak detector when given.
    """
    if fiducials is None:
        fid = detect_fiducials(record, cfg)
    else:
        fid = np.asarray(fiducials, dtype=np.int64)
        if fid.size and (np.any(np.diff(fid) <= 0) or fid[0] < 0 or fid[-1] >= len(record)):
            raise InvalidConfig("fiducials must be strictly increasing indices inside the record")
    period = estimate_period(fid)
    m = derive_half_length(period, cfg.period_fraction)
    L = 2 * m + 1

    starts = fid[fid >= m]
    if starts.size == 0:
        raise InsufficientData(f"no fiducial at index >= M={m}")
    n0 = int(starts[0])
    stride = L if cfg.window_stride == "template_length" else period
    centers = n0 + stride * np.arange(cfg.n_cycles)
    if centers[-1] + m >= len(record):
        raise InsufficientData(
            f"{cfg.n_cycles} windows of length {L} from index {n0} need {centers[-1] + m + 1} samples, "
            f"record has {len(record)}"
        )
    x = record.samples
    windows = [x[c - m : c + m + 1].copy() for c in centers]

    coeffs, accepted, _ = align_and_average(
        windows, cfg.min_normalized_corr, cfg.accept_lag_tolerance_fraction * L
    )
    if accepted < cfg.min_accepted:
        raise TemplateTrainingFailed(
            f"template training failed: only {accepted} of {cfg.n_cycles} windows accepted "
            f"(need {cfg.min_accepted})"
        )
    log.info("template trained: M=%d, period=%d, accepted %d/%d", m, period, accepted, cfg.n_cycles)
    return Template(
        coeffs=coeffs,
        m=m,
        fs=record.fs,
        accepted_count=accepted,
        source_span=(int(centers[0] - m), int(centers[-1] + m + 1)),
        period=period,
    )
