"""Curve-based signal quality indicator (cSQI) for quasi-periodic signals."""

from .core import (
    CorrSequence,
    SignalRecord,
    argmax_lag,
    circular_correlation,
    circular_shift,
    linear_cross_correlation,
    mean_removed_variance,
)
from .engine import EngineState, SqiSeries, csqi_value, init, process_record, smooth, step
from .errors import CsqiError
from .noise import MixRegion, NoiseSpec, gen_noise, mix_at_snr, synth_ecg
from .template import Template, TrainConfig, build_template, derive_half_length, detect_fiducials, estimate_period

__version__ = "0.1.0"
