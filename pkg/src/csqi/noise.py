"""Noise synthesis, SNR-exact mixing and a synthetic ECG test signal.

The synthetic noise classes are surrogates for recorded ECG noise: real
recordings (exported to CSV) enter through ``kind="file"``.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import signal as sps

from .core import SignalRecord
from .errors import DegenerateSignal, InvalidConfig, InvalidRegion

NOISE_KINDS = ("gaussian", "powerline", "baseline_wander", "muscle_artifact", "electrode_motion", "file")
SYNTHETIC_KINDS = NOISE_KINDS[:-1]

_DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "gaussian": {},
    "powerline": {"f0": 50.0, "harmonics": (1,), "amplitudes": (1.0,)},
    "baseline_wander": {"cutoff": 0.5, "low_fraction": 0.3, "n_components": 5},
    "muscle_artifact": {"band": (20.0, 60.0)},
    "electrode_motion": {"rate": 1.0, "decay": 0.1, "floor": 0.05},
    "file": {},
}

# odd-harmonic "combination of sinusoids" preset
POWERLINE_COMBINATION = {"harmonics": (1, 3), "amplitudes": (1.0, 0.3)}


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative noise recipe. Missing ``params`` fall back to per-kind defaults."""

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidConfig(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.kind == "file" and "path" not in self.params:
            raise InvalidConfig("noise kind 'file' needs params['path']")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")

    def resolved(self) -> dict:
        return {**_DEFAULT_PARAMS[self.kind], **self.params}

    def with_seed(self, seed: int) -> NoiseSpec:
        return NoiseSpec(self.kind, dict(self.params), int(seed))


def kind_code(kind: str) -> int:
    return zlib.crc32(kind.encode())


def _rng(spec: NoiseSpec) -> np.random.Generator:
    # stream keyed on (seed, kind): specs never share RNG state
    return np.random.default_rng(np.random.SeedSequence([int(spec.seed), kind_code(spec.kind)]))


def _unit_power(x: np.ndarray) -> np.ndarray:
    p = float(np.mean(x * x))
    if p == 0:
        return x
    return x / np.sqrt(p)


def _powerline(p: dict, n: int, fs: float, rng: np.random.Generator) -> np.ndarray:
    f0 = float(p["f0"])
    harmonics = tuple(int(h) for h in p["harmonics"])
    amps = tuple(float(a) for a in p["amplitudes"])
    if len(harmonics) != len(amps) or not harmonics:
        raise InvalidConfig("powerline harmonics and amplitudes must be nonempty and equally long")
    for h in harmonics:
        if h < 1 or not 0 < h * f0 < fs / 2:
            raise InvalidConfig(f"powerline component {h} x {f0} Hz is not below Nyquist ({fs / 2} Hz)")
    # fundamental keeps phase 0 so a single tone is exactly a*sin(2 pi f0 n / fs)
    phases = np.concatenate(([0.0], rng.uniform(0, 2 * np.pi, len(harmonics) - 1)))
    t = np.arange(n) / fs
    out = np.zeros(n)
    for h, a, ph in zip(harmonics, amps, phases):
        out += a * np.sin(2 * np.pi * h * f0 * t + ph)
    return out


def _baseline_wander(p: dict, n: int, fs: float, rng: np.random.Generator) -> np.ndarray:
    cutoff = float(p["cutoff"])
    k = int(p["n_components"])
    if not 1 <= k <= 5:
        raise InvalidConfig("baseline wander uses 1 to 5 sinusoids")
    if not 0 < cutoff < fs / 2:
        raise InvalidConfig(f"baseline wander cutoff {cutoff} Hz must lie in (0, {fs / 2})")
    low = float(p["low_fraction"])
    if not 0 <= low < 1:
        raise InvalidConfig("baseline wander low_fraction must lie in [0, 1)")
    # default band 0.15-0.5 Hz: respiration-driven drift
    freqs = rng.uniform(low * cutoff, cutoff, k)
    phases = rng.uniform(0, 2 * np.pi, k)
    amps = rng.uniform(0.5, 1.0, k)
    t = np.arange(n) / fs
    return (amps[:, None] * np.sin(2 * np.pi * freqs[:, None] * t[None, :] + phases[:, None])).sum(axis=0)


def muscle_band(p: dict, fs: float) -> tuple[float, float]:
    lo, hi = (float(b) for b in p["band"])
    hi = min(hi, 0.45 * fs)
    if not 0 < lo < hi < fs / 2:
        raise InvalidConfig(f"muscle artifact band [{lo}, {hi}] Hz invalid for fs={fs}")
    return lo, hi


def _muscle_artifact(p: dict, n: int, fs: float, rng: np.random.Generator) -> np.ndarray:
    lo, hi = muscle_band(p, fs)
    numtaps = 101
    taps = sps.firwin(numtaps, [lo, hi], pass_zero=False, fs=fs)
    white = rng.standard_normal(n + numtaps - 1)
    # 'valid' drops the filter start-up transient
    return np.convolve(white, taps, mode="valid")


def _electrode_motion(p: dict, n: int, fs: float, rng: np.random.Generator) -> np.ndarray:
    rate = float(p["rate"])
    decay_s = float(p["decay"])
    floor = float(p["floor"])
    if rate <= 0 or decay_s <= 0 or floor < 0:
        raise InvalidConfig("electrode motion needs rate > 0, decay > 0, floor >= 0")
    n_events = rng.poisson(rate * n / fs)
    onsets = np.sort(rng.integers(0, n, n_events))
    steps = rng.standard_normal(n_events)
    impulses = np.zeros(n)
    np.add.at(impulses, onsets, steps)
    a = np.exp(-1.0 / (decay_s * fs))
    transients = sps.lfilter([1.0], [1.0, -a], impulses)
    return transients + floor * rng.standard_normal(n)


def _from_file(p: dict, n: int, fs: float, rng: np.random.Generator) -> np.ndarray:
    from .io import read_signal_csv

    rec = read_signal_csv(p["path"], fs_override=p.get("fs"))
    if rec.fs != fs:
        raise InvalidConfig(f"noise file sampled at {rec.fs} Hz, signal at {fs} Hz (no resampling)")
    if len(rec) < n:
        raise InvalidConfig(f"noise file has {len(rec)} samples, {n} needed")
    start = int(rng.integers(0, len(rec) - n + 1))
    return rec.samples[start : start + n].copy()


_GENERATORS = {
    "gaussian": lambda p, n, fs, rng: rng.standard_normal(n),
    "powerline": _powerline,
    "baseline_wander": _baseline_wander,
    "muscle_artifact": _muscle_artifact,
    "electrode_motion": _electrode_motion,
    "file": _from_file,
}


def gen_noise(spec: NoiseSpec, length: int, fs: float, normalize: bool = True) -> SignalRecord:
    """Generate ``length`` samples of noise.

    With ``normalize`` (the default) the output is scaled to unit mean power;
    ``normalize=False`` returns the generator's natural amplitude (a powerline
    tone of amplitude 1 then has power 0.5).
    """
    if length < 1:
        raise InvalidConfig("length must be >= 1")
    if not fs > 0:
        raise InvalidConfig("fs must be > 0")
    x = _GENERATORS[spec.kind](spec.resolved(), int(length), float(fs), _rng(spec))
    if normalize:
        x = _unit_power(x)
    return SignalRecord(x, fs)


@dataclass(frozen=True)
class MixRegion:
    """Half-open sample range ``[start, end)``; ``end=None`` runs to the record end."""

    start: int = 0
    end: int | None = None

    def bounds(self, n: int) -> tuple[int, int]:
        end = n if self.end is None else self.end
        if not 0 <= self.start < end <= n:
            raise InvalidRegion(f"region [{self.start}, {end}) outside record of length {n}")
        return self.start, end


def power(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x * x))


def snr_db(clean, noisy) -> float:
    clean = np.asarray(clean, dtype=np.float64)
    return 10.0 * np.log10(power(clean) / power(np.asarray(noisy) - clean))


def mix_at_snr(signal: SignalRecord, noise: SignalRecord, snr_db: float, region: MixRegion = MixRegion()) -> SignalRecord:
    """Add ``noise`` inside ``region`` scaled so the region SNR equals ``snr_db``.

    Powers are measured empirically over the region; the first
    ``end - start`` noise samples are used. Samples outside the region are
    returned unchanged.
    """
    lo, hi = region.bounds(len(signal))
    n = hi - lo
    if len(noise) < n:
        raise InvalidRegion(f"noise has {len(noise)} samples, region needs {n}")
    s = signal.samples[lo:hi]
    v = noise.samples[:n]
    p_sig = power(s)
    if p_sig == 0:
        raise DegenerateSignal("signal has zero power over the mix region")
    p_noise = power(v)
    if p_noise == 0:
        raise DegenerateSignal("noise has zero power")
    gain = np.sqrt(p_sig / (p_noise * 10.0 ** (snr_db / 10.0)))
    out = signal.samples.copy()
    out[lo:hi] = s + gain * v
    return SignalRecord(out, signal.fs)


# (center offset in seconds at 75 bpm, amplitude, width in seconds)
_ECG_WAVES = (
    (-0.20, 0.15, 0.025),  # P
    (-0.025, -0.12, 0.008),  # Q
    (0.0, 1.0, 0.010),  # R
    (0.025, -0.20, 0.008),  # S
    (0.28, 0.30, 0.040),  # T
)


def synth_ecg(n_beats: int, fs: float = 125.0, hr_bpm: float = 75.0, seed: int = 0) -> tuple[SignalRecord, np.ndarray]:
    """Sum-of-Gaussians ECG with seeded timing and amplitude jitter.

    Beat ``k`` sits near ``(k + 0.5) * 60 * fs / hr_bpm``; the timing jitter is
    at most half a percent of the period either way and every R peak falls on
    an integer sample, which is returned as the beat center.
    """
    if n_beats < 1:
        raise InvalidConfig("n_beats must be >= 1")
    if not 30 <= hr_bpm <= 200:
        raise InvalidConfig("hr_bpm must lie in [30, 200]")
    if fs < 100:
        raise InvalidConfig("fs must be >= 100 Hz")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), kind_code("synth_ecg")]))
    period = 60.0 * fs / hr_bpm
    n = int(np.ceil(n_beats * period))
    jitter = rng.uniform(-0.005, 0.005, n_beats) * period
    centers = np.rint((np.arange(n_beats) + 0.5) * period + jitter).astype(np.int64)
    gains = 1.0 + rng.uniform(-0.01, 0.01, n_beats)
    # P and T offsets stretch with the RR interval, QRS does not
    stretch = (60.0 / hr_bpm) / 0.8
    t = np.arange(n)
    x = np.zeros(n)
    for c, g in zip(centers, gains):
        for offset, amp, width in _ECG_WAVES:
            off = offset * stretch if abs(offset) > 0.1 else offset
            mu = c + off * fs
            sd = width * fs
            lo, hi = int(max(0, mu - 6 * sd)), int(min(n, mu + 6 * sd + 1))
            x[lo:hi] += g * amp * np.exp(-0.5 * ((t[lo:hi] - mu) / sd) ** 2)
    return SignalRecord(x, fs), centers
