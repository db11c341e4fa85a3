"""Evaluation harness: SNR sweeps, region contrast, rank statistics and
operation counting.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from . import _kernels
from .core import SignalRecord
from .engine import SqiSeries, process_record
from .errors import CsqiError, InstrumentationDisabled, InvalidConfig, InvalidInput, InvalidRegion
from .noise import SYNTHETIC_KINDS, MixRegion, NoiseSpec, gen_noise, kind_code, mix_at_snr
from .opcount import OpCounter, counting_array, scratch
from .template import Template, align_and_average

DEFAULT_SNR_GRID = tuple(float(s) for s in range(-10, 31, 5))
DEFAULT_INSTANCES = 10

# instrumentation can be switched off for environments that forbid the slow path
INSTRUMENTATION_ENABLED = os.environ.get("CSQI_DISABLE_OPCOUNT", "") == ""


@dataclass(frozen=True)
class SweepRow:
    noise_type: str
    snr_db: float
    instance: int
    mean_csqi: float
    median_csqi: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    metadata: dict = field(default_factory=dict)

    def kinds(self) -> list[str]:
        return list(dict.fromkeys(r.noise_type for r in self.rows))

    def per_snr_mean(self, kind: str) -> tuple[np.ndarray, np.ndarray]:
        """SNR grid and the mean over instances of ``mean_csqi`` at each SNR."""
        rows = [r for r in self.rows if r.noise_type == kind]
        snrs = np.array(sorted({r.snr_db for r in rows}))
        means = np.array([np.mean([r.mean_csqi for r in rows if r.snr_db == s]) for s in snrs])
        return snrs, means

    def spearman_by_kind(self) -> dict[str, float]:
        return {k: spearman(*self.per_snr_mean(k)) for k in self.kinds()}


def cell_seed(seed: int, kind: str, snr_index: int, instance: int) -> int:
    """64-bit noise seed for one sweep cell, independent of evaluation order."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(kind_code(kind), int(snr_index), int(instance)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_spec(kind) -> NoiseSpec:
    return kind if isinstance(kind, NoiseSpec) else NoiseSpec(str(kind))


def run_cell(
    clean: SignalRecord,
    template: Template,
    spec: NoiseSpec,
    snr_index: int,
    snr_db: float,
    instance: int,
    seed: int,
    ma_window: int | None = None,
) -> SweepRow:
    """Corrupt ``clean`` once and score it."""
    noise = gen_noise(spec.with_seed(cell_seed(seed, spec.kind, snr_index, instance)), len(clean), clean.fs)
    mixed = mix_at_snr(clean, noise, snr_db)
    series = process_record(mixed, template, ma_window)
    return SweepRow(spec.kind, float(snr_db), int(instance), float(np.mean(series.csqi)), float(np.median(series.csqi)))


def sweep(
    clean: SignalRecord,
    template: Template,
    kinds: Iterable = SYNTHETIC_KINDS,
    snr_grid: Sequence[float] = DEFAULT_SNR_GRID,
    n_instances: int = DEFAULT_INSTANCES,
    seed: int = 1,
    ma_window: int | None = None,
) -> SweepResult:
    """Score ``clean`` corrupted by every (kind, SNR, instance) combination.

    ``kinds`` holds kind names or :class:`NoiseSpec` objects (whose params are
    kept and whose seed is replaced per cell). Rows come out kind-major, then
    by ascending SNR, then by instance.
    """
    specs = [_as_spec(k) for k in kinds]
    grid = [float(s) for s in snr_grid]
    if not specs:
        raise InvalidConfig("no noise kinds given")
    if not grid:
        raise InvalidConfig("empty SNR grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidConfig("SNR grid must be strictly increasing")
    if n_instances < 1:
        raise InvalidConfig("n_instances must be >= 1")
    rows = []
    for spec in specs:
        for si, snr in enumerate(grid):
            for inst in range(n_instances):
                try:
                    rows.append(run_cell(clean, template, spec, si, snr, inst, seed, ma_window))
                except CsqiError as exc:
                    coords = f"[cell kind={spec.kind} snr_db={snr:g} instance={inst}]"
                    exc.args = (f"{coords} {exc.args[0] if exc.args else ''}",) + exc.args[1:]
                    exc.cell = (spec.kind, snr, inst)
                    raise
    meta = {
        "M": template.m,
        "ma_window": template.length if ma_window is None else ma_window,
        "seed": seed,
        "record": f"{len(clean)} samples at {clean.fs:g} Hz",
    }
    return SweepResult(rows, meta)


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInput("spearman needs two 1-D sequences of equal length")
    if x.shape[0] < 3:
        raise InvalidInput("spearman needs at least 3 points")
    rx = rankdata(x) - (x.shape[0] + 1) / 2
    ry = rankdata(y) - (x.shape[0] + 1) / 2
    denom = np.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    if denom == 0:
        raise InvalidInput("spearman is undefined for a constant sequence")
    return float(np.clip(np.dot(rx, ry) / denom, -1.0, 1.0))


@dataclass(frozen=True)
class RegionStats:
    label: str
    mean: float
    median: float
    min: float
    max: float


def region_report(series: SqiSeries, regions: Sequence[tuple[str, MixRegion]]) -> list[RegionStats]:
    """Order statistics of smoothed cSQI per region (series index space)."""
    n = len(series)
    spans = []
    for label, region in regions:
        lo, hi = region.bounds(n)
        spans.append((lo, hi, label))
    ordered = sorted(spans)
    for (a_lo, a_hi, a), (b_lo, _, b) in zip(ordered, ordered[1:]):
        if b_lo < a_hi:
            raise InvalidRegion(f"regions {a!r} and {b!r} overlap")
    out = []
    for lo, hi, label in spans:
        v = series.csqi[lo:hi]
        out.append(RegionStats(label, float(v.mean()), float(np.median(v)), float(v.min()), float(v.max())))
    return out


@dataclass(frozen=True)
class ContrastResult:
    kind: str
    snr_db: float
    clean_mean: float
    noisy_mean: float
    regions: list[RegionStats]

    @property
    def ratio(self) -> float:
        return self.noisy_mean / self.clean_mean


def region_contrast(
    record: SignalRecord,
    template: Template,
    kind,
    snr_db: float = -10.0,
    seed: int = 1,
    ma_window: int | None = None,
) -> ContrastResult:
    """Corrupt the middle third of ``record`` and compare cSQI inside and outside it."""
    spec = _as_spec(kind)
    n = len(record)
    a, b = n // 3, 2 * n // 3
    noise = gen_noise(spec.with_seed(cell_seed(seed, spec.kind, 0, 0)), b - a, record.fs)
    mixed = mix_at_snr(record, noise, snr_db, MixRegion(a, b))
    series = process_record(mixed, template, ma_window)
    # series index k scores the window centered at record index k + M
    m = template.m
    k_a, k_b = a - m, b - m
    regions = [
        ("clean_before", MixRegion(0, k_a)),
        ("corrupted", MixRegion(k_a, k_b)),
        ("clean_after", MixRegion(k_b, len(series))),
    ]
    stats = region_report(series, regions)
    clean = np.concatenate([series.csqi[:k_a], series.csqi[k_b:]])
    return ContrastResult(spec.kind, float(snr_db), float(clean.mean()), stats[1].mean, stats)


# ---------------------------------------------------------------- op counts

PHASES = ("template_training", "init", "per_sample")


@dataclass(frozen=True)
class OpCounts:
    phase: str
    multiplies: int
    additions: int
    M: int
    N: int | None = None
    per_step: tuple[tuple[int, int], ...] = ()


def reference_counts(phase: str, M: int, N: int = 10) -> tuple[int, int]:
    """Reference operation counts (multiplies, additions) from the published tables."""
    if phase == "template_training":
        return N * (8 * M * M + 6 * M + 1), N * (8 * M * M + 4 * M + 1)
    if phase == "init":
        return 8 * M * M + 8 * M + 3, 8 * M * M + 6 * M + 1
    if phase == "per_sample":
        return 10 * M + 3, 12 * M + 3
    raise InvalidConfig(f"unknown phase {phase!r}")


def _synthetic(L: int, rng: np.random.Generator) -> np.ndarray:
    # a single smooth bump plus texture: a plausible template-like cycle
    j = np.arange(L) - (L - 1) / 2
    return np.exp(-0.5 * (j / max(L / 12, 1.0)) ** 2) + 0.05 * rng.standard_normal(L)


def count_ops(phase: str, M: int, N: int = 10, steps: int = 128, seed: int = 0) -> OpCounts:
    """Exact arithmetic tallies for one phase at template half-length ``M``.

    The production kernels run un-jitted on counting scalars, so the counts
    are of the code that actually executes. ``per_sample`` runs ``steps``
    consecutive updates and requires every step to cost the same.
    """
    if not INSTRUMENTATION_ENABLED:
        raise InstrumentationDisabled("operation counting disabled (CSQI_DISABLE_OPCOUNT is set)")
    if phase not in PHASES:
        raise InvalidConfig(f"unknown phase {phase!r}; expected one of {PHASES}")
    if M < 1:
        raise InvalidConfig("M must be >= 1")
    L = 2 * M + 1
    rng = np.random.default_rng(seed)
    k = _kernels.PLAIN
    ctr = OpCounter()

    if phase == "template_training":
        if N < 2:
            raise InvalidConfig("N must be >= 2")
        cycle = _synthetic(L, rng)
        windows = [counting_array(cycle, ctr) for _ in range(N)]
        ctr.reset()
        _, accepted, _ = align_and_average(windows, 0.5, 0.25 * L, kernels=k)
        if accepted != N:
            raise RuntimeError(f"synthetic training input accepted only {accepted}/{N} windows")
        return OpCounts(phase, ctr.multiplies, ctr.additions, M, N)

    t = counting_array(_synthetic(L, rng), ctr)
    buf = counting_array(_synthetic(L, rng) + 0.3 * rng.standard_normal(L), ctr)
    corr, d, w = scratch(L), scratch(L), scratch(L)
    eps = 1e-12
    ctr.reset()
    k.circ_xcorr(buf, t, corr)
    q = k.best_lag_index(corr, 0)
    k.score(buf, 0, t, q - M, d, eps)
    if phase == "init":
        return OpCounts(phase, ctr.multiplies, ctr.additions, M)

    stream = counting_array(rng.standard_normal(steps), ctr)
    head, off = 0, 0
    per_step = []
    for x in stream:
        ctr.reset()
        _, head, off = k.step(buf, head, corr, off, t, x, False, d, w, eps)
        per_step.append(ctr.snapshot())
    if len(set(per_step)) != 1:
        raise RuntimeError(f"per-sample cost varies with stream position: {sorted(set(per_step))}")
    mults, adds = per_step[0]
    return OpCounts(phase, mults, adds, M, per_step=tuple(per_step))
