"""Command-line entry point.

Exit codes: 0 success, 1 usage or I/O error, 2 template training failure,
3 data/config mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import errors, io
from .engine import process_record
from .evaluation import DEFAULT_SNR_GRID, PHASES, count_ops, reference_counts, spearman, sweep
from .noise import SYNTHETIC_KINDS, NoiseSpec, synth_ecg
from .template import TrainConfig, build_template

EXIT_OK, EXIT_USAGE, EXIT_TRAINING, EXIT_MISMATCH = 0, 1, 2, 3

log = logging.getLogger("csqi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _kind_list(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    for k in kinds:
        if k not in SYNTHETIC_KINDS:
            raise argparse.ArgumentTypeError(f"unknown noise kind {k!r}; choose from {','.join(SYNTHETIC_KINDS)}")
    return kinds


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _odd_int(text: str) -> int:
    v = int(text)
    if v < 1 or v % 2 == 0:
        raise argparse.ArgumentTypeError(f"must be a positive odd integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=1, help="base seed for all randomness (default 1)")
    with_fs = argparse.ArgumentParser(add_help=False, parents=[common])
    with_fs.add_argument("--fs", type=float, default=None, help="sample-rate override in Hz")

    p = _Parser(prog="csqi", description="Curve-based signal quality indicator toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", parents=[with_fs], help="train a template from a clean record")
    t.add_argument("--input", required=True)
    t.add_argument("--output", required=True)
    t.add_argument("--cycles", type=int, default=10)
    t.add_argument("--fraction", type=float, default=0.7)
    t.add_argument("--fiducials", help="file of fiducial sample indices (bypasses peak detection)")
    t.add_argument("--stride", choices=("template_length", "period"), default="template_length")

    r = sub.add_parser("run", parents=[with_fs], help="score a record against a template")
    r.add_argument("--input", required=True)
    r.add_argument("--template", required=True)
    r.add_argument("--output", required=True)
    r.add_argument("--ma", type=_odd_int, default=None, help="moving-average length (default 2M+1)")
    r.add_argument("--m", type=int, default=None, help="expected template half-length M")

    s = sub.add_parser("sweep", parents=[with_fs], help="SNR sweep over noise kinds")
    s.add_argument("--input", required=True)
    s.add_argument("--template", required=True)
    s.add_argument("--kinds", type=_kind_list, default=list(SYNTHETIC_KINDS))
    s.add_argument("--snr", type=_float_list, default=list(DEFAULT_SNR_GRID), help="e.g. --snr=-10,0,10")
    s.add_argument("--instances", type=_positive_int, default=10)
    s.add_argument("--output", required=True)
    s.add_argument("--ma", type=_odd_int, default=None)
    s.add_argument("--start", type=int, default=0, help="first sample of the evaluation span")

    y = sub.add_parser("synth", parents=[common], help="write a synthetic ECG record")
    y.add_argument("--beats", type=_positive_int, required=True)
    y.add_argument("--hr", type=float, default=75.0)
    y.add_argument("--fs", type=float, default=125.0)
    y.add_argument("--output", required=True)
    y.add_argument("--truth", help="also write ground-truth beat centers here")

    b = sub.add_parser("bench", parents=[common], help="operation counts per phase")
    b.add_argument("--m", type=_int_list, default=[35])
    b.add_argument("--n", type=int, default=10)
    return p


def _read_record(path, fs):
    return io.read_signal_csv(path, fs_override=fs)


def cmd_train(a) -> int:
    record = _read_record(a.input, a.fs)
    cfg = TrainConfig(n_cycles=a.cycles, period_fraction=a.fraction, window_stride=a.stride)
    fid = io.read_indices(a.fiducials) if a.fiducials else None
    tm = build_template(record, cfg, fiducials=fid)
    io.write_template(a.output, tm)
    print(f"M={tm.m} length={tm.length} accepted={tm.accepted_count} period={tm.period}")
    return EXIT_OK


def _check_template(tm, record, m=None):
    if m is not None and m != tm.m:
        raise errors.ConfigMismatch(f"template has M={tm.m}, --m asks for {m}")
    if record.fs != tm.fs:
        raise errors.ConfigMismatch(f"record sampled at {record.fs:g} Hz, template trained at {tm.fs:g} Hz")


def cmd_run(a) -> int:
    tm = io.read_template(a.template)
    record = _read_record(a.input, a.fs)
    _check_template(tm, record, a.m)
    series = process_record(record, tm, a.ma)
    io.write_series_csv(a.output, series)
    print(
        f"scored={len(series)} mean_csqi={io.fmt(float(np.mean(series.csqi)))} "
        f"median_csqi={io.fmt(float(np.median(series.csqi)))}"
    )
    return EXIT_OK


def cmd_sweep(a) -> int:
    tm = io.read_template(a.template)
    record = _read_record(a.input, a.fs)
    _check_template(tm, record)
    if not 0 <= a.start < len(record):
        raise UsageError(f"--start {a.start} outside record of length {len(record)}")
    clean = record.slice(a.start)
    result = sweep(clean, tm, [NoiseSpec(k) for k in a.kinds], a.snr, a.instances, a.seed, a.ma)
    io.write_results_csv(a.output, result)
    print(f"rows={len(result.rows)}")
    for kind in result.kinds():
        snrs, means = result.per_snr_mean(kind)
        if len(snrs) >= 3:
            print(f"spearman {kind} {spearman(snrs, means):.6f}")
        else:
            print(f"spearman {kind} n/a")
    return EXIT_OK


def cmd_synth(a) -> int:
    record, centers = synth_ecg(a.beats, a.fs, a.hr, a.seed)
    io.write_signal_csv(a.output, record)
    if a.truth:
        io.write_indices(a.truth, centers)
    print(f"samples={len(record)} beats={len(centers)} fs={a.fs:g}")
    return EXIT_OK


def cmd_bench(a) -> int:
    if any(m < 1 for m in a.m) or a.n < 2:
        raise UsageError("--m values must be >= 1 and --n >= 2")
    print("phase M N mults adds ref_mults ref_adds")
    per_sample = {}
    for m in a.m:
        for phase in PHASES:
            oc = count_ops(phase, m, a.n)
            pm, pa = reference_counts(phase, m, a.n)
            n = a.n if phase == "template_training" else "-"
            print(f"{phase} {m} {n} {oc.multiplies} {oc.additions} {pm} {pa}")
            if phase == "per_sample":
                per_sample[m] = oc.multiplies
    ms = sorted(per_sample)
    for lo, hi in zip(ms, ms[1:]):
        print(f"per_sample multiply ratio M={hi}/M={lo}: {per_sample[hi] / per_sample[lo]:.4f}")
    return EXIT_OK


_COMMANDS = {"train": cmd_train, "run": cmd_run, "sweep": cmd_sweep, "synth": cmd_synth, "bench": cmd_bench}

_TRAINING_ERRORS = (
    errors.TemplateTrainingFailed,
    errors.NoFiducials,
    errors.InsufficientFiducials,
    errors.PeriodTooShort,
)
_USAGE_ERRORS = (
    UsageError,
    errors.InvalidConfig,
    errors.IoError,
    errors.ParseError,
    errors.MissingSampleRate,
    errors.UnsupportedVersion,
    errors.CorruptTemplate,
)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _TRAINING_ERRORS as exc:
        msg = str(exc)
        if "training failed" not in msg:
            msg = f"template training failed: {msg}"
        print(f"csqi {args.command}: {msg}", file=sys.stderr)
        return EXIT_TRAINING
    except _USAGE_ERRORS as exc:
        print(f"csqi {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except errors.CsqiError as exc:
        print(f"csqi {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
