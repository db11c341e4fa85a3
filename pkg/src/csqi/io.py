"""Text file formats: signal CSV, template files, series and sweep results.

Floats are written with 17 significant digits, enough to round-trip any
64-bit value exactly. Writers are byte-deterministic.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

from .core import SignalRecord
from .errors import CorruptTemplate, IoError, MissingSampleRate, ParseError, UnsupportedVersion
from .template import Template

TEMPLATE_MAGIC = "csqi-template v1"
SERIES_HEADER = "index,raw_c,csqi"
RESULTS_HEADER = "noise_type,snr_db,instance,mean_csqi,median_csqi"


def fmt(x: float) -> str:
    return "%.17g" % x


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_signal_header(path) -> tuple[float | None, list[str]]:
    """``(fs, comments)`` from the leading ``#`` lines of a signal CSV."""
    fs = None
    comments = []
    for line in _read_lines(path):
        s = line.strip()
        if not s.startswith("#"):
            if s:
                break
            continue
        body = s[1:].strip()
        comments.append(body)
        if body.startswith("fs="):
            try:
                fs = float(body[3:])
            except ValueError:
                raise ParseError(f"bad sample rate comment {s!r}") from None
    return fs, comments


def read_signal_csv(path, fs_override: float | None = None) -> SignalRecord:
    """Read one sample per line; ``#`` lines are comments (``# fs=125``)."""
    lines = _read_lines(path)
    fs_header, _ = read_signal_header(path)
    values = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        # tolerate a trailing comma-separated column list by taking the first field
        field = s.split(",")[0].strip()
        try:
            v = float(field)
        except ValueError:
            raise ParseError(f"cannot parse {s!r} as a number", line=lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"non-finite sample {s!r}", line=lineno)
        values.append(v)
    if not values:
        raise ParseError(f"{path}: no samples")
    fs = fs_override if fs_override is not None else fs_header
    if fs is None:
        raise MissingSampleRate(f"{path} has no '# fs=' header and no sample rate was given")
    return SignalRecord(np.array(values), fs)


def write_signal_csv(path, record: SignalRecord) -> None:
    body = "\n".join(fmt(v) for v in record.samples)
    _write_text(path, f"# fs={fmt(record.fs)}\n{body}\n")


def read_indices(path) -> np.ndarray:
    """Integer indices, one per line, ``#`` comments allowed."""
    out = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(int(s.split(",")[0]))
        except ValueError:
            raise ParseError(f"cannot parse {s!r} as an integer index", line=lineno) from None
    return np.asarray(out, dtype=np.int64)


def write_indices(path, indices: Iterable[int]) -> None:
    _write_text(path, "".join(f"{int(i)}\n" for i in indices))


def write_template(path, t: Template) -> None:
    lines = [TEMPLATE_MAGIC, f"fs {fmt(t.fs)}", f"M {t.m}", f"accepted {t.accepted_count}"]
    lines += [fmt(c) for c in t.coeffs]
    _write_text(path, "\n".join(lines) + "\n")


def read_template(path) -> Template:
    lines = [ln.strip() for ln in _read_lines(path)]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or lines[0] != TEMPLATE_MAGIC:
        raise UnsupportedVersion(f"{path}: expected {TEMPLATE_MAGIC!r}, got {lines[0] if lines else ''!r}")
    if len(lines) < 4:
        raise CorruptTemplate(f"{path}: truncated header")
    header = {}
    for lineno, (line, key) in enumerate(zip(lines[1:4], ("fs", "M", "accepted")), start=2):
        parts = line.split()
        if len(parts) != 2 or parts[0] != key:
            raise CorruptTemplate(f"{path} line {lineno}: expected '{key} <value>', got {line!r}")
        header[key] = parts[1]
    try:
        fs = float(header["fs"])
        m = int(header["M"])
        accepted = int(header["accepted"])
        coeffs = np.array([float(c) for c in lines[4:]])
    except ValueError as exc:
        raise CorruptTemplate(f"{path}: {exc}") from None
    if m < 1 or coeffs.shape[0] != 2 * m + 1:
        raise CorruptTemplate(f"{path}: M={m} needs {2 * m + 1} coefficients, found {coeffs.shape[0]}")
    return Template(coeffs=coeffs, m=m, fs=fs, accepted_count=accepted)


def series_csv_text(s) -> str:
    rows = [SERIES_HEADER]
    rows += [f"{i},{fmt(r)},{fmt(c)}" for i, r, c in zip(s.indices, s.raw_c, s.csqi)]
    return "\n".join(rows) + "\n"


def write_series_csv(path, s) -> None:
    _write_text(path, series_csv_text(s))


def results_csv_text(r) -> str:
    rows = [RESULTS_HEADER]
    rows += [f"{row.noise_type},{fmt(row.snr_db)},{row.instance},{fmt(row.mean_csqi)},{fmt(row.median_csqi)}" for row in r.rows]
    return "\n".join(rows) + "\n"


def write_results_csv(path, r) -> None:
    _write_text(path, results_csv_text(r))

