import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from csqi import SignalRecord
from csqi.engine import process_record
from csqi.errors import CorruptTemplate, IoError, MissingSampleRate, ParseError, UnsupportedVersion
from csqi.evaluation import SweepResult, SweepRow
from csqi.io import (
    read_indices,
    read_signal_csv,
    read_signal_header,
    read_template,
    write_indices,
    write_results_csv,
    write_series_csv,
    write_signal_csv,
    write_template,
)
from csqi.template import Template

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_read_example(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("# fs=125\n0.0\n1.0\n0.0\n")
    rec = read_signal_csv(p)
    assert rec.samples.tolist() == [0, 1, 0] and rec.fs == 125
    assert read_signal_header(p) == (125.0, ["fs=125"])


def test_fs_override_and_missing(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("1\n2\n")
    with pytest.raises(MissingSampleRate):
        read_signal_csv(p)
    assert read_signal_csv(p, fs_override=250).fs == 250


def test_empty_and_bad(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(ParseError):
        read_signal_csv(p, 125)
    p.write_text("# fs=125\n1.0\nabc\n")
    with pytest.raises(ParseError) as ei:
        read_signal_csv(p)
    assert ei.value.line == 3
    with pytest.raises(IoError):
        read_signal_csv(tmp_path / "nope.csv")


@given(arrays(np.float64, st.integers(1, 200), elements=finite), st.floats(1e-3, 1e6))
def test_signal_round_trip(tmp_path_factory, x, fs):
    p = tmp_path_factory.mktemp("sig") / "s.csv"
    write_signal_csv(p, SignalRecord(x, fs))
    rec = read_signal_csv(p)
    assert np.array_equal(rec.samples, x) and rec.fs == fs


@given(arrays(np.float64, 9, elements=st.floats(-1e150, 1e150)), st.integers(1, 50))
def test_template_round_trip(tmp_path_factory, coeffs, accepted):
    if np.var(coeffs) <= 0:
        return
    t = Template(coeffs, 4, 125.0, accepted)
    p = tmp_path_factory.mktemp("tpl") / "t.txt"
    write_template(p, t)
    back = read_template(p)
    assert back == t
    assert back.coeffs.tobytes() == t.coeffs.tobytes()


def test_trained_template_round_trip(tmp_path, ecg_template):
    p = tmp_path / "t.txt"
    write_template(p, ecg_template)
    assert read_template(p) == ecg_template
    assert p.read_text().splitlines()[:4] == ["csqi-template v1", "fs 125", "M 35", "accepted 10"]


def test_corrupt_template(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("csqi-template v1\nfs 125\nM 35\naccepted 3\n" + "1.0\n" * 70)
    with pytest.raises(CorruptTemplate):
        read_template(p)
    p.write_text("csqi-template v1\nfs 125\nM x\naccepted 3\n1\n2\n3\n")
    with pytest.raises(CorruptTemplate):
        read_template(p)


def test_unsupported_version(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("csqi-template v2\nfs 125\nM 1\naccepted 1\n0\n1\n0\n")
    with pytest.raises(UnsupportedVersion):
        read_template(p)


def test_indices_round_trip(tmp_path):
    p = tmp_path / "i.csv"
    write_indices(p, [3, 103, 204])
    assert read_indices(p).tolist() == [3, 103, 204]


def test_results_csv(tmp_path):
    rows = [SweepRow("gaussian", float(s), i, 1.0 + i, 2.0) for s in range(-10, 35, 5) for i in range(50)]
    assert len(rows) == 450
    r = SweepResult(rows)
    p, q = tmp_path / "a.csv", tmp_path / "b.csv"
    write_results_csv(p, r)
    write_results_csv(q, r)
    lines = p.read_text().splitlines()
    assert len(lines) == 451 and lines[0] == "noise_type,snr_db,instance,mean_csqi,median_csqi"
    assert lines[1] == "gaussian,-10,0,1,2"
    assert p.read_bytes() == q.read_bytes()


def test_series_csv(tmp_path):
    t = Template(np.array([0.0, 1.0, 0.5]), 1, 125.0, 1)
    s = process_record(SignalRecord(np.array([0.1, 0.9, 0.4]), 125), t)
    p = tmp_path / "s.csv"
    write_series_csv(p, s)
    lines = p.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == "index,raw_c,csqi"
    idx, raw, sm = lines[1].split(",")
    assert idx == "1" and float(raw) == s.raw_c[0] and float(sm) == s.csqi[0]
