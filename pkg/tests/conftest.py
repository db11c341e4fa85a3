import numpy as np
import pytest
from hypothesis import settings

from csqi import SignalRecord, TrainConfig, build_template, synth_ecg

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ecg60():
    record, centers = synth_ecg(60, fs=125.0, hr_bpm=75.0, seed=1)
    return record, centers


@pytest.fixture(scope="session")
def ecg_template(ecg60):
    record, _ = ecg60
    return build_template(record, TrainConfig(window_stride="period"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_record(rng, n, fs=125.0):
    return SignalRecord(rng.standard_normal(n), fs)
