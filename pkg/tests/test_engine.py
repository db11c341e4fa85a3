import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from csqi import SignalRecord
from csqi.core import circular_shift, mean_removed_variance
from csqi.engine import (
    DEFAULT_EPS,
    EngineState,
    TrailingAverage,
    csqi_value,
    init,
    process_record,
    smooth,
    step,
)
from csqi.errors import InsufficientData, InvalidConfig, InvalidSample, LengthMismatch, NotPrimed
from csqi.template import Template

C_MAX = 1.0 / DEFAULT_EPS


def random_template(m, seed=0):
    rng = np.random.default_rng(seed)
    return Template(rng.standard_normal(2 * m + 1), m, 125.0, 1)


def naive_c(window, t: Template):
    """From-scratch score: every lag, plain double loop for the correlation."""
    L = t.length
    m = t.m
    best_lag, best = 0, -np.inf
    order = [0] + [s * k for k in range(1, m + 1) for s in (-1, 1)]
    corr = {}
    for lag in range(-m, m + 1):
        corr[lag] = sum(window[j] * t.coeffs[(j + lag) % L] for j in range(L))
    for lag in order:
        if corr[lag] > best:
            best_lag, best = lag, corr[lag]
    d = window - np.roll(t.coeffs, -best_lag)
    v = np.mean((d - d.mean()) ** 2)
    return 1.0 / max(v, DEFAULT_EPS)


class TestInit:
    def test_exact_match(self):
        t = random_template(5)
        _, c0 = init(t, t.coeffs)
        assert c0 == C_MAX

    def test_offset(self):
        t = random_template(5)
        _, c0 = init(t, t.coeffs + 5)
        assert c0 == C_MAX

    def test_rotation(self):
        t = random_template(10)
        _, c0 = init(t, circular_shift(t.coeffs, 7))
        assert c0 == C_MAX

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            init(random_template(3), np.zeros(5))

    def test_bad_window(self):
        with pytest.raises(InvalidSample):
            init(random_template(3), [0, 1, np.nan, 0, 0, 0, 0])


class TestStep:
    def test_tiled_template(self):
        t = random_template(6)
        stream = np.tile(t.coeffs, 8)
        state, c0 = init(t, stream[: t.length])
        out = [c0] + [step(state, x) for x in stream[t.length :]]
        assert all(c == C_MAX for c in out)

    def test_zero_stream(self):
        t = random_template(4)
        state, c0 = init(t, np.zeros(t.length))
        expected = 1.0 / mean_removed_variance(t.coeffs)
        assert c0 == pytest.approx(expected, rel=1e-12)
        for _ in range(20):
            assert step(state, 0.0) == pytest.approx(expected, rel=1e-12)
        assert np.all(state.corr == 0)

    @pytest.mark.parametrize("m", [3, 8])
    def test_matches_naive_oracle(self, m):
        t = random_template(m, seed=m)
        x = np.random.default_rng(100 + m).standard_normal(600)
        L = t.length
        state, c0 = init(t, x[:L], refresh_interval=37)
        got = [c0] + [step(state, v) for v in x[L:]]
        want = [naive_c(x[i : i + L], t) for i in range(len(x) - L + 1)]
        np.testing.assert_allclose(got, want, rtol=1e-9)

    def test_corr_tracks_direct(self):
        t = random_template(8)
        x = np.random.default_rng(4).standard_normal(300)
        L = t.length
        state, _ = init(t, x[:L], refresh_interval=10_000)
        state.run(x[L:])
        w = x[-L:]
        np.testing.assert_array_equal(state.window, w)
        direct = np.array([np.dot(w, np.roll(t.coeffs, -lag)) for lag in range(-8, 9)])
        np.testing.assert_allclose(state.corr, direct, rtol=1e-9, atol=1e-12)

    def test_block_and_single_agree(self):
        t = random_template(5)
        x = np.random.default_rng(6).standard_normal(200)
        a, _ = init(t, x[:11], refresh_interval=13)
        b, _ = init(t, x[:11], refresh_interval=13)
        singles = np.array([a.step(v) for v in x[11:]])
        block = b.run(x[11:])
        np.testing.assert_array_equal(singles, block)

    def test_not_primed(self):
        with pytest.raises(NotPrimed):
            EngineState(random_template(3)).step(1.0)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_invalid_sample(self, bad):
        state, _ = init(random_template(3), np.arange(7.0))
        with pytest.raises(InvalidSample):
            state.step(bad)

    def test_config_errors(self):
        with pytest.raises(InvalidConfig):
            EngineState(random_template(3), refresh_interval=0)
        with pytest.raises(InvalidConfig):
            EngineState(random_template(3), eps=0.0)

    def test_latency(self):
        # after priming with s[0..L-1], consuming s[L] emits c for center M + 1
        t = random_template(4)
        x = np.random.default_rng(2).standard_normal(40)
        L, m = t.length, t.m
        state, _ = init(t, x[:L])
        for i in range(L, len(x)):
            c = state.step(x[i])
            center = i - m
            assert c == pytest.approx(naive_c(x[center - m : center + m + 1], t), rel=1e-9)


class TestCsqiValue:
    def test_shifted_template(self):
        t = random_template(5)
        assert csqi_value(circular_shift(t.coeffs, 3), t, 3) == C_MAX

    def test_reciprocal(self):
        t = random_template(1)
        a = np.sqrt(0.015)
        d = np.array([a, 0.0, -a])
        assert mean_removed_variance(d) == pytest.approx(0.01, rel=1e-14)
        assert csqi_value(t.coeffs + d, t, 0) == pytest.approx(100.0, rel=1e-12)

    def test_monte_carlo(self):
        t = random_template(35, seed=11)
        rng = np.random.default_rng(2024)
        cs = [csqi_value(t.coeffs + 0.1 * rng.standard_normal(71), t, 0) for _ in range(1000)]
        assert abs(np.mean(cs) - 100.0) <= 10.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            csqi_value(np.zeros(5), random_template(3), 0)


class TestSmooth:
    def test_constant(self):
        for w in (1, 3, 5, 7):
            assert smooth([7, 7, 7, 7], w).tolist() == [7, 7, 7, 7]

    def test_impulse(self):
        assert smooth([0, 0, 9, 0, 0], 3).tolist() == [0, 3, 3, 3, 0]

    def test_truncated_edges(self):
        np.testing.assert_allclose(smooth([1.0, 2.0, 3.0, 4.0], 3), [1.5, 2.0, 3.0, 3.5])

    def test_trailing(self):
        np.testing.assert_allclose(smooth([3.0, 6.0, 9.0, 0.0], 3, mode="trailing"), [3.0, 4.5, 6.0, 5.0])

    @pytest.mark.parametrize("w", [0, 2, -1, 4])
    def test_bad_window(self, w):
        with pytest.raises(InvalidConfig):
            smooth([1.0, 2.0], w)

    @given(
        arrays(np.float64, st.integers(1, 80), elements=st.floats(1e-3, 1e12)),
        st.integers(0, 20).map(lambda k: 2 * k + 1),
    )
    def test_within_range(self, c, w):
        for mode in ("centered", "trailing"):
            out = smooth(c, w, mode)
            assert out.shape == c.shape
            assert np.all(out >= c.min()) and np.all(out <= c.max())

    @given(arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 100)), st.integers(0, 6).map(lambda k: 2 * k + 1))
    def test_trailing_matches_streaming(self, c, w):
        ta = TrailingAverage(w)
        streamed = np.array([ta.push(v) for v in c])
        np.testing.assert_allclose(streamed, smooth(c, w, "trailing"), rtol=1e-12, atol=1e-12)


class TestProcessRecord:
    def test_tiled(self):
        t = random_template(5)
        s = process_record(SignalRecord(np.tile(t.coeffs, 5), 125), t, ma_window=7)
        assert np.all(s.csqi == C_MAX) and np.all(s.raw_c == C_MAX)

    def test_exact_length(self):
        t = random_template(5)
        s = process_record(SignalRecord(np.arange(11.0) ** 2, 125), t)
        assert len(s) == 1 and s.first_scored_index == 5 and s.indices.tolist() == [5]

    def test_too_short(self):
        t = random_template(5)
        with pytest.raises(InsufficientData):
            process_record(SignalRecord(np.arange(10.0), 125), t)

    def test_matches_manual_drive(self):
        t = random_template(6)
        x = np.random.default_rng(1).standard_normal(200)
        s = process_record(SignalRecord(x, 125), t, ma_window=5)
        state, c0 = init(t, x[:13])
        manual = np.array([c0] + [step(state, v) for v in x[13:]])
        np.testing.assert_array_equal(s.raw_c, manual)
        np.testing.assert_array_equal(s.csqi, smooth(manual, 5))
        assert s.ma_window == 5

    def test_default_ma_window(self):
        t = random_template(6)
        s = process_record(SignalRecord(np.random.default_rng(0).standard_normal(100), 125), t)
        assert s.ma_window == 13


class TestProperties:
    @given(st.integers(1, 12), st.integers(-40, 40), st.integers(0, 2**32 - 1))
    def test_rotation_invariance(self, m, r, seed):
        rng = np.random.default_rng(seed)
        t = Template(rng.standard_normal(2 * m + 1), m, 125.0, 1)
        w = rng.standard_normal(2 * m + 1)
        _, a = init(t, w)
        _, b = init(t, circular_shift(w, r))
        assert b == pytest.approx(a, rel=1e-9)

    @given(
        st.integers(1, 8),
        arrays(np.float64, st.integers(20, 120), elements=st.floats(-1e6, 1e6)),
        st.integers(1, 50),
    )
    def test_boundedness(self, m, x, refresh):
        t = Template(np.sin(np.arange(2 * m + 1.0)) + np.arange(2 * m + 1.0) * 0.1, m, 125.0, 1)
        if len(x) < t.length:
            return
        s = process_record(SignalRecord(x, 125), t, refresh_interval=refresh)
        for v in (s.raw_c, s.csqi):
            assert np.all(np.isfinite(v)) and np.all(v > 0) and np.all(v <= C_MAX)

    @given(st.sampled_from([3, 8]), st.integers(0, 2**32 - 1), st.integers(1, 64))
    def test_oracle_equivalence_random(self, m, seed, refresh):
        rng = np.random.default_rng(seed)
        t = Template(rng.standard_normal(2 * m + 1), m, 125.0, 1)
        x = rng.standard_normal(150) * rng.uniform(0.1, 10)
        s = process_record(SignalRecord(x, 125), t, refresh_interval=refresh)
        L = t.length
        want = [naive_c(x[i : i + L], t) for i in range(len(x) - L + 1)]
        np.testing.assert_allclose(s.raw_c, want, rtol=1e-9)
