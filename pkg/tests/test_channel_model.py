import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dfrc_outage.channel_model import (
    ChannelSet, UserSpec, achievable_rate, db_to_linear, linear_to_db, make_rng, realized_sinr,
    sample_csi_error, sample_nominal_channels,
)


def test_nominal_channels_reproducible():
    a = sample_nominal_channels(make_rng(7, 3), 3, 5)
    b = sample_nominal_channels(make_rng(7, 3), 3, 5)
    c = sample_nominal_channels(make_rng(7, 4), 3, 5)
    assert a.shape == (3, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_nominal_channel_moments():
    h = sample_nominal_channels(make_rng(1), 1, 100_000).ravel()
    assert np.var(h) == pytest.approx(1.0, rel=0.01)
    assert np.var(h.real) == pytest.approx(0.5, rel=0.02)
    assert abs(np.mean(h)) < 0.02


@pytest.mark.parametrize("K, N", [(0, 3), (2, 0)])
def test_nominal_channels_reject_empty(K, N):
    with pytest.raises(ValueError):
        sample_nominal_channels(make_rng(0), K, N)


def test_csi_error_zero_sigma():
    e = sample_csi_error(make_rng(0), 0.0, 6)
    assert np.array_equal(e, np.zeros(6))


def test_csi_error_moments_and_independence():
    e = sample_csi_error(make_rng(2), 0.1, 2, size=100_000)
    assert np.mean(np.abs(e[:, 0]) ** 2) == pytest.approx(0.01, rel=0.02)
    assert np.mean(np.abs(e[:, 1]) ** 2) == pytest.approx(0.01, rel=0.02)
    cross = np.mean(e[:, 0] * np.conj(e[:, 1]))
    # each product has E|z|^2 = 1e-4, so the sample mean has standard deviation 1e-2 / sqrt(n)
    assert abs(cross) < 3 * 1e-2 / np.sqrt(100_000)


def test_matched_filter_sinr(rng):
    h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    w = h.conj() / np.linalg.norm(h)
    assert realized_sinr([w], h, 0, 0.5) == pytest.approx(np.linalg.norm(h) ** 2 / 0.5)


def test_zero_interferer_reduces_to_single_user(rng):
    h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    w1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    two = realized_sinr([w1, np.zeros(3)], h, 0, 0.3)
    one = realized_sinr([w1], h, 0, 0.3)
    assert two == pytest.approx(one, rel=1e-14)


def test_sinr_matches_scalar_products(rng):
    K, N = 3, 4
    ws = [rng.standard_normal(N) + 1j * rng.standard_normal(N) for _ in range(K)]
    h = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    for k in range(K):
        gains = [abs(sum(h[n] * ws[l][n] for n in range(N))) ** 2 for l in range(K)]
        expected = gains[k] / (sum(gains) - gains[k] + 0.7)
        assert realized_sinr(ws, h, k, 0.7) == pytest.approx(expected, rel=1e-12)
        mats = [np.outer(w, w.conj()) for w in ws]
        assert realized_sinr(mats, h, k, 0.7) == pytest.approx(expected, rel=1e-12)


def test_sinr_batch_matches_loop(rng):
    ws = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(2)]
    hs = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    batch = realized_sinr(ws, hs, 1, 1.0)
    np.testing.assert_allclose(batch, [realized_sinr(ws, h, 1, 1.0) for h in hs], rtol=1e-14)


def test_sinr_errors(rng):
    w = np.ones(2)
    with pytest.raises(IndexError):
        realized_sinr([w], np.ones(2), 1, 1.0)
    with pytest.raises(ValueError):
        realized_sinr([w], np.ones(2), 0, 0.0)


@settings(max_examples=50, deadline=None)
@given(phase=st.floats(0, 2 * np.pi), seed=st.integers(0, 2**32 - 1))
def test_sinr_phase_invariance(phase, seed):
    rng = make_rng(seed)
    ws = [rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(2)]
    h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert realized_sinr(ws, h * np.exp(1j * phase), 0, 1.0) == pytest.approx(
        realized_sinr(ws, h, 0, 1.0), rel=1e-10)


def test_rates():
    assert achievable_rate(0.0) == 0.0
    assert achievable_rate(1.0) == 1.0
    # two users at 1 dB: 2 log2(1 + 10^0.1)
    assert 2 * achievable_rate(db_to_linear(1.0)) == pytest.approx(2.3513, abs=1e-4)
    x = np.linspace(0, 50, 101)
    assert np.all(np.diff(achievable_rate(x)) > 0)
    with pytest.raises(ValueError):
        achievable_rate(-0.1)


def test_db_round_trip():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(db_to_linear(3.8)) == pytest.approx(3.8)


def test_user_and_channel_set_validation():
    with pytest.raises(ValueError):
        UserSpec(0.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        UserSpec(1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        UserSpec(1.0, 0.1, -0.1)
    assert UserSpec(1.0, 0.1, 0.1).epsilon == pytest.approx(2.302585092994046)
    user = UserSpec(1.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        ChannelSet(np.ones((2, 3)), [user], 1.0)
    with pytest.raises(ValueError):
        ChannelSet(np.ones((1, 3)), [user], 0.0)
