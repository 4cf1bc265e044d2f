import numpy as np
import pytest

from dfrc_outage.array_model import (
    AngularRegion, UlaConfig, as_covariances, bartlett_power, lobe_matrix, steering_vector,
)
from conftest import random_psd


@pytest.mark.parametrize("theta, expected", [
    (0.0, [1, 1, 1, 1]),
    (np.pi / 2, [1, -1, 1, -1]),
    (np.pi / 6, [1, 1j, -1, -1j]),
])
def test_steering_vector_examples(theta, expected):
    np.testing.assert_allclose(steering_vector(UlaConfig(4), theta), expected, atol=1e-12)


def test_steering_vector_norm_and_entries():
    cfg = UlaConfig(7, spacing=0.37)
    thetas = np.linspace(-np.pi / 2, np.pi / 2, 101)
    a = steering_vector(cfg, thetas)
    assert a.shape == (7, 101)
    np.testing.assert_allclose(np.abs(a), 1.0, rtol=1e-12)
    np.testing.assert_allclose(np.sum(np.abs(a) ** 2, axis=0), 7.0, rtol=1e-12)
    n = np.arange(7)[:, None]
    np.testing.assert_allclose(a, np.exp(2j * np.pi * 0.37 * n * np.sin(thetas)))


@pytest.mark.parametrize("theta", [1.6, -2.0, np.nan])
def test_steering_vector_rejects_out_of_range(theta):
    with pytest.raises(ValueError):
        steering_vector(UlaConfig(4), theta)


@pytest.mark.parametrize("n, d", [(0, 0.5), (3, 0.0), (2.5, 0.5)])
def test_ula_config_validation(n, d):
    with pytest.raises(ValueError):
        UlaConfig(n, d)


def test_bartlett_power_of_matched_beam():
    cfg = UlaConfig(6)
    theta0 = 0.4
    a = steering_vector(cfg, theta0)
    W = np.outer(a.conj(), a) / 6  # a* a^T / N
    assert bartlett_power(cfg, [W], theta0) == pytest.approx(6.0, rel=1e-12)


def test_bartlett_power_isotropic():
    cfg = UlaConfig(5)
    p = bartlett_power(cfg, [np.eye(5) / 5], np.linspace(-1.5, 1.5, 13))
    np.testing.assert_allclose(p, 1.0, rtol=1e-12)


def test_bartlett_power_matches_entrywise_sum(rng):
    cfg = UlaConfig(5, spacing=0.45)
    Ws = [random_psd(rng, 5, trace=0.5), random_psd(rng, 5, rank=1, trace=0.5)]
    for theta in np.linspace(-1.4, 1.4, 9):
        a = [np.exp(2j * np.pi * 0.45 * n * np.sin(theta)) for n in range(5)]
        brute = 0.0
        for W in Ws:
            for i in range(5):
                for j in range(5):
                    brute += a[i] * W[i, j] * np.conj(a[j])
        assert bartlett_power(cfg, Ws, theta) == pytest.approx(brute.real, rel=1e-12)


def test_bartlett_power_nonnegative_for_psd(rng):
    cfg = UlaConfig(8)
    Ws = [random_psd(rng, 8, rank=2) for _ in range(3)]
    p = bartlett_power(cfg, Ws, np.linspace(-np.pi / 2, np.pi / 2, 361))
    assert p.min() >= -1e-10 * 3 * 8


def test_bartlett_power_rejects_non_hermitian():
    W = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        bartlett_power(UlaConfig(2), [W], 0.1)


def test_vectors_and_covariances_agree(rng):
    w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    np.testing.assert_allclose(as_covariances([w])[0], np.outer(w, w.conj()))
    cfg = UlaConfig(4)
    assert bartlett_power(cfg, [w], 0.3) == pytest.approx(bartlett_power(cfg, [np.outer(w, w.conj())], 0.3))


def test_lobe_matrix_full_region_diagonal():
    M = lobe_matrix(UlaConfig(6), AngularRegion.full())
    np.testing.assert_allclose(np.diag(M).real, np.pi, rtol=1e-12)


def test_lobe_matrix_single_antenna_is_width():
    region = AngularRegion(((-0.3, 0.2), (0.5, 0.9)))
    M = lobe_matrix(UlaConfig(1), region)
    assert M.shape == (1, 1)
    assert M[0, 0].real == pytest.approx(0.9, rel=1e-12)


def test_lobe_matrix_matches_riemann_sum():
    cfg = UlaConfig(3)
    M = lobe_matrix(cfg, AngularRegion(((0.0, np.pi / 4),)))
    n = 1_000_000
    theta = (np.arange(n) + 0.5) * (np.pi / 4) / n   # midpoint rule
    a0 = 1.0
    a1 = np.exp(1j * np.pi * np.sin(theta))
    entry = np.sum(a0 * np.conj(a1)) * (np.pi / 4) / n
    assert abs(M[0, 1] - entry) < 1e-8


def test_lobe_matrix_hermitian_psd_and_additive():
    cfg = UlaConfig(9)
    main = AngularRegion.mainlobe(np.radians(30), np.radians(20))
    side = main.complement()
    Mm, Ms = lobe_matrix(cfg, main), lobe_matrix(cfg, side)
    for M in (Mm, Ms):
        assert np.array_equal(M, M.conj().T)
        ev = np.linalg.eigvalsh(M)
        assert ev[0] >= -1e-10 * ev[-1]
    np.testing.assert_allclose(Mm + Ms, lobe_matrix(cfg, AngularRegion.full()), atol=1e-8)
    np.testing.assert_allclose(np.diag(Ms).real, side.width, rtol=1e-12)


def test_lobe_matrix_needs_enough_points():
    with pytest.raises(ValueError):
        lobe_matrix(UlaConfig(3), AngularRegion.full(), quad_points=8)


def test_angular_region_validation_and_clipping():
    with pytest.raises(ValueError):
        AngularRegion(((0.2, 0.1),))
    with pytest.raises(ValueError):
        AngularRegion(((0.0, 0.5), (0.4, 0.6)))
    with pytest.raises(ValueError):
        AngularRegion(((-2.0, 0.0),))
    edge = AngularRegion.mainlobe(np.radians(85), np.radians(20))
    assert edge.intervals == ((np.radians(75), np.pi / 2),)
    assert edge.complement().intervals == ((-np.pi / 2, np.radians(75)),)
    with pytest.raises(ValueError):
        AngularRegion.full().complement()
