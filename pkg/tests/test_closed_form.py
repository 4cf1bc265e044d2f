import numpy as np
import pytest
from scipy.optimize import minimize

from dfrc_outage.array_model import UlaConfig, steering_vector
from dfrc_outage.chance_constraint import build_bernstein
from dfrc_outage.channel_model import ChannelSet, UserSpec, make_rng, sample_nominal_channels
from dfrc_outage.closed_form import (
    Branch, gram_schmidt_pair, max_average_sinr, su_solve, su_solve_eps_zero,
)
from dfrc_outage.sdp import Status, solve_p7

THETA0 = np.radians(30)


def _instance(rng, n, sigma_delta=0.1, noise_var=1.0, frac=None):
    """Random channel and a gamma somewhere below the average-SINR bound."""
    h = sample_nominal_channels(rng, 1, n)[0]
    bound = max_average_sinr(h, noise_var, sigma_delta)
    frac = rng.uniform(0.05, 0.9) if frac is None else frac
    return h, frac * bound


def _g(x, h, gamma, noise_var, s, eps):
    hn = np.vdot(h, h).real
    return x * x * hn - (gamma * noise_var - s * s) - s * np.sqrt(2 * eps) * np.sqrt(s * s + 2 * x * x * hn)


def test_bartlett_when_threshold_is_zero(rng):
    a = steering_vector(UlaConfig(6), THETA0)
    h = sample_nominal_channels(rng, 1, 6)[0]
    sol = su_solve_eps_zero(h, a, gamma=0.01, noise_var=1.0, sigma_delta=0.1)
    assert sol.branch == Branch.BARTLETT and sol.feasible
    np.testing.assert_allclose(sol.w, a.conj() / np.sqrt(6), atol=1e-12)
    assert sol.radar_gain(a) == pytest.approx(6.0)


def test_orthogonal_channel_mixture_gain():
    n = 4
    a = steering_vector(UlaConfig(n), THETA0)
    # h^T a* = 0 for h = conj of a vector orthogonal to a*
    u = np.array([1.0, -1.0, 0.0, 0.0], dtype=complex)
    u = u - np.vdot(a.conj(), u) / n * a.conj()
    h = 2.0 * np.conj(u) / np.linalg.norm(u)
    hn = np.vdot(h, h).real
    gamma = (0.5 * hn + 0.01) / 1.0  # rho = 0.5 with sigma_delta = 0.1
    sol = su_solve_eps_zero(h, a, gamma, 1.0, 0.1)
    assert sol.branch == Branch.MIXTURE and sol.rho == pytest.approx(0.5)
    assert sol.radar_gain(a) == pytest.approx(0.5 * n)


def test_eps_zero_agrees_with_general_solver(rng):
    for n in (3, 6, 9):
        a = steering_vector(UlaConfig(n), THETA0)
        for _ in range(20):
            h, gamma = _instance(rng, n, frac=rng.uniform(0.01, 1.2))
            s0 = su_solve_eps_zero(h, a, gamma, 1.0, 0.1)
            s1 = su_solve(h, a, gamma, 1.0, 0.1, 0.0)
            assert s0.feasible == s1.feasible
            if s0.feasible:
                assert s0.branch == s1.branch
                assert s0.lambda_threshold == pytest.approx(s1.lambda_threshold)
                assert s1.radar_gain(a) == pytest.approx(s0.radar_gain(a), rel=1e-9)


def test_error_free_root(rng):
    h = sample_nominal_channels(rng, 1, 5)[0]
    a = steering_vector(UlaConfig(5), np.radians(-40))
    hn = np.vdot(h, h).real
    gamma = 0.8 * hn / 0.5
    sol = su_solve(h, a, gamma, 0.5, 0.0, -np.log(0.1))
    assert sol.branch == Branch.MIXTURE
    assert sol.rho == pytest.approx(gamma * 0.5 / hn, abs=1e-11)


def test_root_and_tightness(rng):
    eps = -np.log(0.1)
    hits = 0
    for _ in range(60):
        n = int(rng.integers(3, 10))
        a = steering_vector(UlaConfig(n), THETA0)
        h, gamma = _instance(rng, n)
        sol = su_solve(h, a, gamma, 1.0, 0.1, eps)
        if not sol.feasible or sol.branch != Branch.MIXTURE:
            continue
        hits += 1
        assert abs(_g(np.sqrt(sol.rho), h, gamma, 1.0, 0.1, eps)) <= 1e-10
        assert np.linalg.norm(sol.w) == pytest.approx(1.0, abs=1e-10)
        user = UserSpec(gamma, 0.1, 0.1)
        bd = build_bernstein([np.outer(sol.w, sol.w.conj())], 0, user, h, 1.0)
        assert bd.sigma_k2 - bd.u_bound == pytest.approx(0.0, abs=1e-8)
        assert sol.radar_gain(a) <= n + 1e-9
    assert hits >= 20


def test_bartlett_dominates(rng):
    for _ in range(30):
        n = int(rng.integers(3, 10))
        a = steering_vector(UlaConfig(n), THETA0)
        h, gamma = _instance(rng, n)
        for eps in (0.0, 1.0, 3.0):
            sol = su_solve(h, a, gamma, 1.0, 0.1, eps)
            if sol.feasible:
                assert sol.radar_gain(a) <= n * (1 + 1e-12)
                if sol.branch == Branch.BARTLETT:
                    np.testing.assert_allclose(sol.w, a.conj() / np.sqrt(n), atol=1e-12)


def test_threshold_monotone(rng):
    h = sample_nominal_channels(rng, 1, 8)[0]
    a = steering_vector(UlaConfig(8), THETA0)
    eps_grid = np.linspace(0, 5, 21)
    gam_grid = np.linspace(0.05, 5, 21)
    lam_e = [su_solve(h, a, 1.0, 1.0, 0.1, e).lambda_threshold for e in eps_grid]
    lam_g = [su_solve(h, a, g, 1.0, 0.1, 1.0).lambda_threshold for g in gam_grid]
    assert np.all(np.diff(lam_e) >= 0) and np.all(np.diff(lam_g) > 0)


def test_average_sinr_bound_decides_feasibility(rng):
    h = sample_nominal_channels(rng, 1, 4)[0]
    a = steering_vector(UlaConfig(4), THETA0)
    bound = max_average_sinr(h, 0.5, 0.1)
    assert su_solve_eps_zero(h, a, 0.99 * bound, 0.5, 0.1).feasible
    bad = su_solve_eps_zero(h, a, 1.01 * bound, 0.5, 0.1)
    assert not bad.feasible and not np.any(bad.w)


def test_power_budget_scales_solution(rng):
    h, gamma = _instance(rng, 6)
    a = steering_vector(UlaConfig(6), THETA0)
    unit = su_solve(h, a, gamma, 1.0, 0.1, 1.5)
    big = su_solve(h, a, gamma, 2.0, 0.1, 1.5, power_budget=2.0)
    np.testing.assert_allclose(big.w, np.sqrt(2.0) * unit.w, atol=1e-10)


def test_input_validation():
    h = np.ones(3, dtype=complex)
    with pytest.raises(ValueError):
        su_solve(h, h, 0.0, 1.0, 0.1, 1.0)
    with pytest.raises(ValueError):
        su_solve(h, h, 1.0, 1.0, 0.1, -1.0)
    with pytest.raises(ValueError):
        su_solve_eps_zero(h, h, 1.0, 1.0, 0.1, power_budget=0.0)


def test_gram_schmidt_examples(rng):
    e_par, e_perp, deg = gram_schmidt_pair([1, 0], [0, 1])
    np.testing.assert_allclose(e_par, [1, 0])
    np.testing.assert_allclose(e_perp, [0, 1])
    assert not deg
    ref = np.array([1 + 1j, 2.0])
    assert gram_schmidt_pair(ref, 2 * ref).degenerate
    with pytest.raises(ValueError):
        gram_schmidt_pair([0, 0], [1, 0])
    for _ in range(20):
        u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        p, q, _ = gram_schmidt_pair(u, v)
        assert abs(np.vdot(p, q)) <= 1e-12
        assert np.linalg.norm(p) == pytest.approx(1) and np.linalg.norm(q) == pytest.approx(1)


def test_matches_sdp_without_margin():
    rng = make_rng(5150)
    for n in (4, 8):
        a = steering_vector(UlaConfig(n), THETA0)
        done = 0
        while done < 4:
            h, gamma = _instance(rng, n)
            sol = su_solve(h, a, gamma, 1.0, 0.1, 1e-12)
            if not sol.feasible:
                continue
            sdp = solve_p7(ChannelSet(h[None], [UserSpec(gamma, 1 - 1e-12, 0.1)], 1.0), UlaConfig(n), THETA0)
            assert sdp.status == Status.OPTIMAL
            assert sdp.objective == pytest.approx(sol.radar_gain(a), rel=1e-4)
            done += 1


def _rank_one_oracle(h, a, gamma, s, eps, rng, starts=20):
    """Best |a^T w|^2 over vectors w found by multistart SLSQP on the raw surrogate."""
    n = len(a)

    def cplx(v):
        return v[:n] + 1j * v[n:]

    def surplus(v):
        w = cplx(v)
        t = np.vdot(w, w).real
        r = abs(h @ w) ** 2
        spread = np.sqrt(s**4 * t * t + 2 * s * s * t * r) / gamma
        return s * s * t / gamma - np.sqrt(2 * eps) * spread - (1 - r / gamma)

    best = -np.inf
    for _ in range(starts):
        v0 = rng.standard_normal(2 * n)
        res = minimize(
            lambda v: -abs(a @ cplx(v)) ** 2, v0 / np.linalg.norm(v0), method="SLSQP",
            constraints=[{"type": "ineq", "fun": surplus}, {"type": "ineq", "fun": lambda v: 1 - v @ v}],
            options={"ftol": 1e-12, "maxiter": 500},
        )
        if res.success and surplus(res.x) > -1e-9 and res.x @ res.x <= 1 + 1e-9:
            best = max(best, -res.fun)
    return best


def test_matches_rank_one_search():
    rng = make_rng(5150)
    eps = -np.log(0.1)
    for i in range(8):
        n = (4, 8)[i % 2]
        a = steering_vector(UlaConfig(n), THETA0)
        h, gamma = _instance(rng, n)
        sol = su_solve(h, a, gamma, 1.0, 0.1, eps)
        if sol.feasible:
            assert _rank_one_oracle(h, a, gamma, 0.1, eps, rng) == pytest.approx(sol.radar_gain(a), rel=1e-8)


def test_relaxation_can_exceed_rank_one_design():
    # A channel nearly orthogonal to the look direction: spreading power over
    # two eigenvectors shrinks the Frobenius term of the Bernstein bound, so the
    # relaxed optimum is rank two and strictly beats every vector beamformer.
    rng = make_rng(5150)
    h, gamma = _instance(rng, 4)
    a = steering_vector(UlaConfig(4), THETA0)
    sol = su_solve(h, a, gamma, 1.0, 0.1, -np.log(0.1))
    sdp = solve_p7(ChannelSet(h[None], [UserSpec(gamma, 0.1, 0.1)], 1.0), UlaConfig(4), THETA0)
    assert sdp.objective > sol.radar_gain(a) * (1 + 1e-3)
    assert sdp.beamformers()[0].defect > 0.05
