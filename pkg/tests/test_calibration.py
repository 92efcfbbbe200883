import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rhbm.calibration import (
    LatentState,
    block_link_totals,
    calibrate,
    default_radius,
    expected_block_degrees,
    lagrange_multipliers,
    mu_tilde,
    normalize_shares,
    residuals,
    sample_angles,
    sample_feasible_fitness,
    sample_fitness,
    sample_raw_fitness,
)
from rhbm.generation import edge_probabilities, sample_graph
from rhbm.metrics import empirical_mixing
from rhbm.mixing import MixingMatrix, MixingParams, build_normalized_mixing, make_partition, scale_mixing_to_edges


def targets(N, k, n, rho=0.5, q=1.0):
    return scale_mixing_to_edges(build_normalized_mixing(MixingParams(n, rho, q)), N, k)


def random_state(seed, N=40, n=3, beta=2.5):
    rng = np.random.default_rng(seed)
    part = make_partition(N, n)
    Phi = rng.uniform(0.5, 50, (n, n))
    return LatentState(sample_angles(N, rng), rng.uniform(0.1, 2, N), Phi + Phi.T, beta, default_radius(N), part)


def test_mu_tilde_value():
    R = default_radius(3000)
    assert R == pytest.approx(3000 / (2 * math.pi))
    assert mu_tilde(2.0, R) == pytest.approx(2 * R)


def test_single_node_block_share():
    part = make_partition(4, 2, sizes=[1, 3])
    f = sample_fitness(part, 2.5, np.random.default_rng(0))
    assert f[0] == 1.0
    assert f[1:].sum() == pytest.approx(1.0)


def test_equal_raw_fitness_gives_equal_shares():
    part = make_partition(4, 1)
    np.testing.assert_allclose(normalize_shares(np.ones(4), part), 0.25)


def test_fitness_tail_exponent():
    raw = sample_raw_fitness(3000, 2.5, np.random.default_rng(11))
    assert raw.min() >= 1.0
    # maximum likelihood exponent of a Pareto density with minimum 1
    gamma_hat = 1 + raw.size / np.log(raw).sum()
    assert abs(gamma_hat - 2.5) <= 0.15


@pytest.mark.parametrize("gamma", [2.0, 1.5])
def test_fitness_exponent_domain(gamma):
    with pytest.raises(ValueError):
        sample_raw_fitness(10, gamma, np.random.default_rng(0))


def test_feasible_fitness_respects_load():
    part = make_partition(1000, 100)
    F = targets(1000, 10, 100)
    f, _ = sample_feasible_fitness(part, F, 2.5, np.random.default_rng(3), max_load=0.8)
    np.testing.assert_allclose(np.bincount(part.block_of, weights=f), 1.0)
    from rhbm.mixing import capacity_load

    assert capacity_load(F, part, f).max() < 0.8


def test_angles():
    assert sample_angles(0, np.random.default_rng(0)).size == 0
    th = sample_angles(100_000, np.random.default_rng(5))
    assert np.all((th >= 0) & (th < 2 * np.pi))
    ks = stats.kstest(th / (2 * np.pi), "uniform").statistic
    assert ks < 1.63 / math.sqrt(th.size)
    np.testing.assert_array_equal(sample_angles(10, np.random.default_rng(1)), sample_angles(10, np.random.default_rng(1)))


def test_latent_state_validation():
    part = make_partition(3, 1)
    with pytest.raises(ValueError):
        LatentState(np.zeros(3), np.array([1, 0, 1.0]), np.ones((1, 1)), 2.0, 1.0, part)
    with pytest.raises(ValueError):
        LatentState(np.zeros(3), np.ones(3), -np.ones((1, 1)), 2.0, 1.0, part)
    with pytest.raises(ValueError):
        LatentState(np.zeros(3), np.ones(3), np.ones((1, 1)), 1.0, 1.0, part)
    with pytest.raises(ValueError):
        LatentState(np.zeros(3), np.ones(3), np.ones((2, 2)), 2.0, 1.0, part)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), block=st.integers(0, 2), logc=st.floats(-5, 5))
def test_gauge_transformation_leaves_probabilities_unchanged(seed, block, logc):
    state = random_state(seed)
    moved = state.rescale_block(block, math.exp(logc))
    np.testing.assert_allclose(edge_probabilities(moved), edge_probabilities(state), rtol=1e-12, atol=1e-15)
    fixed = moved.gauge_fixed()
    np.testing.assert_allclose(fixed.block_sums(), 1.0, rtol=1e-12)
    np.testing.assert_allclose(edge_probabilities(fixed), edge_probabilities(state), rtol=1e-12, atol=1e-15)


def test_expected_degrees_edge_cases():
    part = make_partition(5, 2, sizes=[1, 4])
    state = LatentState(np.zeros(5), np.ones(5), np.array([[3.0, 0.0], [0.0, 5.0]]), 2.0, 1.0, part)
    deg = expected_block_degrees(state)
    assert deg[0, 0] == 0.0  # alone in its block
    assert np.all(deg[:, 1][part.block_of == 0] == 0)  # zero force between blocks
    assert np.all(deg[1:, 0] == 0)


def test_expected_degrees_match_monte_carlo():
    N, seeds = 200, 500
    part = make_partition(N, 2)
    Phi = np.array([[300.0, 60.0], [60.0, 120.0]])
    phi = np.full(N, 1.0 / 100)
    rng = np.random.default_rng(2024)
    base = LatentState(np.zeros(N), phi, Phi, 2.0, default_radius(N), part)
    expected = block_link_totals(expected_block_degrees(base), part)
    draws = []
    for s in range(seeds):
        g = sample_graph(LatentState(sample_angles(N, rng), phi, Phi, 2.0, default_radius(N), part), seed=s)
        draws.append(empirical_mixing(g, part).entries)
    draws = np.array(draws)
    se = draws.std(axis=0, ddof=1) / math.sqrt(seeds)
    assert np.all(np.abs(draws.mean(axis=0) - expected) <= 3 * se)


def test_single_block_calibration_keeps_uniform_fitness():
    N = 1000
    part = make_partition(N, 1)
    F = targets(N, 10, 1, rho=1.0)
    state, report = calibrate(np.full(N, 1 / N), F, 2.0, default_radius(N), part)
    assert report.converged
    np.testing.assert_allclose(state.phi, 1 / N, rtol=1e-9)
    deg = expected_block_degrees(state).sum(axis=1)
    assert abs(deg.mean() - 10) <= 0.1


@pytest.fixture(scope="module")
def small_calibrated():
    N = 300
    part = make_partition(N, 3)
    F = targets(N, 8, 3, rho=0.0)
    rng = np.random.default_rng(8)
    f, _ = sample_feasible_fitness(part, F, 2.5, rng, max_load=0.8)
    state, report = calibrate(f, F, 2.0, default_radius(N), part, theta=sample_angles(N, rng))
    return part, F, f, state, report


def test_calibration_converges_and_meets_targets(small_calibrated):
    part, F, f, state, report = small_calibrated
    assert report.converged and report.iterations <= 1000
    deg = expected_block_degrees(state)
    node, block, _ = residuals(deg, f, F.entries, part)
    assert node <= 1e-2 and block <= 1e-2
    assert (node, block) == pytest.approx((report.max_degree_residual, report.max_block_residual))
    np.testing.assert_allclose(state.block_sums(), 1.0, rtol=1e-12)


def test_calibrated_mixing_monte_carlo(small_calibrated):
    part, F, f, state, _ = small_calibrated
    rng = np.random.default_rng(99)
    draws = np.array(
        [
            empirical_mixing(
                sample_graph(LatentState(sample_angles(part.N, rng), state.phi, state.Phi, 2.0, state.R, part), s), part
            ).entries
            for s in range(1000)
        ]
    )
    se = draws.std(axis=0, ddof=1) / math.sqrt(len(draws))
    expected = block_link_totals(expected_block_degrees(state), part)
    assert np.all(np.abs(draws.mean(axis=0) - expected) <= 3 * se)
    # and the calibrated expectation itself sits within tolerance of the targets
    assert np.all(np.abs(expected - F.entries) <= 1e-2 * F.entries)


def test_residual_trace(small_calibrated):
    *_, report = small_calibrated
    trace = [max(r[:2]) for r in report.trace]
    assert trace[-1] <= report.tol
    assert len(trace) == report.iterations + 1


def test_lagrange_multipliers_reproduce_probabilities(small_calibrated):
    part, _, _, state, report = small_calibrated
    lam, eta = lagrange_multipliers(state)
    np.testing.assert_array_equal(lam, report.lam)
    b = part.block_of
    for i, j in [(3, 250), (0, 1), (120, 299)]:
        scale_direct = state.mu_tilde * state.phi[i] * state.phi[j] * state.Phi[b[i], b[j]]
        scale_lagr = np.exp(-(lam[i] + lam[j] + eta[b[i], b[j]]) / state.beta)
        assert scale_lagr == pytest.approx(scale_direct, rel=1e-12)


def test_infeasible_targets_report_non_convergence():
    N = 20
    part = make_partition(N, 1)
    f = np.full(N, 0.1 / (N - 1))
    f[0] = 0.9
    F = MixingMatrix([[100.0]])
    state, report = calibrate(f, F, 2.0, default_radius(N), part, max_iter=30)
    assert not report.converged
    assert report.iterations == 30
    assert report.max_degree_residual > report.tol
    assert isinstance(state, LatentState)


def test_calibration_rejects_bad_tolerance():
    part = make_partition(4, 1)
    with pytest.raises(ValueError):
        calibrate(np.full(4, 0.25), MixingMatrix([[4.0]]), 2.0, 1.0, part, tol=0)
