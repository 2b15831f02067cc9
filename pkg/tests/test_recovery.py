import numpy as np
import pytest

import graphsamp as gs
from graphsamp.errors import ConsistencyError, ParameterError


def band_energy_above(basis, kappa, values):
    coeffs = basis.vectors.T @ values
    return float(coeffs[kappa:] @ coeffs[kappa:])


def test_bandwidth_rule_reference_points():
    assert gs.bandwidth_rule(1000, 1.0, 10, 10_000) == 10
    assert gs.bandwidth_rule(1, 2.0, 7, 100) == 7
    assert gs.bandwidth_rule(20_000, 0.5, 10, 10_000) == 141  # round(sqrt(20000))


def test_bandwidth_rule_rounds_half_up_and_caps():
    # 1158^(1/3) = 10.500..., half-up gives 11
    assert gs.bandwidth_rule(1158, 1.0, 1, 100) == 11
    assert gs.bandwidth_rule(10**9, 1.0, 10, 64) == 64
    with pytest.raises(ParameterError):
        gs.bandwidth_rule(0, 1.0, 10, 64)


def test_single_draw_projection_formula(spectral):
    # one draw of node i with certainty reduces to projecting x_i e_i
    _, _, basis = spectral("ring", 16)
    K, i = 4, 5
    coeffs = np.zeros(16)
    coeffs[:K] = np.random.default_rng(0).normal(size=K)
    x = gs.igft(basis, gs.SpectralSignal(coeffs=coeffs))
    pi = np.zeros(16)
    pi[i] = 1.0
    scores = gs.SamplingScores(pi=pi, strategy="custom")
    draw = gs.draw_samples(x, scores, m=1, sigma2=0.0, seed=1)
    est = gs.sample_proj(basis, K, draw, scores)
    sub = basis.vectors[:, :K]
    e_i = np.zeros(16)
    e_i[i] = x.values[i]
    assert np.allclose(est.values, sub @ (sub.T @ e_i), atol=1e-12)


def test_repeated_draws_accumulate(spectral):
    _, _, basis = spectral("ring", 8, k=2)
    x = gs.synthesize_signal(basis, 3, 1.0, seed=2)
    scores = gs.make_scores("uniform", basis=basis)
    draw = gs.SampleDraw(
        indices=np.array([3, 3]), observations=x.values[[3, 3]], sigma2=0.0, seed=0
    )
    est = gs.sample_proj(basis, 3, draw, scores)
    z = np.zeros(8)
    z[3] = 2 * x.values[3] / (2 * scores.pi[3])
    sub = basis.vectors[:, :3]
    assert np.allclose(est.values, sub @ (sub.T @ z), atol=1e-12)


def test_estimates_live_in_the_band(spectral):
    _, _, basis = spectral("ws", 128)
    x = gs.synthesize_signal(basis, 10, 1.0, seed=3)
    scores = gs.make_scores("leverage", basis=basis, kappa=12)
    draw = gs.draw_samples(x, scores, m=64, sigma2=0.01, seed=4)
    uniq, first = np.unique(draw.indices, return_index=True)
    for est in (
        gs.sample_proj(basis, 12, draw, scores),
        gs.least_squares_proj(basis, 12, draw, scores),
        gs.sampling_theory_recover(basis, 12, uniq, draw.observations[first]),
    ):
        assert band_energy_above(basis, 12, est.values) <= 1e-8


def test_sample_proj_full_band_unbiased(spectral):
    # kappa = n and sigma = 0: the estimator averages to x itself
    _, _, basis = spectral("ring", 8, k=2)
    rng = np.random.default_rng(5)
    x = gs.GraphSignal(values=rng.normal(size=8))
    scores = gs.make_scores("uniform", basis=basis)
    trials = 10_000
    vals = np.empty((trials, 8))
    for t in range(trials):
        draw = gs.draw_samples(x, scores, m=4, sigma2=0.0, seed=gs.mix_seed(6, t))
        vals[t] = gs.sample_proj(basis, 8, draw, scores).values
    stderr = vals.std(axis=0, ddof=1) / np.sqrt(trials)
    assert np.all(np.abs(vals.mean(axis=0) - x.values) <= 4.0 * stderr)


def test_draw_from_zero_probability_node_is_inconsistent(spectral):
    _, _, basis = spectral("ring", 16)
    pi = np.zeros(16)
    pi[0] = 1.0
    scores = gs.SamplingScores(pi=pi, strategy="custom")
    draw = gs.SampleDraw(
        indices=np.array([0, 5]), observations=np.zeros(2), sigma2=0.0, seed=0
    )
    with pytest.raises(ConsistencyError):
        gs.sample_proj(basis, 4, draw, scores)


def test_kappa_out_of_range(spectral):
    _, _, basis = spectral("ring", 16)
    scores = gs.make_scores("uniform", basis=basis)
    x = gs.synthesize_signal(basis, 4, 1.0, seed=7)
    draw = gs.draw_samples(x, scores, m=8, sigma2=0.0, seed=8)
    for bad in (0, 17):
        with pytest.raises(ParameterError):
            gs.sample_proj(basis, bad, draw, scores)


def test_least_squares_recovers_bandlimited_exactly(spectral):
    _, _, basis = spectral("er", 128)
    K = 6
    coeffs = np.zeros(128)
    coeffs[:K] = np.random.default_rng(9).normal(size=K)
    x = gs.igft(basis, gs.SpectralSignal(coeffs=coeffs))
    scores = gs.make_scores("uniform", basis=basis)
    indices = np.arange(0, 40, 2)
    draw = gs.SampleDraw(
        indices=indices, observations=x.values[indices], sigma2=0.0, seed=0
    )
    est = gs.least_squares_proj(basis, K, draw, scores)
    assert not est.rank_deficient
    assert np.abs(est.values - x.values).max() <= 1e-8


def test_least_squares_flags_rank_deficiency(spectral):
    _, _, basis = spectral("er", 128)
    scores = gs.make_scores("uniform", basis=basis)
    indices = np.array([3, 3, 7])  # two distinct nodes, kappa = 6
    draw = gs.SampleDraw(
        indices=indices, observations=np.ones(3), sigma2=0.0, seed=0
    )
    est = gs.least_squares_proj(basis, 6, draw, scores)
    assert est.rank_deficient
    assert np.all(np.isfinite(est.values))


def test_least_squares_aliasing_bias_detected(spectral):
    # with a heavy spectral tail the least-squares fit folds high frequencies
    # into the band; its average drifts from the band projection of x by many
    # standard errors, while the rescaled projection stays unbiased
    _, _, basis = spectral("ring", 32)
    kappa = 4
    x = gs.synthesize_signal(basis, kappa, 0.5, seed=10)
    scores = gs.make_scores("uniform", basis=basis)
    sub = basis.vectors[:, :kappa]
    target = sub @ (sub.T @ x.values)
    trials = 4000
    vals = np.empty((trials, 32))
    for t in range(trials):
        draw = gs.draw_samples(x, scores, m=12, sigma2=0.0, seed=gs.mix_seed(11, t))
        vals[t] = gs.least_squares_proj(basis, kappa, draw, scores).values
    stderr = vals.std(axis=0, ddof=1) / np.sqrt(trials)
    z = np.abs(vals.mean(axis=0) - target) / stderr
    assert z.max() > 4.0


def test_interpolation_recovers_bandlimited(spectral):
    _, _, basis = spectral("ba", 128)
    K = 10
    coeffs = np.zeros(128)
    coeffs[:K] = np.random.default_rng(12).normal(size=K)
    x = gs.igft(basis, gs.SpectralSignal(coeffs=coeffs))
    idx = gs.full_rank_sample_set(basis, K)
    est = gs.sampling_theory_recover(basis, K, idx, x.values[idx])
    assert not est.rank_deficient
    assert np.linalg.norm(est.values - x.values) <= 1e-8 * np.linalg.norm(x.values)


def test_interpolation_single_sample_of_constant_band(spectral):
    _, _, basis = spectral("ring", 16)
    x = gs.GraphSignal(values=3.0 * basis.vectors[:, 0])
    est = gs.sampling_theory_recover(basis, 1, np.array([11]), x.values[[11]])
    assert np.abs(est.values - x.values).max() <= 1e-10


def test_interpolation_expectation_formula(spectral):
    # deterministic identity: for a fixed noiseless sample set the output is
    # the band part plus the folded tail, both evaluated directly
    _, _, basis = spectral("ws", 128)
    K = 8
    x = gs.synthesize_signal(basis, K, 0.5, seed=13)
    xhat = basis.vectors.T @ x.values
    idx = gs.full_rank_sample_set(basis, K)
    est = gs.sampling_theory_recover(basis, K, idx, x.values[idx])
    head = basis.vectors[:, :K]
    tail = basis.vectors[:, K:]
    folded = head @ (np.linalg.pinv(head[idx]) @ (tail[idx] @ xhat[K:]))
    expected = head @ xhat[:K] + folded
    assert np.allclose(est.values, expected, atol=1e-10)


def test_interpolation_rank_deficiency_flag(spectral):
    _, _, basis = spectral("ring", 16)
    est = gs.sampling_theory_recover(basis, 5, np.array([0, 1]), np.zeros(2))
    assert est.rank_deficient


def test_interpolation_rejects_duplicates(spectral):
    _, _, basis = spectral("ring", 16)
    with pytest.raises(ParameterError):
        gs.sampling_theory_recover(basis, 2, np.array([1, 1]), np.zeros(2))


def test_full_rank_sample_set_properties(spectral):
    _, _, basis = spectral("ws", 128)
    idx = gs.full_rank_sample_set(basis, 12)
    assert len(idx) == 12 and len(np.unique(idx)) == 12
    assert np.linalg.matrix_rank(basis.vectors[idx, :12]) == 12
