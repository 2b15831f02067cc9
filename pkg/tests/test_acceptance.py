"""Release acceptance suite.

One test per criterion; each prints a ``[acceptance]`` verdict line (visible
with ``pytest -s tests/test_acceptance.py``) and enforces its runtime budget.
The heavier criteria pin graph seeds, signal seeds, and master seeds so that
every run is reproducible.
"""

import time

import numpy as np

import graphsamp as gs
from graphsamp.harness import (
    ExperimentConfig,
    GraphSpec,
    SignalSpec,
    run_experiment,
)

from conftest import PINNED_FAMILIES

FAMILIES = ("ring", "er", "ws", "ba", "rgg")


def check(name, ok, detail=""):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"{name} {detail}"


def test_criterion_01_enumeration_exactness(path4, pair_risk_oracle):
    start = time.monotonic()
    _, basis, x = path4
    scores = gs.make_scores("uniform", basis=basis)
    enumerated = pair_risk_oracle(basis, x, 2, scores.pi)
    formula = gs.exact_mse(basis, x, 2, scores, m=2, sigma2=0.0).exact_mse
    rel = abs(formula - enumerated) / abs(enumerated)
    elapsed = time.monotonic() - start
    check(
        "01 exact-risk-vs-enumeration",
        rel <= 1e-12 and elapsed < 1.0,
        f"(rel={rel:.2e}, {elapsed:.2f}s)",
    )


def test_criterion_02_projection_unbiasedness(spectral):
    start = time.monotonic()
    _, _, basis = spectral("ring", 64)
    x = gs.synthesize_signal(basis, 5, 1.0, seed=21)
    sub = basis.vectors[:, :5]
    target = sub @ (sub.T @ x.values)
    scores = gs.make_scores("uniform", basis=basis)
    trials = 20_000
    vals = np.empty((trials, 64))
    for t in range(trials):
        draw = gs.draw_samples(x, scores, m=32, sigma2=0.01, seed=gs.mix_seed(99, t))
        vals[t] = gs.sample_proj(basis, 5, draw, scores).values
    stderr = vals.std(axis=0, ddof=1) / np.sqrt(trials)
    z = np.abs(vals.mean(axis=0) - target) / stderr
    elapsed = time.monotonic() - start
    check(
        "02 projection-unbiasedness",
        bool(np.all(z <= 4.0)) and elapsed < 60.0,
        f"(max z={z.max():.2f}, {elapsed:.1f}s)",
    )


# 12 cells spanning the five families and the four practical score designs
MC_CONFIGS = [
    ("ring", "uniform", 1.0, 1e-4),
    ("ring", "leverage", 1.0, 2e-2),
    ("ring", "degree", 0.5, 1e-4),
    ("er", "uniform", 1.0, 2e-2),
    ("er", "leverage", 0.5, 1e-4),
    ("er", "sqrt_leverage", 1.0, 1e-4),
    ("rgg", "leverage", 1.0, 2e-2),
    ("rgg", "sqrt_leverage", 0.5, 1e-4),
    ("ws", "uniform", 1.0, 1e-4),
    ("ws", "degree", 1.0, 2e-2),
    ("ba", "degree", 0.5, 2e-2),
    ("ba", "sqrt_leverage", 1.0, 1e-4),
]


def test_criterion_03_monte_carlo_vs_closed_form(spectral):
    start = time.monotonic()
    n, m, trials = 512, 256, 2000
    worst = 0.0
    for i, (kind, strategy, beta, sigma2) in enumerate(MC_CONFIGS):
        g, _, basis = spectral(kind, n)
        x = gs.synthesize_signal(basis, 10, beta, seed=100 + i)
        kappa = gs.bandwidth_rule(m, beta, 10, n)
        scores = gs.make_scores(strategy, basis=basis, kappa=kappa, graph=g)
        exact = gs.exact_mse(basis, x, kappa, scores, m, sigma2, beta=beta).exact_mse
        mc = gs.monte_carlo_mse("sample_proj", basis, x, kappa, scores, m, sigma2,
                                trials=trials, master_seed=777 + i)
        worst = max(worst, abs(mc.mean - exact) / mc.stderr)
    elapsed = time.monotonic() - start
    check(
        "03 monte-carlo-matches-closed-form",
        worst <= 3.0 and elapsed < 300.0,
        f"(worst z={worst:.2f} over 12 cells, {elapsed:.0f}s)",
    )


def _sweep(kind, strategies, m_grid, n=2048, trials=160, seed=None):
    params, default_seed = PINNED_FAMILIES[kind]
    return ExperimentConfig(
        graph=GraphSpec(kind=kind, n=n, params=params,
                        seed=default_seed if seed is None else seed),
        signal=SignalSpec(bandwidth=5, betas=(1.0,), count=48),
        sigma2=(1e-4,),
        strategies=strategies,
        m_grid=m_grid,
        trials=trials,
        master_seed=42,
    )


def test_criterion_04_convergence_rate_band():
    start = time.monotonic()
    grid = tuple(int(v) for v in np.unique(
        np.rint(np.geomspace(205, 4096, 8)).astype(int)
    ))
    rows = run_experiment(_sweep("ring", ("leverage", "uniform"), grid))
    slopes = {}
    for strategy in ("leverage", "uniform"):
        pts = [(r.m, r.mse_mean) for r in rows if r.strategy == strategy]
        slopes[strategy] = gs.convergence_slope_fit(pts).slope
    elapsed = time.monotonic() - start
    ok = all(-0.82 <= s <= -0.52 for s in slopes.values()) and elapsed < 600.0
    check(
        "04 convergence-rate-band",
        ok,
        f"(leverage={slopes['leverage']:.3f}, uniform={slopes['uniform']:.3f}, "
        f"{elapsed:.0f}s)",
    )


def test_criterion_05_flat_vs_concentrated_separation():
    start = time.monotonic()
    m_top = (4096,)
    four = ("uniform", "leverage", "sqrt_leverage", "degree")
    ratios = {}
    for kind in ("ring", "er"):
        rows = run_experiment(_sweep(kind, four, m_top))
        mses = [r.mse_mean for r in rows]
        ratios[kind] = max(mses) / min(mses)
    gaps = {}
    for kind in ("ws", "ba"):
        rows = run_experiment(_sweep(kind, ("uniform", "leverage"), m_top))
        by = {r.strategy: r.mse_mean for r in rows}
        gaps[kind] = by["uniform"] / by["leverage"]
    elapsed = time.monotonic() - start
    ok = (
        all(v <= 2.0 for v in ratios.values())
        and all(v >= 1.5 for v in gaps.values())
        and elapsed < 900.0
    )
    check(
        "05 flat-vs-concentrated-separation",
        ok,
        f"(ring={ratios['ring']:.2f}, er={ratios['er']:.2f}, "
        f"ws={gaps['ws']:.2f}x, ba={gaps['ba']:.2f}x, {elapsed:.0f}s)",
    )


def test_criterion_06_perfect_recovery_from_designed_sets(spectral):
    worst = 0.0
    for kind in FAMILIES:
        _, _, basis = spectral(kind, 512)
        coeffs = np.zeros(512)
        coeffs[:10] = np.random.default_rng(7).normal(size=10)
        x = gs.igft(basis, gs.SpectralSignal(coeffs=coeffs))
        idx = gs.full_rank_sample_set(basis, 10)
        est = gs.sampling_theory_recover(basis, 10, idx, x.values[idx])
        rel = np.linalg.norm(est.values - x.values) / np.linalg.norm(x.values)
        worst = max(worst, rel)
    check(
        "06 perfect-recovery-designed-sets",
        worst <= 1e-8,
        f"(worst rel err={worst:.2e})",
    )


def test_criterion_07_oracle_scores_minimize_variance(spectral):
    strict = True
    for i, kind in enumerate(FAMILIES):
        _, _, basis = spectral(kind, 512)
        x = gs.synthesize_signal(basis, 10, 1.0, seed=50 + i)
        opt = gs.make_scores("optimal", basis=basis, kappa=10, x=x, sigma2=1e-3)
        t_opt = gs.projection_variance_term(basis, x, 10, opt.pi, 128, 1e-3)
        rng = np.random.default_rng(123 + i)
        for _ in range(100):
            pert = opt.pi * np.exp(0.3 * rng.normal(size=512))
            pert /= pert.sum()
            if t_opt > gs.projection_variance_term(basis, x, 10, pert, 128, 1e-3):
                strict = False
    check("07 oracle-score-optimality", strict, "(5 instances x 100 perturbations)")


def test_criterion_08_spectral_and_parseval_suite(spectral):
    ok = True
    details = []
    for kind in FAMILIES:
        _, _, basis = spectral(kind, 512)
        gram_dev = np.abs(basis.vectors.T @ basis.vectors - np.eye(512)).max()
        lam = basis.eigenvalues
        spectrum_ok = (
            gram_dev <= 1e-8
            and abs(lam[0] - 1.0) <= 1e-8
            and lam.min() >= -1.0 - 1e-8
            and lam.max() <= 1.0 + 1e-8
        )
        rng = np.random.default_rng(30)
        parseval_ok = all(
            abs(np.linalg.norm(basis.vectors.T @ v) - np.linalg.norm(v)) <= 1e-8
            for v in rng.normal(size=(50, 512))
        )
        ok = ok and spectrum_ok and parseval_ok
        details.append(f"{kind}:{gram_dev:.1e}")
    check("08 spectral-parseval-suite", ok, f"({', '.join(details)})")


def test_criterion_09_embedding_inequalities(spectral):
    K, beta = 10, 1.0
    slack = -1e-8
    ok = True
    for kind in FAMILIES:
        _, shift, basis = spectral(kind, 512)
        eta_bl = (1.0 - basis.eigenvalues[K - 1]) ** 2
        rng = np.random.default_rng(31)
        for _ in range(100):
            coeffs = np.zeros(512)
            coeffs[:K] = rng.normal(size=K)
            x = gs.igft(basis, gs.SpectralSignal(coeffs=coeffs))
            ok = ok and (eta_bl - gs.smoothness_quadratic(shift, x) >= slack)
        for _ in range(100):
            x = gs.GraphSignal(values=rng.normal(size=512))
            eta_min = gs.smoothness_quadratic(shift, x)
            mu_min = gs.min_tail_budget(gs.gft(basis, x), K, beta)
            t = gs.class_thresholds(
                gs.ClassParams(K=K, beta=beta, mu=mu_min, eta=eta_min),
                basis.eigenvalues,
            )
            ok = ok and (t.eta_for_tail_class - eta_min >= slack)
            ok = ok and (t.mu_for_smooth_class - mu_min >= slack)
    check("09 embedding-inequalities", ok, "(5 families x 200 signals)")


def test_criterion_10_oracle_score_noise_limits(spectral):
    _, _, basis = spectral("ba", 512)
    energy = gs.band_energies(basis, 10)
    x = gs.GraphSignal(values=np.sqrt(energy / energy.sum()))  # unit norm
    lev = gs.make_scores("leverage", basis=basis, kappa=10)
    sqrt_lev = gs.make_scores("sqrt_leverage", basis=basis, kappa=10)
    low_noise = gs.make_scores("optimal", basis=basis, kappa=10, x=x, sigma2=0.0)
    high_noise = gs.make_scores("optimal", basis=basis, kappa=10, x=x, sigma2=1e12)
    pos = lev.pi > 0
    dev_low = np.abs(low_noise.pi[pos] / lev.pi[pos] - 1.0).max()
    dev_high = np.abs(high_noise.pi / sqrt_lev.pi - 1.0).max()
    check(
        "10 oracle-score-noise-limits",
        dev_low <= 1e-4 and dev_high <= 1e-4,
        f"(low-noise dev={dev_low:.1e}, high-noise dev={dev_high:.1e})",
    )
