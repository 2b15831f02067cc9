"""Estimators that recover a graph signal from sampled observations.

All three estimators return a signal supported on the first kappa basis
vectors:

- ``sample_proj``     rescales each draw by 1/(m pi_i), accumulates repeats,
                      and projects onto the band.  Unbiased for the first
                      kappa frequency components under any full-support
                      scores, and cheap: no linear system is solved.
- ``least_squares``   fits the band coefficients to the reweighted samples
                      by least squares (minimum-norm solution when the
                      design is rank deficient).
- ``sampling_theory`` interpolates a distinct-node sample set by pseudo-
                      inverting the sampled rows of the band; recovers
                      bandlimited signals exactly when the sampled rows
                      have full column rank.

Rank deficiency is flagged on the estimate rather than raised, so parameter
sweeps can proceed through degenerate draws.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError
from .graphs import SpectralBasis
from .sampling import SampleDraw, SamplingScores

logger = logging.getLogger(__name__)

_PINV_RTOL = 1e-10  # singular values below rtol * s_max count as zero


@dataclass(frozen=True)
class Estimate:
    """A recovered signal, always supported on the first kappa frequencies."""

    values: np.ndarray
    kappa: int
    estimator: str
    rank_deficient: bool = False


def bandwidth_rule(m: int, beta: float, K_min: int, n: int) -> int:
    """Bandwidth schedule for m samples: ``min(n, max(K_min, round(m^(1/(2 beta + 1)))))``.

    Rounding is half-up.  The exponent balances the band truncation error
    against the per-sample variance of the projection estimator.
    """
    if m < 1:
        raise ParameterError(f"m must be at least 1, got {m}")
    grown = math.floor(m ** (1.0 / (2.0 * beta + 1.0)) + 0.5)
    return min(n, max(K_min, grown))


def _check_draw(basis: SpectralBasis, kappa: int, draw: SampleDraw, scores: SamplingScores):
    if not 1 <= kappa <= basis.n:
        raise ParameterError(f"kappa must lie in [1, {basis.n}], got {kappa}")
    if scores.pi.shape[0] != basis.n:
        raise ParameterError("score vector length does not match the basis")
    if draw.indices.min() < 0 or draw.indices.max() >= basis.n:
        raise ParameterError("draw contains node indices outside the graph")
    if np.any(scores.pi[draw.indices] <= 0.0):
        raise ConsistencyError(
            "draw contains a node with zero sampling probability; "
            "the draw cannot have come from these scores"
        )
    if scores.kappa is not None and scores.kappa != kappa:
        logger.info(
            "scores were designed for bandwidth %d but recovery uses %d",
            scores.kappa,
            kappa,
        )


def sample_proj(
    basis: SpectralBasis, kappa: int, draw: SampleDraw, scores: SamplingScores
) -> Estimate:
    """Rescaled-projection estimator.

    Each draw j of node i contributes ``y_j / (m pi_i)`` to an equalized,
    zero-padded vertex vector (repeated draws accumulate); the band
    coefficients are read off by projecting that vector onto the first
    kappa basis vectors.
    """
    _check_draw(basis, kappa, draw, scores)
    n = basis.n
    accum = np.bincount(draw.indices, weights=draw.observations, minlength=n)
    z = np.zeros(n)
    np.divide(accum, draw.m * scores.pi, out=z, where=scores.pi > 0)
    sub = basis.vectors[:, :kappa]
    coeffs = sub.T @ z
    return Estimate(values=sub @ coeffs, kappa=kappa, estimator="sample_proj")


def least_squares_proj(
    basis: SpectralBasis, kappa: int, draw: SampleDraw, scores: SamplingScores
) -> Estimate:
    """Least-squares fit of the band coefficients to the reweighted samples.

    The draw is aggregated per node (observation sums and draw counts) and
    every node row is weighted by 1/sqrt(m pi_i); the band coefficients then
    solve the weighted least-squares system relating those aggregates to the
    first kappa basis vectors.  Rows of unsampled nodes vanish on both
    sides, so the system is solved on the sampled rows only.  If those rows
    have rank below kappa the minimum-norm solution is returned and flagged.
    """
    _check_draw(basis, kappa, draw, scores)
    n = basis.n
    counts = np.bincount(draw.indices, minlength=n).astype(float)
    accum = np.bincount(draw.indices, weights=draw.observations, minlength=n)
    sampled = counts > 0
    d = 1.0 / np.sqrt(draw.m * scores.pi[sampled])
    design = (d * counts[sampled])[:, None] * basis.vectors[sampled, :kappa]
    rhs = d * accum[sampled]
    coeffs, deficient = _min_norm_solve(design, rhs, kappa)
    return Estimate(
        values=basis.vectors[:, :kappa] @ coeffs,
        kappa=kappa,
        estimator="least_squares",
        rank_deficient=deficient,
    )


def sampling_theory_recover(
    basis: SpectralBasis, kappa: int, sample_indices, y: np.ndarray
) -> Estimate:
    """Interpolate a distinct-node sample set through the band.

    The band coefficients are read off by pseudo-inverting the sampled rows
    of the first kappa basis vectors against the observations.  Exact for
    bandlimited signals whenever those rows have full column rank;
    otherwise the estimate is flagged.
    """
    indices = np.asarray(sample_indices, dtype=int)
    y = np.asarray(y, dtype=float)
    if not 1 <= kappa <= basis.n:
        raise ParameterError(f"kappa must lie in [1, {basis.n}], got {kappa}")
    if indices.ndim != 1 or indices.shape != y.shape:
        raise ParameterError("sample indices and observations must be equal-length vectors")
    if np.unique(indices).size != indices.size:
        raise ParameterError("sample indices must be distinct")
    if indices.min() < 0 or indices.max() >= basis.n:
        raise ParameterError("sample indices fall outside the graph")
    design = basis.vectors[indices, :kappa]
    coeffs, deficient = _min_norm_solve(design, y, kappa)
    return Estimate(
        values=basis.vectors[:, :kappa] @ coeffs,
        kappa=kappa,
        estimator="sampling_theory",
        rank_deficient=deficient,
    )


def _min_norm_solve(design: np.ndarray, rhs: np.ndarray, full_rank: int):
    """Minimum-norm least squares via SVD with a relative singular-value cutoff."""
    u, s, vt = np.linalg.svd(design, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(design.shape[1]), True
    rank = int(np.sum(s > _PINV_RTOL * s[0]))
    coeffs = vt[:rank].T @ ((u[:, :rank].T @ rhs) / s[:rank])
    return coeffs, rank < full_rank


def full_rank_sample_set(basis: SpectralBasis, kappa: int) -> np.ndarray:
    """Pick kappa nodes whose band rows are well conditioned.

    Column-pivoted QR on the transposed band ranks nodes by how much new
    band direction each contributes; the first kappa pivots give a sample
    set on which the interpolation estimator is full rank.
    """
    from scipy.linalg import qr

    if not 1 <= kappa <= basis.n:
        raise ParameterError(f"kappa must lie in [1, {basis.n}], got {kappa}")
    _, _, pivots = qr(basis.vectors[:, :kappa].T, pivoting=True, mode="economic")
    return np.sort(pivots[:kappa])
