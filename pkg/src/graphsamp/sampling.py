"""Sampling-score design and noisy i.i.d. node sampling.

Scores form a probability distribution over nodes; samples are drawn from it
with replacement and observed under additive Gaussian noise.  Five score
designs are supported:

- ``uniform``        every node equally likely
- ``leverage``       proportional to the node's energy in the first kappa
                     basis vectors (its band row energy)
- ``sqrt_leverage``  proportional to the square root of that energy
- ``degree``         proportional to the weighted node degree
- ``optimal``        proportional to sqrt(band energy * (x_i^2 + sigma^2));
                     requires the signal itself, so it is an oracle design

Zero-probability nodes are legal in designed scores; such nodes are simply
never drawn, and downstream estimators only ever rescale by probabilities of
drawn nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScoresError, ParameterError
from .graphs import Graph, SpectralBasis, degree_vector
from .signals import GraphSignal

STRATEGIES = ("uniform", "leverage", "sqrt_leverage", "degree", "optimal")

_U64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed with a splitmix64 chain.

    Used to derive independent per-trial seeds from a master seed so that
    trials can run in any order (or in parallel) with identical results.
    """
    acc = 0
    for p in parts:
        acc = _splitmix64(acc ^ _splitmix64(int(p) & _U64))
    return acc


@dataclass(frozen=True)
class SamplingScores:
    """A node sampling distribution together with the design that produced it."""

    pi: np.ndarray
    strategy: str
    kappa: int | None = None
    sigma2: float | None = None

    def __post_init__(self):
        if self.pi.ndim != 1:
            raise ParameterError("scores must be a 1-d vector")
        if np.any(self.pi < 0):
            raise ParameterError("scores must be nonnegative")
        if abs(float(self.pi.sum()) - 1.0) > 1e-10:
            raise ParameterError("scores must sum to 1 within 1e-10")


@dataclass(frozen=True)
class SampleDraw:
    """An ordered multiset of sampled nodes with their noisy observations."""

    indices: np.ndarray
    observations: np.ndarray
    sigma2: float
    seed: int

    def __post_init__(self):
        if self.indices.shape != self.observations.shape:
            raise ParameterError("indices and observations must have equal length")

    @property
    def m(self) -> int:
        return self.indices.shape[0]


def band_energies(basis: SpectralBasis, kappa: int) -> np.ndarray:
    """Per-node energy in the first kappa basis vectors (row energies)."""
    if not 1 <= kappa <= basis.n:
        raise ParameterError(f"kappa must lie in [1, {basis.n}], got {kappa}")
    sub = basis.vectors[:, :kappa]
    return np.einsum("ij,ij->i", sub, sub)


def make_scores(
    strategy: str,
    basis: SpectralBasis | None = None,
    kappa: int | None = None,
    graph: Graph | None = None,
    x: GraphSignal | None = None,
    sigma2: float | None = None,
    floor: float = 0.0,
) -> SamplingScores:
    """Build a sampling distribution under one of the five designs.

    ``basis`` and ``kappa`` are required for the leverage family and the
    oracle design; ``graph`` for the degree design; ``x`` and ``sigma2``
    for the oracle design.  ``floor > 0`` clips every probability below the
    floor up to it before renormalizing (off by default: designed scores
    are used exactly as derived).
    """
    if strategy not in STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")

    if strategy == "uniform":
        n = basis.n if basis is not None else (graph.n if graph is not None else None)
        if n is None:
            raise ParameterError("uniform scores need a basis or a graph for the node count")
        raw = np.full(n, 1.0)
    elif strategy == "degree":
        if graph is None:
            raise ParameterError("degree scores need the graph")
        raw = degree_vector(graph)
    else:
        if basis is None or kappa is None:
            raise ParameterError(f"{strategy} scores need a basis and kappa")
        energy = band_energies(basis, kappa)
        if strategy == "leverage":
            raw = energy
        elif strategy == "sqrt_leverage":
            raw = np.sqrt(energy)
        else:  # optimal
            if x is None or sigma2 is None:
                raise ParameterError("optimal scores need the signal and sigma2")
            if sigma2 < 0:
                raise ParameterError("sigma2 must be nonnegative")
            raw = np.sqrt(energy * (x.values**2 + sigma2))

    total = float(raw.sum())
    if total <= 0.0 or not np.isfinite(total):
        raise DegenerateScoresError(f"{strategy} scores sum to {total}; cannot normalize")
    pi = raw / total
    if floor > 0.0:
        pi = np.maximum(pi, floor)
        pi = pi / pi.sum()
    return SamplingScores(
        pi=pi,
        strategy=strategy,
        kappa=kappa,
        sigma2=sigma2 if strategy == "optimal" else None,
    )


def draw_samples(
    x: GraphSignal,
    scores: SamplingScores,
    m: int,
    sigma2: float,
    seed: int,
    noise_seed: int | None = None,
) -> SampleDraw:
    """Draw m node indices i.i.d. from the scores and observe them with noise.

    Indices and noise come from two independent streams derived from
    ``seed``; passing ``noise_seed`` pins the noise stream separately, which
    lets an experiment reuse one noise sequence across different sampling
    designs while index draws stay independent.
    """
    n = scores.pi.shape[0]
    if x.values.shape[0] != n:
        raise ParameterError("signal length does not match the score vector")
    if m < 1:
        raise ParameterError(f"m must be at least 1, got {m}")
    if sigma2 < 0:
        raise ParameterError(f"sigma2 must be nonnegative, got {sigma2}")

    idx_rng = np.random.default_rng(mix_seed(seed, 0x1D))
    indices = idx_rng.choice(n, size=m, replace=True, p=scores.pi)
    observations = x.values[indices]
    if sigma2 > 0:
        noise_rng = np.random.default_rng(mix_seed(noise_seed if noise_seed is not None else seed, 0x0E))
        observations = observations + noise_rng.normal(0.0, np.sqrt(sigma2), size=m)
    return SampleDraw(indices=indices, observations=observations, sigma2=float(sigma2), seed=int(seed))
