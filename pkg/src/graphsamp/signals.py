"""Signals on graphs: frequency transforms, smoothness classes, synthesis.

A signal lives in the vertex domain as a vector ``x`` of length n, and in
the frequency domain as its expansion ``xhat = V^T x`` in the orthonormal
eigenvector basis V of the normalized shift.  Three nested smoothness
classes are measured here, each through the smallest budget that admits a
given signal:

- global smoothness: relative energy of the first-order difference ``x - Ax``
- bandlimitedness:   all frequency content below a cutoff K
- approximate bandlimitedness: weighted tail energy above K within a budget

Membership tests return the minimal budget rather than a boolean so class
relations can be checked at any budget level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import NormalizedShift, SpectralBasis


@dataclass(frozen=True)
class GraphSignal:
    """A real-valued signal indexed by graph nodes."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 1:
            raise ParameterError("signal values must be a 1-d vector")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("signal values must be finite")


@dataclass(frozen=True)
class SpectralSignal:
    """A signal expressed by its coefficients in the spectral basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.ndim != 1:
            raise ParameterError("spectral coefficients must be a 1-d vector")
        if not np.all(np.isfinite(self.coeffs)):
            raise ParameterError("spectral coefficients must be finite")


@dataclass(frozen=True)
class ClassParams:
    """Parameters of the smoothness classes.

    K is the bandwidth cutoff, beta the tail decay exponent, mu the tail
    energy budget, and eta the global-smoothness budget.  beta >= 0.5 is
    accepted (values below 1 are common in experiments even though the
    class is usually stated for beta >= 1).
    """

    K: int
    beta: float = 1.0
    mu: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if self.K < 0:
            raise ParameterError(f"K must be nonnegative, got {self.K}")
        if self.beta < 0.5:
            raise ParameterError(f"beta must be >= 0.5, got {self.beta}")
        if self.mu < 0:
            raise ParameterError(f"mu must be nonnegative, got {self.mu}")
        if self.eta < 0:
            raise ParameterError(f"eta must be nonnegative, got {self.eta}")


@dataclass(frozen=True)
class ClassThresholds:
    """Embedding thresholds between the three smoothness classes.

    eta_for_bandlimited   : smallest eta so every K-bandlimited signal is globally smooth
    eta_for_tail_class  : smallest eta so every (K, beta, mu) signal is globally smooth
    mu_for_smooth_class    : tail budget under which every eta-smooth signal falls
    """

    eta_for_tail_class: float
    mu_for_smooth_class: float
    eta_for_bandlimited: float


def gft(basis: SpectralBasis, x: GraphSignal) -> SpectralSignal:
    """Project a vertex-domain signal onto the spectral basis.

    The basis is orthonormal, so the coefficient vector preserves the
    Euclidean norm of the input.
    """
    if x.values.shape[0] != basis.n:
        raise ParameterError(
            f"signal length {x.values.shape[0]} does not match basis size {basis.n}"
        )
    return SpectralSignal(coeffs=basis.vectors.T @ x.values)


def igft(basis: SpectralBasis, xhat: SpectralSignal) -> GraphSignal:
    """Rebuild the vertex-domain signal from its spectral coefficients."""
    if xhat.coeffs.shape[0] != basis.n:
        raise ParameterError(
            f"coefficient length {xhat.coeffs.shape[0]} does not match basis size {basis.n}"
        )
    return GraphSignal(values=basis.vectors @ xhat.coeffs)


def smoothness_quadratic(shift: NormalizedShift, x: GraphSignal) -> float:
    """Relative energy of the first-order difference, ``|x - Ax|^2 / |x|^2``.

    This is the smallest global-smoothness budget that admits ``x``.  With a
    unit-spectral-radius shift the value always lies in [0, 4], and it is 0
    exactly when ``x`` is an eigenvector at frequency 1.
    """
    norm2 = float(x.values @ x.values)
    if norm2 == 0.0:
        raise ParameterError("smoothness is undefined for the zero signal")
    diff = x.values - shift.matrix @ x.values
    return float(diff @ diff) / norm2


def min_tail_budget(xhat: SpectralSignal, K: int, beta: float) -> float:
    """Smallest tail-energy budget admitting ``xhat`` above cutoff K.

    Returns ``sum_{k >= K} (1 + k^(2 beta)) xhat_k^2 / |xhat|^2``, which is 0
    exactly when the signal is bandlimited at K.
    """
    n = xhat.coeffs.shape[0]
    if not 0 <= K <= n - 1:
        raise ParameterError(f"K must lie in [0, {n - 1}], got {K}")
    if beta < 0.5:
        raise ParameterError(f"beta must be >= 0.5, got {beta}")
    norm2 = float(xhat.coeffs @ xhat.coeffs)
    if norm2 == 0.0:
        raise ParameterError("tail budget is undefined for the zero signal")
    k = np.arange(K, n, dtype=float)
    tail = xhat.coeffs[K:]
    return float(np.sum((1.0 + k ** (2.0 * beta)) * tail * tail)) / norm2


def class_thresholds(
    params: ClassParams,
    eigenvalues: np.ndarray,
    use_linear_gs_denominator: bool = False,
) -> ClassThresholds:
    """Evaluate the embedding thresholds between the smoothness classes.

    ``eta_for_bandlimited``  = (1 - lambda_{K-1})^2.
    ``eta_for_tail_class`` = (1 - lambda_{K-1} + sqrt(4 mu / (1 + K^(2 beta))))^2.
    ``mu_for_smooth_class``   = (1 + (N-1)^(2 beta)) eta / (1 - lambda_K)^2.

    The squared denominator in ``mu_for_smooth_class`` is the one the embedding
    argument actually supports; set ``use_linear_gs_denominator=True`` for
    the looser variant with a first-power denominator.
    """
    n = eigenvalues.shape[0]
    K = params.K
    if not 1 <= K <= n - 1:
        raise ParameterError(f"thresholds need 1 <= K <= {n - 1}, got K={K}")
    lam_km1 = float(eigenvalues[K - 1])
    lam_k = float(eigenvalues[K])

    eta_for_bandlimited = (1.0 - lam_km1) ** 2
    eta_for_tail_class = (
        1.0 - lam_km1 + np.sqrt(4.0 * params.mu / (1.0 + float(K) ** (2.0 * params.beta)))
    ) ** 2

    gap = 1.0 - lam_k
    if gap <= 1e-12:
        raise ParameterError(
            f"eigenvalue {K} equals 1; the smooth-to-tail threshold degenerates"
        )
    denom = gap if use_linear_gs_denominator else gap * gap
    mu_for_smooth_class = (1.0 + float(n - 1) ** (2.0 * params.beta)) * params.eta / denom
    return ClassThresholds(
        eta_for_tail_class=float(eta_for_tail_class),
        mu_for_smooth_class=float(mu_for_smooth_class),
        eta_for_bandlimited=float(eta_for_bandlimited),
    )


def synthesize_signal(basis: SpectralBasis, K: int, beta: float, seed: int) -> GraphSignal:
    """Draw a unit-norm signal with a random low band and a decaying tail.

    Coefficients below K are sampled from a normal with mean 1 and standard
    deviation 0.5; from K on they follow the deterministic profile
    ``(K / k)^(2 beta)``.  The spectrum is normalized to unit norm before
    transforming back to the vertex domain.  Deterministic per seed.
    """
    n = basis.n
    if not 1 <= K <= n:
        raise ParameterError(f"synthesis needs 1 <= K <= {n}, got K={K}")
    if beta < 0.5:
        raise ParameterError(f"beta must be >= 0.5, got {beta}")
    rng = np.random.default_rng(seed)
    xhat = np.empty(n)
    xhat[:K] = rng.normal(1.0, 0.5, size=K)
    if K < n:
        k = np.arange(K, n, dtype=float)
        xhat[K:] = (float(K) / k) ** (2.0 * beta)
    xhat /= np.linalg.norm(xhat)
    return GraphSignal(values=basis.vectors @ xhat)


def save_signal(x: GraphSignal, path) -> None:
    with open(path, "w") as fh:
        json.dump({"n": int(x.values.shape[0]), "values": x.values.tolist()}, fh)


def load_signal(path) -> GraphSignal:
    with open(path) as fh:
        doc = json.load(fh)
    if "values" not in doc:
        raise ParameterError(f"{path}: not a signal file (no 'values' entry)")
    values = np.asarray(doc["values"], dtype=float)
    if "n" in doc and int(doc["n"]) != values.shape[0]:
        raise ParameterError("signal file: declared n does not match values length")
    return GraphSignal(values=values)


def save_spectral(xhat: SpectralSignal, path) -> None:
    with open(path, "w") as fh:
        json.dump({"n": int(xhat.coeffs.shape[0]), "coeffs": xhat.coeffs.tolist()}, fh)


def load_spectral(path) -> SpectralSignal:
    with open(path) as fh:
        doc = json.load(fh)
    if "coeffs" not in doc:
        raise ParameterError(f"{path}: not a spectral file (no 'coeffs' entry)")
    coeffs = np.asarray(doc["coeffs"], dtype=float)
    if "n" in doc and int(doc["n"]) != coeffs.shape[0]:
        raise ParameterError("spectral file: declared n does not match coeffs length")
    return SpectralSignal(coeffs=coeffs)
