"""Graph construction, shift normalization, and the spectral basis.

Five unweighted random-graph families are provided:

- ``ring``  : cycle where every node connects to its k nearest neighbors
- ``er``    : Erdos-Renyi, each pair connected independently with probability p
- ``rgg``   : random geometric graph on the unit square with a hard distance cutoff
- ``ws``    : Watts-Strogatz small world (ring base, per-edge rewiring)
- ``ba``    : Barabasi-Albert preferential attachment

All generators are deterministic given (kind, params, seed) and may return a
disconnected graph; the number of connected components is recorded on the
Graph rather than treated as an error.

Matrices are dense; the intended scale is a few thousand nodes, where the
full symmetric eigendecomposition dominates the cost anyway.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateGraphError, NumericError, ParameterError, SymmetryError

GENERATORS = ("ring", "er", "rgg", "ws", "ba")

_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """An undirected weighted graph.

    Attributes
    ----------
    n : int
        Node count, at least 2.
    weights : (n, n) ndarray
        Symmetric nonnegative weight matrix with zero diagonal.
    kind : str
        Generator tag, or ``"custom"`` for hand-built graphs.
    params : dict
        Generator parameters used to build the graph.
    seed : int
        RNG seed used to build the graph.
    components : int
        Number of connected components.
    """

    n: int
    weights: np.ndarray
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    seed: int = 0
    components: int = 1

    def __post_init__(self):
        w = self.weights
        if self.n < 2:
            raise ParameterError(f"graph needs at least 2 nodes, got n={self.n}")
        if w.shape != (self.n, self.n):
            raise ParameterError(f"weights shape {w.shape} does not match n={self.n}")
        if not np.array_equal(w, w.T):
            raise SymmetryError("weight matrix is not symmetric")
        if np.any(np.diag(w) != 0):
            raise ParameterError("weight matrix has nonzero diagonal entries")
        if np.any(w < 0):
            raise ParameterError("weight matrix has negative entries")


@dataclass(frozen=True)
class NormalizedShift:
    """A graph weight matrix rescaled to unit spectral radius.

    ``matrix`` equals the original weights divided by ``scale``, where
    ``scale`` is the largest eigenvalue magnitude of the weights.
    """

    matrix: np.ndarray
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ParameterError("scale must be positive")
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ParameterError("matrix must be square")


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormal eigenvector basis of a normalized shift.

    Attributes
    ----------
    vectors : (n, n) ndarray
        Columns are unit-norm eigenvectors; column k pairs with eigenvalue k.
    eigenvalues : (n,) ndarray
        Sorted descending; the first equals 1 and all lie in [-1, 1]
        (up to a 1e-8 tolerance).
    """

    vectors: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        v, lam = self.vectors, self.eigenvalues
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ParameterError("vectors must be a square matrix")
        if lam.shape != (v.shape[0],):
            raise ParameterError("eigenvalues length does not match vectors")
        if np.any(np.diff(lam) > 0):
            raise ParameterError("eigenvalues must be sorted in descending order")
        if abs(lam[0] - 1.0) > 1e-8:
            raise NumericError(f"leading eigenvalue {lam[0]} is not 1 within 1e-8")
        if lam[-1] < -1 - 1e-8 or lam[0] > 1 + 1e-8:
            raise NumericError("eigenvalues fall outside [-1, 1] beyond tolerance")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def generate_graph(kind: str, params: dict, seed: int) -> Graph:
    """Build one of the five graph families.

    Parameters
    ----------
    kind : str
        One of ``ring``, ``er``, ``rgg``, ``ws``, ``ba``.
    params : dict
        Per-kind parameters:
          ring: ``n``, ``k`` (even, < n)
          er:   ``n``, ``p`` in [0, 1]
          rgg:  ``n``, ``radius`` > 0
          ws:   ``n``, ``k`` (even, < n, default 2), ``rewire`` in [0, 1]
          ba:   ``n``, ``attach`` >= 1
    seed : int
        64-bit seed; identical inputs give a bit-identical adjacency.

    Returns
    -------
    Graph
        Unweighted (0/1) symmetric graph with its component count recorded.
    """
    if kind not in GENERATORS:
        raise ParameterError(f"unknown graph kind {kind!r}; expected one of {GENERATORS}")
    params = dict(params)
    n = int(params.get("n", 0))
    if n < 2:
        raise ParameterError(f"{kind}: need n >= 2, got {n}")
    rng = np.random.default_rng(seed)

    if kind == "ring":
        w = _ring(n, int(params.get("k", 4)))
    elif kind == "er":
        w = _erdos_renyi(n, float(params.get("p", 0.01)), rng)
    elif kind == "rgg":
        w = _geometric(n, float(params.get("radius", 0.03)), rng)
    elif kind == "ws":
        w = _small_world(n, int(params.get("k", 2)), float(params.get("rewire", 1e-4)), rng)
    else:
        w = _preferential(n, int(params.get("attach", 1)), rng)

    return Graph(
        n=n,
        weights=w,
        kind=kind,
        params=params,
        seed=int(seed),
        components=component_count(w),
    )


def _ring(n: int, k: int) -> np.ndarray:
    if k < 2 or k % 2 != 0:
        raise ParameterError(f"ring: k must be a positive even integer, got {k}")
    if k >= n:
        raise ParameterError(f"ring: need k < n, got k={k}, n={n}")
    w = np.zeros((n, n))
    idx = np.arange(n)
    for d in range(1, k // 2 + 1):
        w[idx, (idx + d) % n] = 1.0
        w[(idx + d) % n, idx] = 1.0
    return w


def _erdos_renyi(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"er: p must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    w = np.zeros((n, n))
    w[iu[mask], ju[mask]] = 1.0
    w[ju[mask], iu[mask]] = 1.0
    return w


def _geometric(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    if radius <= 0:
        raise ParameterError(f"rgg: radius must be positive, got {radius}")
    pos = rng.random((n, 2))
    diff = pos[:, None, :] - pos[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    w = (dist2 < radius * radius).astype(float)
    np.fill_diagonal(w, 0.0)
    return w


def _small_world(n: int, k: int, rewire: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= rewire <= 1.0:
        raise ParameterError(f"ws: rewire must lie in [0, 1], got {rewire}")
    w = _ring(n, k)
    # Each node owns its k/2 clockwise edges; each is rewired independently.
    for i in range(n):
        for d in range(1, k // 2 + 1):
            if rng.random() >= rewire:
                continue
            j = (i + d) % n
            candidates = np.flatnonzero(w[i] == 0)
            candidates = candidates[candidates != i]
            if candidates.size == 0:
                continue
            t = int(rng.choice(candidates))
            w[i, j] = w[j, i] = 0.0
            w[i, t] = w[t, i] = 1.0
    return w


def _preferential(n: int, attach: int, rng: np.random.Generator) -> np.ndarray:
    if attach < 1:
        raise ParameterError(f"ba: attach must be >= 1, got {attach}")
    w = np.zeros((n, n))
    w[0, 1] = w[1, 0] = 1.0
    deg = np.zeros(n)
    deg[:2] = 1.0
    for v in range(2, n):
        picks = min(attach, v)
        weights = deg[:v].copy()
        for _ in range(picks):
            t = int(rng.choice(v, p=weights / weights.sum()))
            weights[t] = 0.0  # without replacement within one arrival
            w[v, t] = w[t, v] = 1.0
            deg[t] += 1.0
        deg[v] = picks
    return w


def component_count(weights: np.ndarray) -> int:
    """Number of connected components of a symmetric weight matrix."""
    adj = csr_matrix(weights > 0)
    count, _ = connected_components(adj, directed=False)
    return int(count)


def degree_vector(g: Graph) -> np.ndarray:
    """Weighted degree of every node: row sums of the weight matrix."""
    return g.weights.sum(axis=1)


def normalize_shift(g: Graph) -> NormalizedShift:
    """Rescale the weights so the spectral radius equals 1.

    Raises
    ------
    DegenerateGraphError
        If the graph has no edges (all-zero weights cannot be normalized).
    """
    if not np.any(g.weights):
        raise DegenerateGraphError("cannot normalize an all-zero weight matrix")
    eigvals = np.linalg.eigvalsh(g.weights)
    scale = float(max(abs(eigvals[0]), abs(eigvals[-1])))
    return NormalizedShift(matrix=g.weights / scale, scale=scale)


def spectral_decompose(shift: NormalizedShift) -> SpectralBasis:
    """Eigendecompose a normalized shift into an orthonormal basis.

    Eigenvalues come out sorted descending, starting at 1.  The output is
    deterministic: each eigenvector's first component larger than 1e-12 in
    magnitude is made positive, and columns with exactly equal eigenvalues
    are ordered by lexicographic comparison of their components.

    Raises
    ------
    SymmetryError
        If the matrix deviates from symmetry by more than 1e-10.
    NumericError
        If the eigensolver fails to converge.
    """
    a = shift.matrix
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-10):
        raise SymmetryError("shift matrix deviates from symmetry beyond 1e-10")
    try:
        eigvals, vecs = np.linalg.eigh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc

    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    vecs = vecs[:, order]
    _fix_signs(vecs)
    _order_exact_ties(eigvals, vecs)
    return SpectralBasis(vectors=vecs, eigenvalues=eigvals)


def _fix_signs(vecs: np.ndarray) -> None:
    """Flip columns so the first significantly nonzero component is positive."""
    first = (np.abs(vecs) > _SIGN_TOL).argmax(axis=0)
    signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    vecs *= signs


def _order_exact_ties(eigvals: np.ndarray, vecs: np.ndarray) -> None:
    """Within exact-equality eigenvalue groups, sort columns lexicographically."""
    n = eigvals.size
    i = 0
    while i < n:
        j = i + 1
        while j < n and eigvals[j] == eigvals[i]:
            j += 1
        if j - i > 1:
            block = sorted(range(i, j), key=lambda c: tuple(vecs[:, c]))
            vecs[:, i:j] = vecs[:, block]
        i = j


def graph_to_dict(g: Graph) -> dict:
    """JSON-ready form: edge list with i < j, 0-based node ids."""
    iu, ju = np.nonzero(np.triu(g.weights, k=1))
    edges = [[int(i), int(j), float(g.weights[i, j])] for i, j in zip(iu, ju)]
    return {"n": g.n, "kind": g.kind, "params": g.params, "seed": g.seed, "edges": edges}


def graph_from_dict(doc: dict) -> Graph:
    if "n" not in doc:
        raise ParameterError("not a graph document (no 'n' entry)")
    n = int(doc["n"])
    w = np.zeros((n, n))
    for i, j, val in doc.get("edges", []):
        if not 0 <= i < j < n:
            raise ParameterError(f"edge ({i}, {j}) violates 0 <= i < j < n")
        w[i, j] = w[j, i] = float(val)
    return Graph(
        n=n,
        weights=w,
        kind=doc.get("kind", "custom"),
        params=dict(doc.get("params", {})),
        seed=int(doc.get("seed", 0)),
        components=component_count(w),
    )


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(g), fh)


def load_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))
