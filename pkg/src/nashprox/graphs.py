"""Communication graphs, Metropolis weights, and geometric mixing constants.

Weight matrices are symmetric, doubly stochastic, and supported on the graph
(positive exactly on edges, with nonnegative diagonal). For such matrices
the consensus powers satisfy |[A^k]_ij - 1/N| <= theta * beta^k with theta=1
and beta the second largest eigenvalue modulus, which is the geometric
mixing estimate the distributed rate constants consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoGeometricMixing
from .sampling import SampleCounter

_STRUCT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CommGraph:
    """Undirected connected communication graph with consensus weights.

    edges are (i, j) pairs with i < j. The weight matrix is validated for
    symmetry, double stochasticity, support on the edge set, and the graph
    for connectivity (by traversal).
    """

    n_nodes: int
    edges: frozenset[tuple[int, int]]
    weights: np.ndarray

    def __post_init__(self):
        n = int(self.n_nodes)
        if n < 1:
            raise ValueError(f"graph needs at least one node, got {n}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < j < n):
                raise ValueError(f"edge ({i}, {j}) is not ordered within 0..{n - 1}")
        a = np.asarray(self.weights, dtype=float)
        if a.shape != (n, n):
            raise ValueError(f"weight matrix must be {(n, n)}, got {a.shape}")
        if not np.allclose(a, a.T, atol=_STRUCT_TOL):
            raise ValueError("weight matrix must be symmetric")
        if not np.allclose(a.sum(axis=1), 1.0, atol=_STRUCT_TOL):
            raise ValueError("weight matrix rows must sum to one")
        if np.any(a < -_STRUCT_TOL):
            raise ValueError("weight matrix entries must be nonnegative")
        for i in range(n):
            for j in range(i + 1, n):
                on_edge = (i, j) in edges
                if on_edge and a[i, j] <= 0.0:
                    raise ValueError(f"edge ({i}, {j}) must carry positive weight")
                if not on_edge and abs(a[i, j]) > _STRUCT_TOL:
                    raise ValueError(
                        f"nonzero weight on missing edge ({i}, {j})")
        if not _connected(n, edges):
            raise ValueError("graph is not connected")
        object.__setattr__(self, "n_nodes", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", a)

    def neighbors(self, i: int) -> tuple[int, ...]:
        out = [j for (u, j) in self.edges if u == i]
        out += [u for (u, j) in self.edges if j == i]
        return tuple(sorted(out))

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))


@dataclass(frozen=True)
class MixingParams:
    """Geometric mixing estimate |[A^k]_ij - 1/N| <= theta * beta^k."""

    theta: float
    beta: float


def _connected(n: int, edges) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return all(seen)


def build_metropolis_weights(n_nodes: int, edges) -> CommGraph:
    """Metropolis weights a_ij = 1/(1 + max(deg_i, deg_j)) on an edge set.

    Diagonal entries absorb the slack, so rows sum to one and the diagonal
    stays positive. The result is symmetric and doubly stochastic on any
    connected undirected graph.
    """
    n = int(n_nodes)
    edge_set = frozenset(tuple(sorted((int(i), int(j)))) for i, j in edges)
    for i, j in edge_set:
        if i == j:
            raise ValueError(f"self-loop ({i}, {j}) is not an edge")
    deg = [0] * n
    for i, j in edge_set:
        deg[i] += 1
        deg[j] += 1
    a = np.zeros((n, n))
    for i, j in edge_set:
        w = 1.0 / (1.0 + max(deg[i], deg[j]))
        a[i, j] = w
        a[j, i] = w
    for i in range(n):
        a[i, i] = 1.0 - a[i].sum()
    return CommGraph(n_nodes=n, edges=edge_set, weights=a)


def complete_graph(n: int) -> CommGraph:
    return build_metropolis_weights(n, [(i, j) for i in range(n)
                                        for j in range(i + 1, n)])


def ring_graph(n: int) -> CommGraph:
    if n < 3:
        raise ValueError(f"a ring needs at least 3 nodes, got {n}")
    return build_metropolis_weights(
        n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> CommGraph:
    if n < 2:
        raise ValueError(f"a path needs at least 2 nodes, got {n}")
    return build_metropolis_weights(n, [(i, i + 1) for i in range(n - 1)])


def grid_graph(rows: int, cols: int) -> CommGraph:
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return build_metropolis_weights(rows * cols, edges)


def erdos_renyi_graph(n: int, p: float, seed: int = 0,
                      max_tries: int = 100) -> CommGraph:
    """Random G(n, p) graph, resampled until connected."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), n)))
    for _ in range(max_tries):
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < p]
        if _connected(n, edges):
            return build_metropolis_weights(n, edges)
    raise ValueError(
        f"no connected graph in {max_tries} draws at n={n}, p={p}")


def mixing_params(g: CommGraph | np.ndarray) -> MixingParams:
    """theta and beta of the geometric mixing bound for symmetric doubly
    stochastic weights: theta = 1 and beta the second largest eigenvalue
    modulus.

    Accepts a validated graph or a raw symmetric stochastic matrix (useful
    for diagnosing matrices that fail the graph invariants). Raises
    NoGeometricMixing when beta >= 1 up to tolerance, e.g. on a disconnected
    support.
    """
    a = g.weights if isinstance(g, CommGraph) else np.asarray(g, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"weight matrix must be square, got {a.shape}")
    if not np.allclose(a, a.T, atol=1e-9):
        raise ValueError("mixing constants require a symmetric weight matrix")
    spectrum = np.linalg.eigvalsh(a)
    # Largest eigenvalue of a stochastic matrix is 1; beta is the runner-up
    # in modulus.
    beta = float(max(abs(spectrum[0]), abs(spectrum[-2]))) if len(spectrum) > 1 else 0.0
    beta = max(beta, 0.0)
    if beta >= 1.0 - 1e-12:
        raise NoGeometricMixing(
            f"second largest eigenvalue modulus {beta} is not below one; "
            f"no geometric mixing (is the graph connected?)")
    return MixingParams(theta=1.0, beta=beta)


def consensus_apply(g: CommGraph, values, tau: int,
                    counter: SampleCounter | None = None) -> np.ndarray:
    """tau rounds of synchronous averaging: values <- A^tau values.

    values has one row per node (a 1-D array is treated as one scalar per
    node). tau = 0 returns the input unchanged; the counter, when given,
    accrues tau communication rounds.
    """
    if tau < 0:
        raise ValueError(f"consensus rounds must be >= 0, got {tau}")
    v = np.asarray(values, dtype=float)
    if v.shape[0] != g.n_nodes:
        raise ValueError(
            f"values have {v.shape[0]} rows for {g.n_nodes} nodes")
    out = v.copy()
    for _ in range(int(tau)):
        out = g.weights @ out
    if counter is not None:
        counter.comm_rounds += int(tau)
    return out


def transition_matrix(g: CommGraph, k: int, s: int,
                      tau_schedule=None) -> np.ndarray:
    """Product of the per-iteration consensus powers from s through k.

    With tau_schedule(p) rounds at iteration p (default p + 1), this is
    A^{tau_k} ... A^{tau_s} = A^{sum of taus}. Requires 0 <= s <= k.
    """
    if not (0 <= s <= k):
        raise ValueError(f"need 0 <= s <= k, got s={s}, k={k}")
    if tau_schedule is None:
        tau_schedule = lambda p: p + 1
    total = sum(int(tau_schedule(p)) for p in range(s, k + 1))
    return np.linalg.matrix_power(g.weights, total)


def max_mixing_deviation(g: CommGraph, k: int) -> float:
    """max_ij |[A^k]_ij - 1/N|, the quantity the mixing bound controls."""
    power = np.linalg.matrix_power(g.weights, int(k))
    return float(np.max(np.abs(power - 1.0 / g.n_nodes)))
