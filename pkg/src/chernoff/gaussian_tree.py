"""Normalized Gaussian tree models and their closed-form matrix algebra.

A weighted spanning tree on nodes 1..N with edge weights strictly inside
(-1, 1) defines a zero-mean Gaussian vector in which every variable has
unit variance and the covariance of two nodes is the product of the edge
weights along the unique path between them.  For such models the precision
matrix and the determinant have closed forms:

* off-diagonal precision entries are -w/(1-w^2) on tree edges and 0
  elsewhere,
* diagonal precision entries are 1 + sum over incident edges of
  w^2/(1-w^2),
* the determinant is the product over edges of (1-w^2).

Node ids are 1-based in ``TreeSpec`` and in all JSON payloads; numpy array
indices are 0-based.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    CycleError,
    DimensionMismatch,
    DisconnectedError,
    DuplicateEdge,
    NotPositiveDefinite,
    ParseError,
    WeightOutOfRange,
)

SYMMETRY_RTOL = 1e-12
NORMALIZED_ATOL = 1e-12


class ZeroWeightWarning(UserWarning):
    """A zero edge weight makes the two sides of the edge independent."""


@dataclass(frozen=True)
class TreeSpec:
    """Weighted tree: ``node_count`` nodes (ids 1..N) and N-1 weighted edges."""

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    def edge_weights(self) -> dict[tuple[int, int], float]:
        """Weights keyed by sorted node pair."""
        return {(min(i, j), max(i, j)): w for i, j, w in self.edges}


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive-definite matrix with light metadata."""

    matrix: np.ndarray
    dim: int
    normalized: bool


def tree_from_json(obj) -> TreeSpec:
    """Parse ``{"nodes": N, "edges": [[i, j, w], ...]}`` into a TreeSpec."""
    if not isinstance(obj, dict):
        raise ParseError("tree JSON must be an object with 'nodes' and 'edges'")
    try:
        nodes = obj["nodes"]
        raw_edges = obj["edges"]
    except KeyError as exc:
        raise ParseError(f"tree JSON missing field {exc}") from exc
    if not isinstance(nodes, int) or isinstance(nodes, bool):
        raise ParseError("'nodes' must be an integer")
    edges = []
    for entry in raw_edges:
        if len(entry) != 3:
            raise ParseError(f"edge entry {entry!r} must be [i, j, w]")
        i, j, w = entry
        edges.append((int(i), int(j), float(w)))
    return validate_tree(TreeSpec(node_count=nodes, edges=tuple(edges)))


def tree_to_json(spec: TreeSpec) -> dict:
    return {"nodes": spec.node_count, "edges": [[i, j, w] for i, j, w in spec.edges]}


def validate_tree(spec: TreeSpec) -> TreeSpec:
    """Check all TreeSpec invariants and return the spec unchanged.

    Raises CycleError, DisconnectedError, WeightOutOfRange or DuplicateEdge.
    A zero weight is legal but triggers ZeroWeightWarning since it severs the
    dependence between the two sides of the edge.
    """
    n = spec.node_count
    if n < 1:
        raise DisconnectedError("node_count must be >= 1")
    seen = set()
    adj = {v: [] for v in range(1, n + 1)}
    for i, j, w in spec.edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise DisconnectedError(f"edge ({i},{j}) references a node outside 1..{n}")
        if i == j:
            raise CycleError(f"self-loop at node {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"edge {key} appears more than once")
        seen.add(key)
        if not abs(w) < 1.0:
            raise WeightOutOfRange(f"edge {key} weight {w} must satisfy |w| < 1")
        if w == 0.0:
            warnings.warn(
                f"edge {key} has weight 0; it carries no dependence",
                ZeroWeightWarning,
                stacklevel=2,
            )
        adj[i].append(j)
        adj[j].append(i)

    if len(spec.edges) > n - 1:
        raise CycleError(f"{len(spec.edges)} edges on {n} nodes form a cycle")
    if len(spec.edges) < n - 1:
        raise DisconnectedError(f"{len(spec.edges)} edges cannot connect {n} nodes")

    # N-1 distinct edges: connected iff acyclic; a BFS from node 1 decides.
    reached = {1}
    frontier = [1]
    while frontier:
        v = frontier.pop()
        for u in adj[v]:
            if u not in reached:
                reached.add(u)
                frontier.append(u)
    if len(reached) != n:
        # some component carries at least as many edges as nodes
        raise DisconnectedError(
            f"nodes {sorted(set(range(1, n + 1)) - reached)} are unreachable from node 1"
        )
    return spec


def adjacency(spec: TreeSpec) -> dict[int, list[tuple[int, float]]]:
    """Neighbor lists with weights, keyed by 1-based node id."""
    adj: dict[int, list[tuple[int, float]]] = {v: [] for v in range(1, spec.node_count + 1)}
    for i, j, w in spec.edges:
        adj[i].append((j, w))
        adj[j].append((i, w))
    return adj


def build_covariance(spec: TreeSpec) -> CovarianceMatrix:
    """Dense covariance with unit diagonal and path-product off-diagonals.

    Entries are accumulated by one traversal per source node, multiplying
    weights edge by edge along the path, so every entry equals the literal
    product of its path weights (no divisions, zero weights included).
    O(N^2) overall.
    """
    spec = validate_tree(spec)
    n = spec.node_count
    adj = adjacency(spec)
    cov = np.eye(n)
    for src in range(1, n + 1):
        stack = [(src, 1.0)]
        visited = {src}
        while stack:
            v, prod = stack.pop()
            for u, w in adj[v]:
                if u in visited:
                    continue
                visited.add(u)
                p = prod * w
                if u > src:
                    cov[src - 1, u - 1] = p
                    cov[u - 1, src - 1] = p
                stack.append((u, p))
    return covariance_from_matrix(cov)


def tree_precision(spec: TreeSpec) -> CovarianceMatrix:
    """Closed-form inverse of the tree covariance."""
    spec = validate_tree(spec)
    n = spec.node_count
    prec = np.eye(n)
    for i, j, w in spec.edges:
        d = 1.0 - w * w
        prec[i - 1, j - 1] = -w / d
        prec[j - 1, i - 1] = -w / d
        prec[i - 1, i - 1] += w * w / d
        prec[j - 1, j - 1] += w * w / d
    return covariance_from_matrix(prec)


def tree_determinant(spec: TreeSpec) -> float:
    """Product over edges of (1 - w^2); the empty product (N=1) is 1.

    Factors are multiplied in sorted order so trees with equal weight
    multisets (for example along a grafting chain) give bit-identical
    determinants.
    """
    spec = validate_tree(spec)
    factors = sorted(1.0 - w * w for _, _, w in spec.edges)
    det = 1.0
    for f in factors:
        det *= f
    return det


def covariance_from_matrix(matrix, name: str = "matrix") -> CovarianceMatrix:
    """Validate symmetry and positive definiteness, and wrap the array.

    Symmetry is required to within ``SYMMETRY_RTOL`` relative tolerance and
    the stored matrix is exactly symmetrized.  Positive definiteness is
    established by a Cholesky factorization.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise NotPositiveDefinite(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.abs(arr).max()))
    if float(np.abs(arr - arr.T).max()) > SYMMETRY_RTOL * scale:
        raise NotPositiveDefinite(f"{name} is not symmetric")
    sym = 0.5 * (arr + arr.T)
    try:
        np.linalg.cholesky(sym)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"{name} is not positive definite") from exc
    normalized = bool(np.abs(np.diag(sym) - 1.0).max() <= NORMALIZED_ATOL)
    sym.setflags(write=False)
    return CovarianceMatrix(matrix=sym, dim=sym.shape[0], normalized=normalized)


def as_covariance(value, name: str = "matrix") -> CovarianceMatrix:
    """Coerce a CovarianceMatrix, TreeSpec, or raw array to CovarianceMatrix."""
    if isinstance(value, CovarianceMatrix):
        return value
    if isinstance(value, TreeSpec):
        return build_covariance(value)
    return covariance_from_matrix(value, name=name)
