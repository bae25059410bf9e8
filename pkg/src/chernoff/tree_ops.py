"""Topology operations on Gaussian tree pairs and grafting chains.

Three operations act on trees without changing the Chernoff information
structure in characteristic ways:

* adding: attach the same new leaf (same anchor node, same weight) to both
  trees of a pair; the generalized spectrum gains exactly one unit
  eigenvalue.
* division: replace a shared edge of weight w1*w2 in both trees by a new
  intermediate node with edges of weights w1 and w2; again exactly one
  unit eigenvalue is added.
* grafting: cut one edge (i,p) and re-attach the detached subtree at a new
  anchor q with the same weight.  The edge-weight multiset, and hence the
  determinant, is unchanged.

A chain T1 <-> T2 <-> ... <-> Tn of grafting operations is "independent"
when the operations are confined to disjoint branches around an unchanged
center subtree.  For such chains the balance point of every tree pair is
exactly 1/2 (equivalently tr(S_half (S1^{-1} - S2^{-1})) = 0) and Chernoff
information is monotone on nested index intervals.  The independence
definition is pictorial in origin; ``is_independent_chain`` implements a
conservative set-theoretic formalization (it may reject some independent
configurations, never the reverse), documented on the function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .divergence import ChernoffResult, chernoff_information, sigma_lambda
from .errors import (
    DeterminantMismatch,
    DimensionMismatch,
    EdgeNotFound,
    EdgeNotShared,
    InvalidNode,
    ParseError,
    WeightFactorMismatch,
    WeightOutOfRange,
    WouldCreateCycle,
)
from .gaussian_tree import TreeSpec, as_covariance, build_covariance, tree_from_json, validate_tree

EDGE_WEIGHT_ATOL = 1e-12
DETERMINANT_RTOL = 1e-9
ORDERING_SLACK = 1e-9


@dataclass(frozen=True)
class GraftOp:
    """Cut edge (subtree_root, old_neighbor) and re-attach at new_neighbor."""

    subtree_root: int
    old_neighbor: int
    new_neighbor: int
    weight: float


@dataclass(frozen=True)
class GraftChain:
    """Base tree plus grafting operations and every intermediate tree.

    ``trees[0]`` is the base; ``trees[k+1]`` results from applying
    ``ops[k]`` to ``trees[k]``.
    """

    base: TreeSpec
    ops: tuple[GraftOp, ...]
    trees: tuple[TreeSpec, ...]


@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    center: tuple[int, ...] | None
    conflicts: tuple[tuple[int, int], ...]
    notes: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.independent


@dataclass(frozen=True)
class NestedCheck:
    outer: tuple[int, int]
    inner: tuple[int, int]
    ci_outer: float
    ci_inner: float
    margin: float
    ok: bool


@dataclass(frozen=True)
class OrderingReport:
    independent: bool
    checks: tuple[NestedCheck, ...]
    violations: tuple[NestedCheck, ...]
    min_pair: tuple[int, int]
    min_pair_adjacent: bool
    all_nested_hold: bool
    status: str  # "pass" / "fail" when independent, "observational" otherwise
    slack: float


def graft_op_from_json(obj) -> GraftOp:
    """Parse ``{"subtree_root": i, "old_neighbor": p, "new_neighbor": q, "weight": w}``."""
    if not isinstance(obj, dict):
        raise ParseError("graft op JSON must be an object")
    try:
        return GraftOp(
            subtree_root=int(obj["subtree_root"]),
            old_neighbor=int(obj["old_neighbor"]),
            new_neighbor=int(obj["new_neighbor"]),
            weight=float(obj["weight"]),
        )
    except KeyError as exc:
        raise ParseError(f"graft op JSON missing field {exc}") from exc


def graft_op_to_json(op: GraftOp) -> dict:
    return {
        "subtree_root": op.subtree_root,
        "old_neighbor": op.old_neighbor,
        "new_neighbor": op.new_neighbor,
        "weight": op.weight,
    }


def chain_from_json(obj) -> GraftChain:
    """Parse ``{"base": <tree>, "ops": [<graft op>, ...]}`` and build the chain."""
    if not isinstance(obj, dict) or "base" not in obj:
        raise ParseError("chain JSON must be an object with 'base' and 'ops'")
    base = tree_from_json(obj["base"])
    ops = tuple(graft_op_from_json(o) for o in obj.get("ops", []))
    return make_chain(base, ops)


def adding_operation(
    pair: tuple[TreeSpec, TreeSpec], attach_node: int, weight: float
) -> tuple[TreeSpec, TreeSpec]:
    """Attach leaf N+1 to ``attach_node`` with ``weight`` in both trees."""
    t1, t2 = (validate_tree(t) for t in pair)
    if t1.node_count != t2.node_count:
        raise DimensionMismatch(
            f"trees have {t1.node_count} and {t2.node_count} nodes"
        )
    n = t1.node_count
    if not 1 <= attach_node <= n:
        raise InvalidNode(f"attach node {attach_node} outside 1..{n}")
    if not abs(weight) < 1.0:
        raise WeightOutOfRange(f"leaf weight {weight} must satisfy |w| < 1")
    new_edge = (attach_node, n + 1, weight)
    return (
        validate_tree(TreeSpec(n + 1, t1.edges + (new_edge,))),
        validate_tree(TreeSpec(n + 1, t2.edges + (new_edge,))),
    )


def division_operation(
    pair: tuple[TreeSpec, TreeSpec], edge: tuple[int, int], w1: float, w2: float
) -> tuple[TreeSpec, TreeSpec]:
    """Split a shared edge (p,q) of weight w1*w2 through a new node N+1."""
    t1, t2 = (validate_tree(t) for t in pair)
    if t1.node_count != t2.node_count:
        raise DimensionMismatch(
            f"trees have {t1.node_count} and {t2.node_count} nodes"
        )
    p, q = edge
    key = (min(p, q), max(p, q))
    weights1, weights2 = t1.edge_weights(), t2.edge_weights()
    if key not in weights1 or key not in weights2:
        raise EdgeNotShared(f"edge {key} is not present in both trees")
    w_shared = weights1[key]
    if abs(w_shared - weights2[key]) > EDGE_WEIGHT_ATOL:
        raise EdgeNotShared(
            f"edge {key} has weights {w_shared} and {weights2[key]} in the two trees"
        )
    if not (abs(w1) < 1.0 and abs(w2) < 1.0):
        raise WeightOutOfRange(f"factors ({w1}, {w2}) must both satisfy |w| < 1")
    if abs(w1 * w2 - w_shared) > EDGE_WEIGHT_ATOL:
        raise WeightFactorMismatch(
            f"w1*w2 = {w1 * w2} does not reproduce the shared weight {w_shared}"
        )
    n = t1.node_count

    def split(tree: TreeSpec) -> TreeSpec:
        kept = tuple(e for e in tree.edges if (min(e[0], e[1]), max(e[0], e[1])) != key)
        new_edges = kept + ((p, n + 1, w1), (n + 1, q, w2))
        return validate_tree(TreeSpec(n + 1, new_edges))

    return split(t1), split(t2)


def _component(nodes_adj: dict[int, list[int]], start: int, blocked_edge=None) -> set[int]:
    """Nodes reachable from ``start``; ``blocked_edge`` (a,b) is impassable."""
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in nodes_adj[v]:
            if blocked_edge is not None and {v, u} == set(blocked_edge):
                continue
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _plain_adjacency(spec: TreeSpec) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in range(1, spec.node_count + 1)}
    for i, j, _ in spec.edges:
        adj[i].append(j)
        adj[j].append(i)
    return adj


def apply_graft(tree: TreeSpec, op: GraftOp) -> TreeSpec:
    """Remove edge (subtree_root, old_neighbor), add (subtree_root, new_neighbor).

    The new anchor must lie outside the detached subtree, otherwise the
    result would be cyclic and disconnected.
    """
    tree = validate_tree(tree)
    i, p, q, w = op.subtree_root, op.old_neighbor, op.new_neighbor, op.weight
    n = tree.node_count
    for v, label in ((i, "subtree_root"), (p, "old_neighbor"), (q, "new_neighbor")):
        if not 1 <= v <= n:
            raise InvalidNode(f"{label} {v} outside 1..{n}")
    key = (min(i, p), max(i, p))
    weights = tree.edge_weights()
    if key not in weights:
        raise EdgeNotFound(f"no edge {key} in the tree")
    if abs(weights[key] - w) > EDGE_WEIGHT_ATOL:
        raise EdgeNotFound(
            f"edge {key} has weight {weights[key]}, op expects {w}"
        )
    if q == i:
        raise WouldCreateCycle(f"new anchor {q} is the moved subtree's root")
    adj = _plain_adjacency(tree)
    anchored = _component(adj, p, blocked_edge=(i, p))
    if q not in anchored:
        raise WouldCreateCycle(f"new anchor {q} lies inside the moved subtree")
    kept = tuple(e for e in tree.edges if (min(e[0], e[1]), max(e[0], e[1])) != key)
    return validate_tree(TreeSpec(n, kept + ((i, q, w),)))


def make_chain(base: TreeSpec, ops) -> GraftChain:
    """Apply ops left to right, validating every intermediate tree."""
    base = validate_tree(base)
    ops = tuple(ops)
    trees = [base]
    for op in ops:
        trees.append(apply_graft(trees[-1], op))
    return GraftChain(base=base, ops=ops, trees=tuple(trees))


def is_independent_chain(chain: GraftChain) -> IndependenceReport:
    """Conservative test for mutually independent grafting operations.

    Operations count as independent when (a) no node has incident edges
    modified by two different operations, i.e. the triples
    {subtree_root, old_neighbor, new_neighbor} are pairwise disjoint, and
    (b) there is a connected center subtree, avoiding every anchor node,
    such that removing it splits the base tree into branches each touched
    by at most one operation.  Candidate centers are the connected
    components of the base tree minus all anchors; if a valid center
    exists, the maximal such component is one, so checking components
    suffices.

    The test is conservative: configurations it accepts satisfy the
    independence picture, but unusual independent layouts may be rejected.
    A single operation is vacuously independent.
    """
    n_ops = len(chain.ops)
    if n_ops <= 1:
        return IndependenceReport(
            independent=True,
            center=None,
            conflicts=(),
            notes=("at most one operation; independence is vacuous",),
        )

    modified = [
        frozenset((op.subtree_root, op.old_neighbor, op.new_neighbor))
        for op in chain.ops
    ]
    conflicts = tuple(
        (k, l)
        for k in range(n_ops)
        for l in range(k + 1, n_ops)
        if modified[k] & modified[l]
    )
    if conflicts:
        return IndependenceReport(
            independent=False,
            center=None,
            conflicts=conflicts,
            notes=("operations modify edges at a shared node",),
        )

    base = chain.base
    adj = _plain_adjacency(base)
    anchors = {op.old_neighbor for op in chain.ops} | {
        op.new_neighbor for op in chain.ops
    }
    candidates = []
    remaining = set(range(1, base.node_count + 1)) - anchors
    while remaining:
        start = next(iter(remaining))
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u in remaining and u not in comp:
                    comp.add(u)
                    stack.append(u)
        remaining -= comp
        candidates.append(comp)

    best_pairs: tuple[tuple[int, int], ...] = tuple(
        (k, l) for k in range(n_ops) for l in range(k + 1, n_ops)
    )
    for center in candidates:
        outside = set(range(1, base.node_count + 1)) - center
        co_resident: set[tuple[int, int]] = set()
        seen_out: set[int] = set()
        ok = True
        while outside - seen_out:
            start = next(iter(outside - seen_out))
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u in outside and u not in comp:
                        comp.add(u)
                        stack.append(u)
            seen_out |= comp
            touching = [k for k in range(n_ops) if modified[k] & comp]
            if len(touching) > 1:
                ok = False
                co_resident.update(
                    (touching[a], touching[b])
                    for a in range(len(touching))
                    for b in range(a + 1, len(touching))
                )
        if ok:
            return IndependenceReport(
                independent=True,
                center=tuple(sorted(center)),
                conflicts=(),
            )
        if len(co_resident) < len(best_pairs):
            best_pairs = tuple(sorted(co_resident))

    return IndependenceReport(
        independent=False,
        center=None,
        conflicts=best_pairs,
        notes=("no unchanged center subtree separates the operations",),
    )


def trace_condition(sigma1, sigma2) -> float:
    """tr(S_half (S1^{-1} - S2^{-1})) with S_half the midpoint interpolant.

    Requires |S1| = |S2| (relative tolerance 1e-9); under that assumption
    the value is zero exactly when the balance point is 1/2.
    """
    c1m = as_covariance(sigma1, name="sigma1")
    c2m = as_covariance(sigma2, name="sigma2")
    if c1m.dim != c2m.dim:
        raise DimensionMismatch(f"dimension mismatch: {c1m.dim} vs {c2m.dim}")
    f1 = cho_factor(c1m.matrix, lower=True)
    f2 = cho_factor(c2m.matrix, lower=True)
    logdet1 = 2.0 * float(np.sum(np.log(np.diag(f1[0]))))
    logdet2 = 2.0 * float(np.sum(np.log(np.diag(f2[0]))))
    if abs(logdet1 - logdet2) > DETERMINANT_RTOL:
        raise DeterminantMismatch(
            f"log-determinants differ by {abs(logdet1 - logdet2):.3e}; "
            "the midpoint characterization needs equal determinants"
        )
    half = sigma_lambda(c1m, c2m, 0.5).matrix
    return float(np.trace(cho_solve(f1, half)) - np.trace(cho_solve(f2, half)))


def chain_pairwise_chernoff(chain: GraftChain) -> dict[tuple[int, int], ChernoffResult]:
    """Chernoff result for every tree pair (a, b) with a < b, 0-based."""
    covs = [build_covariance(t) for t in chain.trees]
    out: dict[tuple[int, int], ChernoffResult] = {}
    for a in range(len(covs)):
        for b in range(a + 1, len(covs)):
            out[(a, b)] = chernoff_information(covs[a], covs[b])
    return out


def chain_ci_matrix(chain: GraftChain, pairwise=None) -> np.ndarray:
    """Symmetric matrix of pairwise Chernoff information values."""
    n = len(chain.trees)
    if pairwise is None:
        pairwise = chain_pairwise_chernoff(chain)
    mat = np.zeros((n, n))
    for (a, b), res in pairwise.items():
        mat[a, b] = res.ci
        mat[b, a] = res.ci
    return mat


def verify_partial_ordering(
    chain: GraftChain, slack: float = ORDERING_SLACK, pairwise=None
) -> OrderingReport:
    """Check CI(T_i||T_j) <= CI(T_p||T_q) on all nested index pairs.

    The inequality is a theorem only for independent chains, so the report
    is marked observational when the independence test fails.  The global
    minimum over all pairs is also checked to be attained (within slack)
    by an adjacent pair.
    """
    if pairwise is None:
        pairwise = chain_pairwise_chernoff(chain)
    ci = chain_ci_matrix(chain, pairwise)
    n = len(chain.trees)
    checks = []
    for p in range(n):
        for q in range(p + 1, n):
            for i in range(p, q + 1):
                for j in range(i + 1, q + 1):
                    if (i, j) == (p, q):
                        continue
                    margin = ci[p, q] - ci[i, j]
                    checks.append(
                        NestedCheck(
                            outer=(p, q),
                            inner=(i, j),
                            ci_outer=float(ci[p, q]),
                            ci_inner=float(ci[i, j]),
                            margin=float(margin),
                            ok=bool(margin >= -slack),
                        )
                    )
    violations = tuple(c for c in checks if not c.ok)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if pairs:
        min_pair = min(pairs, key=lambda ab: ci[ab])
        adjacent_min = min(ci[a, a + 1] for a in range(n - 1)) if n > 1 else 0.0
        min_adjacent = bool(adjacent_min <= ci[min_pair] + slack)
    else:
        min_pair = (0, 0)
        min_adjacent = True
    independent = bool(is_independent_chain(chain))
    all_hold = not violations and min_adjacent
    if independent:
        status = "pass" if all_hold else "fail"
    else:
        status = "observational"
    return OrderingReport(
        independent=independent,
        checks=tuple(checks),
        violations=violations,
        min_pair=min_pair,
        min_pair_adjacent=min_adjacent,
        all_nested_hold=bool(all_hold),
        status=status,
        slack=slack,
    )
