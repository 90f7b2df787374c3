"""Constructive weights w(G, T): the fraction of edge orderings (Hepp
sectors) of G whose Kruskal leading tree is T.

Three exact routes are provided and are expected to agree to the last bit:

* brute force over all |E|! sectors,
* a memoized deletion-contraction recursion on the first sector edge,
* the integral over tree-edge weakening parameters of the product of path
  minima, evaluated exactly by splitting the cube into order simplices.

A Monte-Carlo estimate of the same integral is provided for cross-checks.
"""

from __future__ import annotations

import itertools
import math
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._stats import RunningMean
from .errors import CapExceededError, DisconnectedGraphError, GraphError
from .graph import (Multigraph, canonical_key, check_spanning_tree, contract_edge,
                    delete_edge, is_connected, tree_paths)

DEFAULT_MAX_EDGES = 9
DEFAULT_MAX_TREE_EDGES = 9
METHODS = ("brute", "dc", "symbolic", "mc")

SpanningTree = frozenset


@dataclass(frozen=True)
class OrderedTree:
    order: tuple[str, ...]

    @property
    def edges(self) -> frozenset[str]:
        return frozenset(self.order)


@dataclass(frozen=True)
class ConstructiveWeight:
    sector_count: int
    total_sectors: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.sector_count, self.total_sectors)

    def __str__(self) -> str:
        v = self.value
        return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class MonteCarloWeight:
    estimate: float
    std_error: float
    samples: int


def _require_connected(g: Multigraph) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError("weights are defined for connected graphs only")


def _check_sector(g: Multigraph, sector: Sequence[str]) -> None:
    if sorted(sector) != sorted(g.edge_labels):
        raise GraphError("a sector must list every edge of the graph exactly once")


def kruskal_leading_tree(g: Multigraph, sector: Sequence[str]) -> OrderedTree:
    """Scan edges in sector order, keeping each edge that joins two different
    components.  Equivalent to contracting non-loops and deleting loops."""
    _require_connected(g)
    _check_sector(g, sector)
    emap = g.edge_map()
    parent = {v: v for v in g.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    picked = []
    for label in sector:
        e = emap[label]
        ra, rb = find(e.end_a), find(e.end_b)
        if ra != rb:
            parent[ra] = rb
            picked.append(label)
            if len(picked) == g.num_vertices - 1:
                break
    return OrderedTree(tuple(picked))


def _check_cap(g: Multigraph, max_edges: int) -> None:
    if g.num_edges > max_edges:
        raise CapExceededError(
            f"brute force over {g.num_edges}! sectors exceeds the cap of {max_edges} edges")


def _leading_tree_masks(g: Multigraph, max_edges: int):
    """Yield ``(sector_index_tuple, tree_bitmask)`` for every sector."""
    _require_connected(g)
    _check_cap(g, max_edges)
    vindex = {v: k for k, v in enumerate(g.vertices)}
    ends = [(vindex[e.end_a], vindex[e.end_b]) for e in g.edges]
    nv = g.num_vertices
    need = nv - 1
    for perm in itertools.permutations(range(g.num_edges)):
        parent = list(range(nv))
        mask = 0
        picked = 0
        for k in perm:
            if picked == need:
                break
            a, b = ends[k]
            while parent[a] != a:
                a = parent[a]
            while parent[b] != b:
                b = parent[b]
            if a != b:
                parent[a] = b
                mask |= 1 << k
                picked += 1
        yield perm, mask


def _mask_to_tree(g: Multigraph, mask: int) -> frozenset[str]:
    return frozenset(e.label for k, e in enumerate(g.edges) if mask >> k & 1)


def sector_counts(g: Multigraph, max_edges: int = DEFAULT_MAX_EDGES) -> dict[frozenset[str], int]:
    """N(G, T) for every tree T, by one pass over all sectors."""
    counts = Counter(mask for _, mask in _leading_tree_masks(g, max_edges))
    return {_mask_to_tree(g, m): c for m, c in counts.items()}


def weight_bruteforce(g: Multigraph, tree: Iterable[str],
                      max_edges: int = DEFAULT_MAX_EDGES) -> ConstructiveWeight:
    t = check_spanning_tree(g, tree)
    _require_connected(g)
    _check_cap(g, max_edges)
    target = sum(1 << k for k, e in enumerate(g.edges) if e.label in t)
    n = sum(1 for _, mask in _leading_tree_masks(g, max_edges) if mask == target)
    return ConstructiveWeight(n, math.factorial(g.num_edges))


def sectors_for_tree(g: Multigraph, tree: Iterable[str],
                     max_edges: int = DEFAULT_MAX_EDGES) -> list[tuple[str, ...]]:
    """All sectors whose leading tree is ``tree``, in lexicographic order of
    edge positions."""
    t = check_spanning_tree(g, tree)
    _require_connected(g)
    target = sum(1 << k for k, e in enumerate(g.edges) if e.label in t)
    labels = g.edge_labels
    return [tuple(labels[k] for k in perm)
            for perm, mask in _leading_tree_masks(g, max_edges) if mask == target]


class DeletionContraction:
    """Memoized count of sectors with a prescribed leading tree.

    The first edge of a sector is always picked when it is not a self-loop,
    so it must belong to T and the rest of the sector is a sector of G/e;
    a leading self-loop is simply dropped.  Hence

        N(G, T) = sum_{e in T} N(G/e, T-e) + sum_{loops l} N(G-l, T)

    with N = 1 on the single vertex without edges.  Entries are keyed by the
    canonical form of (G, T) so isomorphic sub-instances are shared.  One
    instance may be shared across threads.
    """

    def __init__(self) -> None:
        self.cache: dict[bytes, int] = {}
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def count(self, g: Multigraph, tree: Iterable[str]) -> int:
        t = check_spanning_tree(g, tree)
        _require_connected(g)
        return self._count(g, t)

    def _count(self, g: Multigraph, t: frozenset[str]) -> int:
        if not g.edges:
            return 1
        key = canonical_key(g, t)
        cached = self.cache.get(key)
        if cached is not None:
            with self._lock:
                self.hits += 1
            return cached
        with self._lock:
            self.misses += 1
        total = 0
        for e in g.edges:
            if e.is_self_loop:
                total += self._count(delete_edge(g, e.label), t)
            elif e.label in t:
                total += self._count(contract_edge(g, e.label), t - {e.label})
        self.cache[key] = total
        return total

    def weight(self, g: Multigraph, tree: Iterable[str]) -> ConstructiveWeight:
        return ConstructiveWeight(self.count(g, tree), math.factorial(g.num_edges))


def weight_deletion_contraction(g: Multigraph, tree: Iterable[str],
                                counter: DeletionContraction | None = None) -> ConstructiveWeight:
    return (counter or DeletionContraction()).weight(g, tree)


def simplex_monomial_integral(exponents: Sequence[int]) -> Fraction:
    """Integral of prod x_k^{c_k} over 0 < x_1 < ... < x_n < 1.

    Integrating x_1 first, then x_2, ... each step raises the running power
    by c_k + 1, which gives prod_k 1 / (c_1 + ... + c_k + k).
    """
    result = Fraction(1)
    acc = 0
    for k, c in enumerate(exponents, start=1):
        if c < 0:
            raise ValueError("exponents must be nonnegative")
        acc += c
        result /= acc + k
    return result


def _min_factor_paths(g: Multigraph, t: frozenset[str]) -> tuple[list[str], list[list[int]]]:
    """Tree edges in graph order and, for each non-tree non-loop edge, the
    indices of the tree edges on its path."""
    tree_edges = [e.label for e in g.edges if e.label in t]
    index = {label: k for k, label in enumerate(tree_edges)}
    paths = tree_paths(g, t)
    loops = []
    for e in g.edges:
        if e.label in t or e.is_self_loop:
            continue
        loops.append([index[label] for label in paths[e.label]])
    return tree_edges, loops


def weight_symbolic(g: Multigraph, tree: Iterable[str],
                    max_tree_edges: int = DEFAULT_MAX_TREE_EDGES) -> ConstructiveWeight:
    """Exact value of the integral over tree parameters of the product of
    path minima.  On each ordering of the tree parameters every minimum is
    the path parameter ranked lowest, so the integrand is a monomial."""
    t = check_spanning_tree(g, tree)
    _require_connected(g)
    n = len(t)
    if n > max_tree_edges:
        raise CapExceededError(
            f"symbolic evaluation over {n}! orderings exceeds the cap of {max_tree_edges} tree edges")
    _, paths = _min_factor_paths(g, t)
    monomials: Counter[tuple[int, ...]] = Counter()
    for order in itertools.permutations(range(n)):
        rank = [0] * n
        for r, k in enumerate(order):
            rank[k] = r
        exps = [0] * n
        for p in paths:
            exps[min(rank[k] for k in p)] += 1
        monomials[tuple(exps)] += 1
    value = sum((mult * simplex_monomial_integral(exps) for exps, mult in monomials.items()),
                Fraction(0))
    total = math.factorial(g.num_edges)
    count = value * total
    if count.denominator != 1:
        raise ArithmeticError(f"non-integral sector count {count}")
    return ConstructiveWeight(int(count), total)


def weight_monte_carlo(g: Multigraph, tree: Iterable[str], samples: int, seed: int | np.random.SeedSequence,
                       chunk: int = 1 << 16) -> MonteCarloWeight:
    """Sample tree parameters uniformly on the unit cube and average the
    product of path minima.  Reproducible for a given seed."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    t = check_spanning_tree(g, tree)
    _require_connected(g)
    _, paths = _min_factor_paths(g, t)
    rng = np.random.default_rng(seed)
    acc = RunningMean()
    left = samples
    while left:
        m = min(chunk, left)
        w = rng.random((m, len(t)))
        values = np.ones(m)
        for p in paths:
            # ties have measure zero; min() is indifferent to which index wins
            values *= w[:, p].min(axis=1)
        acc.add(values)
        left -= m
    return MonteCarloWeight(acc.mean, acc.std_error, samples)


def enumerate_spanning_trees(g: Multigraph) -> list[frozenset[str]]:
    """Every spanning tree, each once, in lexicographic order of edge
    positions."""
    _require_connected(g)
    vindex = {v: k for k, v in enumerate(g.vertices)}
    cand = [(k, vindex[e.end_a], vindex[e.end_b]) for k, e in enumerate(g.edges) if not e.is_self_loop]
    nv = g.num_vertices
    out = []
    for combo in itertools.combinations(cand, nv - 1):
        parent = list(range(nv))
        ok = True
        for _, a, b in combo:
            while parent[a] != a:
                a = parent[a]
            while parent[b] != b:
                b = parent[b]
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            out.append(frozenset(g.edges[k].label for k, _, _ in combo))
    return out


def weight_table(g: Multigraph, method: str = "dc", *, samples: int = 100_000, seed: int | None = None,
                 max_edges: int = DEFAULT_MAX_EDGES, max_tree_edges: int = DEFAULT_MAX_TREE_EDGES,
                 threads: int = 1, counter: DeletionContraction | None = None) -> dict:
    """Weight of every spanning tree, keyed by tree (frozenset of labels) in
    enumeration order.  Exact methods give ConstructiveWeight values summing
    to exactly 1; ``mc`` gives MonteCarloWeight values."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    trees = enumerate_spanning_trees(g)
    if method == "brute":
        counts = sector_counts(g, max_edges)
        total = math.factorial(g.num_edges)
        return {t: ConstructiveWeight(counts.get(t, 0), total) for t in trees}
    if method == "dc":
        dc = counter or DeletionContraction()
        job = dc.weight
    elif method == "symbolic":
        def job(g, t):
            return weight_symbolic(g, t, max_tree_edges)
    else:
        if seed is None:
            raise ValueError("Monte-Carlo weights need an explicit seed")
        streams = dict(zip(trees, np.random.SeedSequence(seed).spawn(len(trees))))

        def job(g, t):
            return weight_monte_carlo(g, t, samples, streams[t])
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda t: job(g, t), trees))
    else:
        results = [job(g, t) for t in trees]
    return dict(zip(trees, results))


def tree_label(g: Multigraph, tree: Iterable[str]) -> str:
    """Comma-joined tree edges in graph order."""
    t = set(tree)
    return ",".join(label for label in g.edge_labels if label in t)
