"""Zero-dimensional phi^4 with interaction exp(-lambda phi^4 / 2):
Wick-pairing vacuum graphs, their 3^n intermediate-field extensions, the
collapse of solid cycles to bold vertices, and the regrouping of connected
amplitudes by spanning trees of the collapsed graphs with constructive
weights.  Amplitudes are exact coefficients of lambda^n."""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy import integrate

from .errors import CapExceededError, GraphError
from .graph import Edge, Multigraph, canonical_key, connected_components
from .weights import DeletionContraction, enumerate_spanning_trees

DEFAULT_ORDER_CAP = 3

HalfEdge = tuple[int, int]  # (vertex, slot) with slot in 1..4

# the three ways to split the slots {1,2,3,4} of a vertex into two pairs;
# corner 0 always holds slot 1
PAIRINGS: tuple[tuple[frozenset[int], frozenset[int]], ...] = (
    (frozenset({1, 2}), frozenset({3, 4})),
    (frozenset({1, 3}), frozenset({2, 4})),
    (frozenset({1, 4}), frozenset({2, 3})),
)


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class VacuumGraph:
    order: int
    matching: tuple[tuple[HalfEdge, HalfEdge], ...]

    def __post_init__(self) -> None:
        halves = [h for pair in self.matching for h in pair]
        want = {(v, s) for v in range(self.order) for s in range(1, 5)}
        if len(halves) != 4 * self.order or set(halves) != want:
            raise GraphError("matching is not a perfect pairing of the 4n half-edges")

    @property
    def amplitude(self) -> Fraction:
        """Coefficient of lambda^n carried by one labeled matching."""
        return Fraction(-1, 2) ** self.order / math.factorial(self.order)

    def multigraph(self) -> Multigraph:
        return Multigraph(
            tuple(f"v{v}" for v in range(self.order)),
            tuple(Edge(f"s{k}", f"v{a[0]}", f"v{b[0]}") for k, (a, b) in enumerate(self.matching)),
        )


@dataclass(frozen=True)
class ExtendedGraph:
    """Each vertex v split into corners ``v{v}a`` (holding slot 1) and
    ``v{v}b``, joined by the dotted edge ``d{v}``; solid edges ``s{k}`` keep
    the matching."""

    base: VacuumGraph
    pairing: tuple[int, ...]

    @property
    def amplitude(self) -> Fraction:
        return self.base.amplitude / 3 ** self.base.order

    def corner(self, h: HalfEdge) -> str:
        v, slot = h
        first, _ = PAIRINGS[self.pairing[v]]
        return f"v{v}{'a' if slot in first else 'b'}"

    def solid_edges(self) -> tuple[Edge, ...]:
        return tuple(Edge(f"s{k}", self.corner(a), self.corner(b))
                     for k, (a, b) in enumerate(self.base.matching))

    def dotted_edges(self) -> tuple[Edge, ...]:
        return tuple(Edge(f"d{v}", f"v{v}a", f"v{v}b") for v in range(self.base.order))

    def multigraph(self) -> Multigraph:
        corners = tuple(f"v{v}{c}" for v in range(self.base.order) for c in "ab")
        return Multigraph(corners, self.solid_edges() + self.dotted_edges())


@dataclass(frozen=True)
class CollapsedGraph:
    """Bold vertices ``c0, c1, ...`` (one per solid cycle, numbered by first
    corner) joined by the dotted edges."""

    graph: Multigraph
    extended: ExtendedGraph
    cycles: tuple[frozenset[str], ...]

    @property
    def amplitude(self) -> Fraction:
        return self.extended.amplitude

    @property
    def is_connected(self) -> bool:
        return len(connected_components(self.graph)) == 1


def _matchings(items: list[HalfEdge]) -> Iterator[tuple[tuple[HalfEdge, HalfEdge], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        for tail in _matchings(rest[:k] + rest[k + 1:]):
            yield ((first, partner),) + tail


def generate_vacuum_graphs(order: int, cap: int = DEFAULT_ORDER_CAP) -> list[VacuumGraph]:
    """All (4n-1)!! Wick pairings of the 4n labeled half-edges."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > cap:
        raise CapExceededError(f"order {order} exceeds the vacuum graph cap of {cap}")
    halves = [(v, s) for v in range(order) for s in range(1, 5)]
    return [VacuumGraph(order, m) for m in _matchings(halves)]


def extensions(g: VacuumGraph) -> list[ExtendedGraph]:
    """The 3^n choices of a pairing at every vertex."""
    return [ExtendedGraph(g, choice) for choice in itertools.product(range(3), repeat=g.order)]


def collapse(ext: ExtendedGraph) -> CollapsedGraph:
    """Contract every solid cycle to a bold vertex.  Each corner carries two
    solid half-edges, so the solid edges must split into disjoint cycles;
    this is checked."""
    corners = ext.multigraph().vertices
    solid = Multigraph(corners, ext.solid_edges())
    degree = dict.fromkeys(corners, 0)
    for e in solid.edges:
        degree[e.end_a] += 1
        degree[e.end_b] += 1
    if any(d != 2 for d in degree.values()):
        raise GraphError("solid edges do not form cycles: a corner has solid degree != 2")
    comps = connected_components(solid)
    where = {}
    for k, comp in enumerate(comps):
        for c in comp:
            where[c] = k
    sizes = [0] * len(comps)
    for e in solid.edges:
        sizes[where[e.end_a]] += 1
    if any(sizes[k] != len(comp) for k, comp in enumerate(comps)):
        raise GraphError("solid component is not a cycle")
    bold = Multigraph(
        tuple(f"c{k}" for k in range(len(comps))),
        tuple(Edge(e.label, f"c{where[e.end_a]}", f"c{where[e.end_b]}") for e in ext.dotted_edges()),
    )
    return CollapsedGraph(bold, ext, tuple(frozenset(c) for c in comps))


# -- log Z oracle ---------------------------------------------------------------

def z_coefficients(max_order: int) -> list[Fraction]:
    """Z = sum_n (-1/2)^n (4n-1)!!/n! lambda^n (moments of the unit Gaussian)."""
    return [Fraction(-1, 2) ** n * double_factorial(4 * n - 1) / math.factorial(n)
            for n in range(max_order + 1)]


def series_log(z: list[Fraction]) -> list[Fraction]:
    """Formal logarithm of a series with z[0] = 1; uses n c_n = n z_n - sum_{k<n} k c_k z_{n-k}."""
    if z[0] != 1:
        raise ValueError("series must start with 1")
    c = [Fraction(0)] * len(z)
    for n in range(1, len(z)):
        s = n * z[n] - sum(k * c[k] * z[n - k] for k in range(1, n))
        c[n] = s / n
    return c


def logz_oracle(max_order: int) -> dict[int, Fraction]:
    c = series_log(z_coefficients(max_order))
    return {n: c[n] for n in range(1, max_order + 1)}


def logz_quadrature(lam: float) -> float:
    """log of (2 pi)^(-1/2) int exp(-phi^2/2 - lam phi^4/2) dphi, lam >= 0."""
    val, _ = integrate.quad(lambda x: np.exp(-x * x / 2 - lam * x ** 4 / 2), -np.inf, np.inf,
                            epsabs=1e-14, epsrel=1e-13)
    return math.log(val / math.sqrt(2 * math.pi))


# -- tree repacking -------------------------------------------------------------

_CORNER_OF = tuple({slot: int(slot not in first) for slot in range(1, 5)} for first, _ in PAIRINGS)


def _collapsed_structure(matching, pairing) -> tuple[tuple[tuple[int, int], ...], bool]:
    """Integer-only collapse used for bulk repacking: returns the endpoints
    of d0, d1, ... with bold vertices numbered by first appearance, and
    whether the collapsed graph is connected.  Corner 2v+c is corner c of
    vertex v.  Agrees with ``collapse`` (checked in the tests)."""
    n = len(pairing)
    parent = list(range(2 * n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    solid_edges = [0] * (2 * n)
    for (va, sa), (vb, sb) in matching:
        a = find(2 * va + _CORNER_OF[pairing[va]][sa])
        b = find(2 * vb + _CORNER_OF[pairing[vb]][sb])
        if a != b:
            parent[a] = b
    for (va, sa), _ in matching:
        solid_edges[find(2 * va + _CORNER_OF[pairing[va]][sa])] += 1
    sizes = [0] * (2 * n)
    for c in range(2 * n):
        sizes[find(c)] += 1
    if any(sizes[r] != solid_edges[r] for r in range(2 * n) if sizes[r]):
        raise GraphError("solid component is not a cycle")
    seen: dict[int, int] = {}
    out = []
    for v in range(n):
        a = seen.setdefault(find(2 * v), len(seen))
        b = seen.setdefault(find(2 * v + 1), len(seen))
        out.append((a, b))
    # connectivity on bold vertices and dotted edges only
    bold = list(range(len(seen)))

    def bfind(x: int) -> int:
        while bold[x] != x:
            x = bold[x]
        return x

    for a, b in out:
        ra, rb = bfind(a), bfind(b)
        if ra != rb:
            bold[ra] = rb
    return tuple(out), len({bfind(x) for x in range(len(seen))}) == 1


def _structure_graph(structure: tuple[tuple[int, int], ...]) -> Multigraph:
    nbold = 1 + max(max(pair) for pair in structure)
    return Multigraph(tuple(f"c{k}" for k in range(nbold)),
                      tuple(Edge(f"d{v}", f"c{a}", f"c{b}") for v, (a, b) in enumerate(structure)))


def _structure_string(structure: tuple[tuple[int, int], ...]) -> str:
    return ",".join(f"d{v}:c{a}-c{b}" for v, (a, b) in enumerate(structure))


def tree_shape_label(tree: Multigraph) -> str:
    """Readable name of an unlabeled tree: vertex count plus sorted degrees."""
    deg = dict.fromkeys(tree.vertices, 0)
    for e in tree.edges:
        deg[e.end_a] += 1
        deg[e.end_b] += 1
    if tree.num_vertices == 1:
        return "V1"
    return f"V{tree.num_vertices}[{''.join(str(d) for d in sorted(deg.values()))}]"


@dataclass
class LVERepack:
    max_order: int
    # shape label -> {order -> coefficient}
    shapes: dict[str, dict[int, Fraction]]
    shape_keys: dict[str, bytes]
    totals: dict[int, Fraction]
    oracle: dict[int, Fraction]
    z_totals: dict[int, Fraction]
    stats: dict[int, dict[str, int]]
    labeled: dict[str, dict[int, Fraction]] = field(default_factory=dict)

    def evaluate(self, lam: float) -> dict:
        """Truncated series evaluated at ``lam``, per shape and in total."""
        def at(series):
            return float(sum(float(c) * lam ** n for n, c in series.items()))
        return {
            "shapes": {s: at(series) for s, series in self.shapes.items()},
            "total": at(self.totals),
            "logz_quadrature": logz_quadrature(lam),
        }


def lve_repack(max_order: int, cap: int = DEFAULT_ORDER_CAP, labeled: bool = False,
               counter: DeletionContraction | None = None) -> LVERepack:
    """Regroup the connected part of the expansion by spanning trees of the
    collapsed graphs: tree T gets sum over collapsed G containing T of
    w(G, T) * A_G.  Trees are aggregated by unlabeled shape."""
    if max_order > cap:
        raise CapExceededError(f"order {max_order} exceeds the vacuum graph cap of {cap}")
    dc = counter or DeletionContraction()
    by_structure: dict[tuple, list[tuple[str, bytes, Fraction]]] = {}
    shapes: dict[bytes, dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    shape_names: dict[bytes, str] = {}
    labeled_tab: dict[str, dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    totals: dict[int, Fraction] = {}
    z_totals: dict[int, Fraction] = {}
    stats: dict[int, dict[str, int]] = {}

    for n in range(1, max_order + 1):
        # every extension at order n carries the same amplitude
        amp = Fraction(-1, 2) ** n / math.factorial(n) / 3 ** n
        multiplicity: Counter[tuple] = Counter()
        n_disc = 0
        for vg in generate_vacuum_graphs(n, cap):
            for pairing in itertools.product(range(3), repeat=n):
                structure, connected = _collapsed_structure(vg.matching, pairing)
                if connected:
                    multiplicity[structure] += 1
                else:
                    n_disc += 1
        n_conn = sum(multiplicity.values())
        total = Fraction(0)
        for structure in sorted(multiplicity):
            entries = by_structure.get(structure)
            if entries is None:
                g = _structure_graph(structure)
                entries = []
                for t in enumerate_spanning_trees(g):
                    w = dc.weight(g, t).value
                    tree = g.subgraph(t)
                    skey = canonical_key(tree)
                    shape_names.setdefault(skey, tree_shape_label(tree))
                    tlabel = ",".join(label for label in g.edge_labels if label in t)
                    entries.append((tlabel, skey, w))
                by_structure[structure] = entries
            a = multiplicity[structure] * amp
            for tlabel, skey, w in entries:
                shapes[skey][n] += w * a
                total += w * a
                if labeled:
                    labeled_tab[f"{_structure_string(structure)}|{tlabel or '-'}"][n] += w * a
        totals[n] = total
        z_totals[n] = (n_conn + n_disc) * amp
        stats[n] = {"matchings": double_factorial(4 * n - 1), "extensions": n_conn + n_disc,
                    "connected_collapsed": n_conn, "disconnected_collapsed": n_disc,
                    "collapsed_structures": len(multiplicity)}

    names = _disambiguate(shape_names)
    ordered = sorted(shapes, key=lambda k: (names[k], k))
    return LVERepack(
        max_order=max_order,
        shapes={names[k]: dict(sorted(shapes[k].items())) for k in ordered},
        shape_keys={names[k]: k for k in ordered},
        totals=totals,
        oracle=logz_oracle(max_order),
        z_totals=z_totals,
        stats=stats,
        labeled={k: dict(sorted(v.items())) for k, v in sorted(labeled_tab.items())},
    )


def _disambiguate(names: dict[bytes, str]) -> dict[bytes, str]:
    groups: dict[str, list[bytes]] = defaultdict(list)
    for k in sorted(names):
        groups[names[k]].append(k)
    out = {}
    for label, keys in groups.items():
        for i, k in enumerate(keys):
            out[k] = label if len(keys) == 1 else f"{label}#{i + 1}"
    return out
