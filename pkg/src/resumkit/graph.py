"""Labeled multigraphs with self-loops, plus the primitives the weight
computations are built on: deletion, contraction, tree paths and an
isomorphism-invariant key for memoization."""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import GraphError, NotSpanningTreeError


@dataclass(frozen=True)
class Edge:
    label: str
    end_a: str
    end_b: str

    @property
    def is_self_loop(self) -> bool:
        return self.end_a == self.end_b

    @property
    def ends(self) -> tuple[str, str]:
        return (self.end_a, self.end_b)

    def other(self, v: str) -> str:
        if v == self.end_a:
            return self.end_b
        if v == self.end_b:
            return self.end_a
        raise GraphError(f"vertex {v!r} is not an endpoint of edge {self.label!r}")


@dataclass(frozen=True)
class Multigraph:
    """Immutable multigraph.  Order of ``vertices`` and ``edges`` is kept for
    display only; no operation depends on it semantically."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex label")
        labels = [e.label for e in self.edges]
        if len(set(labels)) != len(labels):
            raise GraphError("duplicate edge label")
        vs = set(self.vertices)
        for e in self.edges:
            if e.end_a not in vs or e.end_b not in vs:
                raise GraphError(f"edge {e.label!r} has an endpoint outside the vertex set")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, str]],
                   vertices: Sequence[str] | None = None) -> "Multigraph":
        """Build from ``(label, a, b)`` triples; vertices default to the
        endpoints in order of first appearance."""
        edges = [Edge(*e) for e in edges]
        if vertices is None:
            seen: dict[str, None] = {}
            for e in edges:
                seen.setdefault(e.end_a)
                seen.setdefault(e.end_b)
            vertices = list(seen)
        return cls(tuple(vertices), tuple(edges))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def edge_labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.edges)

    def edge(self, label: str) -> Edge:
        for e in self.edges:
            if e.label == label:
                return e
        raise GraphError(f"no edge labeled {label!r}")

    def edge_map(self) -> dict[str, Edge]:
        return {e.label: e for e in self.edges}

    def self_loops(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.is_self_loop)

    def loop_number(self) -> int:
        return self.num_edges - self.num_vertices + len(connected_components(self))

    def subgraph(self, labels: Iterable[str]) -> "Multigraph":
        """Spanning subgraph keeping only the given edges."""
        keep = set(labels)
        return Multigraph(self.vertices, tuple(e for e in self.edges if e.label in keep))

    def relabel(self, vertex_map: Mapping[str, str] | None = None,
                edge_map: Mapping[str, str] | None = None) -> "Multigraph":
        vm = vertex_map or {}
        em = edge_map or {}
        return Multigraph(
            tuple(vm.get(v, v) for v in self.vertices),
            tuple(Edge(em.get(e.label, e.label), vm.get(e.end_a, e.end_a), vm.get(e.end_b, e.end_b))
                  for e in self.edges),
        )

    def add_edge(self, label: str, a: str, b: str) -> "Multigraph":
        vertices = self.vertices + tuple(v for v in dict.fromkeys((a, b)) if v not in self.vertices)
        return Multigraph(vertices, self.edges + (Edge(label, a, b),))

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.label, "ends": [e.end_a, e.end_b]} for e in self.edges],
        }


def connected_components(g: Multigraph) -> list[list[str]]:
    adj: dict[str, list[str]] = {v: [] for v in g.vertices}
    for e in g.edges:
        if not e.is_self_loop:
            adj[e.end_a].append(e.end_b)
            adj[e.end_b].append(e.end_a)
    seen: set[str] = set()
    comps = []
    for root in g.vertices:
        if root in seen:
            continue
        comp = [root]
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def is_connected(g: Multigraph) -> bool:
    if not g.vertices:
        raise GraphError("connectivity of the empty graph is undefined")
    return len(connected_components(g)) == 1


def contract_edge(g: Multigraph, label: str) -> Multigraph:
    """Merge the endpoints of ``label`` and drop it.  The merged vertex keeps
    the lexicographically smaller label; parallel edges become self-loops."""
    e = g.edge(label)
    if e.is_self_loop:
        raise GraphError(f"cannot contract self-loop {label!r}")
    keep, gone = sorted(e.ends)

    def move(v: str) -> str:
        return keep if v == gone else v

    return Multigraph(
        tuple(v for v in g.vertices if v != gone),
        tuple(Edge(f.label, move(f.end_a), move(f.end_b)) for f in g.edges if f.label != label),
    )


def delete_edge(g: Multigraph, label: str) -> Multigraph:
    g.edge(label)
    return Multigraph(g.vertices, tuple(f for f in g.edges if f.label != label))


def check_spanning_tree(g: Multigraph, tree: Iterable[str]) -> frozenset[str]:
    """Validate ``tree`` as a spanning tree of ``g`` and return it as a frozenset."""
    t = frozenset(tree)
    emap = g.edge_map()
    missing = t - emap.keys()
    if missing:
        raise NotSpanningTreeError(f"edges {sorted(missing)} are not in the graph")
    if len(t) != g.num_vertices - 1:
        raise NotSpanningTreeError(
            f"a spanning tree of a {g.num_vertices}-vertex graph has {g.num_vertices - 1} edges, got {len(t)}")
    parent = {v: v for v in g.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for label in t:
        e = emap[label]
        ra, rb = find(e.end_a), find(e.end_b)
        if ra == rb:
            raise NotSpanningTreeError(f"edge {label!r} closes a cycle in the tree")
        parent[ra] = rb
    return t


def tree_path(g: Multigraph, tree: Iterable[str], i: str, j: str) -> list[str]:
    """Edge labels of the unique path from ``i`` to ``j`` inside ``tree``."""
    t = check_spanning_tree(g, tree)
    if i not in g.vertices or j not in g.vertices:
        raise GraphError(f"unknown vertex in path query ({i!r}, {j!r})")
    if i == j:
        return []
    adj: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for e in g.edges:
        if e.label in t:
            adj[e.end_a].append((e.end_b, e.label))
            adj[e.end_b].append((e.end_a, e.label))
    back: dict[str, tuple[str, str] | None] = {i: None}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        if u == j:
            break
        for w, label in adj[u]:
            if w not in back:
                back[w] = (u, label)
                queue.append(w)
    path = []
    v = j
    while back[v] is not None:
        u, label = back[v]
        path.append(label)
        v = u
    path.reverse()
    return path


def tree_paths(g: Multigraph, tree: Iterable[str]) -> dict[str, list[str]]:
    """Tree path between the endpoints of every edge of ``g`` (empty for
    self-loops, the edge itself for tree edges)."""
    t = check_spanning_tree(g, tree)
    return {e.label: tree_path(g, t, e.end_a, e.end_b) for e in g.edges}


# -- canonical keys ----------------------------------------------------------

def _refine(n: int, edges: list[tuple[int, int, int]]) -> list[int]:
    """Iterated colour refinement.  Colours are ranks of isomorphism-invariant
    signatures, so equal inputs up to relabeling produce equal colourings."""
    loops = [[0, 0] for _ in range(n)]
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a, b, flag in edges:
        if a == b:
            loops[a][flag] += 1
        else:
            nbrs[a].append((b, flag))
            nbrs[b].append((a, flag))
    sigs = [(len(nbrs[v]), tuple(loops[v])) for v in range(n)]
    ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
    colour = [ranks[s] for s in sigs]
    while True:
        sigs = [(colour[v], tuple(sorted((colour[w], f) for w, f in nbrs[v]))) for v in range(n)]
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colour)):
            return new
        colour = new


def canonical_form(g: Multigraph, marked: Iterable[str] = ()) -> tuple:
    """Exact canonical form of ``(g, marked)`` up to relabeling of vertices
    and edges.  Searches every vertex order compatible with the refined
    colouring; fine for the small graphs this package targets."""
    marked = frozenset(marked)
    index = {v: k for k, v in enumerate(g.vertices)}
    n = len(index)
    edges = [(index[e.end_a], index[e.end_b], int(e.label in marked)) for e in g.edges]
    colour = _refine(n, edges)
    classes: dict[int, list[int]] = defaultdict(list)
    for v, c in enumerate(colour):
        classes[c].append(v)
    blocks = [classes[c] for c in sorted(classes)]
    best = None
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        pos = [0] * n
        k = 0
        for perm in perms:
            for v in perm:
                pos[v] = k
                k += 1
        enc = tuple(sorted((min(pos[a], pos[b]), max(pos[a], pos[b]), f) for a, b, f in edges))
        if best is None or enc < best:
            best = enc
    return (n, best or ())


def canonical_key(g: Multigraph, marked: Iterable[str] = ()) -> bytes:
    """Deterministic byte key, equal for isomorphic (graph, marked-subset)
    pairs and independent of hash seeds or object identity."""
    n, enc = canonical_form(g, marked)
    parts = [str(n)] + [f"{a}-{b}{'*' if f else ''}" for a, b, f in enc]
    return ";".join(parts).encode("ascii")
