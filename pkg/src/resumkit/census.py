"""Exhaustive and random generation of small connected multigraphs."""

from __future__ import annotations

import random
from functools import lru_cache

from .graph import Multigraph, canonical_key


def _vertex(k: int) -> str:
    return f"v{k}"


def _extensions(g: Multigraph) -> list[Multigraph]:
    label = f"e{g.num_edges + 1}"
    out = []
    for i, a in enumerate(g.vertices):
        for b in g.vertices[i:]:
            out.append(g.add_edge(label, a, b))
        out.append(g.add_edge(label, a, _vertex(g.num_vertices)))
    return out


@lru_cache(maxsize=None)
def _census(num_edges: int) -> tuple[Multigraph, ...]:
    if num_edges == 0:
        return (Multigraph((_vertex(0),), ()),)
    seen: dict[bytes, Multigraph] = {}
    for parent in _census(num_edges - 1):
        for child in _extensions(parent):
            seen.setdefault(canonical_key(child), child)
    return tuple(seen[k] for k in sorted(seen))


def connected_multigraphs(num_edges: int) -> list[Multigraph]:
    """One representative per isomorphism class of connected multigraphs
    (self-loops and parallel edges allowed) with exactly ``num_edges`` edges.

    Every connected graph with at least one edge has either a leaf or an edge
    whose removal keeps it connected, so growing the previous census by one
    loop, one edge between old vertices, or one pendant edge reaches every
    class.  Edges are labeled ``e1..eE`` in growth order.
    """
    return list(_census(num_edges))


def connected_multigraphs_upto(max_edges: int, min_edges: int = 0) -> list[Multigraph]:
    out: list[Multigraph] = []
    for k in range(min_edges, max_edges + 1):
        out.extend(connected_multigraphs(k))
    return out


def random_connected_multigraph(rng: random.Random, num_edges: int,
                                max_vertices: int | None = None) -> Multigraph:
    """Random connected multigraph: a random tree skeleton plus random extra
    edges (loops and parallels allowed)."""
    max_vertices = num_edges + 1 if max_vertices is None else min(max_vertices, num_edges + 1)
    nv = rng.randint(1, max_vertices)
    verts = [_vertex(k) for k in range(nv)]
    edges = []
    for k in range(1, nv):
        edges.append((verts[rng.randrange(k)], verts[k]))
    while len(edges) < num_edges:
        edges.append((rng.choice(verts), rng.choice(verts)))
    rng.shuffle(edges)
    return Multigraph.from_edges(
        [(f"e{k + 1}", a, b) for k, (a, b) in enumerate(edges)], vertices=verts)


def random_tree(rng: random.Random, num_vertices: int) -> Multigraph:
    verts = [_vertex(k) for k in range(num_vertices)]
    edges = [(f"t{k}", verts[rng.randrange(k)], verts[k]) for k in range(1, num_vertices)]
    return Multigraph.from_edges(edges, vertices=verts)
