"""Named example graphs.  Each one also ships as ``<name>.json`` next to
this module in the graph file format."""

from __future__ import annotations

from ..graph import Multigraph

# The six-edge example with 12 spanning trees: a square A-B-D-C-A whose
# diagonal B-C is doubled.  Inferred from its tree list and path factors.
G_EYE = Multigraph.from_edges(
    [("l1", "A", "B"), ("l2", "C", "D"), ("l3", "A", "C"),
     ("l4", "B", "D"), ("l5", "B", "C"), ("l6", "B", "C")],
    vertices=["A", "B", "C", "D"],
)

BUBBLE = Multigraph.from_edges([("l1", "A", "B"), ("l2", "A", "B")])

TRIANGLE = Multigraph.from_edges([("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")])

# vertex with a self-loop plus a pendant edge
TADPOLE = Multigraph.from_edges([("l1", "A", "A"), ("l2", "A", "B")])

SINGLE_EDGE = Multigraph.from_edges([("l1", "A", "B")])


def cycle(n: int) -> Multigraph:
    """n-cycle with vertices ``v0..v{n-1}`` and edges ``c0..c{n-1}``; n=1 is a
    self-loop and n=2 a double edge."""
    verts = [f"v{k}" for k in range(n)]
    return Multigraph.from_edges(
        [(f"c{k}", verts[k], verts[(k + 1) % n]) for k in range(n)], vertices=verts)


def path(n: int) -> Multigraph:
    verts = [f"v{k}" for k in range(n)]
    return Multigraph.from_edges(
        [(f"p{k}", verts[k], verts[k + 1]) for k in range(n - 1)], vertices=verts)


NAMED = {
    "g_eye": G_EYE,
    "bubble": BUBBLE,
    "triangle": TRIANGLE,
    "tadpole": TADPOLE,
    "single_edge": SINGLE_EDGE,
    **{f"cycle{n}": cycle(n) for n in range(3, 7)},
}
