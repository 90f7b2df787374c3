"""The forest-formula weakening matrix and its barycentric decomposition
into block matrices, which is what makes it positive semidefinite."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import GraphError
from .graph import Multigraph, check_spanning_tree, tree_path


@dataclass(frozen=True)
class WeakeningMatrix:
    vertices: tuple[str, ...]
    entries: np.ndarray  # object dtype for Fraction input, float64 otherwise

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    def as_float(self) -> np.ndarray:
        return self.entries.astype(float)


@dataclass(frozen=True)
class BlockPartition:
    """Partitions B_1..B_V (cumulative components of the tree edges taken in
    decreasing parameter order) and the barycentric coefficients."""

    vertices: tuple[str, ...]
    order: tuple[str, ...]
    partitions: tuple[tuple[frozenset[str], ...], ...]
    coefficients: tuple

    def block_matrix(self, k: int) -> np.ndarray:
        """0/1 matrix of partition ``k`` (0-based)."""
        index = {v: i for i, v in enumerate(self.vertices)}
        m = np.zeros((len(index), len(index)), dtype=int)
        for block in self.partitions[k]:
            idx = [index[v] for v in block]
            m[np.ix_(idx, idx)] = 1
        return m

    def reconstruct(self) -> np.ndarray:
        exact = any(isinstance(c, Fraction) for c in self.coefficients)
        n = len(self.vertices)
        out = np.full((n, n), Fraction(0) if exact else 0.0, dtype=object if exact else float)
        for k, c in enumerate(self.coefficients):
            out = out + c * self.block_matrix(k)
        return out


def _check_weights(t: frozenset[str], w: Mapping[str, object]) -> None:
    if set(w) != set(t):
        raise GraphError(f"weakening parameters must cover exactly the tree edges {sorted(t)}")
    for label, value in w.items():
        if not 0 <= value <= 1:
            raise ValueError(f"weakening parameter for {label!r} outside [0, 1]")


def _exact(w: Mapping[str, object]) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in w.values())


def build_weakening_matrix(g: Multigraph, tree: Iterable[str], w: Mapping[str, object]) -> WeakeningMatrix:
    """x_ii = 1, x_ij = min of w over the tree path from i to j."""
    t = check_spanning_tree(g, tree)
    _check_weights(t, w)
    exact = _exact(w)
    one = Fraction(1) if exact else 1.0
    vs = g.vertices
    n = len(vs)
    m = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        m[i, i] = one
        for j in range(i + 1, n):
            path = tree_path(g, t, vs[i], vs[j])
            m[i, j] = m[j, i] = min((Fraction(w[e]) if exact else float(w[e])) for e in path)
    return WeakeningMatrix(vs, m)


def check_psd(m: WeakeningMatrix | np.ndarray, tol: float = 1e-10) -> dict:
    """Smallest eigenvalue and whether it clears ``-tol * max(1, ||m||_2)``."""
    a = m.as_float() if isinstance(m, WeakeningMatrix) else np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    eig = np.linalg.eigvalsh(a)
    lo = float(eig[0])
    scale = max(1.0, float(np.abs(eig).max()))
    return {"psd": lo >= -tol * scale, "min_eigenvalue": lo}


def block_decomposition(g: Multigraph, tree: Iterable[str], w: Mapping[str, object]) -> BlockPartition:
    """Barycentric decomposition sum_k (w_(k-1) - w_(k)) B_k with tree edges
    sorted by decreasing w (ties by label), w_(0) = 1 and w_(V) = 0."""
    t = check_spanning_tree(g, tree)
    _check_weights(t, w)
    exact = _exact(w)
    conv = Fraction if exact else float
    order = tuple(sorted(t, key=lambda label: (-conv(w[label]), label)))
    emap = g.edge_map()

    comp = {v: frozenset([v]) for v in g.vertices}
    partitions = []

    def snapshot() -> tuple[frozenset[str], ...]:
        return tuple(sorted(set(comp.values()), key=lambda b: min(g.vertices.index(v) for v in b)))

    partitions.append(snapshot())
    for label in order:
        a, b = emap[label].ends
        merged = comp[a] | comp[b]
        for v in merged:
            comp[v] = merged
        partitions.append(snapshot())

    levels = [conv(1)] + [conv(w[label]) for label in order] + [conv(0)]
    coefficients = tuple(levels[k] - levels[k + 1] for k in range(len(partitions)))
    return BlockPartition(g.vertices, order, tuple(partitions), coefficients)


def reconstruction_residual(m: WeakeningMatrix, parts: BlockPartition):
    """Max entrywise difference; an exact Fraction in rational mode."""
    diff = m.entries - parts.reconstruct()
    return max((abs(x) for x in diff.ravel()), default=0)
