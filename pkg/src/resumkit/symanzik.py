"""Kirchhoff-Symanzik polynomial U_G, the weighted matrix-tree theorem as an
independent oracle for it, and Monte-Carlo evaluation of the parametric
amplitude  A = int_0^inf dalpha exp(-m^2 sum alpha) / U^(D/2)  for 0 <= D < 2."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from ._stats import RunningMean
from .errors import CapExceededError, DisconnectedGraphError
from .graph import Multigraph, connected_components
from .weights import DEFAULT_MAX_EDGES, enumerate_spanning_trees, kruskal_leading_tree


@dataclass(frozen=True)
class SymanzikPolynomial:
    """Sum of squarefree monomials with unit coefficients; each monomial is
    the set of edges outside one spanning tree."""

    edges: tuple[str, ...]
    monomials: tuple[frozenset[str], ...]

    def __len__(self) -> int:
        return len(self.monomials)

    @property
    def degree(self) -> int:
        degs = {len(m) for m in self.monomials}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def evaluate(self, alpha: Mapping[str, object]):
        total = 0
        for mono in self.monomials:
            term = 1
            for label in mono:
                term *= alpha[label]
            total += term
        return total

    def evaluate_samples(self, alpha: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; ``alpha`` has one column per edge in ``edges`` order."""
        index = {label: k for k, label in enumerate(self.edges)}
        out = np.zeros(alpha.shape[0])
        for mono in self.monomials:
            cols = [index[label] for label in mono]
            out += alpha[:, cols].prod(axis=1)
        return out

    def to_list(self) -> list[list[str]]:
        return [[label for label in self.edges if label in m] for m in self.monomials]


def symanzik_polynomial(g: Multigraph) -> SymanzikPolynomial:
    trees = enumerate_spanning_trees(g)
    labels = set(g.edge_labels)
    return SymanzikPolynomial(g.edge_labels, tuple(frozenset(labels - t) for t in trees))


def _det(m: list[list[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [row[:] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def spanning_tree_count_matrix_tree(g: Multigraph, alpha: Mapping[str, object] | None = None) -> Fraction:
    """sum_T prod_{l in T} alpha_l as a cofactor of the weighted Laplacian.
    With ``alpha`` omitted every weight is 1 and this is the number of
    spanning trees.  Self-loops never enter; disconnected graphs give 0."""
    if not g.vertices:
        raise ValueError("empty graph")
    if len(connected_components(g)) > 1:
        return Fraction(0)
    index = {v: k for k, v in enumerate(g.vertices)}
    n = len(index)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for e in g.edges:
        if e.is_self_loop:
            continue
        a = Fraction(1) if alpha is None else Fraction(alpha[e.label])
        i, j = index[e.end_a], index[e.end_b]
        lap[i][i] += a
        lap[j][j] += a
        lap[i][j] -= a
        lap[j][i] -= a
    return _det([row[1:] for row in lap[1:]])


def symanzik_via_matrix_tree(g: Multigraph, alpha: Mapping[str, object]) -> Fraction:
    """U_G(alpha) = (prod_l alpha_l) * sum_T prod_{l in T} 1/alpha_l, for
    nonzero alpha."""
    prod = Fraction(1)
    for label in g.edge_labels:
        prod *= Fraction(alpha[label])
    inv = {label: 1 / Fraction(alpha[label]) for label in g.edge_labels}
    return prod * spanning_tree_count_matrix_tree(g, inv)


# -- amplitudes ---------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    dimension: float
    mass: float = 1.0
    coupling: float = 0.0

    def validate(self) -> None:
        if not 0 <= self.dimension < 2:
            raise ValueError(f"dimension must lie in [0, 2), got {self.dimension}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class AmplitudeEstimate:
    estimate: float
    std_error: float
    samples: int
    exact: Fraction | None = None
    diagnostics: dict | None = None


def _exact_d0(g: Multigraph, params: ModelParams) -> Fraction | None:
    if params.dimension != 0:
        return None
    try:
        return Fraction(params.mass) ** (-2 * g.num_edges)
    except (TypeError, ValueError):
        return None


class _Integrand:
    """U^(-D/2) using U_G = (prod of self-loop alphas) * U_(G minus loops)."""

    def __init__(self, g: Multigraph, dimension: float):
        if len(connected_components(g)) > 1:
            raise DisconnectedGraphError("amplitudes are defined for connected graphs")
        self.edges = g.edge_labels
        self.half_d = dimension / 2
        loops = {e.label for e in g.self_loops()}
        self.loop_cols = [k for k, label in enumerate(self.edges) if label in loops]
        reduced = g.subgraph(label for label in self.edges if label not in loops)
        poly = symanzik_polynomial(reduced)
        index = {label: k for k, label in enumerate(self.edges)}
        self.monomial_cols = [[index[label] for label in m] for m in poly.monomials]
        self.reduced_edges = reduced.edge_labels
        self.poly = poly

    def __call__(self, alpha: np.ndarray) -> np.ndarray:
        if self.half_d == 0:
            return np.ones(alpha.shape[0])
        u = np.zeros(alpha.shape[0])
        for cols in self.monomial_cols:
            u += alpha[:, cols].prod(axis=1) if cols else 1.0
        if self.loop_cols:
            u = u * alpha[:, self.loop_cols].prod(axis=1)
        return u ** -self.half_d


def _stream_sizes(samples: int, streams: int) -> list[int]:
    base, extra = divmod(samples, streams)
    return [base + (k < extra) for k in range(streams)]


def amplitude_parametric(g: Multigraph, params: ModelParams, samples: int, seed: int,
                         threads: int = 1, streams: int = 16, chunk: int = 1 << 16) -> AmplitudeEstimate:
    """Importance sampling with alpha_l ~ Exp(rate m^2): the estimator is
    m^(-2E) * mean(U^(-D/2)).  Samples are split over a fixed number of
    seeded streams, so the result does not depend on ``threads``."""
    params.validate()
    if samples < 1:
        raise ValueError("samples must be >= 1")
    f = _Integrand(g, params.dimension)
    rate = float(params.mass) ** 2
    scale = float(params.mass) ** (-2 * g.num_edges)
    nstreams = min(streams, samples)
    seqs = np.random.SeedSequence(seed).spawn(nstreams)

    def run(k: int) -> RunningMean:
        rng = np.random.default_rng(seqs[k])
        acc = RunningMean()
        left = sizes[k]
        while left:
            m = min(chunk, left)
            alpha = rng.exponential(1 / rate, size=(m, g.num_edges))
            acc.add(f(alpha))
            left -= m
        return acc

    sizes = _stream_sizes(samples, nstreams)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, range(nstreams)))
    else:
        parts = [run(k) for k in range(nstreams)]
    total = RunningMean()
    for p in parts:
        total.merge(p)
    return AmplitudeEstimate(total.mean * scale, total.std_error * scale, samples, _exact_d0(g, params))


def amplitude_sector_decomposed(g: Multigraph, params: ModelParams, samples: int, seed: int,
                                max_edges: int = DEFAULT_MAX_EDGES) -> AmplitudeEstimate:
    """Same integral split over Hepp sectors.  In sector sigma the alphas are
    ordered alpha_sigma(1) < ... < alpha_sigma(E); each sector is 1/E! of the
    symmetric exponential measure, sampled by sorting iid draws.  As a
    by-product, checks that the dominant monomial of U in each sector is the
    complement of the Kruskal leading tree of sigma."""
    params.validate()
    if g.num_edges > max_edges:
        raise CapExceededError(f"{g.num_edges}! sectors exceeds the cap of {max_edges} edges")
    f = _Integrand(g, params.dimension)
    nsec = math.factorial(g.num_edges)
    per = max(1, -(-samples // nsec))
    rate = float(params.mass) ** 2
    scale = float(params.mass) ** (-2 * g.num_edges) / nsec
    rng = np.random.default_rng(seed)
    labels = g.edge_labels
    index = {label: k for k, label in enumerate(labels)}
    loops = {e.label for e in g.self_loops()}
    # dominant monomial bookkeeping over the loop-free part
    mono_sets = [m for m in f.poly.monomials]
    mono_cols = [[index[label] for label in m] for m in mono_sets]
    estimate = 0.0
    var = 0.0
    mismatches = 0
    for perm in itertools.permutations(range(g.num_edges)):
        draws = np.sort(rng.exponential(1 / rate, size=(per, g.num_edges)), axis=1)
        alpha = np.empty_like(draws)
        alpha[:, list(perm)] = draws
        acc = RunningMean()
        acc.add(f(alpha))
        estimate += acc.mean * scale
        var += (acc.std_error * scale) ** 2
        if mono_cols:
            sector = [labels[k] for k in perm]
            lead = kruskal_leading_tree(g, sector).edges
            want = frozenset(labels) - lead - loops
            logs = np.stack([np.log(alpha[:, c]).sum(axis=1) if c else np.zeros(per) for c in mono_cols])
            best = logs.argmax(axis=0)
            mismatches += int(sum(mono_sets[b] != want for b in best))
    return AmplitudeEstimate(estimate, math.sqrt(var), per * nsec, _exact_d0(g, params),
                             {"sectors": nsec, "samples_per_sector": per,
                              "leading_tree_mismatches": mismatches})


def bubble_closed_form(dimension: float, mass: float = 1.0) -> float:
    """Two parallel edges: U = a1 + a2 and, with t = a1 + a2,
    A = int_0^inf t^(1 - D/2) exp(-m^2 t) dt = m^(D-4) Gamma(2 - D/2)."""
    return mass ** (dimension - 4) * math.gamma(2 - dimension / 2)


def tadpole_closed_form(dimension: float, mass: float = 1.0) -> float:
    """One self-loop: U = a, A = m^(D-2) Gamma(1 - D/2)."""
    return mass ** (dimension - 2) * math.gamma(1 - dimension / 2)
