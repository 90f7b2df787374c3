import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from resumkit.census import connected_multigraphs_upto, random_connected_multigraph
from resumkit.errors import CapExceededError, DisconnectedGraphError, NotSpanningTreeError
from resumkit.fixtures import cycle, path
from resumkit.graph import Multigraph
from resumkit.weights import (DeletionContraction, enumerate_spanning_trees, kruskal_leading_tree,
                              sector_counts, sectors_for_tree, simplex_monomial_integral,
                              weight_bruteforce, weight_deletion_contraction, weight_monte_carlo,
                              weight_symbolic, weight_table)

T123 = frozenset({"l1", "l2", "l3"})
T125 = frozenset({"l1", "l2", "l5"})
EXACT = [weight_bruteforce, weight_deletion_contraction, weight_symbolic]


def digits(sector):
    return "".join(label[1] for label in sector)


class TestKruskal:
    def test_listed_sector(self, g_eye):
        t = kruskal_leading_tree(g_eye, ["l1", "l3", "l5", "l6", "l2", "l4"])
        assert t.order == ("l1", "l3", "l2")

    def test_identity_sector(self, g_eye):
        assert kruskal_leading_tree(g_eye, [f"l{k}" for k in range(1, 7)]).edges == T123

    def test_double_edge(self, bubble):
        assert kruskal_leading_tree(bubble, ["l2", "l1"]).order == ("l2",)

    def test_skips_self_loop(self, tadpole):
        assert kruskal_leading_tree(tadpole, ["l1", "l2"]).order == ("l2",)

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraphError):
            kruskal_leading_tree(Multigraph(("A", "B"), ()), [])

    @given(st.integers(0, 10**6), st.integers(1, 8))
    @settings(max_examples=80, deadline=None)
    def test_minimizes_position_sum(self, seed, ne):
        rng = random.Random(seed)
        g = random_connected_multigraph(rng, ne)
        sector = list(g.edge_labels)
        rng.shuffle(sector)
        pos = {label: k for k, label in enumerate(sector)}
        lead = kruskal_leading_tree(g, sector).edges
        best = sum(pos[e] for e in lead)
        for t in enumerate_spanning_trees(g):
            assert best <= sum(pos[e] for e in t)


class TestSimplexIntegral:
    # independent values from sympy iterated integration over 0<x1<...<xn<1
    @staticmethod
    def sympy_simplex(exps):
        xs = sp.symbols(f"x1:{len(exps) + 2}")
        f = sp.Integer(1)
        for k, c in enumerate(exps):
            f *= xs[k] ** c
        for k in range(len(exps)):
            f = sp.integrate(f, (xs[k], 0, xs[k + 1] if k + 1 < len(exps) else 1))
        return Fraction(int(f.p), int(f.q))

    def test_reference_values(self):
        assert simplex_monomial_integral([3, 0, 0]) == Fraction(1, 120)
        assert simplex_monomial_integral([1, 1, 1]) == Fraction(1, 48)
        # min-factor integrand over w2 < w1 < w3 is w1^2 w2 (ascending: 1, 2, 0)
        assert simplex_monomial_integral([1, 2, 0]) == Fraction(1, 60)

    @pytest.mark.parametrize("n", range(0, 8))
    def test_volume(self, n):
        assert simplex_monomial_integral([0] * n) == Fraction(1, math.factorial(n))

    @pytest.mark.parametrize("exps", [(3, 0, 0), (1, 1, 1), (0, 1, 2), (2, 1, 0), (1, 0, 2, 1), (0, 0, 0, 0),
                                      (1, 2, 0)])
    def test_against_sympy(self, exps):
        assert simplex_monomial_integral(exps) == self.sympy_simplex(exps)

    def test_displayed_pairing_is_transposed(self):
        # over w2 < w1 < w3 the monomial w3^2 w2 integrates to 1/36, not 1/60;
        # 1/60 belongs to w1^2 w2 on that region (ascending order w2, w1, w3)
        w1, w2, w3 = sp.symbols("w1 w2 w3")

        def region(f):
            return sp.integrate(sp.integrate(sp.integrate(f, (w2, 0, w1)), (w1, 0, w3)), (w3, 0, 1))

        assert region(w1 ** 2 * w2) == sp.Rational(1, 60)
        assert region(w3 ** 2 * w2) == sp.Rational(1, 36)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            simplex_monomial_integral([1, -1])


class TestEyeGraph:
    @pytest.mark.parametrize("method", EXACT)
    def test_t123(self, g_eye, method):
        w = method(g_eye, T123)
        assert (w.sector_count, w.total_sectors, w.value) == (48, 720, Fraction(1, 15))

    @pytest.mark.parametrize("method", EXACT)
    def test_t125(self, g_eye, method):
        w = method(g_eye, T125)
        assert (w.sector_count, w.value) == (66, Fraction(11, 120))

    def test_sector_list_t123(self, g_eye):
        secs = {digits(s) for s in sectors_for_tree(g_eye, T123)}
        assert len(secs) == 48
        assert sum(1 for s in secs if set(s[:3]) == set("123")) == 36
        listed = {"135624", "136524", "135264", "135246", "136254", "136245"}
        swapped = {s.translate(str.maketrans("13", "31")) for s in listed}
        assert {s for s in secs if set(s[:3]) != set("123")} == listed | swapped

    def test_sector_list_t125(self, g_eye):
        secs = [digits(s) for s in sectors_for_tree(g_eye, T125)]
        assert len(secs) == 66
        rest = [s for s in secs if set(s[:3]) != set("125")]
        assert len(rest) == 30
        groups = Counter(s[:2] for s in rest)
        assert groups == {"15": 6, "25": 6, "52": 6, "51": 6, "56": 6}
        assert {s[2] for s in rest if s[:2] in ("15", "51")} == {"3", "6"}
        assert {s[2] for s in rest if s[:2] in ("25", "52")} == {"4", "6"}
        assert {s[2] for s in rest if s[:2] == "56"} == {"1", "2"}

    def test_symbolic_monomial_split(self, g_eye):
        # T123: four orderings give w^3 of the lowest (1/120), two give 1/60
        from resumkit.weights import _min_factor_paths
        _, paths = _min_factor_paths(g_eye, T123)
        vals = Counter()
        for order in itertools.permutations(range(3)):
            rank = {k: r for r, k in enumerate(order)}
            exps = [0, 0, 0]
            for p in paths:
                exps[min(rank[k] for k in p)] += 1
            vals[simplex_monomial_integral(exps)] += 1
        assert vals == {Fraction(1, 120): 4, Fraction(1, 60): 2}

    def test_memo_hits(self, g_eye):
        dc = DeletionContraction()
        assert dc.weight(g_eye, T125).value == Fraction(11, 120)
        assert dc.hits >= 1

    def test_table(self, g_eye):
        table = weight_table(g_eye, "dc")
        vals = Counter(w.value for w in table.values())
        assert vals == {Fraction(1, 15): 4, Fraction(11, 120): 8}
        assert 4 * Fraction(1, 15) + 8 * Fraction(11, 120) == 1
        heavy = {t for t, w in table.items() if w.value == Fraction(1, 15)}
        assert heavy == {frozenset(s) for s in ({"l1", "l2", "l3"}, {"l1", "l2", "l4"},
                                                {"l1", "l3", "l4"}, {"l2", "l3", "l4"})}


class TestSmallCases:
    @pytest.mark.parametrize("method", EXACT)
    def test_double_edge(self, bubble, method):
        w = method(bubble, {"l1"})
        assert (w.sector_count, w.value) == (1, Fraction(1, 2))

    @pytest.mark.parametrize("method", EXACT)
    def test_triangle(self, triangle, method):
        for t in enumerate_spanning_trees(triangle):
            assert method(triangle, t).value == Fraction(1, 3)

    @pytest.mark.parametrize("n", range(3, 7))
    def test_cycle(self, n):
        g = cycle(n)
        table = weight_table(g, "dc")
        assert len(table) == n
        assert all(w.value == Fraction(1, n) for w in table.values())

    def test_single_edge(self):
        g = Multigraph.from_edges([("l1", "A", "B")])
        assert {t: w.value for t, w in weight_table(g, "brute").items()} == {frozenset({"l1"}): 1}

    def test_tree_graph(self):
        g = path(5)
        assert weight_symbolic(g, g.edge_labels).value == 1

    def test_enumeration(self, g_eye, triangle, bubble):
        listed = ["123", "124", "134", "234", "125", "126", "345", "346", "145", "146", "235", "236"]
        assert set(enumerate_spanning_trees(g_eye)) == {frozenset(f"l{d}" for d in s) for s in listed}
        assert len(enumerate_spanning_trees(g_eye)) == 12
        assert len(enumerate_spanning_trees(triangle)) == 3
        assert enumerate_spanning_trees(bubble) == [frozenset({"l1"}), frozenset({"l2"})]

    def test_disconnected_enumeration(self):
        with pytest.raises(DisconnectedGraphError):
            enumerate_spanning_trees(Multigraph(("A", "B"), ()))

    def test_not_spanning(self, g_eye):
        for method in EXACT:
            with pytest.raises(NotSpanningTreeError):
                method(g_eye, {"l5", "l6", "l1"})

    def test_caps(self, g_eye):
        with pytest.raises(CapExceededError):
            weight_bruteforce(g_eye, T123, max_edges=5)
        with pytest.raises(CapExceededError):
            weight_symbolic(g_eye, T123, max_tree_edges=2)
        with pytest.raises(CapExceededError):
            weight_table(g_eye, "brute", max_edges=5)

    def test_unknown_method(self, g_eye):
        with pytest.raises(ValueError):
            weight_table(g_eye, "magic")


class TestInvariants:
    @pytest.mark.parametrize("g", connected_multigraphs_upto(4, 1), ids=str)
    def test_methods_agree_small(self, g):
        brute = weight_table(g, "brute")
        assert sum(w.value for w in brute.values()) == 1
        for t, w in brute.items():
            assert 0 < w.value <= 1
            assert weight_deletion_contraction(g, t) == w
            assert weight_symbolic(g, t) == w

    @given(st.integers(0, 10**6), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_relabeling_invariance(self, seed, ne):
        rng = random.Random(seed)
        g = random_connected_multigraph(rng, ne)
        vm = {v: f"u{k}" for k, v in enumerate(rng.sample(g.vertices, len(g.vertices)))}
        em = {e.label: f"f{k}" for k, e in enumerate(rng.sample(g.edges, len(g.edges)))}
        h = g.relabel(vm, em)
        for t, w in weight_table(g, "dc").items():
            assert weight_bruteforce(h, {em[x] for x in t}) == w

    @given(st.integers(0, 10**6), st.integers(1, 5))
    @settings(max_examples=40, deadline=None)
    def test_self_loop_invariance(self, seed, ne):
        rng = random.Random(seed)
        g = random_connected_multigraph(rng, ne)
        h = g.add_edge("loop", *(rng.choice(g.vertices),) * 2)
        before = weight_table(g, "brute")
        after = weight_table(h, "brute")
        assert {t: w.value for t, w in before.items()} == {t: w.value for t, w in after.items()}
        for t in before:
            # the loop can sit in any of E+1 positions of a sector of G
            assert after[t].sector_count == before[t].sector_count * (g.num_edges + 1)

    def test_self_loop_tadpole(self, tadpole):
        assert weight_symbolic(tadpole, {"l2"}).value == 1
        assert weight_bruteforce(tadpole, {"l2"}).sector_count == 2

    def test_sector_counts_partition(self, g_eye):
        counts = sector_counts(g_eye)
        assert sum(counts.values()) == 720


class TestMonteCarlo:
    def test_reference(self, g_eye):
        est = weight_monte_carlo(g_eye, T123, 10**6, seed=2024)
        assert abs(est.estimate - 1 / 15) <= 3 * est.std_error
        assert est.std_error < 2e-4

    def test_double_edge(self, bubble):
        est = weight_monte_carlo(bubble, {"l1"}, 200_000, seed=3)
        assert abs(est.estimate - 0.5) <= 4 * est.std_error

    def test_tree_graph_exact(self):
        g = path(4)
        est = weight_monte_carlo(g, g.edge_labels, 1000, seed=0)
        assert est.estimate == 1.0 and est.std_error == 0.0

    def test_reproducible(self, g_eye):
        a = weight_monte_carlo(g_eye, T125, 5000, seed=11)
        b = weight_monte_carlo(g_eye, T125, 5000, seed=11)
        assert a == b

    def test_bad_samples(self, g_eye):
        with pytest.raises(ValueError):
            weight_monte_carlo(g_eye, T125, 0, seed=1)

    def test_consistency_rate(self, g_eye):
        exact = {t: float(w.value) for t, w in weight_table(g_eye, "dc").items()}
        trees = sorted(exact, key=sorted)
        runs = 0
        inside = 0
        for seed in range(200):
            t = trees[seed % len(trees)]
            est = weight_monte_carlo(g_eye, t, 4000, seed=seed)
            runs += 1
            inside += abs(est.estimate - exact[t]) <= 4 * est.std_error
        assert inside / runs >= 0.99

    def test_table_needs_seed(self, g_eye):
        with pytest.raises(ValueError):
            weight_table(g_eye, "mc")

    def test_table_threads_identical(self, g_eye):
        a = weight_table(g_eye, "mc", samples=2000, seed=5, threads=1)
        b = weight_table(g_eye, "mc", samples=2000, seed=5, threads=4)
        assert a == b


def test_threaded_dc_table_matches(g_eye):
    assert weight_table(g_eye, "dc", threads=4) == weight_table(g_eye, "brute")
