import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperreg import (
    Complex,
    InputError,
    KGraph,
    cliques,
    count_induced,
    crossing_sets,
    induce,
    kgraph_from_text,
    kgraph_to_text,
    sym_diff_distance,
)
from hyperreg.errors import CapabilityError
from hyperreg.hypergraph import (
    all_iso_classes,
    are_induced_isomorphic,
    automorphism_count,
    canonical_form,
    cliques_naive,
)

from conftest import random_kgraph


class TestKGraph:
    def test_edge_canonicalization(self):
        H = KGraph(3, 5, {(2, 0, 4)})
        assert (0, 2, 4) in H.edges

    def test_repeated_vertex_rejected(self):
        with pytest.raises(InputError):
            KGraph(2, 4, {(1, 1)})

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            KGraph(2, 3, {(1, 3)})

    def test_wrong_size_rejected(self):
        with pytest.raises(InputError):
            KGraph(3, 5, {(0, 1)})

    def test_complete_and_empty(self):
        assert len(KGraph.complete(2, 5)) == 10
        assert len(KGraph.empty(3, 5)) == 0


class TestCrossingSets:
    def test_two_classes_product(self):
        out = crossing_sets([{0, 1}, {2, 3}], 2)
        assert out == {(0, 2), (0, 3), (1, 2), (1, 3)}

    def test_j_exceeding_classes_is_empty(self):
        assert crossing_sets([{0}, {1}], 3) == set()

    def test_overlapping_classes_rejected(self):
        with pytest.raises(InputError):
            crossing_sets([{0, 1}, {1, 2}], 2)

    def test_crossing_count_formula(self):
        classes = [set(range(0, 3)), set(range(3, 7)), set(range(7, 9))]
        assert len(crossing_sets(classes, 2)) == 3 * 4 + 3 * 2 + 4 * 2


class TestCliquesOracle:
    """The bitset clique enumerator must agree with the naive scan."""

    @pytest.mark.parametrize("seed", range(40))
    def test_k2_matches_naive(self, seed):
        H = random_kgraph(2, 10 + seed % 7, 0.5, seed)
        for ell in (2, 3, 4):
            assert cliques(H, ell) == cliques_naive(H, ell)

    @pytest.mark.parametrize("seed", range(40))
    def test_k3_matches_naive(self, seed):
        H = random_kgraph(3, 9 + seed % 6, 0.6, seed + 1000)
        for ell in (3, 4, 5):
            assert cliques(H, ell) == cliques_naive(H, ell)

    def test_ell_equals_k(self):
        H = random_kgraph(2, 8, 0.5, 3)
        assert cliques(H, 2) == set(H.edges)

    def test_k1(self):
        H = KGraph(1, 5, {(0,), (2,), (4,)})
        assert cliques(H, 2) == {(0, 2), (0, 4), (2, 4)}

    def test_ell_below_k_rejected(self):
        with pytest.raises(InputError):
            cliques(KGraph(3, 5), 2)


class TestInduce:
    def test_relabels_ascending(self):
        H = KGraph(2, 6, {(1, 4), (4, 5)})
        sub = induce(H, [1, 4, 5])
        assert sub.n == 3 and sub.edges == frozenset({(0, 1), (1, 2)})

    def test_full_set_identity(self):
        H = random_kgraph(2, 8, 0.5, 1)
        assert induce(H, range(8)).edges == H.edges

    def test_out_of_range(self):
        with pytest.raises(InputError):
            induce(KGraph(2, 3), [0, 5])


class TestDistance:
    def test_metric_examples(self):
        G = KGraph(2, 4, {(0, 1)})
        H = KGraph(2, 4, {(0, 1), (2, 3)})
        assert sym_diff_distance(G, H) == 1
        assert sym_diff_distance(G, G) == 0

    def test_mismatch_rejected(self):
        with pytest.raises(InputError):
            sym_diff_distance(KGraph(2, 3), KGraph(2, 4))

    @given(st.integers(0, 2**15 - 1), st.integers(0, 2**15 - 1), st.integers(0, 2**15 - 1))
    @settings(max_examples=40, deadline=None)
    def test_triangle_inequality(self, x, y, z):
        slots = list(itertools.combinations(range(6), 2))

        def graph(bits):
            return KGraph(2, 6, frozenset(
                s for i, s in enumerate(slots) if bits >> i & 1
            ))

        a, b, c = graph(x), graph(y), graph(z)
        assert sym_diff_distance(a, c) <= (
            sym_diff_distance(a, b) + sym_diff_distance(b, c)
        )


class TestIsomorphism:
    def test_triangle_path_distinct(self):
        tri = KGraph(2, 3, {(0, 1), (0, 2), (1, 2)})
        path = KGraph(2, 3, {(0, 1), (1, 2)})
        assert not are_induced_isomorphic(tri, path)

    def test_relabelled_isomorphic(self):
        a = KGraph(2, 4, {(0, 1), (2, 3)})
        b = KGraph(2, 4, {(0, 3), (1, 2)})
        assert are_induced_isomorphic(a, b)
        assert canonical_form(a) == canonical_form(b)

    def test_automorphism_counts(self):
        assert automorphism_count(KGraph(2, 3, {(0, 1), (0, 2), (1, 2)})) == 6
        assert automorphism_count(KGraph(2, 3, {(0, 1), (1, 2)})) == 2
        assert automorphism_count(KGraph(2, 3, {(0, 1)})) == 2

    def test_iso_class_counts(self):
        assert len(all_iso_classes(3, 2)) == 4
        assert len(all_iso_classes(4, 2)) == 11
        assert len(all_iso_classes(3, 3)) == 2


class TestCountInduced:
    def _naive(self, F, H):
        hits = 0
        for S in itertools.combinations(range(H.n), F.n):
            if are_induced_isomorphic(F, induce(H, S)):
                hits += 1
        import math
        return Fraction(hits, math.comb(H.n, F.n))

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_naive_scan(self, seed):
        H = random_kgraph(2, 9 + seed % 4, 0.5, seed + 77)
        patterns = [
            KGraph(2, 3, frozenset()),
            KGraph(2, 3, {(0, 1), (1, 2)}),
            KGraph(2, 3, {(0, 1), (0, 2), (1, 2)}),
            KGraph(2, 4, {(0, 1), (2, 3)}),
        ]
        for F in patterns:
            assert count_induced(F, H) == self._naive(F, H)

    @pytest.mark.parametrize("seed", range(5))
    def test_k3_matches_naive_scan(self, seed):
        H = random_kgraph(3, 9, 0.5, seed + 99)
        for F in all_iso_classes(4, 3)[:6]:
            assert count_induced(F, H) == self._naive(F, H)

    def test_totality_over_classes(self):
        H = random_kgraph(2, 10, 0.4, 12)
        total = sum(count_induced(F, H) for F in all_iso_classes(3, 2))
        assert total == 1

    def test_pattern_cap(self):
        with pytest.raises(CapabilityError):
            count_induced(KGraph(2, 9), random_kgraph(2, 12, 0.5, 0))

    def test_cap_override(self):
        val = count_induced(
            KGraph(2, 9), KGraph(2, 9), allow_large=True
        )
        assert val == 1


class TestComplex:
    def test_valid_stack(self, small_planted_k3):
        _, F, _ = small_planted_k3
        x = F.polyad_addresses(2)[0]
        F.polyad_complex(x)  # validates on construction

    def test_non_crossing_layer_rejected(self):
        with pytest.raises(InputError):
            Complex((frozenset({0, 1}), frozenset({2})), {2: KGraph(2, 3, {(0, 1)})})

    def test_missing_underlay_rejected(self):
        with pytest.raises(InputError):
            Complex(
                (frozenset({0}), frozenset({1}), frozenset({2})),
                {2: KGraph(2, 3), 3: KGraph(3, 3, {(0, 1, 2)})},
            )


class TestSerialization:
    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip(self, seed):
        H = random_kgraph(2 + seed % 2, 10, 0.5, seed)
        assert kgraph_from_text(kgraph_to_text(H)) == H

    def test_bad_header_names_line(self):
        with pytest.raises(InputError, match="line 1"):
            kgraph_from_text("nope nope\n")

    def test_bad_edge_names_line(self):
        with pytest.raises(InputError, match="line 3"):
            kgraph_from_text("2 4\n0 1\n0 x\n")

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            kgraph_from_text("\n\n")
