import random
from fractions import Fraction
from math import gcd

import pytest

from twistcount.exactalg import hom_image_contains, hom_kernel_size
from twistcount.graphs import (
    bridges,
    classify_node,
    dual_graph,
    enumerate_stable_graphs,
    flip_edge,
    genus,
)
from twistcount.picard import (
    AugmentationNonzero,
    DomainTooLarge,
    GraphMismatch,
    HypothesisViolated,
    LineBundleData,
    NonIntegralTotal,
    NotCoprime,
    RootCounter,
    RootMismatch,
    combine_coprime,
    construct_root,
    count_roots,
    count_roots_by_fractions,
    delta_embed,
    delta_image_lift,
    delta_image_member,
    enumerate_discrete_roots,
    flip_bundle_edge,
    line_bundle,
    omega_bundle,
    power,
    random_bundle,
    root_count_criterion,
    rth_power,
    split_coprime,
    tensor,
    torsion_count,
    total_degree,
    trivial_bundle,
    vertex_degree,
)


def pointed_loop(l=2):
    return dual_graph([(0, [1])], [(0, 0, l)])


def two_bridge(g, l=1):
    return dual_graph([g - 1, 1], [(0, 1, l)])


class TestDegrees:
    def test_omega_on_pointed_loop(self):
        G = pointed_loop(2)
        F = omega_bundle(G, 1)
        assert F.int_part == (0,) and F.mult == (0,)
        assert total_degree(F) == 0

    def test_omega_on_two_component_graph(self):
        for g in (2, 3, 5):
            G = two_bridge(g)
            F = omega_bundle(G, 1)
            assert F.int_part == (2 * g - 3, 1)
            assert total_degree(F) == 2 * g - 2

    def test_structure_sheaf(self):
        G = pointed_loop(3)
        F = omega_bundle(G, 0)
        assert F == trivial_bundle(G)

    def test_marking_twist(self):
        G = dual_graph([(1, [1, 2])], [])
        F = omega_bundle(G, 2, {1: 3, 2: 1})
        assert total_degree(F) == 2 * (2 * 1 - 2) - 4

    def test_unknown_marking_rejected(self):
        with pytest.raises(GraphMismatch):
            omega_bundle(pointed_loop(), 1, {42: 1})

    def test_loop_multiplicity_degree(self):
        G = dual_graph([(0, [1])], [(0, 0, 2)])
        L = line_bundle(G, [0], [1])
        assert vertex_degree(L, 0) == 1
        assert total_degree(L) == 1

    def test_bridge_fractional_degrees(self):
        G = dual_graph([1, 1], [(0, 1, 3)])
        L = line_bundle(G, [0, 0], [1])
        assert vertex_degree(L, 1) == Fraction(1, 3)  # head side
        assert vertex_degree(L, 0) == Fraction(2, 3)  # tail side
        assert total_degree(L) == 1

    def test_mult_bounds_checked(self):
        with pytest.raises(Exception):
            line_bundle(pointed_loop(2), [0], [2])

    def test_degree_minus_branch_fractions_is_integral(self):
        rng = random.Random(2)
        for G in enumerate_stable_graphs(2, 0, [1, 2, 3])[:30]:
            L = random_bundle(G, rng)
            for v in range(G.n_vertices):
                frac = Fraction(0)
                for e, is_head in G.incidences(v):
                    l = G.edges[e].stabilizer
                    m = L.mult[e] if is_head else L.tail_mult(e)
                    frac += Fraction(m, l)
                assert (vertex_degree(L, v) - frac).denominator == 1


class TestTensorAndPowers:
    def test_rth_power_scales_degrees(self):
        G = pointed_loop(2)
        L = line_bundle(G, [0], [1])
        sq = rth_power(L, 2)
        assert sq.mult == (0,)
        assert vertex_degree(sq, 0) == 2

    def test_power_identity(self):
        G = two_bridge(3, 4)
        L = line_bundle(G, [1, 0], [3])
        assert rth_power(L, 1) == L

    def test_power_composition(self):
        G = dual_graph([0, 0], [(0, 1, 6), (0, 1, 4)])
        L = line_bundle(G, [2, -1], [5, 1])
        for a in (2, 3):
            for b in (2, 5):
                assert power(power(L, a), b) == power(L, a * b)

    def test_bridge_cube(self):
        G = dual_graph([1, 1], [(0, 1, 3)])
        L = line_bundle(G, [0, 0], [1])
        cube = rth_power(L, 3)
        assert cube.mult == (0,)
        assert cube.int_part == (2, 1)  # tail side 3*(2/3), head side 3*(1/3)

    def test_tensor_adds(self):
        G = pointed_loop(4)
        a = line_bundle(G, [0], [3])
        b = line_bundle(G, [1], [2])
        c = tensor(a, b)
        assert c.mult == ((3 + 2) % 4,)
        assert vertex_degree(c, 0) == vertex_degree(a, 0) + vertex_degree(b, 0)

    def test_tensor_graph_mismatch(self):
        with pytest.raises(GraphMismatch):
            tensor(trivial_bundle(pointed_loop(2)), trivial_bundle(pointed_loop(3)))


class TestDeltaEmbed:
    def test_loop_gives_zero_column(self):
        for l, r in ((1, 2), (2, 2), (3, 6)):
            h = delta_embed(pointed_loop(l), r)
            assert all(row == (0,) for row in h.matrix)
            assert h.domain_moduli == (gcd(l, r),)

    def test_bridge_full_stabilizer(self):
        G = dual_graph([1, 1], [(0, 1, 3)])
        h = delta_embed(G, 3)
        assert h.domain_moduli == (3,)
        assert [row[0] for row in h.matrix] == [-1, 1]

    def test_bridge_partial_stabilizer(self):
        G = dual_graph([1, 1], [(0, 1, 2)])
        h = delta_embed(G, 4)
        assert h.domain_moduli == (2,)
        assert [row[0] for row in h.matrix] == [-2, 2]


class TestTorsionCount:
    def test_smooth(self):
        for g in (1, 2, 3):
            for r in (2, 3, 5):
                assert torsion_count(dual_graph([(g, [1])]), r) == r ** (2 * g)

    def test_irreducible_one_node(self):
        for g0 in (0, 1, 2):
            G = dual_graph([(g0, [1])], [(0, 0, 1)])
            g = g0 + 1
            for r in (2, 3, 4):
                assert torsion_count(G, r) == r ** (2 * g - 1)

    def test_pointed_loop_full_stabilizer(self):
        assert torsion_count(pointed_loop(2), 2) == 4

    def test_closed_form_on_stable_graphs(self):
        for g in (2, 3):
            for G in enumerate_stable_graphs(g, 0, [1]):
                for r in (2, 3, 4, 5, 6):
                    assert torsion_count(G, r) == r ** (
                        2 * g - 1 + G.n_vertices - G.n_edges
                    )


class TestCountRoots:
    def test_no_roots_on_stable_two_component(self):
        for g in (2, 3, 4):
            G = two_bridge(g)
            F = omega_bundle(G, 1)
            for r in (2, 3, 4, 5, 6):
                if (2 * g - 2) % r == 0:
                    assert count_roots(G, F, r) == 0

    def test_full_roots_with_matching_stabilizer(self):
        for g, r in ((2, 2), (3, 2), (3, 4), (4, 3)):
            if (2 * g - 2) % r:
                continue
            G = two_bridge(g, r)
            assert count_roots(G, omega_bundle(G, 1), r) == r ** (2 * g)

    def test_pointed_loop_counts(self):
        for r in (2, 3, 5):
            G = pointed_loop(r)
            assert count_roots(G, omega_bundle(G, 1), r) == r * r

    def test_torsor_contract(self):
        rng = random.Random(9)
        for G in enumerate_stable_graphs(2, 0, [1, 2, 4])[:60]:
            for r in (2, 4):
                full = torsion_count(G, r)
                for _ in range(5):
                    F = random_bundle(G, rng, r)
                    assert count_roots(G, F, r) in (0, full)

    def test_agrees_with_fraction_sweep(self):
        rng = random.Random(13)
        checked = 0
        for G in enumerate_stable_graphs(2, 0, [1, 2, 3, 6])[:80]:
            for r in (2, 3, 6):
                F = random_bundle(G, rng, r)
                counter = RootCounter(G, r)
                if counter.domain_size > 500:
                    continue
                checked += 1
                assert count_roots(G, F, r) == count_roots_by_fractions(G, F, r)
        assert checked > 50

    def test_count_zero_off_hypothesis(self):
        G = pointed_loop(3)
        L = line_bundle(G, [1], [0])  # total degree 1
        assert total_degree(L) % 3 != 0
        assert count_roots(G, L, 3) == 0

    def test_domain_cap(self):
        G = dual_graph([0, 0], [(0, 1, 5)] * 3)
        with pytest.raises(DomainTooLarge):
            count_roots(G, trivial_bundle(G), 5, max_domain=10)


class TestDiscreteRoots:
    def test_pointed_loop_root_families(self):
        G = pointed_loop(2)
        roots = enumerate_discrete_roots(G, trivial_bundle(G), 2)
        assert {(R.int_part, R.mult) for R in roots} == {((0,), (0,)), ((-1,), (1,))}

    def test_powers_recover_the_bundle(self):
        rng = random.Random(21)
        for G in enumerate_stable_graphs(2, 0, [2, 4])[:20]:
            for r in (2, 4):
                L = random_bundle(G, rng)
                F = rth_power(L, r)
                roots = enumerate_discrete_roots(G, F, r)
                assert L in roots
                assert all(rth_power(R, r) == F for R in roots)

    def test_construct_root_round_trip(self):
        rng = random.Random(31)
        for G in enumerate_stable_graphs(2, 0, [1, 3])[:25]:
            for r in (2, 3):
                L = random_bundle(G, rng)
                F = rth_power(L, r)
                R = construct_root(G, F, r)
                assert R is not None
                assert rth_power(R, r) == F

    def test_construct_root_none_when_empty(self):
        G = two_bridge(2)
        assert construct_root(G, omega_bundle(G, 1), 2) is None


class TestCriterion:
    def test_hypothesis_checked(self):
        G = pointed_loop(3)
        L = line_bundle(G, [1], [0])
        with pytest.raises(HypothesisViolated):
            root_count_criterion(G, L, 3)

    def test_loop_passes_with_full_stabilizer(self):
        G = pointed_loop(2)
        passed, witnesses = root_count_criterion(G, omega_bundle(G, 1), 2)
        assert passed and not witnesses

    def test_stable_bridge_fails_on_side_degree(self):
        G = two_bridge(2)
        passed, witnesses = root_count_criterion(G, omega_bundle(G, 1), 2)
        assert not passed
        assert any("degree" in what for _, what, _ in witnesses)

    def test_bridge_with_full_stabilizer_passes(self):
        for g, r in ((2, 2), (3, 4)):
            G = two_bridge(g, r)
            passed, _ = root_count_criterion(G, omega_bundle(G, 1), r)
            assert passed

    def test_matches_counted_roots(self):
        rng = random.Random(17)
        for G in enumerate_stable_graphs(2, 0, [1, 2, 3, 4, 6])[:80]:
            g = genus(G)
            for r in (2, 3):
                F = random_bundle(G, rng, r)
                passed, _ = root_count_criterion(G, F, r)
                assert passed == (count_roots(G, F, r) == r ** (2 * g))


class TestKernelLaws:
    def test_kernel_size_iff_divisible(self):
        for G in enumerate_stable_graphs(2, 0, [1, 2, 4]):
            for r in (2, 4):
                nonsep = [
                    k for k in range(G.n_edges) if not classify_node(G, k).separating
                ]
                divisible = all(G.edges[k].stabilizer % r == 0 for k in nonsep)
                size = hom_kernel_size(delta_embed(G, r))
                assert (size == r ** (1 - G.n_vertices + G.n_edges)) == divisible

    def test_deletion_recursion_in_divisible_regime(self):
        for G in enumerate_stable_graphs(2, 0, [2, 4]):
            for r in (2,):
                nonsep = [
                    k for k in range(G.n_edges) if not classify_node(G, k).separating
                ]
                if not all(G.edges[k].stabilizer % r == 0 for k in nonsep):
                    continue
                full = hom_kernel_size(delta_embed(G, r))
                for k in nonsep:
                    sub = _delete_edge_kernel(G, k, r)
                    assert full == sub * gcd(r, G.edges[k].stabilizer)

    def test_deletion_bound_always(self):
        for G in enumerate_stable_graphs(2, 0, [1, 2, 3, 6]):
            for r in (2, 6):
                full = hom_kernel_size(delta_embed(G, r))
                for k in range(G.n_edges):
                    if classify_node(G, k).separating:
                        continue
                    sub = _delete_edge_kernel(G, k, r)
                    assert full <= sub * gcd(r, G.edges[k].stabilizer)

    def test_deletion_equality_fails_with_mixed_stabilizers(self):
        # Two parallel edges with stabilizers 2 and 3 at r = 6: deleting the
        # first leaves kernel 1, but the full kernel is 1, not 2.  The
        # deletion factor gcd(r, l) is only an upper bound here.
        G = dual_graph([1, 1], [(0, 1, 2), (0, 1, 3)])
        r = 6
        full = hom_kernel_size(delta_embed(G, r))
        sub = _delete_edge_kernel(G, 0, r)
        assert not classify_node(G, 0).separating
        assert full == 1 and sub == 1
        assert full != sub * gcd(r, 2)

    def test_image_order_with_divisible_stabilizers(self):
        # With every stabilizer divisible by r the image of the boundary
        # map is the full augmentation kernel, of order r^(|V|-1).
        for G in enumerate_stable_graphs(2, 0, [2]):
            r = 2
            h = delta_embed(G, r)
            image = hom_kernel_size(h)
            assert h.domain_size // image == r ** (G.n_vertices - 1)
            assert torsion_count(G, r) == r ** (
                2 * sum(v.genus for v in G.vertices) + 2 * (1 - G.n_vertices + G.n_edges)
            )


def _delete_edge_kernel(G, k, r):
    edges = [e for i, e in enumerate(G.edges) if i != k]
    sub = DeletedGraph(G.n_vertices, edges)
    return hom_kernel_size(_delta_embed_raw(sub, r))


class DeletedGraph:
    """Minimal stand-in: removing an edge may disconnect the graph, which
    DualGraph construction rejects, so the boundary map is built directly."""

    def __init__(self, n_vertices, edges):
        self.n_vertices = n_vertices
        self.edges = edges


def _delta_embed_raw(G, r):
    from twistcount.exactalg import CyclicHom

    matrix = [[0] * len(G.edges) for _ in range(G.n_vertices)]
    moduli = []
    for k, e in enumerate(G.edges):
        h = gcd(e.stabilizer, r)
        moduli.append(h)
        w = r // h
        matrix[e.head][k] += w
        matrix[e.tail][k] -= w
    return CyclicHom.of(matrix, moduli, [r] * G.n_vertices)


class TestDeltaImage:
    def test_zero_target(self):
        G = dual_graph([1, 1], [(0, 1, 2)])
        assert delta_image_member(G, 2, (0, 0))
        assert delta_image_lift(G, 2, (0, 0)) == (0,)

    def test_bridge_member_and_lift(self):
        G = dual_graph([1, 1], [(0, 1, 2)])
        assert delta_image_member(G, 2, (1, 1))
        x = delta_image_lift(G, 2, (1, 1))
        assert delta_embed(G, 2).apply(x) == (1, 1)

    def test_bridge_without_stabilizer_not_member(self):
        G = dual_graph([1, 1], [(0, 1, 1)])
        assert not delta_image_member(G, 2, (1, 1))
        assert delta_image_lift(G, 2, (1, 1)) is None

    def test_hypothesis_and_augmentation_errors(self):
        G = pointed_loop(3)
        with pytest.raises(HypothesisViolated):
            delta_image_member(G, 2, (0,))
        with pytest.raises(AugmentationNonzero):
            delta_image_member(pointed_loop(2), 2, (1,))

    def test_matches_lattice_membership(self):
        rng = random.Random(41)
        checked = 0
        family = enumerate_stable_graphs(2, 0, [2, 4]) + enumerate_stable_graphs(
            3, 0, [2, 4]
        )
        while checked < 200:
            G = rng.choice(family)
            r = 2
            nonsep = [k for k in range(G.n_edges) if not classify_node(G, k).separating]
            if not all(G.edges[k].stabilizer % r == 0 for k in nonsep):
                continue
            t = [rng.randrange(r) for _ in range(G.n_vertices)]
            t[-1] = (t[-1] - sum(t)) % r
            checked += 1
            expected, _ = hom_image_contains(delta_embed(G, r), tuple(t))
            assert delta_image_member(G, r, t) == expected
            lift = delta_image_lift(G, r, t)
            if expected:
                assert delta_embed(G, r).apply(lift) == tuple(v % r for v in t)
            else:
                assert lift is None


class TestCoprimeSplit:
    def test_not_coprime_rejected(self):
        G = pointed_loop(4)
        L = trivial_bundle(G)
        with pytest.raises(NotCoprime):
            split_coprime(L, 2, 4)

    def test_mismatched_roots_rejected(self):
        G = pointed_loop(6)
        a = line_bundle(G, [0], [3])  # squares to mult 0
        b = line_bundle(G, [0], [1])  # cubes to mult 3
        with pytest.raises(RootMismatch):
            combine_coprime(a, b, 2, 3)

    def test_round_trip_on_full_root_sets(self):
        for r1, r2 in ((2, 3), (3, 4), (2, 5)):
            r = r1 * r2
            G = pointed_loop(r)
            F = omega_bundle(G, 1)
            roots = enumerate_discrete_roots(G, F, r)
            roots1 = enumerate_discrete_roots(G, F, r1)
            roots2 = enumerate_discrete_roots(G, F, r2)
            seen = set()
            for L in roots:
                L1, L2 = split_coprime(L, r1, r2)
                assert L1 in roots1 and L2 in roots2
                assert combine_coprime(L1, L2, r1, r2) == L
                seen.add((L1, L2))
            assert len(seen) == len(roots)


class TestOrientationIndependence:
    def test_flip_preserves_counts(self):
        rng = random.Random(55)
        family = enumerate_stable_graphs(2, 0, [1, 2, 3, 4, 6])
        for _ in range(60):
            G = rng.choice(family)
            if not G.n_edges:
                continue
            e = rng.randrange(G.n_edges)
            F = random_bundle(G, rng, 2)
            flipped_F = flip_bundle_edge(F, e)
            H = flipped_F.graph
            for r in (2, 3):
                assert torsion_count(G, r) == torsion_count(H, r)
                assert count_roots(G, F, r) == count_roots(H, flipped_F, r)
            assert total_degree(F) == total_degree(flipped_F)
            for v in range(G.n_vertices):
                assert vertex_degree(F, v) == vertex_degree(flipped_F, v)
            passed, _ = root_count_criterion(G, F, 2)
            passed_f, _ = root_count_criterion(H, flipped_F, 2)
            assert passed == passed_f
