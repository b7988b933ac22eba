import random
from fractions import Fraction

import pytest

from graphcore import core_algebra as ca
from graphcore import dynamics as dyn
from graphcore import parse_graph
from graphcore.exact import RadicalScalar
from graphcore.graph import (all_hereditary_saturated, interaction_powers,
                             is_cstar_dynamical, path_at, path_from_edges,
                             paths_into, transfer_is_multiplicative)

from conftest import (chain_with_extra_source, fixture_graphs, loops,
                      random_graph, single_edge, two_cycle)

AXIOM_GRAPH_NAMES = ("loops1", "loops2", "two_cycle", "chain", "single_edge",
                     "family2", "random0", "random1")


def rational(q):
    return RadicalScalar.from_rational(q)


class TestElementOps:
    def test_matrix_unit_law(self):
        g = loops(2)
        a = ca.matrix_unit(g, (0, 0), (0, 1))
        b = ca.matrix_unit(g, (0, 1), (0, 0))
        prod = a * b
        assert prod.terms == {((0, 0), (0, 0)): rational(1)}

    def test_orthogonality(self):
        g = loops(2)
        a = ca.matrix_unit(g, (0, 0), (0, 0))
        b = ca.matrix_unit(g, (0, 1), (0, 1))
        assert (a * b).is_zero()

    def test_sink_block_orthogonal_to_longer(self):
        # frozen sink terms never interact with full-length terms
        g = single_edge()
        p_w = ca.vertex_projection(g, "w").promote(1)
        e_unit = ca.matrix_unit(g, (0, 0), (0, 0))
        assert (p_w * e_unit).is_zero()
        assert (e_unit * p_w).is_zero()
        # brute check: multiplying every basis pair of different lengths is zero
        for mu, nu in ca.level_basis_pairs(g, 1):
            for al, be in ca.level_basis_pairs(g, 1):
                if len(mu) != len(al):
                    u1 = ca.matrix_unit(g, mu, nu)
                    u2 = ca.matrix_unit(g, al, be)
                    assert (u1 * u2).is_zero()

    def test_adjoint_swaps(self):
        g = loops(2)
        a = ca.matrix_unit(g, (0, 0), (0, 1))
        assert a.adjoint().terms == {((0, 1), (0, 0)): rational(1)}
        assert a.adjoint().adjoint().equals(a)

    def test_invalid_pairs_rejected(self):
        g = chain_with_extra_source()
        with pytest.raises(ValueError):
            ca.CoreElement(g, 1, {((0, 0), (1, 1)): rational(1)})  # ranges differ
        with pytest.raises(ValueError):
            ca.CoreElement(g, 1, {((0,), (0,)): rational(1)})  # short non-sink

    @pytest.mark.parametrize("seed", range(8))
    def test_associativity_and_star(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng.randrange(20))
        pairs = ca.level_basis_pairs(g, 2)
        if not pairs:
            return

        def rand_elem():
            terms = {}
            for pair in rng.sample(pairs, min(4, len(pairs))):
                terms[pair] = rational(rng.randint(-3, 3))
            return ca.CoreElement(g, 2, terms)

        a, b, c = rand_elem(), rand_elem(), rand_elem()
        assert ((a * b) * c).equals(a * (b * c))
        assert (a * b).adjoint().equals(b.adjoint() * a.adjoint())


class TestPromotion:
    def test_projection_expands_over_loops(self):
        g = loops(2)
        p = ca.vertex_projection(g, "v").promote(1)
        assert p.terms == {((0, 0), (0, 0)): rational(1),
                           ((0, 1), (0, 1)): rational(1)}

    def test_unit_stays_unit(self):
        for g in fixture_graphs().values():
            u3 = ca.unit(g, 3)
            assert u3.is_projection()
            for mu, nu in ca.level_basis_pairs(g, 3):
                x = ca.matrix_unit(g, mu, nu)
                assert (u3 * x).equals(x)
                assert (x * u3).equals(x)

    def test_sink_projection_frozen(self):
        g = single_edge()
        p = ca.vertex_projection(g, "w")
        assert p.promote(3).terms == p.terms

    def test_unital_star_homomorphism(self):
        g = chain_with_extra_source()
        pairs = ca.level_basis_pairs(g, 1)
        for p1 in pairs:
            for p2 in pairs:
                a = ca.matrix_unit(g, *p1)
                b = ca.matrix_unit(g, *p2)
                assert (a * b).promote(3).equals(a.promote(3) * b.promote(3))
            assert ca.matrix_unit(g, *p1).adjoint().promote(3).equals(
                ca.matrix_unit(g, *p1).promote(3).adjoint())

    def test_naturality_of_maps(self, graphs):
        # promoting then mapping agrees with mapping then promoting
        for name in ("loops2", "chain", "single_edge", "two_cycle", "random1"):
            g = graphs[name]
            for lvl in (0, 1, 2):
                for pair in ca.level_basis_pairs(g, lvl):
                    a = ca.matrix_unit(g, *pair)
                    assert ca.forward_map(a.promote(lvl + 1)).equals(
                        ca.forward_map(a).promote(lvl + 2))
                    assert ca.transfer_map(a.promote(lvl + 1)).equals(
                        ca.transfer_map(a).promote(lvl))


class TestMaps:
    def test_forward_kills_sources(self):
        g = chain_with_extra_source()
        p_u = ca.vertex_projection(g, "u")
        assert ca.forward_map(p_u).is_zero()

    def test_forward_on_single_edge_graph(self):
        g = single_edge()
        img = ca.forward_map(ca.vertex_projection(g, "w"))
        assert img.terms == {((0, 0), (0, 0)): rational(1)}

    def test_forward_two_loops_block(self):
        g = loops(2)
        img = ca.forward_map(ca.vertex_projection(g, "v"))
        half = RadicalScalar.from_rational(Fraction(1, 2))
        assert img.terms == {((0, e), (0, f)): half for e in (0, 1) for f in (0, 1)}
        assert img.equals(ca.forward_unit(g))

    def test_transfer_on_sink(self):
        g = single_edge()
        assert ca.transfer_map(ca.vertex_projection(g, "w")).is_zero()

    def test_transfer_halves(self):
        g = parse_graph("u -> v\nw -> v\n")
        img = ca.transfer_map(ca.vertex_projection(g, "u"))
        v = g.vertex_index["v"]
        assert img.terms == {((v,), (v,)): rational(Fraction(1, 2))}

    def test_transfer_unit_is_receiving_sum(self):
        for g in fixture_graphs().values():
            expected = ca.zero(g)
            for v in range(g.n_vertices):
                if g.n_in[v]:
                    expected = expected + ca.vertex_projection(g, g.vertices[v])
            assert ca.transfer_unit(g).equals(expected)

    def test_edge_shift_on_projection(self):
        g = loops(2)
        img = ca.edge_shift_map(ca.vertex_projection(g, "v"))
        assert img.equals(ca.unit(g, 1))

    def test_edge_shift_source_trivial(self):
        g = chain_with_extra_source()
        assert ca.edge_shift_map(ca.vertex_projection(g, "u")).is_zero()

    def test_edge_shift_rejects_offdiagonal(self):
        g = loops(2)
        with pytest.raises(ValueError):
            ca.edge_shift_map(ca.matrix_unit(g, (0, 0), (0, 1)))

    def test_edge_shift_power_detects_interaction_powers(self, graphs):
        # the shifted transfer unit equals the shifted full unit exactly at
        # the powers where the iterated pair is still an interaction
        for name in ("loops2", "chain", "family2", "random0"):
            g = graphs[name]
            powers = interaction_powers(g, 4)
            for n in range(1, 5):
                a = ca.transfer_unit_power(g, n)
                b = ca.unit(g)
                for _ in range(n):
                    a = ca.edge_shift_map(a)
                    b = ca.edge_shift_map(b)
                assert a.equals(b) == (n in powers), (name, n)

    def test_expectation_identities(self):
        # transfer(forward(a)) equals the corner compression on both sides
        for g in (loops(2), chain_with_extra_source(), two_cycle()):
            hu = ca.transfer_unit(g)
            vu = ca.forward_unit(g)
            for pair in ca.level_basis_pairs(g, 1):
                a = ca.matrix_unit(g, *pair)
                assert ca.transfer_map(ca.forward_map(a)).equals((hu * a) * hu)
                assert ca.forward_map(ca.transfer_map(a)).equals(
                    (vu * a.promote(1)) * vu)


class TestProjectionsAndPowers:
    def test_unit_power_zero(self):
        g = loops(2)
        assert ca.transfer_unit_power(g, 0).equals(ca.unit(g))
        assert ca.transfer_unit_power(g, 0).is_projection()

    def test_chain_power_two_not_projection(self):
        g = chain_with_extra_source()
        h2 = ca.transfer_unit_power(g, 2)
        w = g.vertex_index["w"]
        assert h2.terms == {((w,), (w,)): rational(Fraction(1, 2))}
        assert not h2.is_projection()

    def test_projection_iff_interaction_power(self, graphs):
        for name, g in graphs.items():
            powers = interaction_powers(g, 6)
            for n in range(1, 7):
                assert ca.transfer_unit_power(g, n).is_projection() == (
                    n in powers), (name, n)


class TestAxioms:
    @pytest.mark.parametrize("name", AXIOM_GRAPH_NAMES)
    @pytest.mark.parametrize("level", [1, 2])
    def test_axioms_hold(self, graphs, name, level):
        report = ca.interaction_axiom_report(graphs[name], level)
        assert report["passed"], report["violations"]

    @pytest.mark.parametrize("name", ("loops2", "chain", "single_edge", "random1"))
    def test_quotient_agrees_with_full_scan(self, graphs, name):
        g = graphs[name]
        full = ca.interaction_axiom_report(g, 2, quotient=False)
        quot = ca.interaction_axiom_report(g, 2, quotient=True)
        assert full["passed"] and quot["passed"]
        assert full["violations"] == quot["violations"]

    def test_detects_injected_defect(self, monkeypatch):
        g = chain_with_extra_source()
        orig = ca.transfer_map

        def broken(a):
            out = orig(a)
            terms = dict(out.terms)
            if terms:
                k = sorted(terms)[0]
                terms[k] = terms[k] * rational(2)
            return ca.CoreElement(out.graph, out.level, terms, validate=False)

        monkeypatch.setattr(ca, "transfer_map", broken)
        assert not ca.interaction_axiom_report(g, 1)["passed"]


class TestCentrality:
    def test_unit_is_central(self, graphs):
        for g in graphs.values():
            assert ca.centrality_check(ca.unit(g), g, 2)

    def test_transfer_unit_centrality_matches_dynamical(self, graphs):
        for name, g in graphs.items():
            assert ca.centrality_check(ca.transfer_unit(g), g, 3) == \
                is_cstar_dynamical(g), name

    def test_forward_unit_centrality_matches_injective_range(self, graphs):
        for name, g in graphs.items():
            assert ca.centrality_check(ca.forward_unit(g), g, 2) == \
                transfer_is_multiplicative(g), name


class TestIdealInvariance:
    def test_whole_and_zero(self):
        g = chain_with_extra_source()
        assert ca.ideal_invariance_check(g, frozenset(range(4)), 2)
        assert ca.ideal_invariance_check(g, frozenset(), 2)

    def test_rejects_non_hereditary(self):
        g = single_edge()
        with pytest.raises(ValueError):
            ca.ideal_invariance_check(g, {"v"}, 1)

    def test_all_members_invariant(self, graphs):
        for name, g in graphs.items():
            for hs in all_hereditary_saturated(g):
                assert ca.ideal_invariance_check(g, hs, 2), (name, sorted(hs))


class TestStateEval:
    def test_prefix_projection(self):
        g = loops(2)
        p = dyn.lasso(g, path_at(0), (0,))  # e1 repeated
        assert ca.state_eval(p, ca.matrix_unit(g, (0, 0), (0, 0))) == rational(1)
        assert ca.state_eval(p, ca.matrix_unit(g, (0, 1), (0, 1))) == rational(0)

    def test_off_diagonal_vanishes(self):
        g = loops(2)
        p = dyn.lasso(g, path_at(0), (0,))
        assert ca.state_eval(p, ca.matrix_unit(g, (0, 0), (0, 1))).is_zero()

    def test_normalized(self, graphs):
        for g in graphs.values():
            points = _sample_points(g)
            for p in points:
                assert ca.state_eval(p, ca.unit(g, 2)) == rational(1)

    @pytest.mark.parametrize("seed", range(6))
    def test_positive_on_squares(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng.randrange(20))
        pairs = ca.level_basis_pairs(g, 2)
        points = _sample_points(g)
        if not pairs or not points:
            return
        terms = {pair: rational(rng.randint(-3, 3))
                 for pair in rng.sample(pairs, min(5, len(pairs)))}
        a = ca.CoreElement(g, 2, terms)
        square = a.adjoint() * a
        for p in points:
            value = ca.state_eval(p, square)
            # exact identity: the value is a sum of squares of coefficients
            expected = RadicalScalar()
            for (mu, nu), c in a.terms.items():
                if p.prefix(len(nu) - 1) == nu:
                    expected = expected + c * c
            assert value == expected
            assert float(value) >= 0


def _sample_points(g):
    points = []
    for loop in dyn.simple_loops(g):
        points.append(dyn.lasso(g, path_at(loop[0]), loop[1:]))
    for w in sorted(g.sinks):
        points.append(dyn.sink_path(g, path_at(w)))
        for p in paths_into(g, w, 2):
            points.append(dyn.sink_path(g, p))
    return points


class TestDiagonalProbe:
    def test_probe_reports_nondiagonal_images(self):
        g = loops(2)
        defects = ca.forward_diagonal_defects(g, 1)
        assert defects  # averaging two loops produces off-diagonal terms

    def test_probe_empty_when_range_injective(self):
        g = parse_graph("u -> v\nv -> w\n")
        assert ca.forward_diagonal_defects(g, 1) == []


class TestBratteli:
    def test_two_loops_dims(self):
        d = ca.bratteli(loops(2), 3)
        assert [sorted(lvl.values()) for lvl in d.dims] == [[1], [4], [16], [64]]

    def test_single_edge_tail(self):
        d = ca.bratteli(single_edge(), 2)
        labels = [[d.node_label(v) for v in lvl] for lvl in d.levels]
        assert labels == [["v", "w"], ["w", "w^(0)"], ["w^(0)", "w^(1)"]]
        assert [sorted(lvl.values()) for lvl in d.dims] == [[1, 1], [1, 1], [1, 1]]

    def test_multiplicities_match_adjacency(self, graphs):
        from graphcore import adjacency_matrix
        for g in graphs.values():
            d = ca.bratteli(g, 3)
            a = adjacency_matrix(g)
            for gap in d.edges:
                for (x, y), mult in gap.items():
                    if x[0] == "graph" and y[0] == "graph":
                        assert mult == a[x[1], y[1]]
                    else:
                        assert mult == 1

    def test_dot_output_smoke(self):
        text = ca.bratteli(single_edge(), 2).to_dot()
        assert text.startswith("digraph")
        assert text.count("rank=same") == 3
        assert '"w^(0)@1" -> "w^(0)@2"' in text

    def test_needs_a_level(self):
        with pytest.raises(ValueError):
            ca.bratteli(loops(1), 0)
