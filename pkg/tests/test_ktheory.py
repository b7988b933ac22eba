import random

import pytest

from graphcore import core_algebra as ca
from graphcore import ktheory as kt
from graphcore import parse_graph
from graphcore.exact import AbelianGroup
from graphcore.graph import Graph

from conftest import (chain_with_extra_source, family_graph, fixture_graphs,
                      loops, random_graph, single_edge, two_cycle)


class TestDeltaMatrix:
    def test_loops(self):
        for n in (1, 2, 3, 4):
            d = kt.delta_matrix(loops(n))
            assert d.entries == ((1 - n,),)

    def test_two_cycle(self):
        d = kt.delta_matrix(two_cycle())
        assert d.entries == ((1, -1), (-1, 1))

    def test_single_edge_column(self):
        d = kt.delta_matrix(single_edge())
        assert d.entries == ((1,), (-1,))
        assert d.col_labels == ("v",)

    def test_no_columns_for_sinks(self):
        g = parse_graph("vertex w\n")
        d = kt.delta_matrix(g)
        assert d.ncols == 0 and d.nrows == 1


class TestKGroups:
    @pytest.mark.parametrize("n,torsion", [(2, ()), (3, (2,)), (4, (3,)), (5, (4,))])
    def test_loops_torsion(self, n, torsion):
        k0, k1 = kt.k_groups(loops(n))
        assert k0 == AbelianGroup(0, torsion)
        assert k1 == AbelianGroup(0)

    def test_two_cycle(self):
        k0, k1 = kt.k_groups(two_cycle())
        assert k0 == AbelianGroup(1)
        assert k1 == AbelianGroup(1)

    def test_single_vertex_no_edges(self):
        k0, k1 = kt.k_groups(parse_graph("vertex w\n"))
        assert k0 == AbelianGroup(1)
        assert k1 == AbelianGroup(0)

    def test_acyclic_rank_is_sink_count(self):
        for g in (single_edge(), chain_with_extra_source(),
                  family_graph(2), family_graph(3)):
            k0, k1 = kt.k_groups(g)
            assert k0 == AbelianGroup(len(g.sinks))
            assert k1 == AbelianGroup(0)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_acyclic(self, seed):
        rng = random.Random(seed)
        nv = rng.randint(2, 6)
        vertices = ["v%d" % i for i in range(nv)]
        edges = []
        for _ in range(rng.randint(1, 9)):
            a, b = sorted(rng.sample(range(nv), 2))
            edges.append((a, b))  # edges ascend, so no cycles
        g = Graph(vertices, edges)
        k0, k1 = kt.k_groups(g)
        assert k0 == AbelianGroup(len(g.sinks))
        assert k1 == AbelianGroup(0)

    def test_relabeling_invariance(self):
        for seed in range(8):
            rng = random.Random(seed)
            g = random_graph(seed)
            perm = list(range(g.n_vertices))
            rng.shuffle(perm)
            relabeled = Graph([g.vertices[perm[i]] for i in range(g.n_vertices)],
                              [(perm.index(s), perm.index(r)) for s, r in g.edges])
            assert kt.k_groups(g) == kt.k_groups(relabeled)

    def test_square_duality_without_sinks_or_sources(self, graphs):
        for name, g in graphs.items():
            if g.sinks or g.sources:
                continue
            d = kt.delta_matrix(g)
            assert d.nrows == d.ncols
            k0, k1 = kt.k_groups(g)
            assert k0.free_rank == k1.free_rank, name


class TestPresentation:
    def test_two_loops_level_two(self):
        pres = kt.k0_core_presentation(loops(2), 2)
        assert pres.generators == ((0, 0), (0, 1), (0, 2))
        assert pres.relations.entries == ((1, -2, 0), (0, 1, -2))
        assert pres.level_rank == 1

    def test_single_edge_level_one(self):
        g = single_edge()
        pres = kt.k0_core_presentation(g, 1)
        assert pres.gen_labels() == ["v^(0)", "w^(0)", "w^(1)"]
        assert pres.relations.entries == ((1, 0, -1),)
        assert pres.level_rank == 2  # w^(0) and w^(1); the v chain dies out

    def test_sink_generators_have_no_relations(self, graphs):
        for g in graphs.values():
            pres = kt.k0_core_presentation(g, 3)
            n_non_sink_below = sum(
                1 for v, k in pres.generators if k < 3 and v not in g.sinks)
            assert pres.relations.nrows == n_non_sink_below

    def test_level_rank_matches_bratteli(self, graphs):
        for name, g in graphs.items():
            pres = kt.k0_core_presentation(g, 3)
            diagram = ca.bratteli(g, 3)
            nonzero_nodes = [v for v in diagram.levels[3] if diagram.dims[3][v] > 0]
            assert pres.level_rank == len(nonzero_nodes), name


class TestTransferAction:
    def test_levels_drop(self):
        pres = kt.k0_core_presentation(loops(2), 2)
        h = kt.hstar_action(pres)
        # v^(1) -> v^(0) and v^(2) -> v^(1)
        assert h.entries[0][1] == 1 and h.entries[1][2] == 1

    def test_level_zero_substitution(self):
        pres = kt.k0_core_presentation(loops(2), 1)
        h = kt.hstar_action(pres)
        # v^(0) -> 2 v^(0) forced by the defining relation
        assert h.entries[0][0] == 2

    def test_sink_generators_shift_down(self):
        g = single_edge()
        pres = kt.k0_core_presentation(g, 2)
        h = kt.hstar_action(pres)
        i_w0 = pres.generators.index((1, 0))
        j = h.col_labels.index("w^(1)")
        assert h.entries[i_w0][j] == 1
        assert "w^(0)" not in h.col_labels  # sink level-0 not in the domain


class TestSequenceOracle:
    def test_three_loops(self):
        res = kt.truncated_sequence_oracle(loops(3), 4)
        assert res.k0 == AbelianGroup(0, (2,))
        assert res.k1 == AbelianGroup(0)
        assert res.stabilized

    def test_single_edge(self):
        res = kt.truncated_sequence_oracle(single_edge(), 3)
        assert res.k0 == AbelianGroup(1)
        assert res.k1 == AbelianGroup(0)

    def test_matches_k_groups_on_fixtures(self, graphs):
        for name, g in graphs.items():
            level = max(2, g.n_vertices + 2)
            res = kt.truncated_sequence_oracle(g, level)
            assert res.stabilized, name
            assert (res.k0, res.k1) == kt.k_groups(g), name

    def test_stabilization_sweep(self, graphs):
        for name, g in graphs.items():
            base = g.n_vertices + 2
            r1 = kt.truncated_sequence_oracle(g, base)
            r2 = kt.truncated_sequence_oracle(g, base + 1)
            assert (r1.k0, r1.k1) == (r2.k0, r2.k1), name

    def test_level_validation(self):
        with pytest.raises(ValueError):
            kt.truncated_sequence_oracle(loops(2), 1)
