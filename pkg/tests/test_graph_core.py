from __future__ import annotations

import random
from itertools import combinations, permutations

import pytest

from bkcolor.graph_core import (
    Graph,
    GraphFormatError,
    bits,
    canonical_bits,
    delete_vertex,
    degree_profile,
    emit_graph6,
    enumerate_graphs,
    induced_subgraph,
    make_graph,
    mask_of,
    neighbors,
    parse_edge_list,
    parse_graph6,
    random_class_graph,
)
from bkcolor.class_guard import ClassId, find_H_witness, find_R_witness

from conftest import complete, cycle, path


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return make_graph(
        n, [(v, w) for v in range(n) for w in range(v + 1, n) if rng.random() < p]
    )


class TestMakeGraph:
    def test_c5(self):
        G = cycle(5)
        assert G.n == 5 and G.delta == 2 and G.edge_count() == 5

    def test_edgeless(self):
        G = make_graph(3, [])
        assert G.delta == 0 and G.edge_count() == 0

    def test_k10(self):
        G = complete(10)
        assert all(G.degree(v) == 9 for v in range(10))

    def test_duplicate_edges_collapse(self):
        G = make_graph(3, [(0, 1), (1, 0), (0, 1)])
        assert G.edge_count() == 1

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            make_graph(3, [(0, 3)])

    def test_self_loop(self):
        with pytest.raises(ValueError):
            make_graph(3, [(1, 1)])


class TestDegreeAndNeighbors:
    def test_degree_profile_c5(self):
        degs, delta = degree_profile(cycle(5))
        assert degs == (2, 2, 2, 2, 2) and delta == 2

    def test_degree_profile_k10(self):
        degs, delta = degree_profile(complete(10))
        assert set(degs) == {9} and delta == 9

    def test_degree_profile_k10_minus_edge(self):
        G = make_graph(
            10, [(i, j) for i in range(10) for j in range(i + 1, 10) if (i, j) != (8, 9)]
        )
        degs, delta = degree_profile(G)
        assert sorted(degs) == [8, 8] + [9] * 8 and delta == 9

    def test_neighbors_open_closed(self):
        G = cycle(5)
        assert neighbors(G, 0) == mask_of([1, 4])
        assert neighbors(G, 0, closed=True) == mask_of([0, 1, 4])

    def test_neighbors_edgeless(self):
        assert neighbors(make_graph(3, []), 1) == 0

    def test_neighbors_range(self):
        with pytest.raises(ValueError):
            neighbors(cycle(5), 5)


class TestInducedAndDelete:
    def test_c5_prefix_is_path(self):
        sub, remap = induced_subgraph(cycle(5), mask_of([0, 1, 2]))
        assert sub.edge_count() == 2 and sub.delta == 2
        assert remap == {0: 0, 1: 1, 2: 2}

    def test_full_set_identity(self):
        G = random_graph(7, 0.5, 1)
        sub, remap = induced_subgraph(G, G.full_mask)
        assert sub == G and remap == {v: v for v in range(7)}

    def test_k10_any_four(self):
        sub, _ = induced_subgraph(complete(10), mask_of([2, 3, 5, 9]))
        assert sub == complete(4)

    def test_member_out_of_range(self):
        with pytest.raises(ValueError):
            induced_subgraph(cycle(5), 1 << 6)

    def test_delete_vertex_k10(self):
        assert delete_vertex(complete(10), 4) == complete(9)

    def test_delete_vertex_c5(self):
        assert delete_vertex(cycle(5), 0) == path(4)

    def test_delete_matches_induced(self):
        for seed in range(10):
            G = random_graph(8, 0.4, seed)
            v = seed % 8
            sub, _ = induced_subgraph(G, G.full_mask & ~(1 << v))
            assert delete_vertex(G, v) == sub

    def test_delete_then_readd_roundtrip(self):
        from bkcolor.graph_core import _isomorphic, _refine, bits

        for seed in range(6):
            G = random_graph(7, 0.5, seed)
            v = seed % 7
            sub, remap = induced_subgraph(G, G.full_mask & ~(1 << v))
            rebuilt = make_graph(
                7,
                list(sub.edges())
                + [(remap[w], 6) for w in bits(G.adj[v])],
            )
            ca, cb = _refine(G.adj, 7), _refine(rebuilt.adj, 7)
            assert _isomorphic(G.adj, ca, rebuilt.adj, cb, 7)


def reference_decode_graph6(line: str) -> Graph:
    # independent decoder: bit list via per-character arithmetic, then an
    # explicit column walk
    vals = [ord(ch) - 63 for ch in line.strip()]
    assert all(0 <= v <= 63 for v in vals)
    if vals[0] == 63:
        n = (vals[1] << 12) + (vals[2] << 6) + vals[3]
        data = vals[4:]
    else:
        n, data = vals[0], vals[1:]
    bitlist = []
    for v in data:
        bitlist.extend((v >> k) & 1 for k in (5, 4, 3, 2, 1, 0))
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bitlist[idx]:
                edges.append((i, j))
            idx += 1
    assert all(b == 0 for b in bitlist[idx:])
    return make_graph(n, edges)


class TestGraph6:
    def test_edgeless_five(self):
        G = parse_graph6("D??")
        assert G.n == 5 and G.edge_count() == 0
        assert reference_decode_graph6("D??") == G

    def test_k5(self):
        assert parse_graph6("D~{") == complete(5)
        assert reference_decode_graph6("D~{") == complete(5)

    def test_emit_matches_reference_decoder(self):
        for seed in range(25):
            G = random_graph(3 + seed % 10, 0.4, seed)
            assert reference_decode_graph6(emit_graph6(G)) == G

    def test_roundtrip_exhaustive_small(self):
        for n in range(1, 7):
            for G in enumerate_graphs(n):
                assert parse_graph6(emit_graph6(G)) == G

    def test_roundtrip_text(self):
        for seed in range(20):
            G = random_graph(9, 0.5, seed)
            line = emit_graph6(G)
            assert emit_graph6(parse_graph6(line)) == line

    def test_header_stripped(self):
        assert parse_graph6(">>graph6<<D~{") == complete(5)

    def test_multibyte_sizes(self):
        for n in (63, 100):
            G = random_graph(n, 0.1, n)
            line = emit_graph6(G)
            assert line.startswith("~")
            assert parse_graph6(line) == G

    def test_empty_graph(self):
        assert parse_graph6("?").n == 0
        assert emit_graph6(Graph(0, ())) == "?"

    @pytest.mark.parametrize(
        "bad",
        [
            "D?",  # body too short for n=5
            "D????",  # body too long
            "D~{ }",  # space is outside the printable range
            "",  # empty
            "~",  # truncated size prefix
        ],
    )
    def test_malformed_rejected(self, bad):
        with pytest.raises(GraphFormatError):
            parse_graph6(bad)

    def test_nonzero_padding_rejected(self):
        # n=3 needs 3 bits; a sixth low bit set is padding garbage
        with pytest.raises(GraphFormatError):
            parse_graph6("B" + chr(63 + 1))


class TestEdgeList:
    def test_basic(self):
        G = parse_edge_list("5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n")
        assert G == cycle(5)

    def test_count_mismatch(self):
        with pytest.raises(GraphFormatError):
            parse_edge_list("5 2\n0 1\n")

    def test_bad_endpoint(self):
        with pytest.raises(GraphFormatError):
            parse_edge_list("3 1\n0 7\n")


def independent_class_count(n: int) -> int:
    # brute-force canonicalization: minimum edge-set tuple over all vertex
    # permutations, over every labeled graph
    pairs = list(combinations(range(n), 2))
    seen = set()
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        best = None
        for perm in permutations(range(n)):
            relab = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
            if best is None or relab < best:
                best = relab
        seen.add(best)
    return len(seen)


class TestEnumeration:
    def test_counts_match_known_sequence(self):
        expected = [1, 2, 4, 11, 34, 156, 1044]
        got = [len(list(enumerate_graphs(n))) for n in range(1, 8)]
        assert got == expected

    def test_counts_match_independent_bruteforce(self):
        for n in range(1, 6):
            assert len(list(enumerate_graphs(n))) == independent_class_count(n)

    def test_representatives_pairwise_distinct_canonical(self):
        for n in (4, 5):
            forms = [canonical_bits(G) for G in enumerate_graphs(n)]
            assert len(set(forms)) == len(forms)

    def test_labeled_count_identity(self):
        # sum over classes of n!/|Aut| must equal 2^C(n,2): an exact
        # completeness certificate for the enumeration
        import math

        for n in range(1, 7):
            total = 0
            for G in enumerate_graphs(n):
                auts = sum(
                    1
                    for perm in permutations(range(n))
                    if all(
                        G.adjacent(perm[a], perm[b]) == G.adjacent(a, b)
                        for a in range(n)
                        for b in range(a + 1, n)
                    )
                )
                total += math.factorial(n) // auts
            assert total == 1 << (n * (n - 1) // 2), n

    def test_deterministic_order(self):
        a = [emit_graph6(G) for G in enumerate_graphs(5)]
        b = [emit_graph6(G) for G in enumerate_graphs(5)]
        assert a == b

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            list(enumerate_graphs(9))
        with pytest.raises(ValueError):
            list(enumerate_graphs(0))


class TestCanonicalBits:
    def test_invariant_under_relabeling(self):
        rng = random.Random(7)
        for seed in range(10):
            G = random_graph(6, 0.5, seed)
            perm = list(range(6))
            rng.shuffle(perm)
            H = make_graph(6, [(perm[a], perm[b]) for a, b in G.edges()])
            assert canonical_bits(G) == canonical_bits(H)

    def test_cap(self):
        with pytest.raises(ValueError):
            canonical_bits(Graph(9, (0,) * 9))


class TestRandomClassGraph:
    @pytest.mark.parametrize("cls", [ClassId.H_FREE, ClassId.R_FREE])
    def test_output_is_in_class(self, cls):
        finder = find_H_witness if cls is ClassId.H_FREE else find_R_witness
        for seed in range(40):
            G = random_class_graph(12, cls, seed)
            assert finder(G) is None

    def test_deterministic(self):
        a = random_class_graph(14, ClassId.H_FREE, 123, density=0.4)
        b = random_class_graph(14, ClassId.H_FREE, 123, density=0.4)
        assert a == b

    def test_seed_changes_output(self):
        outs = {random_class_graph(12, ClassId.R_FREE, s) for s in range(8)}
        assert len(outs) > 1

    def test_n_validation(self):
        with pytest.raises(ValueError):
            random_class_graph(0, ClassId.H_FREE, 1)
