import itertools
import random

import pytest

from flowsentry.errors import QueryError
from flowsentry.graph import DirectedMultigraph, FlowNetwork, reaches
from flowsentry.kfault import (
    build_kfault_oracle,
    enumerate_minimal_cuts,
    mincut_partition_k,
    mincut_size_k,
    reachable_under_failures,
)

from conftest import brute_max_flow_value, make_net, random_net


def brute_after(net, failures):
    return brute_max_flow_value(net.without_edges(failures))


def brute_minimal_cuts(net, limit):
    """Reference: all inclusion-minimal cutting subsets of size <= limit,
    found by scanning every edge subset directly."""
    eids = sorted(net.edges)
    found = set()
    for size in range(0, limit + 1):
        for combo in itertools.combinations(eids, size):
            z = frozenset(combo)
            rest = net.graph.without_edges(z)
            if reaches(rest, net.s, net.t):
                continue
            minimal = all(
                reaches(net.graph.without_edges(z - {e}), net.s, net.t)
                for e in z
            )
            if minimal:
                found.add(z)
    return found


class TestEnumeration:
    def test_bottleneck(self, bottleneck):
        cuts = {z for z, _ in enumerate_minimal_cuts(bottleneck, 3)}
        assert cuts == {frozenset({0, 1}), frozenset({2, 3, 4})}

    def test_diamond(self, diamond):
        cuts = {z for z, _ in enumerate_minimal_cuts(diamond, 3)}
        assert cuts == {
            frozenset({0, 3}),
            frozenset({0, 2}),
            frozenset({1, 3}),
            frozenset({1, 2}),
        }

    def test_chain(self, chain):
        cuts = {z for z, _ in enumerate_minimal_cuts(chain, 2)}
        assert cuts == {frozenset({0}), frozenset({1})}

    def test_partition_is_reachability_canonical(self, diamond):
        for z, part in enumerate_minimal_cuts(diamond, 3):
            rest = diamond.graph.without_edges(z)
            for v in range(diamond.n):
                assert (v in part.source_side) == reaches(rest, diamond.s, v)

    def test_too_large_refused(self):
        g = DirectedMultigraph(23, {0: (0, 22)})
        with pytest.raises(ValueError):
            enumerate_minimal_cuts(FlowNetwork(g, 0, 22), 2)

    def test_matches_subset_scan(self):
        rng = random.Random(9001)
        for _ in range(25):
            net = random_net(rng, n_max=7, m_max=12)
            limit = brute_max_flow_value(net) + 2
            got = {z for z, _ in enumerate_minimal_cuts(net, limit)}
            assert got == brute_minimal_cuts(net, limit)


class TestBuild:
    def test_bottleneck_entries(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 1)
        assert o.lam == 2 and o.limit == 3
        assert sorted(e.lam_e for e in o.entries) == [2, 3]
        for e in o.entries:
            assert len(e.z) == e.lam_e

    def test_diamond_entries(self, diamond):
        o = build_kfault_oracle(diamond, 1)
        assert [e.lam_e for e in o.entries] == [2, 2, 2, 2]
        assert len({e.partition.source_side for e in o.entries}) == 4

    def test_added_edges_multiplicity(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 1)
        for entry in o.entries:
            pairs = {}
            for uv in entry.added.values():
                pairs[uv] = pairs.get(uv, 0) + 1
            assert all(c == o.limit + 1 for c in pairs.values())

    def test_bad_k_rejected(self, diamond):
        with pytest.raises(ValueError):
            build_kfault_oracle(diamond, 0)


class TestSizeQueries:
    def test_bottleneck_triple(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 3)
        assert mincut_size_k(o, [0, 2, 3]) == 1
        assert mincut_size_k(o, []) == 2
        assert mincut_size_k(o, [2, 3, 4]) == 0
        assert mincut_size_k(o, [0]) == 1

    def test_query_validation(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 2)
        with pytest.raises(QueryError):
            mincut_size_k(o, [0, 1, 2])
        with pytest.raises(QueryError):
            mincut_size_k(o, [0, 0])
        with pytest.raises(QueryError):
            mincut_size_k(o, [99])

    def test_exhaustive_matches_brute(self):
        rng = random.Random(9002)
        checked = 0
        for _ in range(12):
            net = random_net(rng, n_max=7, m_max=12)
            o = build_kfault_oracle(net, 3)
            eids = sorted(net.edges)
            for size in range(0, 4):
                for combo in itertools.combinations(eids, size):
                    want = brute_after(net, combo)
                    assert mincut_size_k(o, combo) == want, combo
                    checked += 1
        assert checked > 800

    def test_lemma_formula_identity(self):
        # the query must reproduce min(lam, min over minimal cuts of
        # |Z - F|) computed straight from the enumeration
        rng = random.Random(9003)
        for _ in range(8):
            net = random_net(rng, n_max=7, m_max=12)
            o = build_kfault_oracle(net, 3)
            cuts = [z for z, _ in enumerate_minimal_cuts(net, o.limit)]
            eids = sorted(net.edges)
            for combo in itertools.combinations(eids, 3):
                fs = set(combo)
                want = min(
                    [o.lam] + [len(z - fs) for z in cuts]
                )
                assert mincut_size_k(o, combo) == want, combo

    def test_monotone_in_failure_set(self):
        rng = random.Random(9004)
        for _ in range(10):
            net = random_net(rng, n_max=7, m_max=12)
            o = build_kfault_oracle(net, 3)
            eids = sorted(net.edges)
            for combo in itertools.combinations(eids, 3):
                v3 = mincut_size_k(o, combo)
                for sub in itertools.combinations(combo, 2):
                    assert v3 <= mincut_size_k(o, sub)


class TestPartitionQueries:
    def test_bottleneck_reports_the_deep_cut(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 3)
        part = mincut_partition_k(o, [0, 2, 3])
        assert part.source_side == frozenset({0, 1})
        from flowsentry.mincut import crossing_edges

        cross = [e for e in crossing_edges(bottleneck, part.source_side)
                 if e not in {0, 2, 3}]
        assert cross == [4]

    def test_diamond_single_failure(self, diamond):
        o = build_kfault_oracle(diamond, 1)
        part = mincut_partition_k(o, [0])
        assert part.source_side == frozenset({0})

    def test_empty_failure_set(self, bottleneck):
        o = build_kfault_oracle(bottleneck, 2)
        part = mincut_partition_k(o, [])
        from flowsentry.mincut import crossing_edges

        assert len(crossing_edges(bottleneck, part.source_side)) == 2

    def test_partitions_always_valid(self):
        rng = random.Random(9005)
        checked = 0
        for _ in range(10):
            net = random_net(rng, n_max=7, m_max=12)
            o = build_kfault_oracle(net, 3)
            eids = sorted(net.edges)
            for size in range(0, 4):
                for combo in itertools.combinations(eids, size):
                    q = mincut_size_k(o, combo)
                    part = mincut_partition_k(o, combo)
                    assert net.s in part.source_side
                    assert net.t in part.sink_side
                    live = [
                        eid
                        for eid, (u, v) in net.edges.items()
                        if eid not in combo
                        and u in part.source_side
                        and v not in part.source_side
                    ]
                    assert len(live) == q, (combo, q)
                    checked += 1
        assert checked > 700


class TestReachability:
    def test_diamond(self, diamond):
        o = build_kfault_oracle(diamond, 2)
        assert reachable_under_failures(o, [0, 2]) is False
        assert reachable_under_failures(o, [0, 3]) is False
        assert reachable_under_failures(o, [0, 1]) is True
        assert reachable_under_failures(o, []) is True

    def test_disconnected_instance(self):
        net = make_net(3, [(1, 0), (2, 1)])
        o = build_kfault_oracle(net, 2)
        assert o.lam == 0
        assert mincut_size_k(o, [0]) == 0
        assert reachable_under_failures(o, []) is False
        part = mincut_partition_k(o, [0, 1])
        assert net.s in part.source_side and net.t in part.sink_side
