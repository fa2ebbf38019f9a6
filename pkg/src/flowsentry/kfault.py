"""Min-cut sensitivity under up to k edge failures.

The oracle enumerates every minimal (s,t)-cut of size at most L = lam+k,
then augments the graph once per cut so that the cut becomes minimum in
the augmented graph, and keeps a min-cut structure for each. A query
for a failure set F takes the minimum of lam_E - |F0| over subsets
F0 of F and entries whose structure confirms the drop; that reproduces
min(lam, min over minimal cuts Z of |Z minus F|), which is the max-flow
of G - F.

Everything here works on the raw input network: minimal cuts of size up
to lam+k may use edges that walk-pruning or calibration would remove,
so neither is applied.
"""

import itertools
from dataclasses import dataclass

from .errors import QueryError
from .flows import ResidualGraph, max_flow
from .graph import DirectedMultigraph, FlowNetwork, reachable_set, reaches
from .mincut import (
    CutPartition,
    MinCutOracleStruct,
    build_mincut_oracle_raw,
    crossing_edges,
    decreases_by_k,
    report_nmc_after,
)

ENUMERATION_VERTEX_CAP = 22


def enumerate_minimal_cuts(net: FlowNetwork, limit: int):
    """All minimal (s,t)-cuts of size <= limit, with canonical partitions.

    A crossing set Z is minimal when every member lies on an (s,t)-path
    of G - (Z minus that member); the canonical partition puts exactly
    the vertices reachable from s in G - Z on the source side. Returns
    (Z, (A, B)) pairs, deduplicated by Z, in ascending bitmask order of
    the generating source side.
    """
    n = net.n
    if n > ENUMERATION_VERTEX_CAP:
        raise ValueError(
            f"minimal-cut enumeration visits all vertex subsets; n={n} "
            f"exceeds {ENUMERATION_VERTEX_CAP}. Use the sampled "
            "verification profiles for graphs this size."
        )
    out = []
    seen: set[frozenset[int]] = set()
    for mask in range(1 << n):
        if not (mask >> net.s) & 1 or (mask >> net.t) & 1:
            continue
        z = frozenset(
            eid
            for eid, (u, v) in net.edges.items()
            if (mask >> u) & 1 and not (mask >> v) & 1
        )
        if len(z) > limit or z in seen:
            continue
        if not all(_on_st_path(net, z, eid) for eid in z):
            continue
        seen.add(z)
        rest = net.graph.without_edges(z)
        a = frozenset(reachable_set(rest, net.s))
        b = frozenset(range(n)) - a
        assert net.t in b, "a cut that does not cut"
        out.append((z, CutPartition(source_side=a, sink_side=b)))
    return out


def _on_st_path(net: FlowNetwork, z, eid) -> bool:
    """Is eid on some (s,t)-path once the rest of z is removed?"""
    g = net.graph.without_edges(z - {eid})
    u, v = net.edges[eid]
    return reaches(g, net.s, u) and reaches(g, v, net.t)


@dataclass(frozen=True)
class AugmentedEntry:
    """One minimal cut Z, frozen as a min-cut of an augmented graph.

    added maps the new EdgeIds (absent from the base graph) to their
    endpoints: limit+1 parallel edges s->a for every other source-side
    vertex a, and b->t for every other sink-side vertex b, which makes
    any (s,t)-cut avoiding Z cost more than limit. lam_e is |Z|, the
    min-cut value of the augmented graph.
    """

    z: frozenset[int]
    partition: CutPartition
    added: dict[int, tuple[int, int]]
    lam_e: int
    oracle: MinCutOracleStruct


def _augment(net: FlowNetwork, part: CutPartition, copies: int) -> tuple[
        FlowNetwork, dict[int, tuple[int, int]]]:
    edges = dict(net.edges)
    next_id = max(edges, default=-1) + 1
    added = {}
    pairs = [(net.s, a) for a in sorted(part.source_side) if a != net.s]
    pairs += [(b, net.t) for b in sorted(part.sink_side) if b != net.t]
    for u, v in pairs:
        for _ in range(copies):
            edges[next_id] = (u, v)
            added[next_id] = (u, v)
            next_id += 1
    g = DirectedMultigraph(net.n, edges)
    return FlowNetwork(g, net.s, net.t), added


@dataclass(frozen=True)
class KFaultOracle:
    net: FlowNetwork
    k: int
    lam: int
    limit: int  # lam + k
    entries: tuple[AugmentedEntry, ...]


def build_kfault_oracle(net: FlowNetwork, k: int) -> KFaultOracle:
    if k < 1:
        raise ValueError("k must be at least 1")
    lam = max_flow(net).value
    limit = lam + k
    entries = []
    seen_partitions = set()
    for z, part in enumerate_minimal_cuts(net, limit):
        if part.source_side in seen_partitions:
            continue
        seen_partitions.add(part.source_side)
        aug, added = _augment(net, part, limit + 1)
        lam_e = max_flow(aug).value
        assert lam_e == len(z), \
            f"augmentation broke the cut value: {lam_e} != {len(z)}"
        assert frozenset(crossing_edges(aug, part.source_side)) == z, \
            "augmented edges cross the originating partition"
        if lam_e == 0:
            # the empty cut of a disconnected instance needs no oracle
            entries.append(AugmentedEntry(z, part, added, 0, None))
            continue
        oracle = build_mincut_oracle_raw(aug)
        entries.append(AugmentedEntry(z, part, added, lam_e, oracle))
    return KFaultOracle(net=net, k=k, lam=lam, limit=limit,
                        entries=tuple(entries))


def _check_failures(o: KFaultOracle, failures) -> tuple[int, ...]:
    f = tuple(failures)
    if len(f) > o.k:
        raise QueryError(f"{len(f)} failures exceed the oracle's k={o.k}")
    if len(set(f)) != len(f):
        raise QueryError("failure set has repeated edges")
    for eid in f:
        if eid not in o.net.edges:
            raise QueryError(f"unknown edge {eid}")
    return f


def _improvements(o: KFaultOracle, f: tuple[int, ...]):
    """(value, subset, entry) for every subset of f an entry certifies.

    A subset F0 counts when the entry's structure confirms the min-cut
    of its augmented graph drops by exactly |F0| under F0, giving the
    candidate value lam_e - |F0|. Iteration order is deterministic and
    checks larger subsets first, so when several candidates tie at the
    final value the partition query reports the cut certified by the
    deepest drop; within a size, subsets go lexicographically and
    entries in construction order.
    """
    subsets = []
    for size in range(len(f), 0, -1):
        for combo in itertools.combinations(sorted(f), size):
            subsets.append(combo)
    for combo in subsets:
        for entry in o.entries:
            if entry.oracle is None:
                continue
            if decreases_by_k(entry.oracle, combo, len(combo)):
                yield entry.lam_e - len(combo), combo, entry


def mincut_size_k(o: KFaultOracle, failures) -> int:
    """Max-flow (= min-cut) value of the network minus the failures."""
    f = _check_failures(o, failures)
    q = o.lam
    for value, _, _ in _improvements(o, f):
        q = min(q, value)
    return q


def mincut_partition_k(o: KFaultOracle, failures) -> CutPartition:
    """A concrete min-cut partition of the network minus the failures."""
    f = _check_failures(o, failures)
    q = mincut_size_k(o, f)
    if q == o.lam:
        # no failure subset certifies a drop: any base min-cut still works,
        # and none of its edges can be failed (that would have dropped it)
        part = _base_partition(o)
        cross = crossing_edges(o.net, part.source_side)
        assert not set(cross) & set(f), "failed edge crosses a surviving cut"
        assert len(cross) == q
        return part
    for value, combo, entry in _improvements(o, f):
        if value != q:
            continue
        part = report_nmc_after(entry.oracle, combo)
        cross = crossing_edges(o.net, part.source_side)
        survivors = [eid for eid in cross if eid not in f]
        assert len(survivors) == q, \
            f"reported partition crosses {len(survivors)} != {q}"
        return part
    raise AssertionError("minimizer disappeared between passes")


def _base_partition(o: KFaultOracle) -> CutPartition:
    f = max_flow(o.net)
    res = ResidualGraph(o.net, f)
    a = frozenset(res.reachable(o.net.s))
    assert o.net.t not in a
    return CutPartition(
        source_side=a, sink_side=frozenset(range(o.net.n)) - a
    )


def reachable_under_failures(o: KFaultOracle, failures) -> bool:
    """Does any (s,t)-path survive the failures?"""
    return mincut_size_k(o, failures) >= 1
