"""Equivalence classes, the strip graph, and the min-cut sensitivity core.

The objects here answer two questions about a unit-capacity network at
max-flow value lam: does deleting a given set of k critical edges drop the
max-flow to lam-k, and if so, what does the nearest min-cut of the damaged
graph look like. Both reduce to order queries over an acyclic quotient (the
strip graph): a set of critical edges all lies in one min-cut exactly when no
strip-graph path orders two of them (they form an anti-chain).

Everything is built against one reference max-flow and is immutable after
construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import InternalInvariantError, QueryError
from .family import BuiltFamily, CriticalityLabels, classify_edges
from .flows import IntFlow, ResidualGraph, cancel_flow_cycles, decompose_into_paths, max_flow
from .graph import FlowNetwork, scc_from_adjacency

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquivalenceClasses:
    """Vertex classes: two vertices share one iff no min-cut separates them."""

    class_of: tuple[int, ...]
    class_count: int
    source_class: int
    sink_class: int

    def members(self, cls: int) -> frozenset[int]:
        return frozenset(v for v, c in enumerate(self.class_of) if c == cls)


@dataclass(frozen=True)
class StripGraph:
    """Quotient DAG: critical edges keep direction, other inter-class edges flip.

    arcs[i] = (from_class, to_class, EdgeId). succ/pred are class adjacency
    lists over arc indices' endpoints, deduplicated.
    """

    nodes: int
    arcs: tuple[tuple[int, int, int], ...]
    succ: tuple[tuple[int, ...], ...]
    pred: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PathSystem:
    """lam edge-disjoint source-to-sink class paths plus the rank/F tables.

    path_classes[i] is the class sequence of path i (starting at the source
    class, ending at the sink class). rank[i] maps a class on path i to its
    position. first_reach[i] maps any class x to the earliest position on
    path i whose class is reachable from x in the strip graph (absent when
    none is). path_of maps each critical EdgeId to its path index;
    tail_class/head_class give the strip arc endpoints per critical EdgeId.
    """

    path_classes: tuple[tuple[int, ...], ...]
    path_edges: tuple[tuple[int, ...], ...]
    rank: tuple[dict[int, int], ...]
    first_reach: tuple[dict[int, int], ...]
    path_of: dict[int, int]
    tail_class: dict[int, int]
    head_class: dict[int, int]


@dataclass(frozen=True)
class CutPartition:
    """A vertex bipartition (source side A, sink side B)."""

    source_side: frozenset[int]
    sink_side: frozenset[int]


def crossing_edges(net: FlowNetwork, source_side) -> list[int]:
    """EdgeIds crossing the partition from the source side, ascending."""
    side = set(source_side)
    return sorted(
        eid for eid, (u, v) in net.graph.edges.items() if u in side and v not in side
    )


def build_classes(net: FlowNetwork, f: IntFlow) -> EquivalenceClasses:
    """Classes are the SCCs of the residual graph of a max-flow."""
    ids = ResidualGraph(net, f).scc_ids()
    return EquivalenceClasses(
        class_of=tuple(ids),
        class_count=max(ids) + 1 if ids else 0,
        source_class=ids[net.s],
        sink_class=ids[net.t],
    )


def build_strip_graph(
    net: FlowNetwork, classes: EquivalenceClasses, labels: CriticalityLabels, f: IntFlow
) -> StripGraph:
    """Quotient the network by classes and flip the non-critical arcs.

    Asserted on the way out: the result is acyclic and equals the reverse of
    the SCC condensation of the residual graph (the two constructions must
    describe the same DAG).
    """
    cls = classes.class_of
    arcs = []
    for eid in sorted(net.edges):
        u, v = net.graph.edges[eid]
        cu, cv = cls[u], cls[v]
        if cu == cv:
            continue
        if eid in labels.critical:
            arcs.append((cu, cv, eid))
        else:
            arcs.append((cv, cu, eid))

    nodes = classes.class_count
    succ = [set() for _ in range(nodes)]
    pred = [set() for _ in range(nodes)]
    for a, b, _ in arcs:
        succ[a].add(b)
        pred[b].add(a)

    comp = scc_from_adjacency(nodes, [sorted(s) for s in succ])
    if len(set(comp)) != nodes:
        raise InternalInvariantError("strip graph contains a cycle")

    # Cross-construction check: reversed condensation of the residual graph.
    res = ResidualGraph(net, f)
    cond = set()
    for arc in res.arcs:
        ca, cb = cls[arc.tail], cls[arc.head]
        if ca != cb:
            cond.add((cb, ca))
    if cond != {(a, b) for a, b, _ in arcs}:
        raise InternalInvariantError(
            "strip graph disagrees with the reversed residual condensation"
        )

    return StripGraph(
        nodes=nodes,
        arcs=tuple(arcs),
        succ=tuple(tuple(sorted(s)) for s in succ),
        pred=tuple(tuple(sorted(p)) for p in pred),
    )


def build_path_system(
    strip: StripGraph,
    classes: EquivalenceClasses,
    labels: CriticalityLabels,
    edge_paths,
    net: FlowNetwork,
) -> PathSystem:
    """Project the reference flow's path decomposition onto the strip graph.

    Non-critical edges on a decomposition path are saturated, hence
    intra-class, so dropping them leaves a contiguous class walk; the
    surviving critical edges of the lam paths are edge-disjoint and cover all
    critical edges. rank/F tables are filled with one reverse reachability
    sweep per path node, latest position first, so each class records the
    earliest position it reaches.
    """
    cls = classes.class_of
    path_classes: list[tuple[int, ...]] = []
    path_edges: list[tuple[int, ...]] = []
    path_of: dict[int, int] = {}
    tail_class: dict[int, int] = {}
    head_class: dict[int, int] = {}

    for i, path in enumerate(edge_paths):
        chain = [classes.source_class]
        crit = []
        for eid in path:
            if eid not in labels.critical:
                u, v = net.graph.edges[eid]
                if cls[u] != cls[v]:
                    raise InternalInvariantError(
                        f"saturated non-critical edge {eid} crosses classes"
                    )
                continue
            u, v = net.graph.edges[eid]
            if cls[u] != chain[-1]:
                raise InternalInvariantError(
                    f"path {i} jumps classes at edge {eid}"
                )
            if eid in path_of:
                raise InternalInvariantError(f"critical edge {eid} on two paths")
            path_of[eid] = i
            tail_class[eid] = cls[u]
            head_class[eid] = cls[v]
            crit.append(eid)
            chain.append(cls[v])
        if chain[-1] != classes.sink_class:
            raise InternalInvariantError(f"path {i} does not end at the sink class")
        path_classes.append(tuple(chain))
        path_edges.append(tuple(crit))

    if set(path_of) != set(labels.critical):
        raise InternalInvariantError("paths do not cover the critical edges")

    ranks: list[dict[int, int]] = []
    first: list[dict[int, int]] = []
    for chain in path_classes:
        rank = {c: pos for pos, c in enumerate(chain)}
        if len(rank) != len(chain):
            raise InternalInvariantError("path revisits a class")
        ranks.append(rank)
        reach_first: dict[int, int] = {}
        # Latest-to-earliest sweep; overwriting leaves the earliest position.
        for pos in range(len(chain) - 1, -1, -1):
            stack = [chain[pos]]
            seen = {chain[pos]}
            while stack:
                c = stack.pop()
                reach_first[c] = pos
                for p in strip.pred[c]:
                    if p not in seen:
                        seen.add(p)
                        stack.append(p)
        first.append(reach_first)

    return PathSystem(
        path_classes=tuple(path_classes),
        path_edges=tuple(path_edges),
        rank=tuple(ranks),
        first_reach=tuple(first),
        path_of=path_of,
        tail_class=tail_class,
        head_class=head_class,
    )


@dataclass(frozen=True)
class MinCutOracleStruct:
    """Bundle answering decrease-by-k and NMC queries for one network."""

    net: FlowNetwork
    lam: int
    classes: EquivalenceClasses
    strip: StripGraph
    paths: PathSystem
    labels: CriticalityLabels
    known: frozenset[int]

    def word_count(self) -> int:
        """Machine words held by the query tables (size-bound accounting)."""
        words = len(self.classes.class_of) + 3
        words += 3 * len(self.strip.arcs)
        words += sum(len(s) for s in self.strip.succ)
        words += sum(len(p) for p in self.strip.pred)
        words += sum(len(c) for c in self.paths.path_classes)
        words += sum(len(e) for e in self.paths.path_edges)
        words += sum(2 * len(r) for r in self.paths.rank)
        words += sum(2 * len(f) for f in self.paths.first_reach)
        words += 2 * len(self.paths.path_of)
        words += 2 * len(self.paths.tail_class) + 2 * len(self.paths.head_class)
        words += 2 * len(self.labels.nu) + len(self.labels.critical)
        return words


def precedes(ps: PathSystem, e_a: int, e_b: int) -> bool:
    """True iff some source-to-sink strip path uses e_a strictly before e_b.

    Constant-time: with P the path carrying e_b, e_a precedes e_b exactly when
    the head class of e_a reaches some class on P no later than e_b's tail.
    """
    if e_a not in ps.path_of or e_b not in ps.path_of:
        raise QueryError(f"precedes needs critical edges, got {e_a}, {e_b}")
    p = ps.path_of[e_b]
    pos = ps.first_reach[p].get(ps.head_class[e_a])
    if pos is None:
        return False
    return pos <= ps.rank[p][ps.tail_class[e_b]]


def decreases_by_k(o: MinCutOracleStruct, F, k: int | None = None) -> bool:
    """True iff deleting F drops the max-flow by exactly |F|.

    Holds exactly when every edge of F is critical and no two are ordered by
    a strip path (they form an anti-chain, i.e. lie in one min-cut together).
    Edges absent from the oracle's network are never critical, so any such
    edge makes the answer false.
    """
    edges = list(F)
    if k is not None and len(edges) != k:
        raise QueryError(f"expected {k} edges, got {len(edges)}")
    if len(set(edges)) != len(edges):
        raise QueryError("duplicate EdgeId in failure set")
    if not edges:
        raise QueryError("empty failure set")
    for e in edges:
        if e not in o.known:
            raise QueryError(f"unknown EdgeId {e}")
        if e not in o.labels.critical:
            return False
    for i, a in enumerate(edges):
        for b in edges[i + 1 :]:
            if precedes(o.paths, a, b) or precedes(o.paths, b, a):
                return False
    return True


def report_nmc_after(o: MinCutOracleStruct, F) -> CutPartition:
    """Source side of the nearest min-cut of the graph minus F.

    Requires decreases_by_k(o, F); a vertex lands on the source side exactly
    when its class reaches the tail class of some failed edge in the strip
    graph (checked through the first-reach table, one lookup per failed edge).
    """
    edges = list(F)
    if not decreases_by_k(o, edges):
        raise QueryError("report_nmc_after needs a decrease-by-k failure set")
    targets = []
    for e in edges:
        tc = o.paths.tail_class[e]
        if tc == o.classes.sink_class:
            log.info("failed edge %d has its tail in the sink class; rejecting", e)
            raise QueryError(f"edge {e} starts in the sink class")
        targets.append((o.paths.path_of[e], o.paths.rank[o.paths.path_of[e]][tc]))
    side = []
    for v, c in enumerate(o.classes.class_of):
        for p, limit in targets:
            pos = o.paths.first_reach[p].get(c)
            if pos is not None and pos <= limit:
                side.append(v)
                break
    a = frozenset(side)
    return CutPartition(
        source_side=a, sink_side=frozenset(range(o.net.n)) - a
    )


def build_mincut_oracle(bf: BuiltFamily, known=None) -> MinCutOracleStruct:
    """O_MINCUT over the calibrated subgraph of a built family."""
    net = bf.sub.network
    f = bf.family.f_tilde
    classes = build_classes(net, f)
    strip = build_strip_graph(net, classes, bf.labels, f)
    paths = build_path_system(strip, classes, bf.labels, bf.family.paths, net)
    return MinCutOracleStruct(
        net=net,
        lam=bf.sub.lam,
        classes=classes,
        strip=strip,
        paths=paths,
        labels=bf.labels,
        known=frozenset(known) if known is not None else frozenset(net.edges),
    )


def build_mincut_oracle_raw(net: FlowNetwork) -> MinCutOracleStruct:
    """O_MINCUT for a network taken as-is (no calibration).

    Used for the augmented graphs of the k-failure oracle, where every edge
    must stay in play. The reference flow is cycle-canceled so its path
    decomposition exists.
    """
    labels = classify_edges(net)
    if labels.lam < 1:
        raise ValueError("mincut oracle needs lam >= 1")
    f = cancel_flow_cycles(net, max_flow(net))
    edge_paths = decompose_into_paths(net, f)
    classes = build_classes(net, f)
    strip = build_strip_graph(net, classes, labels, f)
    paths = build_path_system(strip, classes, labels, edge_paths, net)
    return MinCutOracleStruct(
        net=net,
        lam=labels.lam,
        classes=classes,
        strip=strip,
        paths=paths,
        labels=labels,
        known=frozenset(net.edges),
    )
