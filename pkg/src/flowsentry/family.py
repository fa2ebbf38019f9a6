"""Edge criticality, the calibrated subgraph, and the fault-tolerant flow families.

Everything in this module operates on a network that has already been pruned to
its s-t walks (see graph.prune_to_st_paths). The pipeline is:

    labels0 = classify_edges(net)           # nu per edge + critical set
    sub     = calibrate(net, labels0)       # drop edges useless for <=1 failure
    labels  = classify_edges(sub.network)   # final labels on the subgraph
    caps, f_H = build_auxiliary(sub, labels)
    A       = peel_family_A(sub, f_H)
    family  = extend_family_B(A, sub, labels)

or just build_flow_family(net), which runs the lot and cross-checks the
invariants that make the later oracle answers trustworthy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InternalInvariantError
from .flows import (
    CirculationInstance,
    IntFlow,
    UnitFlow,
    ResidualGraph,
    cancel_flow_cycles,
    decompose_into_paths,
    max_flow,
    solve_circulation,
)
from .graph import DirectedMultigraph, FlowNetwork

# Sentinel nu for edges that cross no s-t partition (tail == t, head == s, or a
# self-loop). Large enough to exceed any lam+1 at the scales this library
# accepts, small enough to stay an ordinary int.
NU_UNBOUNDED = 1 << 60

CRITICAL = "critical"
NON_CRITICAL = "non-critical"


@dataclass(frozen=True)
class CriticalityLabels:
    """Per-edge merge-flow values and the derived critical set."""

    nu: dict[int, int]
    critical: frozenset[int]
    lam: int

    def label(self, eid: int) -> str:
        return CRITICAL if eid in self.critical else NON_CRITICAL

    def is_critical(self, eid: int) -> bool:
        return eid in self.critical


@dataclass(frozen=True)
class CalibratedSubgraph:
    """The kept/pruned split produced by calibrate, plus the live subnetwork."""

    kept: frozenset[int]
    pruned: frozenset[int]
    lam: int
    network: FlowNetwork


def merged_network(net: FlowNetwork, eid: int) -> FlowNetwork | None:
    """Network with eid's tail merged into s and its head merged into t.

    Every edge incident to the tail is re-pointed at s, every edge incident to
    the head at t (eid itself becomes an s->t edge). Self-loops created by the
    merge are dropped. Returns None when the merge is degenerate (tail == t,
    head == s, or a self-loop): such an edge crosses no s-t partition, so its
    merge-flow value is unbounded.
    """
    u, v = net.graph.edges[eid]
    if u == v or u == net.t or v == net.s:
        return None
    g = DirectedMultigraph(net.n)
    for j, (a, b) in net.graph.edges.items():
        a2 = net.s if a == u else (net.t if a == v else a)
        b2 = net.s if b == u else (net.t if b == v else b)
        if a2 == b2:
            continue
        g.add_edge(a2, b2, eid=j)
    return FlowNetwork(g, net.s, net.t)


def merge_flow_value(net: FlowNetwork, eid: int, value_limit: int | None = None) -> int:
    """nu(e): the min cut size among cuts forced to separate e's endpoints.

    Computed as a max-flow on the merged network. value_limit caps the search
    (callers that only need a threshold test pass lam+2).
    """
    merged = merged_network(net, eid)
    if merged is None:
        return NU_UNBOUNDED
    return max_flow(merged, value_limit=value_limit).value


def classify_edges(net: FlowNetwork) -> CriticalityLabels:
    """Compute nu for every edge and split edges into critical/non-critical.

    Two independent tests are run and must agree: nu(e) == lam, and the
    residual test (saturated under a reference max-flow with endpoints in
    distinct residual SCCs). Disagreement means a solver bug, not bad input.
    """
    f_ref = max_flow(net)
    lam = f_ref.value
    nu: dict[int, int] = {}
    critical = set()
    scc = ResidualGraph(net, f_ref).scc_ids() if lam > 0 else None
    for eid in sorted(net.edges):
        nu[eid] = merge_flow_value(net, eid)
        by_nu = lam > 0 and nu[eid] == lam
        if scc is None:
            by_residual = False
        else:
            u, v = net.graph.edges[eid]
            by_residual = f_ref.values[eid] == 1 and scc[u] != scc[v]
        if by_nu != by_residual:
            raise InternalInvariantError(
                f"criticality tests disagree on edge {eid}: "
                f"nu={nu[eid]} lam={lam} residual={by_residual}"
            )
        if by_nu:
            critical.add(eid)
    return CriticalityLabels(nu=nu, critical=frozenset(critical), lam=lam)


def calibrate(net: FlowNetwork, labels: CriticalityLabels) -> CalibratedSubgraph:
    """Delete every edge whose nu exceeds lam+1, evaluated in the shrinking subgraph.

    Edges are visited in ascending EdgeId order and deleted immediately. One
    pass reaches the fixpoint: nu is monotone non-increasing under deletion,
    so an edge kept at visit time (nu <= lam+1) can never become deletable
    later. build_flow_family re-classifies the survivors and asserts the
    fixpoint property as a certificate.
    """
    lam = labels.lam
    current = net
    removed: list[int] = []
    for eid in sorted(net.edges):
        # nu can only shrink as edges go away, so anything already in range
        # stays in range; only the out-of-range edges need a recheck.
        if labels.nu[eid] <= lam + 1:
            continue
        nu_cur = merge_flow_value(current, eid, value_limit=lam + 2)
        if nu_cur > lam + 1:
            current = current.without_edges([eid])
            removed.append(eid)
    kept = frozenset(current.edges)
    sub = CalibratedSubgraph(
        kept=kept, pruned=frozenset(removed), lam=lam, network=current
    )
    bound = lam * net.n + 2 * net.n * (lam + 1)
    if len(kept) > bound:
        raise InternalInvariantError(
            f"calibrated subgraph has {len(kept)} edges, bound is {bound}"
        )
    return sub


def build_auxiliary(
    sub: CalibratedSubgraph, labels: CriticalityLabels
) -> tuple[dict[int, int], IntFlow]:
    """Capacitated auxiliary network H on the calibrated subgraph.

    Capacities: lam+1 on critical edges, lam on the rest. Returns the capacity
    map and a max-flow of H whose value must be lam*(lam+1). The flow is
    cycle-canceled before it is returned so that its support is acyclic; the
    peel below inherits that, which is what makes f-tilde decomposable into
    paths. Canceling changes neither value nor feasibility, so the stored f_H
    is still a max-flow of H and the peel identity sum(f_i) == f_H is checked
    against exactly this object.
    """
    lam = sub.lam
    if lam < 1:
        raise ValueError("auxiliary network needs lam >= 1")
    caps = {
        eid: lam + 1 if eid in labels.critical else lam for eid in sub.network.edges
    }
    f_h = max_flow(sub.network, capacities=caps)
    want = lam * (lam + 1)
    if f_h.value != want:
        raise InternalInvariantError(
            f"auxiliary max-flow is {f_h.value}, expected lam*(lam+1) = {want}"
        )
    return caps, cancel_flow_cycles(sub.network, f_h)


def peel_family_A(sub: CalibratedSubgraph, f_h: IntFlow) -> list[UnitFlow]:
    """Peel lam+1 unit max-flows out of f_H, returned as [f_1, ..., f_{lam+1}].

    Round i (from lam+1 down to 1) solves a circulation on the subgraph with
    demands d(s) = -lam, d(t) = +lam, upper bounds min(1, h_i(e)) and lower
    bound 1 exactly where h_i(e) == i. Feasibility is guaranteed (h_i/i is a
    fractional solution and the polytope is integral); infeasibility therefore
    raises. The invariant 0 <= h_i(e) <= i is asserted every round.
    """
    net = sub.network
    lam = sub.lam
    h = dict(f_h.values)
    peeled: list[UnitFlow] = []
    for i in range(lam + 1, 0, -1):
        for eid, val in h.items():
            if not 0 <= val <= i:
                raise InternalInvariantError(
                    f"peel round {i}: h({eid}) = {val} out of [0, {i}]"
                )
        demand = {v: 0 for v in range(net.n)}
        demand[net.s] = -lam
        demand[net.t] = lam
        lower = {eid: 1 if h[eid] == i else 0 for eid in net.edges}
        upper = {eid: min(1, h[eid]) for eid in net.edges}
        g = solve_circulation(CirculationInstance(net.graph, demand, lower, upper))
        if g is None:
            raise InternalInvariantError(f"peel round {i}: circulation infeasible")
        f_i = UnitFlow(net, g)
        if f_i.value != lam:
            raise InternalInvariantError(
                f"peel round {i}: flow value {f_i.value} != lam = {lam}"
            )
        for eid in net.edges:
            if h[eid] == 0 and g[eid] != 0:
                raise InternalInvariantError(f"peel round {i}: flow on spent edge {eid}")
            if h[eid] == i and g[eid] != 1:
                raise InternalInvariantError(f"peel round {i}: forced edge {eid} idle")
        peeled.append(f_i)
        for eid in h:
            h[eid] -= g[eid]
    if any(h.values()):
        raise InternalInvariantError("peel left residue; sum(f_i) != f_H")
    peeled.reverse()
    return peeled


# canonical_for_edge labels: ("A", i) names A[i], ("B", i) names B_extra[i].
FlowKey = tuple[str, int]


@dataclass(frozen=True)
class FlowFamily:
    """The families A and B plus the lookup tables the oracles query.

    A[0] is the representative flow f-tilde. B_extra[i] is f-tilde with the
    edges of paths[i] zeroed (value lam-1). nullsets/nullmin1 map FlowKeys to
    frozen EdgeId sets; canonical maps each kept EdgeId to the FlowKey of a
    max-flow of the calibrated subgraph minus that edge.
    """

    A: tuple[UnitFlow, ...]
    B_extra: tuple[UnitFlow, ...]
    paths: tuple[tuple[int, ...], ...]
    representative: int
    nullsets: dict[FlowKey, frozenset[int]]
    nullmin1: dict[FlowKey, frozenset[int]]
    canonical: dict[int, FlowKey]

    @property
    def f_tilde(self) -> UnitFlow:
        return self.A[self.representative]

    def flow(self, key: FlowKey) -> UnitFlow:
        kind, idx = key
        return self.A[idx] if kind == "A" else self.B_extra[idx]

    def canonical_flow(self, eid: int) -> UnitFlow:
        return self.flow(self.canonical[eid])

    def all_flows(self):
        """(key, flow) pairs over the whole of B = A + B_extra."""
        for i, f in enumerate(self.A):
            yield ("A", i), f
        for i, g in enumerate(self.B_extra):
            yield ("B", i), g


def null_sets(
    flows, sub: CalibratedSubgraph, labels: CriticalityLabels
) -> tuple[dict[FlowKey, frozenset[int]], dict[FlowKey, frozenset[int]]]:
    """null(f) and null(f, min+1) per flow, with the size bounds enforced.

    null(f) is the set of kept edges with zero flow; the min+1 variant keeps
    those whose nu equals lam+1 (membership in a minimal (lam+1)-cut). Bounds:
    3n for any member of B, 2n for the min+1 sets of members of A.
    """
    n = sub.network.n
    lam = sub.lam
    nulls: dict[FlowKey, frozenset[int]] = {}
    min1: dict[FlowKey, frozenset[int]] = {}
    for key, f in flows:
        zero = frozenset(eid for eid in sub.kept if f.values[eid] == 0)
        if len(zero) > 3 * n:
            raise InternalInvariantError(
                f"null set of {key} has {len(zero)} edges, bound is {3 * n}"
            )
        restricted = frozenset(e for e in zero if labels.nu[e] == lam + 1)
        if key[0] == "A" and len(restricted) > 2 * n:
            raise InternalInvariantError(
                f"null(f,min+1) of {key} has {len(restricted)} edges, bound {2 * n}"
            )
        nulls[key] = zero
        min1[key] = restricted
    return nulls, min1


def extend_family_B(
    A: list[UnitFlow], sub: CalibratedSubgraph, labels: CriticalityLabels
) -> FlowFamily:
    """Add the path-canceled flows g_i and build the per-edge canonical table."""
    net = sub.network
    lam = sub.lam
    f_tilde = A[0]
    paths = decompose_into_paths(net, f_tilde)
    if len(paths) != lam:
        raise InternalInvariantError(
            f"f-tilde decomposed into {len(paths)} paths, expected {lam}"
        )
    b_extra: list[UnitFlow] = []
    for path in paths:
        values = dict(f_tilde.values)
        for eid in path:
            values[eid] = 0
        b_extra.append(UnitFlow(net, values))

    on_path: dict[int, int] = {}
    for i, path in enumerate(paths):
        for eid in path:
            if eid in on_path:
                raise InternalInvariantError(f"edge {eid} on two decomposition paths")
            on_path[eid] = i

    canonical: dict[int, FlowKey] = {}
    for eid in sorted(sub.kept):
        if eid in labels.critical:
            if eid not in on_path:
                raise InternalInvariantError(
                    f"critical edge {eid} missing from the path decomposition"
                )
            canonical[eid] = ("B", on_path[eid])
        else:
            idx = next((i for i, f in enumerate(A) if f.values[eid] == 0), None)
            if idx is None:
                raise InternalInvariantError(
                    f"non-critical edge {eid} saturated in every member of A"
                )
            canonical[eid] = ("A", idx)

    family_flows = [(("A", i), f) for i, f in enumerate(A)]
    family_flows += [(("B", i), g) for i, g in enumerate(b_extra)]
    nulls, min1 = null_sets(family_flows, sub, labels)
    return FlowFamily(
        A=tuple(A),
        B_extra=tuple(b_extra),
        paths=tuple(tuple(p) for p in paths),
        representative=0,
        nullsets=nulls,
        nullmin1=min1,
        canonical=canonical,
    )


@dataclass(frozen=True)
class BuiltFamily:
    """Everything downstream oracle construction needs, in one bundle."""

    sub: CalibratedSubgraph
    labels: CriticalityLabels
    caps: dict[int, int]
    f_h: IntFlow
    family: FlowFamily


def build_flow_family(net: FlowNetwork) -> BuiltFamily:
    """Run the full pipeline on a pruned network with lam >= 1.

    Also asserts the cross-stage invariants: the calibrated subgraph keeps the
    max-flow value, criticality is unchanged by calibration, and every kept
    edge still has nu <= lam+1 (the calibration fixpoint certificate).
    """
    labels0 = classify_edges(net)
    if labels0.lam < 1:
        raise ValueError("flow family needs a connected instance (lam >= 1)")
    sub = calibrate(net, labels0)
    labels = classify_edges(sub.network)
    if labels.lam != labels0.lam:
        raise InternalInvariantError(
            f"calibration changed the max-flow value: {labels0.lam} -> {labels.lam}"
        )
    if labels.critical != labels0.critical & sub.kept:
        raise InternalInvariantError("calibration changed edge criticality")
    for eid, val in labels.nu.items():
        if val > labels.lam + 1:
            raise InternalInvariantError(
                f"calibration fixpoint violated: nu({eid}) = {val} in the subgraph"
            )
    caps, f_h = build_auxiliary(sub, labels)
    A = peel_family_A(sub, f_h)
    family = extend_family_B(A, sub, labels)
    for eid, val in f_h.values.items():
        total = sum(f.values[eid] for f in family.A)
        if total != val:
            raise InternalInvariantError(
                f"peel identity broken on edge {eid}: {total} != {val}"
            )
    return BuiltFamily(sub=sub, labels=labels, caps=caps, f_h=f_h, family=family)
