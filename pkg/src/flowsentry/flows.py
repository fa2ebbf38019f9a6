"""Integral max-flow, residual graphs, flow canonicalization, path
decomposition, and circulation with lower bounds.

Everything here is deterministic: augmenting paths are shortest paths
discovered by BFS that scans arcs in ascending EdgeId order (forward arc
before reverse arc on the same id), so identical inputs always produce
identical flows. Capacities in this package stay tiny, so reproducibility
is worth far more than asymptotics.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .graph import DirectedMultigraph, FlowNetwork, scc_from_adjacency


class IntFlow:
    """Integer-valued feasible flow on a network's edges.

    ``values`` maps every EdgeId of the network to its flow; ``caps`` maps
    every EdgeId to its capacity (1 when built from unit capacities).
    """

    __slots__ = ("net", "values", "caps")

    def __init__(self, net: FlowNetwork, values: dict[int, int], caps: dict[int, int] | None = None):
        self.net = net
        if caps is None:
            caps = {eid: 1 for eid in net.edges}
        self.caps = caps
        self.values = {eid: values.get(eid, 0) for eid in net.edges}

    def __getitem__(self, eid: int) -> int:
        return self.values[eid]

    @property
    def value(self) -> int:
        g = self.net.graph
        s = self.net.s
        out = sum(self.values[e] for e in g.out_edges(s))
        inc = sum(self.values[e] for e in g.in_edges(s))
        return out - inc

    def support(self) -> list[int]:
        return sorted(e for e, x in self.values.items() if x > 0)

    def check(self) -> None:
        """Raise ValueError unless capacities and conservation hold."""
        g = self.net.graph
        for eid, x in self.values.items():
            if not (0 <= x <= self.caps.get(eid, 0)):
                raise ValueError(f"flow {x} on edge {eid} outside [0, {self.caps.get(eid, 0)}]")
        for v in range(g.n):
            if v in (self.net.s, self.net.t):
                continue
            inc = sum(self.values[e] for e in g.in_edges(v))
            out = sum(self.values[e] for e in g.out_edges(v))
            if inc != out:
                raise ValueError(f"conservation violated at vertex {v}: in={inc} out={out}")

    def __eq__(self, other):
        if not isinstance(other, IntFlow):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))

    def __repr__(self):
        return f"{type(self).__name__}(value={self.value}, support={self.support()})"


class UnitFlow(IntFlow):
    """0/1 flow under unit capacities."""

    def __init__(self, net: FlowNetwork, values: dict[int, int]):
        super().__init__(net, values, caps=None)
        for eid, x in self.values.items():
            if x not in (0, 1):
                raise ValueError(f"unit flow has value {x} on edge {eid}")

    @property
    def saturated(self) -> frozenset[int]:
        return frozenset(e for e, x in self.values.items() if x == 1)

    def __contains__(self, eid: int) -> bool:
        return self.values.get(eid, 0) == 1


def max_flow(net: FlowNetwork, capacities: dict[int, int] | None = None,
             value_limit: int | None = None) -> IntFlow:
    """Deterministic integral max-flow (shortest augmenting paths).

    ``capacities`` defaults to 1 per edge, in which case a UnitFlow is
    returned. ``value_limit`` stops augmenting once the value reaches the
    limit; it exists so callers that only need to compare a max-flow value
    against a threshold can bail out early, and must be left None whenever
    the actual maximum matters.
    """
    g = net.graph
    caps = {eid: 1 for eid in g.edges} if capacities is None else {eid: int(capacities.get(eid, 0)) for eid in g.edges}
    for eid, c in caps.items():
        if c < 0:
            raise ValueError(f"negative capacity {c} on edge {eid}")
    flow = {eid: 0 for eid in g.edges}
    s, t = net.s, net.t
    value = 0
    while value_limit is None or value < value_limit:
        # BFS over residual arcs; parents recorded as (vertex, eid, is_reverse)
        parent: dict[int, tuple[int, int, bool]] = {s: (-1, -1, False)}
        queue = deque([s])
        while queue and t not in parent:
            v = queue.popleft()
            for eid, is_rev, w in _residual_arcs(g, flow, caps, v):
                if w not in parent:
                    parent[w] = (v, eid, is_rev)
                    if w == t:
                        break
                    queue.append(w)
        if t not in parent:
            break
        path = []
        w = t
        while w != s:
            v, eid, is_rev = parent[w]
            path.append((eid, is_rev))
            w = v
        path.reverse()
        push = min((caps[eid] - flow[eid]) if not is_rev else flow[eid] for eid, is_rev in path)
        for eid, is_rev in path:
            flow[eid] += -push if is_rev else push
        value += push
    if capacities is None:
        return UnitFlow(net, flow)
    return IntFlow(net, flow, caps)


def _residual_arcs(g: DirectedMultigraph, flow, caps, v):
    """Residual arcs out of v in deterministic order: ascending EdgeId,
    forward before reverse on the same id. Yields (eid, is_reverse, head)."""
    out = g.out_edges(v)
    inc = g.in_edges(v)
    i = j = 0
    while i < len(out) or j < len(inc):
        if j >= len(inc) or (i < len(out) and out[i] <= inc[j]):
            eid = out[i]
            i += 1
            if flow[eid] < caps[eid]:
                yield eid, False, g.head(eid)
        else:
            eid = inc[j]
            j += 1
            if flow[eid] > 0:
                yield eid, True, g.tail(eid)


ARTIFICIAL = None  # EdgeId placeholder for the artificial (s,t) arc


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    eid: int | None  # ARTIFICIAL for the added (s,t) arc
    is_reverse: bool


class ResidualGraph:
    """Residual structure of a feasible flow.

    Each unsaturated edge contributes a forward arc, each flow-carrying
    edge a reverse arc; both remember their originating EdgeId, so deleting
    an EdgeId removes every arc it produced. With ``st_arc=True`` an
    artificial s->t arc (EdgeId None) is appended, which models the
    one-unit value decrease used by rerouting queries.
    """

    __slots__ = ("net", "flow", "arcs", "_out")

    def __init__(self, net: FlowNetwork, flow: IntFlow, st_arc: bool = False):
        flow.check()
        self.net = net
        self.flow = flow
        arcs: list[Arc] = []
        for eid in sorted(net.edges):
            u, v = net.edges[eid]
            if flow.values[eid] < flow.caps[eid]:
                arcs.append(Arc(u, v, eid, False))
            if flow.values[eid] > 0:
                arcs.append(Arc(v, u, eid, True))
        if st_arc:
            arcs.append(Arc(net.s, net.t, ARTIFICIAL, False))
        self.arcs = arcs
        out: list[list[int]] = [[] for _ in range(net.n)]
        for idx, a in enumerate(arcs):
            out[a.tail].append(idx)
        self._out = out

    def out_arcs(self, v: int) -> list[int]:
        return self._out[v]

    def arcs_for_edge(self, eid: int) -> list[int]:
        return [i for i, a in enumerate(self.arcs) if a.eid == eid]

    def reachable(self, src: int, banned_eids=()) -> set[int]:
        banned = set(banned_eids)
        seen = {src}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for idx in self._out[v]:
                a = self.arcs[idx]
                if a.eid in banned:
                    continue
                if a.head not in seen:
                    seen.add(a.head)
                    queue.append(a.head)
        return seen

    def path_arcs(self, x: int, y: int, banned_eids=()) -> list[int] | None:
        """Deterministic BFS path x -> y as arc indices, or None."""
        banned = set(banned_eids)
        if x == y:
            return []
        parent: dict[int, tuple[int, int]] = {x: (-1, -1)}
        queue = deque([x])
        while queue:
            v = queue.popleft()
            for idx in self._out[v]:
                a = self.arcs[idx]
                if a.eid in banned or a.head in parent:
                    continue
                parent[a.head] = (v, idx)
                if a.head == y:
                    path = []
                    w = y
                    while w != x:
                        v2, i2 = parent[w]
                        path.append(i2)
                        w = v2
                    path.reverse()
                    return path
                queue.append(a.head)
        return None

    def cycle_through(self, arc_idx: int, banned_eids=()) -> list[int] | None:
        """A simple cycle containing the given arc in the residual minus the
        banned EdgeIds, or None when its endpoints are not strongly
        connected there."""
        a = self.arcs[arc_idx]
        if a.eid in set(banned_eids):
            raise ValueError("target arc is banned")
        back = self.path_arcs(a.head, a.tail, banned_eids)
        if back is None:
            return None
        return [arc_idx] + back

    def scc_ids(self, banned_eids=()) -> list[int]:
        banned = set(banned_eids)
        succ: list[list[int]] = [[] for _ in range(self.net.n)]
        for a in self.arcs:
            if a.eid not in banned:
                succ[a.tail].append(a.head)
        succ = [sorted(set(v)) for v in succ]
        return scc_from_adjacency(self.net.n, succ)


def residual(net: FlowNetwork, flow: IntFlow, st_arc: bool = False) -> ResidualGraph:
    return ResidualGraph(net, flow, st_arc=st_arc)


def cancel_flow_cycles(net: FlowNetwork, f: IntFlow) -> IntFlow:
    """Remove directed cycles of flow, preserving value and feasibility.

    Cycles carry no net (s,t)-flow, so zeroing them changes nothing the
    rest of the package cares about and makes path decomposition valid.
    """
    values = dict(f.values)
    g = net.graph
    while True:
        cycle = _find_support_cycle(g, values)
        if cycle is None:
            break
        push = min(values[eid] for eid in cycle)
        for eid in cycle:
            values[eid] -= push
    if isinstance(f, UnitFlow):
        return UnitFlow(net, values)
    return IntFlow(net, values, dict(f.caps))


def _find_support_cycle(g: DirectedMultigraph, values) -> list[int] | None:
    """A directed cycle (as EdgeIds) in the flow support, or None.

    Iterative DFS with vertex coloring; arcs scanned in ascending EdgeId
    order for determinism.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * g.n
    for root in range(g.n):
        if color[root] != WHITE:
            continue
        # stack holds (vertex, edge used to arrive); path_edges mirrors stack
        stack = [(root, -1)]
        iters: dict[int, list[int]] = {}
        path: list[int] = []
        while stack:
            v, _ = stack[-1]
            if color[v] == WHITE:
                color[v] = GRAY
                iters[v] = [e for e in g.out_edges(v) if values[e] > 0]
            nxt = None
            while iters[v]:
                e = iters[v].pop(0)
                w = g.head(e)
                if color[w] == GRAY:
                    # found a cycle: edges from w forward along path, plus e
                    idx = next(i for i, (x, _) in enumerate(stack) if x == w)
                    return [pe for (_, pe) in stack[idx + 1:]] + [e]
                if color[w] == WHITE:
                    nxt = (w, e)
                    break
            if nxt is None:
                color[v] = BLACK
                stack.pop()
            else:
                stack.append(nxt)
    return None


def decompose_into_paths(net: FlowNetwork, f: IntFlow) -> list[list[int]]:
    """Split an acyclic flow into edge-disjoint (s,t)-paths of EdgeIds.

    Greedy walk from s always taking the lowest-EdgeId edge with remaining
    flow. Unit flows yield value-many paths that partition the support.
    Raises ValueError when the flow support contains a cycle.
    """
    g = net.graph
    remaining = dict(f.values)
    if _find_support_cycle(g, remaining) is not None:
        raise ValueError("flow support contains a cycle; run cancel_flow_cycles first")
    paths: list[list[int]] = []
    for _ in range(f.value):
        v = net.s
        path: list[int] = []
        while v != net.t:
            eid = next(e for e in g.out_edges(v) if remaining[e] > 0)
            remaining[eid] -= 1
            path.append(eid)
            v = g.head(eid)
        paths.append(path)
    return paths


@dataclass(frozen=True)
class CirculationInstance:
    """Circulation with lower bounds: find g with lower <= g <= upper and
    in(v) - out(v) = demand(v) at every vertex."""

    graph: DirectedMultigraph
    demand: dict[int, int] = field(default_factory=dict)
    lower: dict[int, int] = field(default_factory=dict)
    upper: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for eid in self.graph.edges:
            lo = self.lower.get(eid, 0)
            hi = self.upper.get(eid, 0)
            if lo < 0 or hi < 0 or lo > hi:
                raise ValueError(f"bad bounds on edge {eid}: lower={lo} upper={hi}")

    def d(self, v: int) -> int:
        return self.demand.get(v, 0)

    def lo(self, eid: int) -> int:
        return self.lower.get(eid, 0)

    def hi(self, eid: int) -> int:
        return self.upper.get(eid, 0)


def solve_circulation(inst: CirculationInstance) -> dict[int, int] | None:
    """Solve the circulation instance; None when infeasible.

    Standard reduction: route the lower bounds unconditionally, fix up the
    resulting vertex imbalances through a super source/sink pair, and
    declare feasibility exactly when every super arc saturates.
    """
    g = inst.graph
    if sum(inst.d(v) for v in range(g.n)) != 0:
        return None
    n = g.n
    S, T = n, n + 1
    aux = DirectedMultigraph(n + 2)
    aux_caps: dict[int, int] = {}
    orig_of: dict[int, int] = {}
    for eid in sorted(g.edges):
        u, v = g.edges[eid]
        aid = aux.add_edge(u, v)
        aux_caps[aid] = inst.hi(eid) - inst.lo(eid)
        orig_of[aid] = eid
    need = 0
    for v in range(n):
        # surplus(v): net amount v must ship out after lower bounds are routed
        inc = sum(inst.lo(e) for e in g.in_edges(v))
        out = sum(inst.lo(e) for e in g.out_edges(v))
        surplus = inc - out - inst.d(v)
        if surplus > 0:
            aid = aux.add_edge(S, v)
            aux_caps[aid] = surplus
            need += surplus
        elif surplus < 0:
            aid = aux.add_edge(v, T)
            aux_caps[aid] = -surplus
    result = max_flow(FlowNetwork(aux, S, T), aux_caps)
    if result.value != need:
        return None
    out = {eid: inst.lo(eid) for eid in g.edges}
    for aid, orig in orig_of.items():
        out[orig] += result.values[aid]
    return out


def hoffman_feasible(inst: CirculationInstance) -> bool:
    """Feasibility by exhaustive cut conditions; verification oracle only.

    True iff demands sum to zero and every vertex bipartition (A,B)
    satisfies d(B) + lower(B->A) <= upper(A->B). Exponential in n, so it
    refuses instances with more than 20 vertices.
    """
    g = inst.graph
    n = g.n
    if n > 20:
        raise ValueError(f"hoffman_feasible is exponential; n={n} exceeds 20")
    if sum(inst.d(v) for v in range(n)) != 0:
        return False
    edge_items = sorted(g.edges.items())
    for mask in range(1 << n):
        # A = vertices with bit set, B = rest
        d_b = sum(inst.d(v) for v in range(n) if not (mask >> v) & 1)
        lo_ba = hi_ab = 0
        for eid, (u, v) in edge_items:
            u_in_a = (mask >> u) & 1
            v_in_a = (mask >> v) & 1
            if u_in_a and not v_in_a:
                hi_ab += inst.hi(eid)
            elif v_in_a and not u_in_a:
                lo_ba += inst.lo(eid)
        if d_b + lo_ba > hi_ab:
            return False
    return True
