"""Failure-sensitivity oracles: max-flow and min-cut under 1-2 edge faults.

``SensitivityOracle`` is built once over a raw network. It walk-prunes
the graph, builds the flow family and the min-cut structure over the
calibrated subgraph, and keeps one strong-connectivity index per stored
flow (for the plain residual and for the residual with the artificial
source-to-sink arc). Queries then run on lookups plus at most one
residual traversal.

Conventions the queries rely on:
  * edges outside every (s,t)-walk, and edges removed by calibration,
    have no effect on any max-flow value under at most two failures;
    they are dropped from failure sets up front.
  * flow answers are deltas against the representative flow f-tilde.
    A reported flow lives on the walk-pruned network (rerouting cycles
    may travel through calibration-removed edges) and its value equals
    the max-flow of the original network minus the failures.
  * a disconnected instance (max-flow 0) short-circuits every query.
"""

import logging
from dataclasses import dataclass

from .errors import QueryError
from .family import build_flow_family
from .flows import ARTIFICIAL, IntFlow, ResidualGraph
from .ftscc import (
    build_ft_index,
    cycle_through_arc_without,
    strongly_connected_without,
)
from .graph import FlowNetwork, prune_to_st_paths
from .mincut import build_mincut_oracle, decreases_by_k

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowDiff:
    """Delta encoding of a post-failure max-flow.

    The reconstruction sends one unit on edge x iff f-tilde does XOR
    x is in ``toggled``. It is feasible in the walk-pruned network minus
    the failures and its value is ``new_value``, the true max-flow of
    the network minus the failures.
    """

    toggled: frozenset[int]
    new_value: int
    base: str = "f~"


class SensitivityOracle:
    """Single- and dual-failure query oracle for one network."""

    def __init__(self, net: FlowNetwork):
        self.net = net
        pruned, info = prune_to_st_paths(net)
        self.pruned_net = pruned
        self.walk_dropped = info.removed
        if info.disconnected:
            self.lam = 0
            self.built = None
            self.mincut = None
            self.no_effect = frozenset(net.edges)
            self.union_min1 = frozenset()
            self.hosts = {}
            self.hosts_st = {}
            return
        bf = build_flow_family(pruned)
        self.built = bf
        self.lam = bf.sub.lam
        self.mincut = build_mincut_oracle(bf)
        self.no_effect = frozenset(self.walk_dropped | bf.sub.pruned)
        fam = bf.family
        self.union_min1 = frozenset().union(
            *(fam.nullmin1[("A", i)] for i in range(len(fam.A)))
        )
        # one index per stored flow, for G_f and for G_f plus the
        # artificial (s,t) arc; both over the walk-pruned network so
        # rerouting may use calibration-removed edges
        self.hosts = {}
        self.hosts_st = {}
        for key, f in fam.all_flows():
            lifted = self._lift(f)
            self.hosts[key] = build_ft_index(ResidualGraph(pruned, lifted))
            self.hosts_st[key] = build_ft_index(
                ResidualGraph(pruned, lifted, st_arc=True)
            )

    def _lift(self, f) -> IntFlow:
        """Extend a calibrated-subgraph flow by zeros to the pruned net."""
        vals = {eid: f.values.get(eid, 0) for eid in self.pruned_net.edges}
        return IntFlow(self.pruned_net, vals)

    def _known(self, eid: int) -> None:
        if eid not in self.net.edges:
            raise QueryError(f"unknown edge {eid}")

    def _kept(self, eid: int) -> bool:
        return eid not in self.no_effect

    @property
    def _rep_key(self):
        return ("A", self.built.family.representative)

    # ---- single failure ----

    def query_edge_flow(self, e: int, x: int) -> int:
        """Flow bit through x in the canonical max-flow after e fails."""
        self._known(e)
        self._known(x)
        if e == x:
            raise QueryError("edge x does not survive the failure of e")
        if self.lam == 0:
            return 0
        fam = self.built.family
        if not self._kept(e) or fam.f_tilde.values.get(e, 0) == 0:
            return fam.f_tilde.values.get(x, 0)
        return fam.canonical_flow(e).values.get(x, 0)

    def report_flow_diff_single(self, e: int) -> FlowDiff:
        """Max-flow after e fails, as a delta against f-tilde."""
        self._known(e)
        if self.lam == 0:
            return FlowDiff(frozenset(), 0)
        fam = self.built.family
        if not self._kept(e) or fam.f_tilde.values.get(e, 0) == 0:
            return FlowDiff(frozenset(), self.lam)
        diff = fam.nullsets[self._rep_key] ^ fam.nullsets[fam.canonical[e]]
        assert len(diff) <= 6 * self.pruned_net.n
        crit = self.built.labels.is_critical(e)
        return FlowDiff(diff, self.lam - (1 if crit else 0))

    # ---- dual failure ----

    def report_flow_diff_dual(self, e: int, e2: int) -> FlowDiff:
        """Max-flow after both e and e2 fail, as a delta against f-tilde."""
        self._known(e)
        self._known(e2)
        if e == e2:
            raise QueryError("dual-failure query needs two distinct edges")
        if self.lam == 0:
            return FlowDiff(frozenset(), 0)
        live = [x for x in (e, e2) if self._kept(x)]
        if not live:
            return FlowDiff(frozenset(), self.lam)
        if len(live) == 1:
            if live[0] == e2:
                log.info(
                    "dual query (%d, %d): %d has no effect, "
                    "answering the single failure of %d",
                    e, e2, e, e2,
                )
            return self.report_flow_diff_single(live[0])
        fam = self.built.family
        key = fam.canonical[e]
        f = fam.flow(key)
        val_f = self.lam - (1 if self.built.labels.is_critical(e) else 0)
        base = fam.nullsets[self._rep_key] ^ fam.nullsets[key]
        if f.values.get(e2, 0) == 0:
            return FlowDiff(base, val_f)
        cycle = cycle_through_arc_without(self.hosts[key], e2, e)
        value = val_f
        if cycle is None:
            cycle = cycle_through_arc_without(
                self.hosts_st[key], e2, e, artificial_st=True
            )
            assert cycle is not None, \
                "no rerouting cycle even after releasing one unit of value"
            value = val_f - 1
        eids = [a.eid for a in cycle if a.eid is not ARTIFICIAL]
        assert len(eids) == len(set(eids)), "rerouting cycle repeats an edge"
        return FlowDiff(base ^ frozenset(eids), value)

    def mincut_size_dual(self, e: int, e2: int) -> int:
        """Min-cut (= max-flow) value after both e and e2 fail."""
        self._known(e)
        self._known(e2)
        if e == e2:
            raise QueryError("dual-failure query needs two distinct edges")
        if self.lam == 0:
            return 0
        live = [x for x in (e, e2) if self._kept(x)]
        crit = self.built.labels.is_critical
        if not live:
            return self.lam
        if len(live) == 1:
            return self.lam - (1 if crit(live[0]) else 0)
        c1, c2 = crit(e), crit(e2)
        if c1 or c2:
            if c1 and c2 and decreases_by_k(self.mincut, (e, e2), 2):
                return self.lam - 2
            return self.lam - 1
        # both non-critical: the drop happens iff the second failure cannot
        # be routed around in the residual of the flow avoiding the first
        fam = self.built.family
        key = fam.canonical[e]
        u, v = self.pruned_net.edges[e2]
        if (
            e in self.union_min1
            and e2 in self.union_min1
            and e2 not in fam.nullmin1[key]
            and not strongly_connected_without(self.hosts[key], u, v, e)
        ):
            return self.lam - 1
        return self.lam
