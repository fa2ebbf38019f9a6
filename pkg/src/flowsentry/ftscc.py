"""Strong-connectivity queries on residual hosts under one failed edge.

Two pieces live here. ``SccCertificate`` is a sparse witness (at most 2n
arcs) that reproduces the strongly connected components of a residual
host exactly; it exists because the family size bounds lean on such a
witness existing. ``FtSccIndex`` answers "are x and y still strongly
connected after deleting edge e" and extracts an explicit rerouting
cycle through a chosen reverse arc. The index deliberately stores the
whole host and answers each query with two sweeps: correct, simple to
audit, and fast enough at the scales this package targets.

Deleting a network EdgeId removes every residual arc it produced, both
the forward and the reverse one.
"""

from collections import deque
from dataclasses import dataclass

from .errors import QueryError
from .flows import ARTIFICIAL, Arc, ResidualGraph
from .graph import scc_from_adjacency


@dataclass(frozen=True)
class SccCertificate:
    """Arc subset of a host preserving its SCC partition.

    ``arcs`` are indices into ``host.arcs``: per non-singleton SCC, a
    BFS out-tree and a BFS in-tree rooted at the component's smallest
    vertex. Two trees of at most k-1 arcs each certify a k-vertex
    component, so the total stays under 2n.
    """

    host: ResidualGraph
    arcs: tuple[int, ...]

    def scc_ids(self) -> list[int]:
        """SCC id per vertex using only the certificate's arcs."""
        n = self.host.net.n
        succ: list[list[int]] = [[] for _ in range(n)]
        for idx in self.arcs:
            a = self.host.arcs[idx]
            succ[a.tail].append(a.head)
        succ = [sorted(set(v)) for v in succ]
        return scc_from_adjacency(n, succ)


def _tree_arcs(arcs_of_comp, root, members, backward):
    """BFS tree arc indices over one component's induced arcs."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in members}
    for idx, a in arcs_of_comp:
        if backward:
            adj[a.head].append((idx, a.tail))
        else:
            adj[a.tail].append((idx, a.head))
    seen = {root}
    picked: list[int] = []
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for idx, w in adj[v]:
            if w not in seen:
                seen.add(w)
                picked.append(idx)
                queue.append(w)
    assert seen == members, "component not spanned; SCC ids are inconsistent"
    return picked


def build_certificate(host: ResidualGraph) -> SccCertificate:
    n = host.net.n
    comp = host.scc_ids()
    members: dict[int, set[int]] = {}
    for v in range(n):
        members.setdefault(comp[v], set()).add(v)
    # arcs whose endpoints share a component, grouped by that component
    by_comp: dict[int, list[tuple[int, Arc]]] = {}
    for idx, a in enumerate(host.arcs):
        if comp[a.tail] == comp[a.head]:
            by_comp.setdefault(comp[a.tail], []).append((idx, a))
    picked: set[int] = set()
    for cid, verts in sorted(members.items()):
        if len(verts) < 2:
            continue
        root = min(verts)
        induced = by_comp.get(cid, [])
        picked.update(_tree_arcs(induced, root, verts, backward=False))
        picked.update(_tree_arcs(induced, root, verts, backward=True))
    assert len(picked) <= 2 * n
    cert = SccCertificate(host=host, arcs=tuple(sorted(picked)))
    assert cert.scc_ids() == comp, "certificate changed the SCC partition"
    return cert


@dataclass(frozen=True)
class FtSccIndex:
    """Single-edge-failure strong-connectivity index over one host.

    ``preserver`` is the arc subset queries run on; this implementation
    keeps every arc (answers are computed by fresh traversals rather
    than by a precomputed sparse structure, trading query time for
    obviousness). ``has_st_arc`` records whether the host was built
    with the artificial source-to-sink arc appended.
    """

    host: ResidualGraph
    preserver: tuple[int, ...]
    has_st_arc: bool

    @property
    def known_edges(self) -> frozenset:
        return frozenset(self.host.net.edges)


def build_ft_index(host: ResidualGraph) -> FtSccIndex:
    has_st = any(a.eid is ARTIFICIAL for a in host.arcs)
    return FtSccIndex(host=host, preserver=tuple(range(len(host.arcs))),
                      has_st_arc=has_st)


def _check_failed_eid(idx: FtSccIndex, eid) -> None:
    if eid is ARTIFICIAL or eid not in idx.host.net.edges:
        raise QueryError(f"unknown failed edge {eid!r}")


def strongly_connected_without(idx: FtSccIndex, x: int, y: int, eid) -> bool:
    """Whether x and y are strongly connected in the host minus edge eid."""
    n = idx.host.net.n
    if not (0 <= x < n and 0 <= y < n):
        raise QueryError(f"vertex out of range: {x}, {y}")
    _check_failed_eid(idx, eid)
    if x == y:
        return True
    banned = (eid,)
    return y in idx.host.reachable(x, banned) and \
        x in idx.host.reachable(y, banned)


def cycle_through_arc_without(idx: FtSccIndex, target_eid, failed_eid,
                              artificial_st: bool = False):
    """Simple cycle through the reverse arc of ``target_eid`` avoiding
    ``failed_eid``, as a tuple of Arcs, or None when no such cycle
    exists. ``artificial_st`` must match how the host was built; it is
    a guard against querying the wrong index, not a switch.
    """
    assert artificial_st == idx.has_st_arc, \
        "query routed to an index built without the expected (s,t) arc"
    _check_failed_eid(idx, failed_eid)
    if target_eid is ARTIFICIAL or target_eid not in idx.host.net.edges:
        raise QueryError(f"unknown target edge {target_eid!r}")
    if target_eid == failed_eid:
        raise QueryError("target edge coincides with the failed edge")
    rev = [i for i in idx.host.arcs_for_edge(target_eid)
           if idx.host.arcs[i].is_reverse]
    if not rev:
        raise QueryError(
            f"edge {target_eid} carries no flow; it has no reverse arc")
    (arc_idx,) = rev
    cycle = idx.host.cycle_through(arc_idx, banned_eids=(failed_eid,))
    if cycle is None:
        return None
    return tuple(idx.host.arcs[i] for i in cycle)
