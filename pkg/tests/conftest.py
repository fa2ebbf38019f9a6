import random

import pytest

from flowsentry.graph import DirectedMultigraph, FlowNetwork


def make_net(n, edge_list, s=0, t=None):
    if t is None:
        t = n - 1
    return FlowNetwork(DirectedMultigraph(n, edge_list), s, t)


def random_net(rng: random.Random, n_max=10, m_max=24):
    """Small random multigraph for cross-checking; may be disconnected."""
    n = rng.randint(2, n_max)
    m = rng.randint(0, m_max)
    edges = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        edges.append((u, v))
    s = 0
    t = n - 1
    return make_net(n, edges, s=s, t=t)


def brute_max_flow_value(net):
    """Independent max-flow value: min crossing-edge count over all s-side
    vertex subsets (max-flow min-cut duality). Exponential; keep n small."""
    n = net.n
    best = None
    for mask in range(1 << n):
        if not (mask >> net.s) & 1 or (mask >> net.t) & 1:
            continue
        crossing = sum(
            1
            for (u, v) in net.edges.values()
            if (mask >> u) & 1 and not (mask >> v) & 1
        )
        best = crossing if best is None else min(best, crossing)
    return best


@pytest.fixture
def diamond():
    # s=0, a=1, b=2, t=3; EdgeIds 0=(s,a), 1=(a,t), 2=(s,b), 3=(b,t)
    return make_net(4, [(0, 1), (1, 3), (0, 2), (2, 3)])


@pytest.fixture
def bottleneck():
    # s=0, x=1, t=2; a1=0, a2=1 into x; b1=2, b2=3, b3=4 out of x
    return make_net(3, [(0, 1), (0, 1), (1, 2), (1, 2), (1, 2)])


@pytest.fixture
def chain():
    # s=0 -> v=1 -> t=2
    return make_net(3, [(0, 1), (1, 2)])


def reconstruct_flow(oracle, diff, failures):
    """Apply a FlowDiff to f-tilde and check it on the pruned net minus
    the failed edges: toggles stay inside the pruned edge set, failed
    edges end up carrying nothing, and the result is a feasible flow of
    exactly the reported value."""
    from flowsentry.flows import IntFlow

    pruned = oracle.pruned_net
    ft = oracle.built.family.f_tilde if oracle.built is not None else None

    def bit(eid):
        base = ft.values.get(eid, 0) if ft is not None else 0
        return base ^ (1 if eid in diff.toggled else 0)

    assert diff.toggled <= frozenset(pruned.edges)
    for eid in failures:
        if eid in pruned.edges:
            assert bit(eid) == 0, f"reconstruction uses failed edge {eid}"
    net = pruned.without_edges(failures)
    flow = IntFlow(net, {eid: bit(eid) for eid in net.edges})
    flow.check()
    assert flow.value == diff.new_value
    return flow
