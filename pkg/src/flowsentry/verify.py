"""Verification profiles: oracle answers replayed against brute force.

Each profile builds the oracles fresh, runs a deterministic set of
queries, recomputes every answer with the independent reference oracle,
and collects mismatches instead of raising, so a broken build yields a
readable report and a nonzero exit instead of a stack trace. Mismatch
records carry the exact query line needed to replay the failure against
the same graph file.
"""

import itertools
import random
import re
import time
from dataclasses import dataclass, field

from .bruteforce import brute_force
from .flows import IntFlow
from .graph import FlowNetwork
from .kfault import (
    build_kfault_oracle,
    mincut_partition_k,
    mincut_size_k,
    reachable_under_failures,
)
from .oracles import SensitivityOracle

PROFILES = (
    "exhaustive-1",
    "exhaustive-2",
    "exhaustive-k(K,NCAP)",
    "sampled(COUNT,SEED)",
    "invariants",
)


def parse_profile(text: str) -> tuple[str, tuple[int, ...]]:
    """Profile name plus its numeric arguments, or ValueError."""
    t = text.strip()
    if t in ("exhaustive-1", "exhaustive-2", "invariants"):
        return t, ()
    m = re.fullmatch(r"exhaustive-k\(\s*(\d+)\s*,\s*(\d+)\s*\)", t)
    if m:
        return "exhaustive-k", (int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"sampled\(\s*(\d+)\s*,\s*(\d+)\s*\)", t)
    if m:
        return "sampled", (int(m.group(1)), int(m.group(2)))
    raise ValueError(
        f"unknown profile {text!r}; expected one of {', '.join(PROFILES)}"
    )


@dataclass(frozen=True)
class Mismatch:
    query: str  # replayable query line, 1-based edge ids
    expected: str
    got: str


@dataclass
class VerificationReport:
    profile: str
    graph_label: str
    counts: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)
    invariants: list = field(default_factory=list)  # (name, passed) rows
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and all(ok for _, ok in self.invariants)

    def count(self, kind: str) -> None:
        self.counts[kind] = self.counts.get(kind, 0) + 1

    def mismatch(self, query: str, expected, got) -> None:
        self.mismatches.append(Mismatch(query, str(expected), str(got)))

    def render(self) -> str:
        lines = [
            f"profile {self.profile} on {self.graph_label}: "
            f"{sum(self.counts.values())} checks, "
            f"{len(self.mismatches)} mismatches, {self.seconds:.2f}s"
        ]
        for kind in sorted(self.counts):
            lines.append(f"  {kind}: {self.counts[kind]}")
        for name, passed in self.invariants:
            lines.append(f"  [{'pass' if passed else 'FAIL'}] {name}")
        for mm in sorted(self.mismatches, key=lambda m: m.query):
            lines.append(
                f"  MISMATCH {mm.query!r}: expected {mm.expected}, "
                f"got {mm.got}"
            )
            lines.append(
                f"    replay: echo '{mm.query}' | "
                f"flowsentry query -g {self.graph_label} -q -"
            )
        lines.append("result: " + ("ok" if self.ok else "MISMATCH"))
        return "\n".join(lines)


def _reconstructed_flow(oracle, diff, failures):
    """Apply a FlowDiff; returns the flow or a reason string."""
    pruned = oracle.pruned_net
    ft = oracle.built.family.f_tilde if oracle.built is not None else None

    def bit(eid):
        base = ft.values.get(eid, 0) if ft is not None else 0
        return base ^ (1 if eid in diff.toggled else 0)

    if not diff.toggled <= frozenset(pruned.edges):
        return "diff toggles edges outside the pruned network"
    for eid in failures:
        if eid in pruned.edges and bit(eid):
            return f"diff routes flow through failed edge {eid}"
    net = pruned.without_edges(failures)
    flow = IntFlow(net, {eid: bit(eid) for eid in net.edges})
    try:
        flow.check()
    except Exception as exc:
        return f"infeasible reconstruction: {exc}"
    return flow


def _q(kind, *eids) -> str:
    return " ".join([kind] + [str(e + 1) for e in eids])


def _check_single(report, oracle, net, e):
    want, _ = brute_force(net, [e])
    diff = oracle.report_flow_diff_single(e)
    report.count("MF")
    if diff.new_value != want:
        report.mismatch(_q("MF", e), want, diff.new_value)
    flow = _reconstructed_flow(oracle, diff, [e])
    report.count("MFD")
    if isinstance(flow, str):
        report.mismatch(_q("MFD", e), "feasible max-flow", flow)
        return
    if flow.value != want:
        report.mismatch(_q("MFD", e), want, flow.value)
    for x in sorted(net.edges):
        if x == e:
            continue
        report.count("MFX")
        got = oracle.query_edge_flow(e, x)
        ref = flow.values.get(x, 0)
        if got != ref:
            report.mismatch(_q("MFX", e, x), ref, got)


def _check_dual(report, oracle, net, e, e2):
    want, _ = brute_force(net, [e, e2])
    diff = oracle.report_flow_diff_dual(e, e2)
    report.count("MF2")
    if diff.new_value != want:
        report.mismatch(_q("MF2", e, e2), want, diff.new_value)
    else:
        flow = _reconstructed_flow(oracle, diff, [e, e2])
        if isinstance(flow, str):
            report.mismatch(_q("MF2", e, e2), "feasible max-flow", flow)
        elif flow.value != want:
            report.mismatch(_q("MF2", e, e2), want, flow.value)
    report.count("MC2")
    got = oracle.mincut_size_dual(e, e2)
    if got != want:
        report.mismatch(_q("MC2", e, e2), want, got)


def _run_exhaustive_1(report, net):
    oracle = SensitivityOracle(net)
    for e in sorted(net.edges):
        _check_single(report, oracle, net, e)


def _run_exhaustive_2(report, net):
    oracle = SensitivityOracle(net)
    for e, e2 in itertools.combinations(sorted(net.edges), 2):
        _check_dual(report, oracle, net, e, e2)


def _run_exhaustive_k(report, net, k, ncap):
    if net.n > ncap:
        raise ValueError(
            f"graph has {net.n} vertices, over the profile's cap {ncap}"
        )
    oracle = build_kfault_oracle(net, k)
    eids = sorted(net.edges)
    for size in range(0, k + 1):
        for combo in itertools.combinations(eids, size):
            want, _ = brute_force(net, combo)
            report.count("MCK")
            got = mincut_size_k(oracle, combo)
            if got != want:
                report.mismatch(_q(f"MCK {size}", *combo), want, got)
                continue
            report.count("MCKP")
            part = mincut_partition_k(oracle, combo)
            live = [
                eid
                for eid, (u, v) in net.edges.items()
                if eid not in combo
                and u in part.source_side
                and v not in part.source_side
            ]
            if (
                net.s not in part.source_side
                or net.t in part.source_side
                or len(live) != want
            ):
                report.mismatch(
                    _q(f"MCKP {size}", *combo),
                    f"valid cut of size {want}",
                    f"crossing {len(live)}",
                )
            report.count("RQ")
            if reachable_under_failures(oracle, combo) != (want >= 1):
                report.mismatch(_q(f"RQ {size}", *combo), want >= 1, "flip")


def _run_sampled(report, net, count, seed):
    oracle = SensitivityOracle(net)
    rng = random.Random(seed)
    eids = sorted(net.edges)
    if not eids:
        return
    for _ in range(count):
        kind = rng.choice(("MFX", "MFD", "MF2", "MC2"))
        if kind == "MFD":
            _check_single_value_only(report, oracle, net, rng.choice(eids))
        elif kind == "MFX":
            e, x = rng.choice(eids), rng.choice(eids)
            if e == x:
                continue
            diff = oracle.report_flow_diff_single(e)
            flow = _reconstructed_flow(oracle, diff, [e])
            report.count("MFX")
            if isinstance(flow, str):
                report.mismatch(_q("MFX", e, x), "feasible flow", flow)
            elif oracle.query_edge_flow(e, x) != flow.values.get(x, 0):
                report.mismatch(
                    _q("MFX", e, x),
                    flow.values.get(x, 0),
                    oracle.query_edge_flow(e, x),
                )
        else:
            e, e2 = rng.sample(eids, 2) if len(eids) > 1 else (None, None)
            if e is None:
                continue
            if kind == "MF2":
                want, _ = brute_force(net, [e, e2])
                diff = oracle.report_flow_diff_dual(e, e2)
                report.count("MF2")
                if diff.new_value != want:
                    report.mismatch(_q("MF2", e, e2), want, diff.new_value)
                else:
                    flow = _reconstructed_flow(oracle, diff, [e, e2])
                    if isinstance(flow, str) or flow.value != want:
                        report.mismatch(
                            _q("MF2", e, e2), f"feasible flow of {want}",
                            flow if isinstance(flow, str) else flow.value,
                        )
            else:
                want, _ = brute_force(net, [e, e2])
                report.count("MC2")
                got = oracle.mincut_size_dual(e, e2)
                if got != want:
                    report.mismatch(_q("MC2", e, e2), want, got)


def _check_single_value_only(report, oracle, net, e):
    want, _ = brute_force(net, [e])
    diff = oracle.report_flow_diff_single(e)
    report.count("MFD")
    if diff.new_value != want:
        report.mismatch(_q("MFD", e), want, diff.new_value)
        return
    flow = _reconstructed_flow(oracle, diff, [e])
    if isinstance(flow, str) or flow.value != want:
        report.mismatch(
            _q("MFD", e),
            f"feasible flow of {want}",
            flow if isinstance(flow, str) else flow.value,
        )


def _run_invariants(report, net):
    oracle = SensitivityOracle(net)

    def row(name, passed):
        report.invariants.append((name, bool(passed)))

    if oracle.built is None:
        row("disconnected instance: every query short-circuits to 0", True)
        report.counts["invariant"] = len(report.invariants)
        return
    bf = oracle.built
    fam = bf.family
    n = bf.sub.network.n
    lam = oracle.lam
    row("|A| = lam+1", len(fam.A) == lam + 1)
    row("|B| = 2*lam+1", len(fam.A) + len(fam.B_extra) == 2 * lam + 1)
    edgewise = all(
        sum(f.values[eid] for f in fam.A) == bf.f_h.values[eid]
        for eid in bf.sub.kept
    )
    row("sum over A of f_i = f_H edgewise", edgewise)
    row(
        "every A member is a max-flow",
        all(f.value == lam for f in fam.A),
    )
    row(
        "null sets within 3n",
        all(len(s) <= 3 * n for s in fam.nullsets.values()),
    )
    row(
        "null(f,min+1) within 2n on A",
        all(
            len(fam.nullmin1[("A", i)]) <= 2 * n
            for i in range(len(fam.A))
        ),
    )
    noncritical = bf.sub.kept - bf.labels.critical
    covered = set().union(*fam.nullsets.values()) if fam.nullsets else set()
    row("non-critical edges covered by null sets", noncritical <= covered)
    row(
        "kept edge count within lam*n + 2n(lam+1)",
        len(bf.sub.kept) <= lam * n + 2 * n * (lam + 1),
    )
    value, _ = brute_force(net)
    row("engine max-flow equals reference", value == lam)
    report.counts["invariant"] = len(report.invariants)


def run_verify(net: FlowNetwork, profile_text: str,
               graph_label: str = "graph.txt",
               seed_override: int | None = None) -> VerificationReport:
    name, args = parse_profile(profile_text)
    if name == "sampled" and seed_override is not None:
        args = (args[0], seed_override)
        profile_text = f"sampled({args[0]},{args[1]})"
    report = VerificationReport(profile=profile_text.strip(),
                                graph_label=graph_label)
    start = time.perf_counter()
    if name == "exhaustive-1":
        _run_exhaustive_1(report, net)
    elif name == "exhaustive-2":
        _run_exhaustive_2(report, net)
    elif name == "exhaustive-k":
        _run_exhaustive_k(report, net, args[0], args[1])
    elif name == "sampled":
        _run_sampled(report, net, args[0], args[1])
    else:
        _run_invariants(report, net)
    report.seconds = time.perf_counter() - start
    return report
