"""Command line surface: gen, build, query, verify.

Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error.
"""

import argparse
import hashlib
import pickle
import struct
import sys

from .errors import ParseError, QueryError
from .generators import FAMILIES, generate
from .graph import parse_network, serialize_network
from .kfault import (
    build_kfault_oracle,
    mincut_partition_k,
    mincut_size_k,
    reachable_under_failures,
)
from .oracles import SensitivityOracle
from .verify import run_verify

# Oracle file layout, version 1 (stability across versions not promised):
#   8 bytes   magic b"FLOWSNTY"
#   u16 LE    format version
#   u16 LE    k the failure oracle was built for
#   32 bytes  sha256 of the graph file bytes the oracle was built from
#   rest      pickle of {"sensitivity": ..., "kfault": ...}
ORACLE_MAGIC = b"FLOWSNTY"
ORACLE_VERSION = 1


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_net(path: str):
    text = _read_text(path)
    return parse_network(text), hashlib.sha256(text.encode()).digest()


def save_oracle(path: str, k: int, digest: bytes, sens, kf) -> None:
    payload = pickle.dumps({"sensitivity": sens, "kfault": kf})
    with open(path, "wb") as fh:
        fh.write(ORACLE_MAGIC)
        fh.write(struct.pack("<HH", ORACLE_VERSION, k))
        fh.write(digest)
        fh.write(payload)


def load_oracle(path: str, digest: bytes):
    """Returns (k, sensitivity, kfault); raises ValueError on any mismatch."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != ORACLE_MAGIC:
        raise ValueError(f"{path} is not a flowsentry oracle file")
    version, k = struct.unpack_from("<HH", blob, 8)
    if version != ORACLE_VERSION:
        raise ValueError(
            f"{path} has oracle format version {version}, "
            f"this build reads version {ORACLE_VERSION}"
        )
    if blob[12:44] != digest:
        raise ValueError(
            f"{path} was built from a different graph file; rebuild it"
        )
    payload = pickle.loads(blob[44:])
    return k, payload["sensitivity"], payload["kfault"]


def cmd_gen(args) -> int:
    net = generate(args.family, args.size or [], seed=args.seed)
    _write_text(args.output, serialize_network(net))
    return 0


def cmd_build(args) -> int:
    net, digest = _load_net(args.graph)
    sens = SensitivityOracle(net)
    kf = build_kfault_oracle(net, args.k)
    save_oracle(args.output, args.k, digest, sens, kf)
    return 0


class _QueryContext:
    """Lazily builds (or loads) the oracles a query stream touches."""

    def __init__(self, net, k, preloaded=None):
        self.net = net
        self.k = k
        self._sens = preloaded[0] if preloaded else None
        self._kf = preloaded[1] if preloaded else None

    @property
    def sens(self):
        if self._sens is None:
            self._sens = SensitivityOracle(self.net)
        return self._sens

    @property
    def kf(self):
        if self._kf is None:
            self._kf = build_kfault_oracle(self.net, self.k)
        return self._kf


def _parse_eid(tok: str, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(lineno, f"{tok!r} is not an integer")
    if v < 1:
        raise ParseError(lineno, "EdgeIds are 1-based")
    return v - 1


def _failure_list(toks, lineno: int, ctx) -> list[int]:
    if not toks:
        raise ParseError(lineno, "missing failure count")
    try:
        j = int(toks[0])
    except ValueError:
        raise ParseError(lineno, f"bad failure count {toks[0]!r}")
    if j > ctx.k:
        raise QueryError(
            f"query line {lineno}: {j} failures exceeds oracle k={ctx.k}"
        )
    if len(toks) - 1 != j:
        raise ParseError(lineno, f"expected {j} EdgeIds, got {len(toks) - 1}")
    return [_parse_eid(t, lineno) for t in toks[1:]]


def answer_query(line: str, lineno: int, ctx) -> str:
    toks = line.split()
    kind = toks[0]
    args = toks[1:]

    def need(count):
        if len(args) != count:
            raise ParseError(lineno, f"{kind} takes {count} argument(s)")

    if kind == "MF":
        need(1)
        return str(ctx.sens.report_flow_diff_single(_parse_eid(args[0], lineno)).new_value)
    if kind == "MFX":
        need(2)
        e, x = (_parse_eid(t, lineno) for t in args)
        return str(ctx.sens.query_edge_flow(e, x))
    if kind == "MFD":
        need(1)
        diff = ctx.sens.report_flow_diff_single(_parse_eid(args[0], lineno))
        return str(sorted(e + 1 for e in diff.toggled))
    if kind == "MF2":
        need(2)
        e, e2 = (_parse_eid(t, lineno) for t in args)
        diff = ctx.sens.report_flow_diff_dual(e, e2)
        return f"{diff.new_value} {sorted(x + 1 for x in diff.toggled)}"
    if kind == "MC2":
        need(2)
        e, e2 = (_parse_eid(t, lineno) for t in args)
        return str(ctx.sens.mincut_size_dual(e, e2))
    if kind == "MCK":
        f = _failure_list(args, lineno, ctx)
        return str(mincut_size_k(ctx.kf, f))
    if kind == "MCKP":
        f = _failure_list(args, lineno, ctx)
        part = mincut_partition_k(ctx.kf, f)
        return str(sorted(v + 1 for v in part.source_side))
    if kind == "RQ":
        f = _failure_list(args, lineno, ctx)
        return "1" if reachable_under_failures(ctx.kf, f) else "0"
    raise ParseError(lineno, f"unknown query kind {kind!r}")


def cmd_query(args) -> int:
    net, digest = _load_net(args.graph)
    preloaded = None
    k = args.k
    if args.oracle is not None:
        stored_k, sens, kf = load_oracle(args.oracle, digest)
        preloaded = (sens, kf)
        k = stored_k
    ctx = _QueryContext(net, k, preloaded)
    for lineno, raw in enumerate(_read_text(args.queries).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        print(f"{line} => {answer_query(line, lineno, ctx)}")
    return 0


def cmd_verify(args) -> int:
    net, _ = _load_net(args.graph)
    report = run_verify(
        net, args.profile, graph_label=args.graph, seed_override=args.seed
    )
    print(report.render())
    return 0 if report.ok else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="flowsentry",
        description="Fault-tolerant flow families and sensitivity oracles.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument(
        "--size",
        type=int,
        action="append",
        help="size parameter; repeat for families taking several",
    )
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build and serialize the oracles")
    b.add_argument("-g", "--graph", required=True)
    b.add_argument("-k", type=int, default=2)
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer failure queries from a file")
    q.add_argument("-g", "--graph", required=True)
    q.add_argument("-k", type=int, default=2)
    q.add_argument("-q", "--queries", required=True,
                   help="query file, or - for stdin")
    q.add_argument("--oracle", default=None,
                   help="prebuilt oracle file from 'build' (optional)")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="replay oracle answers against brute force")
    v.add_argument("-g", "--graph", required=True)
    v.add_argument("--profile", required=True)
    v.add_argument("--seed", type=int, default=None,
                   help="override the seed of a sampled(...) profile")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, QueryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
