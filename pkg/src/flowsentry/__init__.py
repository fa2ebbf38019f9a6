"""flowsentry: fault-tolerant max-flow and min-cut sensitivity oracles
for unit-capacity directed multigraphs."""

from .bruteforce import brute_force
from .errors import InternalInvariantError, ParseError, QueryError
from .family import BuiltFamily, FlowFamily, build_flow_family
from .flows import (
    IntFlow,
    ResidualGraph,
    UnitFlow,
    hoffman_feasible,
    max_flow,
    solve_circulation,
)
from .generators import FAMILIES, generate
from .graph import (
    DirectedMultigraph,
    FlowNetwork,
    PrunedEdgeSet,
    parse_network,
    prune_to_st_paths,
    reaches,
    serialize_network,
    strongly_connected_components,
)
from .kfault import (
    KFaultOracle,
    build_kfault_oracle,
    mincut_partition_k,
    mincut_size_k,
    reachable_under_failures,
)
from .mincut import (
    CutPartition,
    MinCutOracleStruct,
    build_mincut_oracle,
    crossing_edges,
    decreases_by_k,
    report_nmc_after,
)
from .oracles import FlowDiff, SensitivityOracle
from .verify import VerificationReport, run_verify

__all__ = [
    "BuiltFamily",
    "CutPartition",
    "DirectedMultigraph",
    "FAMILIES",
    "FlowDiff",
    "FlowFamily",
    "FlowNetwork",
    "IntFlow",
    "InternalInvariantError",
    "KFaultOracle",
    "MinCutOracleStruct",
    "ParseError",
    "PrunedEdgeSet",
    "QueryError",
    "ResidualGraph",
    "SensitivityOracle",
    "UnitFlow",
    "VerificationReport",
    "brute_force",
    "build_flow_family",
    "build_kfault_oracle",
    "build_mincut_oracle",
    "crossing_edges",
    "decreases_by_k",
    "generate",
    "hoffman_feasible",
    "max_flow",
    "mincut_partition_k",
    "mincut_size_k",
    "parse_network",
    "prune_to_st_paths",
    "reachable_under_failures",
    "reaches",
    "report_nmc_after",
    "run_verify",
    "serialize_network",
    "solve_circulation",
    "strongly_connected_components",
]
