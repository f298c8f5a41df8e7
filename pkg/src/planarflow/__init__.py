"""Maximum flow in directed planar graphs with many sources and sinks."""

from .engines import (ENGINES, EngineLog, FlowNetwork, FlowProblem, MaxFlowResult,
                      bounded_maxflow_from, hassin_same_face_maxflow, multi_source_single_sink,
                      oracle_maxflow)
from .flows import (FlowDecomposition, FlowError, Pseudoflow, cancel_cycles, decompose, excess,
                    excesses, recompose, residual, return_excess, sum_flows, total_capacity)
from .generators import gen_grid, gen_random_planar
from .io import FormatError, Instance, parse_instance, read_instance, write_instance
from .planar import (EmbeddingError, PlanarGraph, add_edge_in_face, add_vertex_in_face,
                     build_from_rotation, subgraph_piece, triangulate)
from .separator import Separator, check_separator, find_cycle_separator, separator_for_terminals
from .side_to_side import (BalanceTrace, SideToSideInstance, balance, compute_fX, compute_fY,
                           displace_terminals_off_P, side_to_side)
from .solver import (CutSet, LRPartition, SolverConfig, SolveTrace, algorithm1_iterate, base_case,
                     extract_cut, lemma1_stage, solve)
from .verify import check_flow, check_max, invariant_probe, oracle_compare

__version__ = "0.1.0"
