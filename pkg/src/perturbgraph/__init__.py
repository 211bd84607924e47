"""Randomly perturbed graphs: a fixed base graph plus a sparse Erdos-Renyi sample.

Exact and sampled tools for expansion, lazy-walk mixing and long paths.
"""

from .blobs import AuxiliaryGraph, BlobPartition, auxiliary_blob_graph, blob_partition, check_partition
from .errors import (
    CapabilityError,
    ConfigError,
    DecodeError,
    DomainError,
    ParameterError,
    PerturbGraphError,
    ReportError,
)
from .expansion import (
    CutStats,
    conductance_profile,
    cut_stats,
    edge_isoperimetric_exact,
    expansion_profile,
    sweep_cut_upper_bound,
    vertex_isoperimetric_exact,
)
from .graph import (
    Graph,
    PerturbationParams,
    PerturbedGraph,
    degeneracy,
    diameter,
    generate_base,
    perturb,
)
from .harness import ExperimentConfig, ExperimentResult, parse_config, run_sweep, theorem_report
from .longpath import PathWitness, long_path_blob_heuristic, longest_path_exact
from .subsets import decode_connected_set, encode_connected_set, enumerate_connected_sets
from .walks import empirical_mixing_estimate, mixing_bounds, mixing_time_exact, stationary, transition_matrix

__version__ = "0.1.0"
