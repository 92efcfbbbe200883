"""Random Hyperbolic Block Model: calibrated generation and evaluation."""

from .calibration import (
    CalibrationReport,
    LatentState,
    calibrate,
    default_radius,
    expected_block_degrees,
    sample_angles,
    sample_feasible_fitness,
    sample_fitness,
)
from .embedding import (
    EmbeddingSD,
    expected_degrees_from_embedding,
    expected_mixing_from_embedding,
    load_embedding,
    sample_graphs_from_embedding,
    save_embedding,
    sd_edge_probability,
)
from .generation import (
    Graph,
    S1Params,
    edge_probability,
    sample_graph,
    sample_graph_blockwise,
    sample_s1_graph,
)
from .kernel import angular_connection_kernel
from .metrics import (
    average_local_clustering,
    clustering_relative_error,
    degree_sequence,
    empirical_mixing,
    global_clustering,
    graph_stats,
    mixing_relative_error,
)
from .mixing import (
    BlockPartition,
    MixingMatrix,
    MixingParams,
    build_normalized_mixing,
    make_partition,
    scale_mixing_to_edges,
    validate_targets,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "CalibrationReport",
    "EmbeddingSD",
    "Graph",
    "LatentState",
    "MixingMatrix",
    "MixingParams",
    "S1Params",
    "angular_connection_kernel",
    "average_local_clustering",
    "build_normalized_mixing",
    "calibrate",
    "clustering_relative_error",
    "default_radius",
    "degree_sequence",
    "edge_probability",
    "empirical_mixing",
    "expected_block_degrees",
    "expected_degrees_from_embedding",
    "expected_mixing_from_embedding",
    "global_clustering",
    "graph_stats",
    "load_embedding",
    "make_partition",
    "mixing_relative_error",
    "sample_angles",
    "sample_feasible_fitness",
    "sample_fitness",
    "sample_graph",
    "sample_graph_blockwise",
    "sample_graphs_from_embedding",
    "sample_s1_graph",
    "save_embedding",
    "scale_mixing_to_edges",
    "sd_edge_probability",
    "validate_targets",
]
