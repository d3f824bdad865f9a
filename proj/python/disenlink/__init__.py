"""Disentangled link prediction for heterophilic graphs.

Thin wrapper around the C++ extension; the main operations are loading and
splitting attributed graphs, training with the factor-wise pipeline,
heuristic baselines, AUC evaluation, and embedding-correlation analysis.
"""

from ._core import (
    DisenlinkError,
    EdgeSplit,
    EpochTrace,
    Graph,
    ModelState,
    TrainResult,
    adamic_adar,
    auc,
    common_neighbors,
    compute_embeddings,
    correlation_matrix,
    dataset_presets,
    edge_homophily,
    evaluate,
    evaluate_baseline,
    generate_dataset,
    load_checkpoint,
    load_graph,
    load_graph_dir,
    load_split,
    predict_link,
    save_checkpoint,
    save_split,
    split_edges,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DisenlinkError",
    "EdgeSplit",
    "EpochTrace",
    "Graph",
    "ModelState",
    "TrainResult",
    "adamic_adar",
    "auc",
    "common_neighbors",
    "compute_embeddings",
    "correlation_matrix",
    "dataset_presets",
    "edge_homophily",
    "evaluate",
    "evaluate_baseline",
    "generate_dataset",
    "load_checkpoint",
    "load_graph",
    "load_graph_dir",
    "load_split",
    "predict_link",
    "save_checkpoint",
    "save_split",
    "split_edges",
    "train",
]
