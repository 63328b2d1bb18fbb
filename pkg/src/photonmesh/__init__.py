"""photonmesh: simulate and train photonic interferometer-mesh neural networks.

The engine propagates complex amplitudes window by window through
programmable meshes (sliced propagation) and computes exact phase gradients
from locally cached signals, so training never assembles the full mesh
transfer matrix.  A dense transfer-matrix oracle is included for verification
and as the cost baseline.
"""

from .data import Dataset, Splits, load_csv, load_named, split
from .dense import layer_matrix, mesh_matrix, random_phases
from .estimator import PhotonicClassifier
from .model import (
    Model,
    build_benchmark_model,
    cross_entropy_loss,
    load_model,
    model_backward,
    model_forward,
    save_model,
)
from .numeric import (
    cmul,
    dense_apply,
    dense_matmul,
    hermitian_deviation,
    mat2_apply,
)
from .slicing import backward_batch, forward_batch, process_mesh, process_window
from .topology import (
    Cell,
    FldzhyanBlock,
    MeshTopology,
    MziBlock,
    PhaseStore,
    Window,
    block_matrix,
    build_clements,
    build_fldzhyan,
    build_mesh,
    format_topology,
    validate_topology,
)
from .train import TrainConfig, evaluate, fit_arrays, rmsprop_step, train

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "Dataset",
    "FldzhyanBlock",
    "MeshTopology",
    "Model",
    "MziBlock",
    "PhaseStore",
    "PhotonicClassifier",
    "Splits",
    "TrainConfig",
    "Window",
    "backward_batch",
    "block_matrix",
    "build_benchmark_model",
    "build_clements",
    "build_fldzhyan",
    "build_mesh",
    "cmul",
    "cross_entropy_loss",
    "dense_apply",
    "dense_matmul",
    "evaluate",
    "fit_arrays",
    "format_topology",
    "forward_batch",
    "hermitian_deviation",
    "layer_matrix",
    "load_csv",
    "load_model",
    "load_named",
    "mat2_apply",
    "mesh_matrix",
    "model_backward",
    "model_forward",
    "process_mesh",
    "process_window",
    "random_phases",
    "rmsprop_step",
    "save_model",
    "split",
    "train",
    "validate_topology",
]
