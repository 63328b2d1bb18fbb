"""Trainable model: mesh stages composed with detection and readout stages.

The standard classifier circuit is two meshes in series, photodetectors
converting amplitudes to intensities, a trainable per-port bias, a trainable
per-port gain, and a readout that keeps the first ``num_classes`` ports as
logits.  All trainable parameters (mesh phases, bias, gain) live in one flat
float64 vector sliced per stage in declared order, so the optimizer sees a
single array.

Real input features are encoded as complex amplitudes (imaginary part zero).
An optional per-sample L2 normalization removes brightness variation (unitary
meshes preserve the norm, so only relative amplitudes reach the detectors);
it is off by default because squashing every sample to unit power also
squashes the intensity contrasts the classifier trains on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .slicing import Tape, backward_batch, forward_batch
from .topology import MeshTopology, PhaseStore, build_mesh


@dataclass
class MeshStage:
    topology: MeshTopology
    param_slice: slice | None = None


@dataclass
class PhotodetectorStage:
    pass


@dataclass
class BiasStage:
    width: int
    param_slice: slice | None = None


@dataclass
class DiagonalGainStage:
    width: int
    param_slice: slice | None = None


@dataclass
class ReadoutStage:
    num_classes: int


Stage = MeshStage | PhotodetectorStage | BiasStage | DiagonalGainStage | ReadoutStage


def detect_intensity(x: np.ndarray) -> np.ndarray:
    """Photodetection: squared magnitude of each complex amplitude."""
    return x.real**2 + x.imag**2


def encode_features(X: np.ndarray, normalize: bool):
    """Real features -> complex amplitudes; returns (encoded, per-sample norms)."""
    Z = np.asarray(X, dtype=np.float64)
    norms = np.sqrt(np.sum(Z * Z, axis=1))
    C = Z.astype(np.complex128)
    if normalize:
        C = C / np.where(norms > 0.0, norms, 1.0)[:, None]
    return C, norms


class Model:
    """Ordered stage pipeline with one flat trainable-parameter vector."""

    def __init__(self, stages, ni: int, normalize_inputs: bool = False, init_seed=None):
        self.stages = list(stages)
        self.ni = ni
        self.normalize_inputs = normalize_inputs
        self.init_seed = init_seed
        self.checkpoint_meta = None  # set by build_benchmark_model

        width = ni
        domain = "complex"
        offset = 0
        init_chunks = []
        for s in self.stages:
            if isinstance(s, MeshStage):
                if domain != "complex":
                    raise ValueError("mesh stage after photodetection")
                if s.topology.ni != width:
                    raise ValueError(
                        f"mesh expects {s.topology.ni} ports, pipeline width is {width}"
                    )
                n = s.topology.num_params
                s.param_slice = slice(offset, offset + n)
                init_chunks.append(np.zeros(n))
            elif isinstance(s, PhotodetectorStage):
                if domain != "complex":
                    raise ValueError("photodetector applied twice")
                domain = "real"
                n = 0
            elif isinstance(s, BiasStage):
                if domain != "real":
                    raise ValueError("bias stage requires detected (real) signals")
                if s.width != width:
                    raise ValueError(f"bias width {s.width} != pipeline width {width}")
                n = s.width
                s.param_slice = slice(offset, offset + n)
                init_chunks.append(np.zeros(n))
            elif isinstance(s, DiagonalGainStage):
                if domain != "real":
                    raise ValueError("gain stage requires detected (real) signals")
                if s.width != width:
                    raise ValueError(f"gain width {s.width} != pipeline width {width}")
                n = s.width
                s.param_slice = slice(offset, offset + n)
                init_chunks.append(np.ones(n))
            elif isinstance(s, ReadoutStage):
                if domain != "real":
                    raise ValueError("readout requires detected (real) signals")
                if s.num_classes > width:
                    raise ValueError(
                        f"readout of {s.num_classes} classes exceeds width {width}"
                    )
                width = s.num_classes
                n = 0
            else:
                raise TypeError(f"unknown stage {type(s).__name__}")
            offset += n
        self.num_classes = width
        self.params = (
            np.concatenate(init_chunks) if init_chunks else np.zeros(0, dtype=np.float64)
        )

    @property
    def num_params(self) -> int:
        return self.params.size


@dataclass
class ModelCaches:
    """Everything the backward pass needs from one forward pass."""

    stage_caches: list
    logits: np.ndarray
    input_norms: np.ndarray
    batch_size: int


def model_forward(m: Model, X):
    """Run a (batch, ni) real feature array through the pipeline.

    Returns (logits, caches); logits has shape (batch, num_classes).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != m.ni:
        raise ValueError(f"features have shape {X.shape}, expected (batch, {m.ni})")
    y, norms = encode_features(X, m.normalize_inputs)
    stage_caches = []
    for s in m.stages:
        if isinstance(s, MeshStage):
            phases = PhaseStore(m.params[s.param_slice])
            y, tape = forward_batch(y, s.topology, phases)
            stage_caches.append(tape)
        elif isinstance(s, PhotodetectorStage):
            stage_caches.append(y)  # complex input needed for the backward pass
            y = detect_intensity(y)
        elif isinstance(s, BiasStage):
            stage_caches.append(None)
            y = y + m.params[s.param_slice]
        elif isinstance(s, DiagonalGainStage):
            stage_caches.append(y)  # pre-gain activation
            y = y * m.params[s.param_slice]
        elif isinstance(s, ReadoutStage):
            stage_caches.append(y.shape[1])  # incoming width
            y = y[:, : s.num_classes]
    return y, ModelCaches(stage_caches, y, norms, X.shape[0])


@dataclass
class LossValue:
    """Mean cross-entropy over the batch plus the softmax cache."""

    value: float
    probs: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits, axis=1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=1, keepdims=True)


def cross_entropy_loss(logits, labels) -> LossValue:
    """Mean of -log softmax(logits)[label] over the batch."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    if labels.shape[0] != logits.shape[0]:
        raise ValueError("batch size mismatch between logits and labels")
    if labels.size and (labels.min() < 0 or labels.max() >= logits.shape[1]):
        raise ValueError(
            f"label out of range [0, {logits.shape[1]}): "
            f"min={labels.min()}, max={labels.max()}"
        )
    p = softmax(logits)
    picked = p[np.arange(labels.shape[0]), labels]
    value = float(np.mean(-np.log(picked)))
    return LossValue(value, p)


def loss_cotangents(caches: ModelCaches, labels) -> np.ndarray:
    """d(mean CE)/d(logits): (softmax - onehot) / batch."""
    labels = np.asarray(labels)
    p = softmax(caches.logits)
    p[np.arange(labels.shape[0]), labels] -= 1.0
    return p / caches.batch_size


def model_backward(m: Model, caches: ModelCaches, labels) -> np.ndarray:
    """Gradient of the mean cross-entropy with respect to the flat parameters."""
    if len(caches.stage_caches) != len(m.stages):
        raise ValueError("caches do not match this model's stages")
    grads = np.zeros_like(m.params)
    d = loss_cotangents(caches, labels)  # real, (batch, num_classes)
    for s, cache in zip(reversed(m.stages), reversed(caches.stage_caches)):
        if isinstance(s, ReadoutStage):
            full = np.zeros((d.shape[0], cache), dtype=d.dtype)
            full[:, : s.num_classes] = d
            d = full
        elif isinstance(s, DiagonalGainStage):
            grads[s.param_slice] = np.sum(d * cache, axis=0)
            d = d * m.params[s.param_slice]
        elif isinstance(s, BiasStage):
            grads[s.param_slice] = np.sum(d, axis=0)
        elif isinstance(s, PhotodetectorStage):
            d = 2.0 * d * cache  # cache is the complex pre-detector signal
        elif isinstance(s, MeshStage):
            if not isinstance(cache, Tape):
                raise ValueError("mesh stage cache is not a tape")
            phases = PhaseStore(m.params[s.param_slice])
            d, phase_grads = backward_batch(cache, s.topology, phases, d)
            grads[s.param_slice] = phase_grads
    return grads


def build_benchmark_model(
    mesh_kind: str,
    ni: int,
    nl: int | None = None,
    num_classes: int = 10,
    include_bias_gain: bool = True,
    seed: int = 0,
    normalize_inputs: bool = False,
) -> Model:
    """Two meshes in series, photodetectors, optional bias and gain, readout.

    Phases are initialized uniform in [0, 2*pi) from the seed; bias starts at
    zero and gains at one.  ``include_bias_gain=False`` drops the two trainable
    electronic stages, leaving the bare mesh-plus-detector benchmark circuit.
    """
    if ni < num_classes:
        raise ValueError(f"ni={ni} is smaller than num_classes={num_classes}")
    nl = ni if nl is None else nl
    t1 = build_mesh(mesh_kind, ni, nl)
    t2 = build_mesh(mesh_kind, ni, nl)
    stages: list[Stage] = [MeshStage(t1), MeshStage(t2), PhotodetectorStage()]
    if include_bias_gain:
        stages += [BiasStage(ni), DiagonalGainStage(ni)]
    stages.append(ReadoutStage(num_classes))
    m = Model(stages, ni, normalize_inputs=normalize_inputs, init_seed=seed)
    rng = np.random.default_rng(seed)
    for s in m.stages:
        if isinstance(s, MeshStage):
            m.params[s.param_slice] = rng.uniform(0.0, 2.0 * np.pi, s.topology.num_params)
    m.checkpoint_meta = {
        "mesh_kind": mesh_kind,
        "ni": ni,
        "nl": nl,
        "num_classes": num_classes,
        "include_bias_gain": include_bias_gain,
        "normalize_inputs": normalize_inputs,
        "init_seed": seed,
    }
    return m


CHECKPOINT_VERSION = 1


def save_model(m: Model, path) -> None:
    """Write a JSON checkpoint; floats round-trip exactly via repr."""
    if m.checkpoint_meta is None:
        raise ValueError("only models built by build_benchmark_model can be saved")
    blob = {
        "format_version": CHECKPOINT_VERSION,
        **m.checkpoint_meta,
        "params": [float(v) for v in m.params],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(blob, f)
        f.write("\n")


def load_model(path) -> Model:
    with open(path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    if blob.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {blob.get('format_version')}")
    m = build_benchmark_model(
        blob["mesh_kind"],
        blob["ni"],
        blob["nl"],
        blob["num_classes"],
        include_bias_gain=blob["include_bias_gain"],
        seed=blob["init_seed"],
        normalize_inputs=blob["normalize_inputs"],
    )
    params = np.array(blob["params"], dtype=np.float64)
    if params.size != m.params.size:
        raise ValueError("checkpoint parameter count does not match rebuilt model")
    m.params[:] = params
    return m
