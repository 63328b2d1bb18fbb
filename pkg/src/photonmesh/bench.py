"""Scaling benchmarks: sliced engine versus dense transfer-matrix baseline.

Two scenarios mirror the evaluation protocol of the engine's design:

* batch scenario - mesh size fixed, batch size swept; larger batches amortize
  per-window dispatch so epoch time should fall as batch grows.
* mesh scenario - batch fixed, mesh size swept; sliced work grows ~ni*nl per
  sample while the dense baseline reassembles an ni x ni matrix chain.

Each measurement is one epoch-equivalent (a fixed total number of samples) of
forward plus backward for the sliced engine, and of mesh-matrix assembly plus
application for the dense baseline (the dense path has no cheap backward; its
assembly cost is exactly what the sliced engine avoids).  The benchmark
circuit is two meshes in series followed by photodetection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dense import BufferCounter, mesh_matrix, random_phases
from .model import detect_intensity
from .slicing import MemoryCounter, backward_batch, forward_batch
from .topology import build_mesh

CSV_HEADER = "scenario,engine,ni,nl,batch,secs,peak_bytes"

DESK_BATCH_NI = 256
FULL_BATCH_NI = 800
BATCH_SIZES = (64, 128, 256, 512)
DESK_MESH_SIZES = (32, 64, 128, 256)
FULL_MESH_SIZES = (100, 300, 500, 700, 900)
MESH_SCENARIO_BATCH = 128
DEFAULT_SAMPLES = 512
DEFAULT_DENSE_CAP = 256


@dataclass
class BenchRecord:
    scenario: str  # "batch" or "mesh"
    engine: str  # "sliced" or "dense"
    ni: int
    nl: int
    batch: int
    secs: float
    peak_bytes: int

    def csv_row(self) -> str:
        return (
            f"{self.scenario},{self.engine},{self.ni},{self.nl},"
            f"{self.batch},{self.secs:.6f},{self.peak_bytes}"
        )


def _batches(samples: int, batch: int):
    sizes = []
    left = samples
    while left > 0:
        sizes.append(min(batch, left))
        left -= batch
    return sizes


def sliced_epoch(kind: str, ni: int, nl: int, batch: int, samples: int, seed: int):
    """Forward+backward one epoch-equivalent through the two-mesh circuit."""
    t1 = build_mesh(kind, ni, nl)
    t2 = build_mesh(kind, ni, nl)
    p1 = random_phases(t1, seed)
    p2 = random_phases(t2, seed + 1)
    rng = np.random.default_rng(seed)
    mem = MemoryCounter()
    t0 = time.perf_counter()
    for b in _batches(samples, batch):
        xs = rng.uniform(0.0, 1.0, size=(b, ni)).astype(np.complex128)
        y1, tape1 = forward_batch(xs, t1, p1, mem_counter=mem)
        y2, tape2 = forward_batch(y1, t2, p2, mem_counter=mem)
        intensity = detect_intensity(y2)
        # loss seed: pull every intensity toward zero, scaled by batch size
        d = (2.0 * intensity / b) * y2
        d, _ = backward_batch(tape2, t2, p2, d, mem_counter=mem)
        backward_batch(tape1, t1, p1, d, mem_counter=mem)
    return time.perf_counter() - t0, mem.peak


def dense_epoch(kind: str, ni: int, nl: int, batch: int, samples: int, seed: int):
    """Assemble both mesh matrices and apply them, once per batch."""
    t1 = build_mesh(kind, ni, nl)
    t2 = build_mesh(kind, ni, nl)
    p1 = random_phases(t1, seed)
    p2 = random_phases(t2, seed + 1)
    rng = np.random.default_rng(seed)
    counter = BufferCounter()
    t0 = time.perf_counter()
    for b in _batches(samples, batch):
        xs = rng.uniform(0.0, 1.0, size=(b, ni)).astype(np.complex128)
        u1 = mesh_matrix(t1, p1, counter=counter)
        u2 = mesh_matrix(t2, p2, counter=counter)
        counter.add(2 * b * ni * 16)
        y = np.einsum("ij,bj->bi", u2, np.einsum("ij,bj->bi", u1, xs))
        detect_intensity(y)
        counter.release(2 * b * ni * 16)
        counter.release(2 * ni * ni * 16)  # both mesh matrices dropped
    return time.perf_counter() - t0, counter.peak


def run_batch_scenario(
    kind: str,
    ni: int,
    nl: int,
    batch_sizes=BATCH_SIZES,
    samples: int = DEFAULT_SAMPLES,
    engines=("sliced", "dense"),
    dense_cap: int = DEFAULT_DENSE_CAP,
    seed: int = 0,
) -> list[BenchRecord]:
    records = []
    for batch in batch_sizes:
        if "sliced" in engines:
            secs, peak = sliced_epoch(kind, ni, nl, batch, samples, seed)
            records.append(BenchRecord("batch", "sliced", ni, nl, batch, secs, peak))
        if "dense" in engines and ni <= dense_cap:
            secs, peak = dense_epoch(kind, ni, nl, batch, samples, seed)
            records.append(BenchRecord("batch", "dense", ni, nl, batch, secs, peak))
    return records


def run_mesh_scenario(
    kind: str,
    sizes=DESK_MESH_SIZES,
    batch: int = MESH_SCENARIO_BATCH,
    samples: int = DEFAULT_SAMPLES,
    engines=("sliced", "dense"),
    dense_cap: int = DEFAULT_DENSE_CAP,
    seed: int = 0,
) -> list[BenchRecord]:
    records = []
    for ni in sizes:
        nl = ni
        if "sliced" in engines:
            secs, peak = sliced_epoch(kind, ni, nl, batch, samples, seed)
            records.append(BenchRecord("mesh", "sliced", ni, nl, batch, secs, peak))
        if "dense" in engines and ni <= dense_cap:
            secs, peak = dense_epoch(kind, ni, nl, batch, samples, seed)
            records.append(BenchRecord("mesh", "dense", ni, nl, batch, secs, peak))
    return records


def write_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(CSV_HEADER + "\n")
        for r in records:
            f.write(r.csv_row() + "\n")
