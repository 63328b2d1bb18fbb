"""Full transfer-matrix construction, used as ground truth for the sliced engine.

Each window becomes an ni x ni layer matrix (blocks on the diagonal at their
port offsets, exact 1 on bypass ports) and the mesh matrix is the chain
product applied window 0 first, i.e. U = L[nl-1] @ ... @ L[1] @ L[0].  The
cost is deliberately cubic per product: this module is the correctness
reference and the scaling baseline, not a fast path.
"""

from __future__ import annotations

import numpy as np

from .numeric import DenseComplexMatrix, dense_matmul
from .topology import MeshTopology, PhaseStore, Window, block_matrix

_BYTES_PER_ENTRY = 16  # complex128


class BufferCounter:
    """Tracks bytes of working storage a caller allocates; peak is monotone."""

    def __init__(self):
        self.current = 0
        self.peak = 0

    def add(self, nbytes: int) -> None:
        self.current += nbytes
        self.peak = max(self.peak, self.current)

    def release(self, nbytes: int) -> None:
        self.current -= nbytes


def layer_matrix(w: Window, phases: PhaseStore, ni: int) -> DenseComplexMatrix:
    """ni x ni transfer matrix of one window."""
    if w.port_count != ni:
        raise ValueError(f"window covers {w.port_count} ports, expected ni={ni}")
    m = np.eye(ni, dtype=np.complex128)
    p = 0
    for cell in w.cells:
        if cell.is_active:
            m[p : p + 2, p : p + 2] = block_matrix(cell.block, phases)
            p += 2
        else:
            p += 1
    return m


def mesh_matrix(
    t: MeshTopology, phases: PhaseStore, counter: BufferCounter | None = None
) -> DenseComplexMatrix:
    """Chain product of all layer matrices, window 0 applied first."""
    if len(phases) != t.num_params:
        raise ValueError(
            f"phase store has {len(phases)} entries, topology needs {t.num_params}"
        )
    size = t.ni * t.ni * _BYTES_PER_ENTRY
    u = np.eye(t.ni, dtype=np.complex128)
    if counter is not None:
        counter.add(size)
    for w in t.windows:
        layer = layer_matrix(w, phases, t.ni)
        if counter is not None:
            counter.add(size)  # the layer
            counter.add(size)  # the product temporary
        u = dense_matmul(layer, u)
        if counter is not None:
            counter.release(2 * size)  # layer and previous accumulator freed
    return u


def random_phases(t: MeshTopology, seed: int) -> PhaseStore:
    """Deterministic phases, uniform in [0, 2*pi), driven only by the seed."""
    rng = np.random.default_rng(seed)
    return PhaseStore(rng.uniform(0.0, 2.0 * np.pi, t.num_params))


def format_matrix(m: DenseComplexMatrix) -> str:
    """Rows of comma-separated ``re+imj`` literals, row-major."""
    rows = []
    for row in np.asarray(m, dtype=np.complex128):
        rows.append(",".join(f"{z.real:+.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(rows)
