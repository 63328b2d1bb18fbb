"""Window-sliced signal propagation and its analytic backward pass.

The forward pass walks each window's cells with a port cursor; an active cell
applies its 2x2 block to two adjacent amplitudes, a bypass copies one through.
No full mesh matrix is ever materialized: working storage is one length-ni
signal buffer per step plus, in training mode, the per-window input vectors
recorded on a tape.

The backward pass consumes the tape window by window in reverse.  Cotangents
use the packed real convention d = dL/dRe(y) + j*dL/dIm(y), under which a
linear block transports cotangents by its conjugate transpose and the gradient
of a real phase is sum_m Re(conj(d_m) * dy_m/dtheta).  For the single-phase
block with cached input u this gives the local derivatives
(j/sqrt2)*e^{j theta}*u on the top port and (-1/sqrt2)*e^{j theta}*u on the
bottom one; the MZI derivatives follow from differentiating its entries in
theta and phi.  Per-parameter contributions are summed (not averaged) over the
batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numeric import ComplexVector, mat2_apply
from .topology import (
    FldzhyanBlock,
    MeshTopology,
    MziBlock,
    PhaseStore,
    Window,
    block_matrix,
)

_SQRT2 = np.sqrt(2.0)
_BYTES_PER_ENTRY = 16  # complex128

# Abstract cost constants for the operation-count probe: a 2x2 complex
# matvec plus phase evaluation per active cell, one copy per bypass.
ACTIVE_CELL_OPS = 32
BYPASS_CELL_OPS = 1

GradientStore = np.ndarray  # float64, same indexing as PhaseStore


class OpCounter:
    """Accumulates the abstract operation count of engine walks."""

    def __init__(self):
        self.ops = 0

    def add_cells(self, n_active: int, n_bypass: int, batch: int = 1) -> None:
        self.ops += batch * (n_active * ACTIVE_CELL_OPS + n_bypass * BYPASS_CELL_OPS)


class MemoryCounter:
    """Tracks engine buffer bytes (signal buffers plus tape); peak is monotone."""

    def __init__(self):
        self.current = 0
        self.peak = 0

    def add(self, nbytes: int) -> None:
        self.current += nbytes
        self.peak = max(self.peak, self.current)

    def release(self, nbytes: int) -> None:
        self.current -= nbytes


@dataclass
class Tape:
    """Per-window inputs recorded by the most recent batched forward pass."""

    topology: MeshTopology
    phase_snapshot: np.ndarray
    window_inputs: list = field(default_factory=list)  # one (batch, ni) array per window
    batch_size: int = 0


# ---------------------------------------------------------------------------
# Scalar reference path (one sample, literal cell walk)
# ---------------------------------------------------------------------------


def process_window(
    x: ComplexVector, w: Window, phases: PhaseStore, op_counter: OpCounter | None = None
) -> ComplexVector:
    """Propagate one sample through one window."""
    y = np.array(x, dtype=np.complex128, copy=True)
    p = 0
    n_active = 0
    n_bypass = 0
    for cell in w.cells:
        if cell.is_active:
            y0, y1 = mat2_apply(block_matrix(cell.block, phases), x[p], x[p + 1])
            y[p] = y0
            y[p + 1] = y1
            p += 2
            n_active += 1
        else:
            p += 1
            n_bypass += 1
    if op_counter is not None:
        op_counter.add_cells(n_active, n_bypass)
    return y


def process_mesh(
    x: ComplexVector,
    t: MeshTopology,
    phases: PhaseStore,
    op_counter: OpCounter | None = None,
) -> ComplexVector:
    """Propagate one sample through all windows in order."""
    y = np.asarray(x, dtype=np.complex128)
    if y.shape != (t.ni,):
        raise ValueError(f"input has shape {y.shape}, expected ({t.ni},)")
    for w in t.windows:
        y = process_window(y, w, phases, op_counter)
    return y


# ---------------------------------------------------------------------------
# Batched path (vectorized over samples, used by training)
# ---------------------------------------------------------------------------


@dataclass
class _CellGroup:
    mzi: bool
    ports: np.ndarray  # top-port index of each active cell
    theta: np.ndarray  # parameter indices
    phi: np.ndarray | None


@dataclass
class _CompiledWindow:
    groups: list
    n_active: int
    n_bypass: int


def _compile_window(w: Window) -> _CompiledWindow:
    single: list[tuple[int, int]] = []  # (port, theta)
    mzi: list[tuple[int, int, int]] = []  # (port, theta, phi)
    p = 0
    n_bypass = 0
    for cell in w.cells:
        if cell.is_active:
            b = cell.block
            if isinstance(b, FldzhyanBlock):
                single.append((p, b.theta_index))
            elif isinstance(b, MziBlock):
                mzi.append((p, b.theta_index, b.phi_index))
            else:
                raise TypeError(f"unsupported block type {type(b).__name__}")
            p += 2
        else:
            p += 1
            n_bypass += 1
    groups = []
    if single:
        ports, theta = (np.array(a, dtype=np.intp) for a in zip(*single))
        groups.append(_CellGroup(False, ports, theta, None))
    if mzi:
        ports, theta, phi = (np.array(a, dtype=np.intp) for a in zip(*mzi))
        groups.append(_CellGroup(True, ports, theta, phi))
    return _CompiledWindow(groups, len(single) + len(mzi), n_bypass)


def _compiled(t: MeshTopology) -> list:
    # Cached on the topology object; windows are immutable after build.
    cached = getattr(t, "_compiled_windows", None)
    if cached is None:
        cached = [_compile_window(w) for w in t.windows]
        object.__setattr__(t, "_compiled_windows", cached)
    return cached


def _mzi_entries(theta: np.ndarray, phi: np.ndarray):
    et = np.exp(1j * theta)
    ep = np.exp(1j * phi)
    etp = et * ep
    a = 0.5 * (etp - et)
    b = 0.5j * (etp + et)
    c = 0.5j * (ep + 1.0)
    d = -0.5 * (ep - 1.0)
    return a, b, c, d, ep, etp


def forward_batch(
    xs,
    t: MeshTopology,
    phases: PhaseStore,
    op_counter: OpCounter | None = None,
    mem_counter: MemoryCounter | None = None,
):
    """Propagate a (batch, ni) array of samples; returns (outputs, tape)."""
    y = np.asarray(xs, dtype=np.complex128)
    if y.ndim != 2 or y.shape[1] != t.ni:
        raise ValueError(f"batch has shape {y.shape}, expected (batch, {t.ni})")
    if y.shape[0] == 0:
        raise ValueError("empty batch")
    if len(phases) != t.num_params:
        raise ValueError(
            f"phase store has {len(phases)} entries, topology needs {t.num_params}"
        )
    batch = y.shape[0]
    buf_bytes = batch * t.ni * _BYTES_PER_ENTRY
    tape = Tape(topology=t, phase_snapshot=phases.values.copy(), batch_size=batch)
    th = phases.values
    for cw in _compiled(t):
        tape.window_inputs.append(y)
        out = y.copy()
        if mem_counter is not None:
            mem_counter.add(buf_bytes)  # retained: previous buffer lives on the tape
        for g in cw.groups:
            u = y[:, g.ports]
            v = y[:, g.ports + 1]
            if g.mzi:
                a, b, c, d, _, _ = _mzi_entries(th[g.theta], th[g.phi])
                out[:, g.ports] = a * u + b * v
                out[:, g.ports + 1] = c * u + d * v
            else:
                e = np.exp(1j * th[g.theta])
                out[:, g.ports] = (e * u + 1j * v) / _SQRT2
                out[:, g.ports + 1] = (1j * e * u + v) / _SQRT2
        if op_counter is not None:
            op_counter.add_cells(cw.n_active, cw.n_bypass, batch)
        y = out
    return y, tape


def backward_batch(
    tape: Tape,
    t: MeshTopology,
    phases: PhaseStore,
    output_cotangents,
    mem_counter: MemoryCounter | None = None,
):
    """Walk windows in reverse; returns (input_cotangents, gradient array).

    Gradients are summed over the batch.  The tape must come from a
    forward_batch over the same topology at the same phase values.
    """
    if tape.topology is not t:
        raise ValueError("tape was recorded for a different topology")
    if not np.array_equal(tape.phase_snapshot, phases.values):
        raise ValueError("phase values changed since the tape was recorded")
    d = np.asarray(output_cotangents, dtype=np.complex128)
    if d.shape != (tape.batch_size, t.ni):
        raise ValueError(
            f"cotangents have shape {d.shape}, expected ({tape.batch_size}, {t.ni})"
        )
    grads = np.zeros(t.num_params, dtype=np.float64)
    buf_bytes = tape.batch_size * t.ni * _BYTES_PER_ENTRY
    th = phases.values
    compiled = _compiled(t)
    for w_idx in range(len(compiled) - 1, -1, -1):
        cw = compiled[w_idx]
        x_in = tape.window_inputs[w_idx]
        nxt = d.copy()
        if mem_counter is not None:
            mem_counter.add(buf_bytes)
            mem_counter.release(buf_bytes)  # previous cotangent buffer dropped
        for g in cw.groups:
            u = x_in[:, g.ports]
            dp = d[:, g.ports]
            dq = d[:, g.ports + 1]
            if g.mzi:
                v = x_in[:, g.ports + 1]
                a, b, c, dd, ep, etp = _mzi_entries(th[g.theta], th[g.phi])
                yp = a * u + b * v
                grads[g.theta] += np.sum((np.conj(dp) * 1j * yp).real, axis=0)
                dyp = 0.5 * etp * (1j * u - v)
                dyq = -0.5 * ep * (u + 1j * v)
                grads[g.phi] += np.sum(
                    (np.conj(dp) * dyp + np.conj(dq) * dyq).real, axis=0
                )
                nxt[:, g.ports] = np.conj(a) * dp + np.conj(c) * dq
                nxt[:, g.ports + 1] = np.conj(b) * dp + np.conj(dd) * dq
            else:
                e = np.exp(1j * th[g.theta])
                local = (e / _SQRT2) * u
                grads[g.theta] += np.sum(
                    (np.conj(dp) * 1j * local - np.conj(dq) * local).real, axis=0
                )
                nxt[:, g.ports] = np.conj(e) * (dp - 1j * dq) / _SQRT2
                nxt[:, g.ports + 1] = (-1j * dp + dq) / _SQRT2
        d = nxt
    return d, grads
