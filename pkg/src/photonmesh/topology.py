"""Optical block definitions and window/cell decomposition of rectangular meshes.

A mesh with ``ni`` ports and ``nl`` layers is decomposed into ``nl`` processing
windows.  Each window is an ordered list of cells walked top port to bottom
port: an active cell wraps one 2x2 optical block and consumes two ports, a
bypass cell is a pass-through on a single port.  Two block families are
supported: a single-parameter block (beam splitter followed by one phase
shifter) and the two-parameter MZI block (two beam splitters, two phase
shifters).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numeric import Matrix2, require_finite

_SQRT2 = np.sqrt(2.0)

FLDZHYAN = "fldzhyan"
CLEMENTS = "clements"


@dataclass(frozen=True)
class FldzhyanBlock:
    """Beam splitter followed by a phase shifter; one tunable phase."""

    theta_index: int

    @property
    def param_indices(self) -> tuple[int, ...]:
        return (self.theta_index,)


@dataclass(frozen=True)
class MziBlock:
    """Full Mach-Zehnder interferometer; two tunable phases (theta, phi)."""

    theta_index: int
    phi_index: int

    @property
    def param_indices(self) -> tuple[int, ...]:
        return (self.theta_index, self.phi_index)


Block = FldzhyanBlock | MziBlock


@dataclass(frozen=True)
class Cell:
    """Uniform wrapper around one window element.

    Active cells carry a block plus its (layer, block) position; bypass cells
    carry nothing and copy a single port through unchanged.
    """

    block: Block | None = None
    layer_index: int | None = None
    block_index: int | None = None

    @property
    def is_active(self) -> bool:
        return self.block is not None

    @property
    def port_span(self) -> int:
        return 2 if self.is_active else 1


BYPASS = Cell()


@dataclass(frozen=True)
class Window:
    """One processing slice of the mesh: an ordered list of cells."""

    cells: tuple[Cell, ...]

    @property
    def port_count(self) -> int:
        return sum(c.port_span for c in self.cells)


@dataclass(frozen=True)
class MeshTopology:
    """Window/cell decomposition of a mesh plus its parameter layout.

    ``num_params`` counts the tunable phases across all active cells; each
    parameter index in ``0..num_params-1`` belongs to exactly one block.
    """

    kind: str
    ni: int
    nl: int
    windows: tuple[Window, ...]
    num_params: int

    def active_cells(self):
        for w in self.windows:
            for c in w.cells:
                if c.is_active:
                    yield c


class PhaseStore:
    """Flat array of tunable phases (radians) for one topology.

    Values are stored unwrapped; all block formulas are 2-pi periodic.  The
    length is fixed at construction, entries may be updated in place between
    training steps.
    """

    def __init__(self, values):
        v = np.array(values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError(f"phase store must be 1-D, got shape {v.shape}")
        require_finite(v, "phase store")
        self.values = v

    def __len__(self) -> int:
        return self.values.size

    def copy(self) -> "PhaseStore":
        return PhaseStore(self.values)

    @classmethod
    def zeros(cls, n: int) -> "PhaseStore":
        return cls(np.zeros(n))


def _layer_block_ports(ni: int, layer: int) -> np.ndarray:
    """Top-port indices of the blocks in one layer of the rectangular arrangement.

    Even layers start at port 0, odd layers at port 1; ports not covered by a
    block are bypasses (leading port on odd layers, trailing port whenever the
    remaining width is odd).
    """
    start = layer % 2
    return np.arange(start, ni - 1, 2)


def _build_rectangular(kind: str, ni: int, nl: int) -> MeshTopology:
    if ni < 2:
        raise ValueError(f"need at least 2 ports, got ni={ni}")
    if nl < 1:
        raise ValueError(f"need at least 1 layer, got nl={nl}")
    windows = []
    next_param = 0
    for i in range(nl):
        block_ports = set(_layer_block_ports(ni, i).tolist())
        cells = []
        p = 0
        k = 0
        while p < ni:
            if p in block_ports:
                if kind == FLDZHYAN:
                    block: Block = FldzhyanBlock(next_param)
                    next_param += 1
                else:
                    block = MziBlock(next_param, next_param + 1)
                    next_param += 2
                cells.append(Cell(block, layer_index=i, block_index=k))
                k += 1
                p += 2
            else:
                cells.append(BYPASS)
                p += 1
        windows.append(Window(tuple(cells)))
    return MeshTopology(kind=kind, ni=ni, nl=nl, windows=tuple(windows), num_params=next_param)


def build_fldzhyan(ni: int, nl: int | None = None) -> MeshTopology:
    """Rectangular mesh of single-phase blocks; ``nl`` defaults to ``ni``."""
    return _build_rectangular(FLDZHYAN, ni, ni if nl is None else nl)


def build_clements(ni: int, nl: int | None = None) -> MeshTopology:
    """Rectangular mesh of MZI blocks; ``nl`` defaults to ``ni``."""
    return _build_rectangular(CLEMENTS, ni, ni if nl is None else nl)


def build_mesh(kind: str, ni: int, nl: int | None = None) -> MeshTopology:
    if kind == FLDZHYAN:
        return build_fldzhyan(ni, nl)
    if kind == CLEMENTS:
        return build_clements(ni, nl)
    raise ValueError(f"unknown mesh kind {kind!r} (expected {FLDZHYAN!r} or {CLEMENTS!r})")


def block_matrix(block: Block, phases: PhaseStore) -> Matrix2:
    """2x2 transfer matrix of a block at the current phase values."""
    n = len(phases)
    for idx in block.param_indices:
        if not 0 <= idx < n:
            raise IndexError(f"parameter index {idx} out of range for store of length {n}")
    if isinstance(block, FldzhyanBlock):
        e = np.exp(1j * phases.values[block.theta_index])
        return np.array([[e, 1j], [1j * e, 1.0]], dtype=np.complex128) / _SQRT2
    et = np.exp(1j * phases.values[block.theta_index])
    ep = np.exp(1j * phases.values[block.phi_index])
    etp = et * ep
    return 0.5 * np.array(
        [[etp - et, 1j * (etp + et)], [1j * (ep + 1.0), -(ep - 1.0)]],
        dtype=np.complex128,
    )


def validate_topology(t: MeshTopology) -> list[str]:
    """Return human-readable descriptions of every violated invariant."""
    problems = []
    if len(t.windows) != t.nl:
        problems.append(f"topology has {len(t.windows)} windows but nl={t.nl}")
    for w_idx, w in enumerate(t.windows):
        if w.port_count != t.ni:
            problems.append(
                f"window {w_idx} covers {w.port_count} ports, expected ni={t.ni}"
            )
    seen: dict[int, str] = {}
    for cell in t.active_cells():
        where = f"block ({cell.layer_index},{cell.block_index})"
        for idx in cell.block.param_indices:
            if idx in seen:
                problems.append(
                    f"parameter index {idx} used by both {seen[idx]} and {where}"
                )
            seen[idx] = where
            if not 0 <= idx < t.num_params:
                problems.append(
                    f"parameter index {idx} of {where} outside 0..{t.num_params - 1}"
                )
    missing = set(range(t.num_params)) - set(seen)
    if missing:
        problems.append(f"parameter indices never referenced: {sorted(missing)}")
    return problems


def format_topology(t: MeshTopology) -> str:
    """Text rendering: a header line, then one line per window.

    Cells print as ``B(i,k)`` (active) or ``-`` (bypass), space separated.
    """
    lines = [f"mesh {t.kind} ni={t.ni} nl={t.nl}"]
    for w in t.windows:
        parts = [
            f"B({c.layer_index},{c.block_index})" if c.is_active else "-" for c in w.cells
        ]
        lines.append(" ".join(parts))
    return "\n".join(lines)
