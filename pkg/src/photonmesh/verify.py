"""Property checks shared by the ``verify`` CLI command and the acceptance tests.

Each check returns CheckResult rows; a build is correct iff every row passes.
The grids and tolerances here are the package's release gate:

* sliced propagation matches the dense transfer-matrix oracle to 1e-12,
* every assembled mesh matrix is unitary to 1e-10,
* analytic gradients of full classifier models match central finite
  differences (h = 1e-6) to 1e-5 relative (1e-9 absolute near zero),
* the documented 4x4 single-phase window layout is reproduced exactly,
* sliced wall time and engine memory stay inside their scaling envelopes
  while the dense baseline exhibits its super-quadratic growth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dense import BufferCounter, mesh_matrix, random_phases
from .model import build_benchmark_model, cross_entropy_loss, model_backward, model_forward
from .numeric import dense_apply, hermitian_deviation
from .slicing import MemoryCounter, backward_batch, forward_batch, process_mesh
from .topology import CLEMENTS, FLDZHYAN, build_fldzhyan, build_mesh

ORACLE_NI = (2, 3, 4, 8, 16, 32, 64)
ORACLE_SEEDS = 20
ORACLE_TOL = 1e-12
UNITARITY_TOL = 1e-10

GRADIENT_NI = (4, 8, 16)
GRADIENT_SEEDS = 5
GRADIENT_REL_TOL = 1e-5
GRADIENT_ABS_TOL = 1e-9
FD_STEP = 1e-6

SCALING_SIZES = (32, 64, 128, 256)
DENSE_SIZES = (32, 64, 128)
SLICED_TIME_RATIO_MAX = 5.0
DENSE_TIME_RATIO_MIN = 6.0
SLICED_MEM_RATIO_MAX = 2.5
DENSE_MEM_RATIO_MIN = 3.5


@dataclass
class CheckResult:
    name: str
    config: str
    ok: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.name:<22} {self.config:<34} {self.detail}"


def _nl_values(ni: int):
    return sorted({1, 2, ni})


def oracle_and_unitarity_checks(
    ni_values=ORACLE_NI, seeds: int = ORACLE_SEEDS
) -> list[CheckResult]:
    """Criteria: engine/oracle agreement and mesh unitarity over the size grid."""
    results = []
    for kind in (FLDZHYAN, CLEMENTS):
        for ni in ni_values:
            for nl in _nl_values(ni):
                t = build_mesh(kind, ni, nl)
                worst_diff = 0.0
                worst_dev = 0.0
                for seed in range(seeds):
                    phases = random_phases(t, seed)
                    u = mesh_matrix(t, phases)
                    worst_dev = max(worst_dev, hermitian_deviation(u))
                    rng = np.random.default_rng(10_000 + seed)
                    x = rng.standard_normal(ni) + 1j * rng.standard_normal(ni)
                    y_sliced = process_mesh(x, t, phases)
                    y_dense = dense_apply(u, x)
                    worst_diff = max(worst_diff, float(np.max(np.abs(y_sliced - y_dense))))
                    yb, _ = forward_batch(x[None, :], t, phases)
                    worst_diff = max(worst_diff, float(np.max(np.abs(yb[0] - y_sliced))))
                cfg = f"kind={kind} ni={ni} nl={nl}"
                results.append(
                    CheckResult(
                        "oracle-equivalence",
                        cfg,
                        worst_diff <= ORACLE_TOL,
                        f"max|diff|={worst_diff:.3e} (tol {ORACLE_TOL:.0e})",
                    )
                )
                results.append(
                    CheckResult(
                        "unitarity",
                        cfg,
                        worst_dev <= UNITARITY_TOL,
                        f"max dev={worst_dev:.3e} (tol {UNITARITY_TOL:.0e})",
                    )
                )
    return results


def finite_difference_grads(loss_fn, params: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central differences of a scalar function of the flat parameter vector.

    Independent of the analytic backward pass: only forward evaluations.
    """
    g = np.zeros_like(params)
    for i in range(params.size):
        orig = params[i]
        params[i] = orig + h
        hi = loss_fn()
        params[i] = orig - h
        lo = loss_fn()
        params[i] = orig
        g[i] = (hi - lo) / (2.0 * h)
    return g


def gradient_tolerance_ok(analytic: np.ndarray, fd: np.ndarray, rel: float, abs_tol: float):
    """Mixed-tolerance comparison; returns (ok, worst excess ratio, worst index)."""
    err = np.abs(analytic - fd)
    allowed = np.maximum(rel * np.abs(fd), abs_tol)
    ratio = err / allowed
    worst = int(np.argmax(ratio))
    return bool(np.all(ratio <= 1.0)), float(ratio[worst]), worst


def gradient_checks(
    ni_values=GRADIENT_NI,
    seeds: int = GRADIENT_SEEDS,
    batch: int = 3,
    rel: float = GRADIENT_REL_TOL,
    abs_tol: float = GRADIENT_ABS_TOL,
) -> list[CheckResult]:
    """Criterion: every phase/bias/gain gradient of the full classifier model
    matches central finite differences."""
    results = []
    for kind in (FLDZHYAN, CLEMENTS):
        for ni in ni_values:
            worst_excess = 0.0
            ok_all = True
            for seed in range(seeds):
                num_classes = min(ni, 3 + seed % 2)
                m = build_benchmark_model(kind, ni, ni, num_classes, seed=seed)
                rng = np.random.default_rng(777 + seed)
                X = rng.uniform(0.0, 1.0, size=(batch, ni))
                y = rng.integers(0, num_classes, size=batch)

                def loss_fn():
                    logits, _ = model_forward(m, X)
                    return cross_entropy_loss(logits, y).value

                logits, caches = model_forward(m, X)
                analytic = model_backward(m, caches, y)
                fd = finite_difference_grads(loss_fn, m.params)
                ok, excess, _ = gradient_tolerance_ok(analytic, fd, rel, abs_tol)
                ok_all = ok_all and ok
                worst_excess = max(worst_excess, excess)
            results.append(
                CheckResult(
                    "gradient-fd",
                    f"kind={kind} ni={ni} nl={ni}",
                    ok_all,
                    f"worst err/tol={worst_excess:.3f} (<=1 passes)",
                )
            )
    return results


# The documented window layout of the 4x4 single-phase mesh: per window, the
# cell pattern top to bottom and the (layer, block) ids of the active cells.
FLDZHYAN_4X4_LAYOUT = [
    [("active", 0, 0), ("active", 0, 1)],
    [("bypass",), ("active", 1, 0), ("bypass",)],
    [("active", 2, 0), ("active", 2, 1)],
    [("bypass",), ("active", 3, 0), ("bypass",)],
]


def table_layout_check() -> CheckResult:
    """Criterion: build_fldzhyan(4, 4) reproduces the documented cell table."""
    t = build_fldzhyan(4, 4)
    got = [
        [
            ("active", c.layer_index, c.block_index) if c.is_active else ("bypass",)
            for c in w.cells
        ]
        for w in t.windows
    ]
    ok = got == FLDZHYAN_4X4_LAYOUT and t.num_params == 6
    return CheckResult(
        "window-layout-4x4",
        "kind=fldzhyan ni=4 nl=4",
        ok,
        "layout matches" if ok else f"layout mismatch: {got}, num_params={t.num_params}",
    )


def _time_sliced(ni: int, batch: int, reps: int, seed: int) -> float:
    t = build_mesh(FLDZHYAN, ni, ni)
    phases = random_phases(t, seed)
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((batch, ni)) + 1j * rng.standard_normal((batch, ni))
    cot = rng.standard_normal((batch, ni)) + 1j * rng.standard_normal((batch, ni))
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        _, tape = forward_batch(xs, t, phases)
        backward_batch(tape, t, phases, cot)
        best = min(best, time.perf_counter() - t0)
    return best


def _time_dense_assembly(ni: int, reps: int, seed: int) -> float:
    t = build_mesh(FLDZHYAN, ni, ni)
    phases = random_phases(t, seed)
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        mesh_matrix(t, phases)
        best = min(best, time.perf_counter() - t0)
    return best


def _mem_sliced(ni: int, nl: int, batch: int, seed: int) -> int:
    t = build_mesh(FLDZHYAN, ni, nl)
    phases = random_phases(t, seed)
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((batch, ni)) + 1j * rng.standard_normal((batch, ni))
    cot = rng.standard_normal((batch, ni)) + 1j * rng.standard_normal((batch, ni))
    mem = MemoryCounter()
    _, tape = forward_batch(xs, t, phases, mem_counter=mem)
    backward_batch(tape, t, phases, cot, mem_counter=mem)
    return mem.peak


def _mem_dense(ni: int, nl: int, seed: int) -> int:
    t = build_mesh(FLDZHYAN, ni, nl)
    phases = random_phases(t, seed)
    counter = BufferCounter()
    mesh_matrix(t, phases, counter=counter)
    return counter.peak


def scaling_checks(
    sizes=SCALING_SIZES,
    dense_sizes=DENSE_SIZES,
    batch: int = 64,
    mem_nl: int = 8,
    reps: int = 3,
    seed: int = 0,
) -> list[CheckResult]:
    """Criterion: per-doubling growth envelopes for time and engine memory.

    Wall time runs at nl=ni (square meshes).  Memory doubles ni at fixed nl so
    the measured growth isolates storage class: sliced buffers are linear in
    ni, dense matrices quadratic.
    """
    results = []
    sliced_t = [_time_sliced(ni, batch, reps, seed) for ni in sizes]
    for a, b, lo, hi in zip(sizes, sizes[1:], sliced_t, sliced_t[1:]):
        r = hi / lo
        results.append(
            CheckResult(
                "scaling-time-sliced",
                f"ni {a}->{b} nl=ni batch={batch}",
                r <= SLICED_TIME_RATIO_MAX,
                f"ratio={r:.2f} (<= {SLICED_TIME_RATIO_MAX})",
            )
        )
    dense_t = [_time_dense_assembly(ni, reps, seed) for ni in dense_sizes]
    for a, b, lo, hi in zip(dense_sizes, dense_sizes[1:], dense_t, dense_t[1:]):
        r = hi / lo
        results.append(
            CheckResult(
                "scaling-time-dense",
                f"ni {a}->{b} nl=ni",
                r >= DENSE_TIME_RATIO_MIN,
                f"ratio={r:.2f} (>= {DENSE_TIME_RATIO_MIN})",
            )
        )
    sliced_m = [_mem_sliced(ni, mem_nl, batch, seed) for ni in sizes]
    for a, b, lo, hi in zip(sizes, sizes[1:], sliced_m, sliced_m[1:]):
        r = hi / lo
        results.append(
            CheckResult(
                "scaling-mem-sliced",
                f"ni {a}->{b} nl={mem_nl} batch={batch}",
                r <= SLICED_MEM_RATIO_MAX,
                f"ratio={r:.2f} (<= {SLICED_MEM_RATIO_MAX})",
            )
        )
    dense_m = [_mem_dense(ni, mem_nl, seed) for ni in dense_sizes]
    for a, b, lo, hi in zip(dense_sizes, dense_sizes[1:], dense_m, dense_m[1:]):
        r = hi / lo
        results.append(
            CheckResult(
                "scaling-mem-dense",
                f"ni {a}->{b} nl={mem_nl}",
                r >= DENSE_MEM_RATIO_MIN,
                f"ratio={r:.2f} (>= {DENSE_MEM_RATIO_MIN})",
            )
        )
    return results


def run_all_checks() -> list[CheckResult]:
    results = [table_layout_check()]
    results += oracle_and_unitarity_checks()
    results += gradient_checks()
    results += scaling_checks()
    return results


def focused_check(kind: str, ni: int, nl: int, seed: int, corrupt: bool = False) -> list[CheckResult]:
    """Run the equivalence and unitarity checks for exactly one configuration.

    ``corrupt`` is a test hook: it perturbs the phases fed to the sliced
    engine (but not the oracle), which must make the equivalence check fail.
    """
    t = build_mesh(kind, ni, nl)
    phases = random_phases(t, seed)
    u = mesh_matrix(t, phases)
    dev = hermitian_deviation(u)
    engine_phases = phases
    if corrupt and t.num_params:
        engine_phases = phases.copy()
        engine_phases.values[0] += 0.1
    rng = np.random.default_rng(10_000 + seed)
    x = rng.standard_normal(ni) + 1j * rng.standard_normal(ni)
    diff = float(np.max(np.abs(process_mesh(x, t, engine_phases) - dense_apply(u, x))))
    cfg = f"kind={kind} ni={ni} nl={nl} seed={seed}"
    return [
        CheckResult(
            "oracle-equivalence",
            cfg,
            diff <= ORACLE_TOL,
            f"max|diff|={diff:.3e} (tol {ORACLE_TOL:.0e})",
        ),
        CheckResult(
            "unitarity", cfg, dev <= UNITARITY_TOL, f"dev={dev:.3e} (tol {UNITARITY_TOL:.0e})"
        ),
    ]
