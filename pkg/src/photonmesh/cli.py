"""Command-line entry point: ``verify``, ``bench``, and ``train`` subcommands.

Exit codes: 0 success, 1 check or run failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .data import SCHEMAS, load_named, split
from .dense import format_matrix, mesh_matrix, random_phases
from .model import build_benchmark_model, load_model, save_model
from .topology import CLEMENTS, FLDZHYAN, build_mesh, format_topology
from .train import TrainConfig, evaluate, peak_rss_bytes, train
from .verify import focused_check, run_all_checks

# Per-dataset training presets; any flag overrides its preset.
TRAIN_PRESETS = {
    "iris": {"ni": 4, "epochs": 400, "lr": 2e-3, "batch": 8},
    "digits": {"ni": 64, "epochs": 200, "lr": 5e-4, "batch": 512},
    "mnist": {"ni": 784, "epochs": 150, "lr": 3.8e-5, "batch": 512},
    "olivetti": {"ni": 1024, "epochs": 400, "lr": 5e-4, "batch": 512},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonmesh",
        description="Simulate, verify, benchmark, and train photonic mesh networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the correctness and scaling check suites")
    v.add_argument("--kind", choices=[FLDZHYAN, CLEMENTS], default=FLDZHYAN)
    v.add_argument("--ni", type=int, help="run a single configuration at this port count")
    v.add_argument("--nl", type=int, help="layer count for the single configuration")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument(
        "--dump-topology", action="store_true", help="print the window/cell table and exit"
    )
    v.add_argument(
        "--dump-matrix", action="store_true", help="print the dense mesh matrix and exit"
    )
    v.add_argument(
        "--corrupt-phases",
        action="store_true",
        help="test hook: perturb the engine's phases so the equivalence check fails",
    )

    b = sub.add_parser("bench", help="time the sliced engine against the dense baseline")
    b.add_argument("--scenario", choices=["batch", "mesh", "both"], default="both")
    b.add_argument("--kind", choices=[FLDZHYAN, CLEMENTS], default=CLEMENTS)
    b.add_argument("--ni", type=int, help="mesh size for the batch scenario")
    b.add_argument("--nl", type=int, help="layers (defaults to ni)")
    b.add_argument(
        "--sizes", type=int, nargs="+", help="mesh sizes for the mesh scenario"
    )
    b.add_argument("--batches", type=int, nargs="+", default=list(bench_mod.BATCH_SIZES))
    b.add_argument("--batch", type=int, default=bench_mod.MESH_SCENARIO_BATCH)
    b.add_argument("--samples", type=int, default=bench_mod.DEFAULT_SAMPLES)
    b.add_argument(
        "--engines",
        default="sliced,dense",
        help="comma-separated subset of sliced,dense",
    )
    b.add_argument("--dense-cap", type=int, default=bench_mod.DEFAULT_DENSE_CAP)
    b.add_argument(
        "--full-scale",
        action="store_true",
        help="use the full-scale grids (N=800 batch scenario, N=100..900 mesh scenario)",
    )
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="bench.csv")

    t = sub.add_parser("train", help="train the two-mesh classifier on a dataset")
    t.add_argument("--dataset", choices=sorted(SCHEMAS), required=True)
    t.add_argument("--data-dir", help="fixture directory (default: bundled data)")
    t.add_argument("--mesh", choices=[FLDZHYAN, CLEMENTS], default=CLEMENTS)
    t.add_argument("--ni", type=int)
    t.add_argument("--nl", type=int)
    t.add_argument("--epochs", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--batch", type=int)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--runs", type=int, default=1, help="repeat with derived seeds")
    t.add_argument("--metrics", default="metrics.jsonl")
    t.add_argument("--summary", help="summary path (default: metrics path + .summary)")
    t.add_argument("--save", help="write a model checkpoint after training")
    t.add_argument("--load", help="resume from a checkpoint instead of a fresh model")
    t.add_argument("--eval-only", action="store_true", help="with --load: just evaluate")
    t.add_argument(
        "--no-bias-gain",
        action="store_true",
        help="drop the trainable bias and gain stages (bare benchmark circuit)",
    )
    t.add_argument(
        "--normalize", action="store_true", help="L2-normalize each sample before encoding"
    )
    return parser


def cmd_verify(args) -> int:
    if args.dump_topology or args.dump_matrix:
        ni = args.ni or 4
        nl = args.nl if args.nl is not None else ni
        t = build_mesh(args.kind, ni, nl)
        if args.dump_topology:
            print(format_topology(t))
        if args.dump_matrix:
            print(format_matrix(mesh_matrix(t, random_phases(t, args.seed))))
        return 0
    if args.ni is not None:
        nl = args.nl if args.nl is not None else args.ni
        results = focused_check(
            args.kind, args.ni, nl, args.seed, corrupt=args.corrupt_phases
        )
    else:
        if args.corrupt_phases:
            print("--corrupt-phases needs a single configuration (--ni)", file=sys.stderr)
            return 2
        results = run_all_checks()
    failures = [r for r in results if not r.ok]
    for r in results:
        print(r.line())
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if failures:
        print(f"first failure: {failures[0].line()}")
        return 1
    return 0


def cmd_bench(args) -> int:
    engines = tuple(e.strip() for e in args.engines.split(",") if e.strip())
    for e in engines:
        if e not in ("sliced", "dense"):
            print(f"unknown engine {e!r}", file=sys.stderr)
            return 2
    records = []
    if args.scenario in ("batch", "both"):
        ni = args.ni or (bench_mod.FULL_BATCH_NI if args.full_scale else bench_mod.DESK_BATCH_NI)
        nl = args.nl if args.nl is not None else ni
        records += bench_mod.run_batch_scenario(
            args.kind,
            ni,
            nl,
            batch_sizes=tuple(args.batches),
            samples=args.samples,
            engines=engines,
            dense_cap=args.dense_cap,
            seed=args.seed,
        )
    if args.scenario in ("mesh", "both"):
        sizes = tuple(
            args.sizes
            or (bench_mod.FULL_MESH_SIZES if args.full_scale else bench_mod.DESK_MESH_SIZES)
        )
        records += bench_mod.run_mesh_scenario(
            args.kind,
            sizes=sizes,
            batch=args.batch,
            samples=args.samples,
            engines=engines,
            dense_cap=args.dense_cap,
            seed=args.seed,
        )
    bench_mod.write_csv(records, args.out)
    print(bench_mod.CSV_HEADER)
    for r in records:
        print(r.csv_row())
    print(f"wrote {len(records)} records to {args.out} (peak RSS {peak_rss_bytes()} bytes)")
    return 0


def _metrics_path(base: str, run: int, runs: int) -> Path:
    p = Path(base)
    if runs == 1:
        return p
    return p.with_name(f"{p.stem}.run{run}{p.suffix}")


def _write_metrics(path: Path, header: dict, metrics) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header) + "\n")
        for em in metrics:
            f.write(em.to_json_line() + "\n")


def cmd_train(args) -> int:
    preset = TRAIN_PRESETS[args.dataset]
    ni = args.ni if args.ni is not None else preset["ni"]
    nl = args.nl if args.nl is not None else ni
    epochs = args.epochs if args.epochs is not None else preset["epochs"]
    lr = args.lr if args.lr is not None else preset["lr"]
    batch = args.batch if args.batch is not None else preset["batch"]
    if args.runs < 1:
        print("--runs must be >= 1", file=sys.stderr)
        return 2
    if args.eval_only and not args.load:
        print("--eval-only requires --load", file=sys.stderr)
        return 2

    ds = load_named(args.dataset, args.data_dir)
    if ds.features.shape[1] != ni:
        print(
            f"dataset {args.dataset} has {ds.features.shape[1]} features, "
            f"but ni={ni}; pass --ni to match",
            file=sys.stderr,
        )
        return 2

    if args.eval_only:
        m = load_model(args.load)
        parts = split(ds, args.seed)
        val_acc = evaluate(m, ds.features[parts.val], ds.labels[parts.val])
        test_acc = evaluate(m, ds.features[parts.test], ds.labels[parts.test])
        print(f"val_acc={val_acc:.4f} test_acc={test_acc:.4f}")
        return 0

    all_metrics = []
    test_accs = []
    final_model = None
    for run in range(args.runs):
        run_seed = args.seed + run
        parts = split(ds, run_seed)
        if args.load:
            m = load_model(args.load)
        else:
            m = build_benchmark_model(
                args.mesh,
                ni,
                nl,
                num_classes=ds.num_classes,
                include_bias_gain=not args.no_bias_gain,
                seed=run_seed,
                normalize_inputs=args.normalize,
            )
        cfg = TrainConfig(learning_rate=lr, batch_size=batch, epochs=epochs, seed=run_seed)
        metrics = train(m, ds, parts, cfg)
        test_acc = evaluate(m, ds.features[parts.test], ds.labels[parts.test])
        header = {
            "dataset": ds.name,
            "dataset_seed": ds.dataset_seed,
            "run_seed": run_seed,
            "mesh": args.mesh,
            "ni": ni,
            "nl": nl,
            "epochs": epochs,
            "lr": lr,
            "batch": batch,
            "num_classes": ds.num_classes,
            "include_bias_gain": not args.no_bias_gain,
            "normalize_inputs": args.normalize,
        }
        path = _metrics_path(args.metrics, run, args.runs)
        _write_metrics(path, header, metrics)
        print(
            f"run {run}: seed={run_seed} final train_loss={metrics[-1].train_loss:.4f} "
            f"val_acc={metrics[-1].val_acc:.4f} test_acc={test_acc:.4f} -> {path}"
        )
        all_metrics.append(metrics)
        test_accs.append(test_acc)
        final_model = m

    summary_path = Path(args.summary) if args.summary else Path(args.metrics).with_suffix(
        ".summary.jsonl"
    )
    with open(summary_path, "w", encoding="utf-8") as f:
        f.write(
            json.dumps(
                {
                    "dataset": ds.name,
                    "dataset_seed": ds.dataset_seed,
                    "runs": args.runs,
                    "seeds": [args.seed + r for r in range(args.runs)],
                }
            )
            + "\n"
        )
        for e in range(epochs):
            losses = [m[e].train_loss for m in all_metrics]
            accs = [m[e].val_acc for m in all_metrics]
            f.write(
                json.dumps(
                    {
                        "epoch": e,
                        "train_loss_mean": float(np.mean(losses)),
                        "train_loss_min": float(np.min(losses)),
                        "train_loss_max": float(np.max(losses)),
                        "val_acc_mean": float(np.mean(accs)),
                        "val_acc_min": float(np.min(accs)),
                        "val_acc_max": float(np.max(accs)),
                    }
                )
                + "\n"
            )
        f.write(
            json.dumps(
                {
                    "test_acc_mean": float(np.mean(test_accs)),
                    "test_acc_min": float(np.min(test_accs)),
                    "test_acc_max": float(np.max(test_accs)),
                }
            )
            + "\n"
        )
    print(
        f"summary: mean val_acc={np.mean([m[-1].val_acc for m in all_metrics]):.4f} "
        f"mean test_acc={np.mean(test_accs):.4f} -> {summary_path}"
    )

    if args.save and final_model is not None:
        save_model(final_model, args.save)
        print(f"checkpoint -> {args.save}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "bench":
        return cmd_bench(args)
    return cmd_train(args)


if __name__ == "__main__":
    sys.exit(main())
