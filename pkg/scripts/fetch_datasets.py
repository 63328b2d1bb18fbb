#!/usr/bin/env python3
"""Download MNIST and/or Olivetti Faces and write them in the package's CSV schema.

The iris and digits fixtures ship with the repository; the two large datasets
are fetched on demand (network required) and written as ``label,f0,f1,...``
rows into the target directory.  Point the trainer at them with
``--data-dir`` or the PHOTONMESH_DATA environment variable.

    python scripts/fetch_datasets.py --dataset mnist --out data/
"""

import argparse
import sys
from pathlib import Path

import numpy as np


def write_csv(path: Path, features: np.ndarray, labels: np.ndarray) -> None:
    width = features.shape[1]
    with open(path, "w", encoding="utf-8") as f:
        f.write("label," + ",".join(f"f{i}" for i in range(width)) + "\n")
        for x, y in zip(features, labels):
            f.write(f"{int(y)}," + ",".join(repr(float(v)) for v in x) + "\n")
    print(f"wrote {features.shape[0]} samples x {width} features -> {path}")


def fetch_mnist(out_dir: Path) -> None:
    from sklearn.datasets import fetch_openml

    ds = fetch_openml("mnist_784", version=1, as_frame=False)
    # raw pixels 0..255; the loader's mnist schema divides by 255
    write_csv(out_dir / "mnist.csv", ds.data, ds.target.astype(int))


def fetch_olivetti(out_dir: Path) -> None:
    from sklearn.datasets import fetch_olivetti_faces

    ds = fetch_olivetti_faces()
    # pixels already in [0, 1]; the olivetti schema uses full scale 1
    write_csv(out_dir / "olivetti.csv", ds.data.reshape(len(ds.target), -1), ds.target)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dataset", choices=["mnist", "olivetti", "all"], default="all")
    parser.add_argument("--out", default="data", help="target directory")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.dataset in ("mnist", "all"):
        fetch_mnist(out_dir)
    if args.dataset in ("olivetti", "all"):
        fetch_olivetti(out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
