"""CSV dataset loading, feature scaling, and seeded train/validation/test splits.

The on-disk schema is one header line ``label,f0,f1,...`` followed by one row
per sample.  Features are scaled to [0, 1] at load time: pixel datasets divide
by a fixed full-scale value, tabular datasets by each column's maximum.

Splitting draws the test set from a dataset-level seed so it stays fixed
across runs; the remaining samples are divided into train and validation by
the per-run seed.  Sizes are floor(n*0.7) and floor(n*0.1), remainder to test.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

DATA_DIR_ENV = "PHOTONMESH_DATA"


@dataclass(frozen=True)
class CsvSchema:
    name: str
    # full-scale value for fixed-range features, or None for per-column max
    full_scale: float | None


SCHEMAS = {
    "iris": CsvSchema("iris", None),
    "digits": CsvSchema("digits", 16.0),
    "mnist": CsvSchema("mnist", 255.0),
    "olivetti": CsvSchema("olivetti", 1.0),
}


@dataclass
class Dataset:
    name: str
    features: np.ndarray  # (samples, width), float64, scaled to [0, 1]
    labels: np.ndarray  # (samples,), int64 class indices
    num_classes: int
    dataset_seed: int

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("feature row count does not match label count")
        if self.labels.size and self.labels.max() >= self.num_classes:
            raise ValueError("label outside [0, num_classes)")

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.name == other.name
            and self.num_classes == other.num_classes
            and self.dataset_seed == other.dataset_seed
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass
class Splits:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


class CsvFormatError(ValueError):
    pass


def default_dataset_seed(name: str) -> int:
    """Stable per-dataset seed derived from the dataset name."""
    return zlib.crc32(name.encode("utf-8"))


def load_csv(path, schema: CsvSchema) -> Dataset:
    """Parse a dataset file; errors name the offending line."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        cols = header.split(",")
        if not cols or cols[0] != "label":
            raise CsvFormatError(f"{path}:1: header must start with 'label', got {header!r}")
        width = len(cols) - 1
        if width < 1:
            raise CsvFormatError(f"{path}:1: header declares no feature columns")
        feats = []
        labels = []
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != width + 1:
                raise CsvFormatError(
                    f"{path}:{lineno}: expected {width + 1} fields, got {len(parts)}"
                )
            try:
                label = int(parts[0])
            except ValueError:
                raise CsvFormatError(
                    f"{path}:{lineno}: label {parts[0]!r} is not an integer"
                ) from None
            if label < 0:
                raise CsvFormatError(f"{path}:{lineno}: negative label {label}")
            try:
                row = [float(v) for v in parts[1:]]
            except ValueError:
                raise CsvFormatError(f"{path}:{lineno}: non-numeric feature value") from None
            labels.append(label)
            feats.append(row)
    if not feats:
        raise CsvFormatError(f"{path}: no data rows")
    X = np.array(feats, dtype=np.float64)
    y = np.array(labels, dtype=np.int64)
    if schema.full_scale is not None:
        X = X / schema.full_scale
    else:
        col_max = X.max(axis=0)
        X = X / np.where(col_max > 0.0, col_max, 1.0)
    return Dataset(
        name=schema.name,
        features=X,
        labels=y,
        num_classes=int(y.max()) + 1,
        dataset_seed=default_dataset_seed(schema.name),
    )


def split(ds: Dataset, seed: int, fractions=(0.7, 0.1, 0.2)) -> Splits:
    """Partition sample indices; the test set depends only on the dataset seed."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    n = ds.features.shape[0]
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_train = int(np.floor(n * fractions[0]))
    n_val = int(np.floor(n * fractions[1]))
    n_test = n - n_train - n_val
    perm = np.random.default_rng(ds.dataset_seed).permutation(n)
    test = np.sort(perm[:n_test])
    rest = np.sort(perm[n_test:])
    shuffled = rest[np.random.default_rng(seed).permutation(rest.size)]
    return Splits(train=shuffled[:n_train], val=shuffled[n_train:], test=test)


def data_dir(override=None) -> Path:
    """Fixture directory: explicit argument, then env var, then bundled data."""
    if override:
        return Path(override)
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path(resources.files("photonmesh") / "data")


def load_named(name: str, directory=None) -> Dataset:
    """Load one of the known datasets from the fixture directory."""
    if name not in SCHEMAS:
        raise ValueError(f"unknown dataset {name!r}; known: {sorted(SCHEMAS)}")
    path = data_dir(directory) / f"{name}.csv"
    if not path.exists():
        hint = (
            " (run scripts/fetch_datasets.py to download it)"
            if name in ("mnist", "olivetti")
            else ""
        )
        raise FileNotFoundError(f"dataset file {path} not found{hint}")
    return load_csv(path, SCHEMAS[name])
