"""Binary fingerprint datasets with real-valued regression targets.

A dataset is an immutable bundle of sample ids, fingerprint column names, a
{0,1} feature matrix and a target vector. Arrays are stored read-only so a
dataset can be shared freely across concurrent workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AugmentError, FormatError, RangeError

COMPLEMENT_PREFIX = "NOT_"


@dataclass(frozen=True)
class Dataset:
    """N_S samples by N_F binary fingerprints, plus one target per sample."""

    ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.features)
        if raw.ndim != 2:
            raise FormatError("features must be a 2-d matrix")
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise FormatError("features must contain only 0/1 values")
        # always copy so freezing never propagates to caller-owned buffers
        features = np.array(raw, dtype=np.uint8)
        targets = np.array(self.targets, dtype=np.float64)
        if targets.ndim != 1:
            raise FormatError("targets must be a 1-d vector")
        ids = tuple(str(s) for s in self.ids)
        names = tuple(str(s) for s in self.feature_names)
        if features.shape != (len(ids), len(names)):
            raise FormatError(
                f"shape mismatch: features {features.shape}, "
                f"{len(ids)} ids, {len(names)} feature names"
            )
        if len(targets) != len(ids):
            raise FormatError(f"{len(targets)} targets for {len(ids)} ids")
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise FormatError(f"duplicate fingerprint name(s): {', '.join(dup)}")
        features.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)

    @property
    def n_samples(self) -> int:
        return len(self.ids)

    @property
    def n_fingerprints(self) -> int:
        return len(self.feature_names)

    def column(self, name: str) -> int:
        """Index of a fingerprint column by name."""
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise RangeError(f"unknown fingerprint name: {name!r}") from None


def load_dataset(path: str | Path) -> Dataset:
    """Load a dataset CSV: header `id,target,<fingerprint...>`, cells 0/1.

    Raises FormatError naming the offending cell for any non-binary feature
    value, a missing/misplaced target column, or duplicate fingerprint names.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if len(header) < 2 or header[0] != "id" or header[1] != "target":
            raise FormatError(
                f"{path}: header must start with 'id,target', got {header[:2]}"
            )
        names = header[2:]
        seen = set()
        for name in names:
            if name in seen:
                raise FormatError(f"{path}: duplicate fingerprint name {name!r}")
            seen.add(name)

        ids: list[str] = []
        targets: list[float] = []
        rows: list[list[int]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            ids.append(row[0])
            try:
                targets.append(float(row[1]))
            except ValueError:
                raise FormatError(
                    f"{path}: line {lineno}: invalid target value {row[1]!r}"
                ) from None
            values = []
            for name, cell in zip(names, row[2:]):
                if cell == "0":
                    values.append(0)
                elif cell == "1":
                    values.append(1)
                else:
                    raise FormatError(
                        f"{path}: line {lineno}, column {name!r}: "
                        f"feature value must be 0 or 1, got {cell!r}"
                    )
            rows.append(values)

    features = np.array(rows, dtype=np.uint8).reshape(len(ids), len(names))
    return Dataset(tuple(ids), tuple(names), features, np.array(targets))


def augment_complements(d: Dataset) -> Dataset:
    """Append a complement column NOT_<name> = 1 - column for every column."""
    for name in d.feature_names:
        if name.startswith(COMPLEMENT_PREFIX):
            raise AugmentError(
                f"dataset already contains complement column {name!r}; "
                "refusing to augment twice"
            )
    names = d.feature_names + tuple(COMPLEMENT_PREFIX + n for n in d.feature_names)
    features = np.hstack([d.features, 1 - d.features])
    return Dataset(d.ids, names, features, d.targets)


def subsample(d: Dataset, n: int, seed: int) -> Dataset:
    """Draw n rows without replacement via a seeded shuffle (deterministic)."""
    if not 1 <= n <= d.n_samples:
        raise RangeError(f"subsample size {n} outside [1, {d.n_samples}]")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(d.n_samples)[:n]
    return Dataset(
        tuple(d.ids[i] for i in idx),
        d.feature_names,
        d.features[idx],
        d.targets[idx],
    )


def center_targets(d: Dataset) -> Dataset:
    """Subtract the target mean. Optional preprocessing, off by default."""
    return Dataset(d.ids, d.feature_names, d.features, d.targets - d.targets.mean())
