"""Depth-1 split statistics for interaction fingerprints.

An interaction fingerprint is the elementwise product (logical AND) of the
selected base columns. Splitting on it partitions the samples into the group
that satisfies every selected column and the group that does not; the split
quality is measured by the proportion-weighted MSE or by its square-weighted
variant (SWMSE), which weights each group variance by the squared group
proportion so the objective stays polynomial in binary indicator variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DegenerateError, EmptySelectionError, RangeError, ShapeError


@dataclass(frozen=True)
class FingerprintSet:
    """Indices of the base columns multiplied into one interaction fingerprint."""

    selected: tuple[int, ...]

    def __post_init__(self):
        sel = tuple(int(j) for j in self.selected)
        if len(set(sel)) != len(sel):
            raise RangeError(f"duplicate column indices in selection: {sel}")
        object.__setattr__(self, "selected", tuple(sorted(sel)))

    @property
    def u(self) -> int:
        """Number of selected (producted) columns."""
        return len(self.selected)

    def names(self, d: Dataset) -> tuple[str, ...]:
        return tuple(d.feature_names[j] for j in self.selected)


@dataclass(frozen=True)
class SplitStats:
    """Counts and first/second target moments of the two split groups."""

    n1: int
    n0: int
    sum1: float
    sum0: float
    sumsq1: float
    sumsq0: float


@dataclass(frozen=True)
class StumpModel:
    """Group-mean predictor for a fitted depth-1 split."""

    fingerprint: FingerprintSet
    pred1: float
    pred0: float

    def predict(self, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g)
        return np.where(g != 0, self.pred1, self.pred0)


def interaction_values(d: Dataset, f: FingerprintSet) -> np.ndarray:
    """Per-sample value of the interaction fingerprint: 1 iff every selected
    column is 1 for that sample."""
    if not f.selected:
        raise EmptySelectionError("interaction fingerprint has no selected columns")
    if f.selected[-1] >= d.n_fingerprints or f.selected[0] < 0:
        raise RangeError(
            f"selection {f.selected} out of range for {d.n_fingerprints} columns"
        )
    return d.features[:, np.asarray(f.selected)].min(axis=1)


def split_stats(targets: np.ndarray, g: np.ndarray) -> SplitStats:
    """Exact counts, sums and sums of squares of targets in each split group."""
    t = np.asarray(targets, dtype=np.float64)
    g = np.asarray(g)
    if t.shape != g.shape:
        raise ShapeError(f"targets {t.shape} vs split vector {g.shape}")
    mask = g != 0
    t1 = t[mask]
    t0 = t[~mask]
    return SplitStats(
        n1=int(t1.size),
        n0=int(t0.size),
        sum1=float(t1.sum()),
        sum0=float(t0.sum()),
        sumsq1=float((t1 * t1).sum()),
        sumsq0=float((t0 * t0).sum()),
    )


def _group_var(n: int, s: float, ss: float) -> float:
    # clamp tiny negative values from cancellation; variance is >= 0
    if n == 0:
        return 0.0
    return max(ss / n - (s / n) ** 2, 0.0)


def _check_totals(s: SplitStats, n_total: int) -> None:
    if n_total == 0:
        raise DegenerateError("split statistics over zero samples")
    if s.n1 + s.n0 != n_total:
        raise ShapeError(f"group counts {s.n1}+{s.n0} != n_total {n_total}")


def mse(s: SplitStats, n_total: int) -> float:
    """Split MSE: group variances weighted by group proportions. Empty groups
    contribute 0."""
    _check_totals(s, n_total)
    out = 0.0
    for n, tot, ssq in ((s.n1, s.sum1, s.sumsq1), (s.n0, s.sum0, s.sumsq0)):
        out += _group_var(n, tot, ssq) * (n / n_total)
    return out


def swmse(s: SplitStats, n_total: int) -> float:
    """Square-weighted split MSE: group variances weighted by squared group
    proportions. Empty groups contribute 0; equals mse() when one group holds
    every sample."""
    _check_totals(s, n_total)
    out = 0.0
    for n, tot, ssq in ((s.n1, s.sum1, s.sumsq1), (s.n0, s.sum0, s.sumsq0)):
        out += _group_var(n, tot, ssq) * (n / n_total) ** 2
    return out


def split_mse(d: Dataset, f: FingerprintSet) -> float:
    """MSE of the depth-1 split induced by f on d."""
    g = interaction_values(d, f)
    return mse(split_stats(d.targets, g), d.n_samples)


def split_swmse(d: Dataset, f: FingerprintSet) -> float:
    """SWMSE of the depth-1 split induced by f on d."""
    g = interaction_values(d, f)
    return swmse(split_stats(d.targets, g), d.n_samples)


def fit_stump(d: Dataset, f: FingerprintSet) -> StumpModel:
    """Fit group-mean predictions; an empty group falls back to the overall mean."""
    g = interaction_values(d, f)
    s = split_stats(d.targets, g)
    overall = float(d.targets.mean()) if d.n_samples else 0.0
    pred1 = s.sum1 / s.n1 if s.n1 else overall
    pred0 = s.sum0 / s.n0 if s.n0 else overall
    return StumpModel(f, pred1, pred0)


def best_single_baseline(d: Dataset) -> tuple[int, float]:
    """Column index and MSE of the best single-column split; ties go to the
    lowest index."""
    if d.n_fingerprints < 1:
        raise DegenerateError("dataset has no fingerprint columns")
    if d.n_samples < 2:
        raise DegenerateError("need at least 2 samples for a baseline split")
    t = d.targets
    best_j = -1
    best_mse = np.inf
    for j in range(d.n_fingerprints):
        m = mse(split_stats(t, d.features[:, j]), d.n_samples)
        if m < best_mse:
            best_j, best_mse = j, m
    return best_j, float(best_mse)
