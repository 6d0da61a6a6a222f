"""Compilation of the square-weighted stump objective into a QUBO.

Variables, in index order:

* selector bits, one per fingerprint column (index j),
* per-sample count encodings: bit (i, c) means "sample i fails exactly c of
  the selected columns"; bit (i, 0) therefore marks the satisfied group,
* a slack block of one-hot cardinality bits encoding "exactly u columns are
  selected" for u in 1..M.

The energy is stored in minimization convention:

    energy(a) = offset + linear . a + sum_{l<m} quadratic[l, m] * a_l * a_m

and is assembled so that on any assignment satisfying all three constraint
families it equals the SWMSE of the decoded split exactly. Constraints are
enforced as squared integer residuals, so any violated assignment picks up a
strictly positive penalty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import stump
from .dataset import Dataset
from .errors import DegenerateError, EmptySelectionError, RangeError, ShapeError
from .stump import FingerprintSet


@dataclass(frozen=True)
class VariableLayout:
    """Index scheme for selector, count-encoding and slack bits."""

    n_f: int
    n_s: int
    m: int

    def __post_init__(self):
        if self.n_f < 0 or self.n_s < 0 or self.m < 0:
            raise RangeError(f"invalid layout ({self.n_f}, {self.n_s}, {self.m})")

    @property
    def total(self) -> int:
        return self.n_f + self.n_s * (self.m + 1) + self.m

    def f_index(self, j: int) -> int:
        return j

    def x_index(self, i: int, c: int) -> int:
        return self.n_f + i * (self.m + 1) + c

    def u_index(self, u: int) -> int:
        """Slack bit for cardinality u, 1 <= u <= m."""
        return self.n_f + self.n_s * (self.m + 1) + (u - 1)


@dataclass(frozen=True)
class PenaltyWeights:
    """Multipliers for the three constraint penalty families."""

    lambda1: float
    lambda2: float
    lambda3: float

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise RangeError("penalty weights must be nonnegative")

    @classmethod
    def for_targets(cls, targets: np.ndarray, scale: float = 1.0) -> "PenaltyWeights":
        """Default weights 2 * N_S * Var(t) (floored at eps), scaled by `scale`.

        A unit constraint violation then costs at least twice the largest
        possible loss improvement, so valid states are always preferred.
        """
        t = np.asarray(targets, dtype=np.float64)
        lam = 2.0 * t.size * max(float(t.var()), 1e-12) * scale
        return cls(lam, lam, lam)


@dataclass(frozen=True)
class Assignment:
    """A {0,1} value per QUBO variable."""

    bits: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.bits)
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise RangeError("assignment bits must be 0/1")
        # always copy so freezing never propagates to a caller-owned buffer
        bits = np.array(raw, dtype=np.int8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class DecodedSolution:
    """Fingerprint read off the selector bits plus a constraint audit."""

    fingerprint: FingerprintSet | None
    u: int
    c1_violations: int
    c2_violations: int
    c3_violated: bool
    swmse: float
    valid: bool


@dataclass(frozen=True)
class QuboModel:
    """Expanded quadratic polynomial over the variable layout.

    loss_targets caches the target vector the loss block was expanded from;
    solvers use it to evaluate loss differences of compound moves without
    re-deriving it from the coefficients. It does not affect energy().
    """

    layout: VariableLayout
    linear: np.ndarray
    quadratic: dict[tuple[int, int], float]
    offset: float
    weights: PenaltyWeights
    loss_targets: np.ndarray | None = None
    _rows: np.ndarray = field(repr=False, default=None)
    _cols: np.ndarray = field(repr=False, default=None)
    _vals: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        linear = np.array(self.linear, dtype=np.float64)
        if linear.shape != (self.layout.total,):
            raise ShapeError(
                f"linear vector has {linear.shape}, layout needs {self.layout.total}"
            )
        for (l, m) in self.quadratic:
            if not 0 <= l < m < self.layout.total:
                raise RangeError(f"quadratic key ({l}, {m}) is not canonical")
        linear.setflags(write=False)
        keys = sorted(self.quadratic)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        vals = np.array([self.quadratic[k] for k in keys], dtype=np.float64)
        object.__setattr__(self, "linear", linear)
        if self.loss_targets is not None:
            targets = np.array(self.loss_targets, dtype=np.float64)
            if targets.shape != (self.layout.n_s,):
                raise ShapeError(
                    f"loss_targets has {targets.shape}, layout has {self.layout.n_s} samples"
                )
            targets.setflags(write=False)
            object.__setattr__(self, "loss_targets", targets)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_cols", cols)
        object.__setattr__(self, "_vals", vals)

    @property
    def n_variables(self) -> int:
        return self.layout.total

    def coupling_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonical (rows, cols, values) view of the quadratic terms."""
        return self._rows, self._cols, self._vals


class _Accumulator:
    """Collects polynomial terms; applies binary idempotence on the diagonal."""

    def __init__(self, total: int):
        self.linear = np.zeros(total, dtype=np.float64)
        self.quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0

    def add_pair(self, l: int, m: int, v: float) -> None:
        if v == 0.0:
            return
        if l == m:
            self.linear[l] += v
            return
        if l > m:
            l, m = m, l
        key = (l, m)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + v

    def add_square(self, terms: list[tuple[int, float]], const: float, w: float) -> None:
        """Add w * (sum coeff*theta + const)^2, expanded."""
        for idx, (l, v) in enumerate(terms):
            self.linear[l] += w * (v * v + 2.0 * const * v)
            for l2, v2 in terms[idx + 1:]:
                self.add_pair(l, l2, 2.0 * w * v * v2)
        self.offset += w * const * const


def build_qubo(d: Dataset, m: int, weights: PenaltyWeights | None = None) -> QuboModel:
    """Expand loss + penalties for dataset d with cardinality cap m.

    The loss block couples only the per-sample satisfied bits: for samples
    i < k the coupling is 2*(t_i - t_k)^2 / N_S^2, the linear part is
    (2*T1*t_i - N_S*t_i^2 - T2) / N_S^2 and the constant is
    (N_S*T2 - T1^2) / N_S^2, which reproduces the SWMSE of the encoded split.
    """
    if not 1 <= m <= d.n_fingerprints:
        raise RangeError(f"m={m} outside [1, {d.n_fingerprints}]")
    if d.n_samples < 2:
        raise DegenerateError("need at least 2 samples to build a QUBO")
    if weights is None:
        weights = PenaltyWeights.for_targets(d.targets)

    layout = VariableLayout(d.n_fingerprints, d.n_samples, m)
    acc = _Accumulator(layout.total)
    n = d.n_samples
    t = d.targets
    t1_total = float(t.sum())
    t2_total = float((t * t).sum())

    # loss over the satisfied bits theta_(i, 0)
    ls = 1.0 / (n * n)
    acc.offset += ls * (n * t2_total - t1_total * t1_total)
    x0 = np.array([layout.x_index(i, 0) for i in range(n)])
    acc.linear[x0] += ls * (2.0 * t1_total * t - n * t * t - t2_total)
    iu, ku = np.triu_indices(n, k=1)
    pair_vals = ls * 2.0 * (t[iu] - t[ku]) ** 2
    for a, b, v in zip(x0[iu], x0[ku], pair_vals):
        acc.add_pair(int(a), int(b), float(v))

    # count-consistency residuals, one per sample
    w1 = weights.lambda1 / n
    unsat = (1 - d.features).astype(np.int64)
    gram = unsat.T @ unsat
    for j in range(layout.n_f):
        acc.linear[j] += w1 * gram[j, j]
        row = gram[j]
        for j2 in range(j + 1, layout.n_f):
            acc.add_pair(j, j2, 2.0 * w1 * row[j2])
    for i in range(n):
        nz = np.flatnonzero(unsat[i])
        for c in range(1, m + 1):
            xi = layout.x_index(i, c)
            acc.linear[xi] += w1 * c * c
            for j in nz:
                acc.add_pair(int(j), xi, -2.0 * w1 * c)
            for c2 in range(c + 1, m + 1):
                acc.add_pair(xi, layout.x_index(i, c2), 2.0 * w1 * c * c2)

    # one-hot residuals over each sample's count block
    w2 = weights.lambda2 / n
    for i in range(n):
        block = [layout.x_index(i, c) for c in range(m + 1)]
        acc.add_square([(b, 1.0) for b in block], -1.0, w2)

    # cardinality block: selected count matches the one-hot slack value
    w3 = weights.lambda3
    card_terms = [(layout.f_index(j), 1.0) for j in range(layout.n_f)]
    card_terms += [(layout.u_index(u), -float(u)) for u in range(1, m + 1)]
    acc.add_square(card_terms, 0.0, w3)
    acc.add_square([(layout.u_index(u), 1.0) for u in range(1, m + 1)], -1.0, w3)

    return QuboModel(layout, acc.linear, acc.quadratic, acc.offset, weights, d.targets)


def energy(q: QuboModel, a: Assignment) -> float:
    """offset + linear . bits + sum of active couplings."""
    if a.bits.shape != (q.layout.total,):
        raise ShapeError(
            f"assignment has {a.bits.shape[0]} bits, model has {q.layout.total}"
        )
    b = a.bits.astype(np.float64)
    rows, cols, vals = q.coupling_arrays()
    return float(q.offset + q.linear @ b + vals @ (b[rows] * b[cols]))


def decode(a: Assignment, layout: VariableLayout) -> FingerprintSet:
    """Read the fingerprint off the selector bits; count and slack bits are
    ignored entirely."""
    if a.bits.shape[0] != layout.total:
        raise ShapeError(
            f"assignment has {a.bits.shape[0]} bits, layout has {layout.total}"
        )
    selected = np.flatnonzero(a.bits[: layout.n_f])
    if selected.size == 0:
        raise EmptySelectionError("no selector bit is set")
    return FingerprintSet(tuple(int(j) for j in selected))


def check_constraints(d: Dataset, a: Assignment, layout: VariableLayout) -> DecodedSolution:
    """Audit an assignment against all three constraint families.

    Never raises: an empty selection is reported as the trivial all-satisfied
    split (an empty product is 1 for every sample).
    """
    if a.bits.shape[0] != layout.total:
        raise ShapeError(
            f"assignment has {a.bits.shape[0]} bits, layout has {layout.total}"
        )
    bits = a.bits.astype(np.int64)
    sel_bits = bits[: layout.n_f]
    x_bits = bits[layout.n_f : layout.n_f + layout.n_s * (layout.m + 1)]
    x_bits = x_bits.reshape(layout.n_s, layout.m + 1)
    u_bits = bits[layout.n_f + layout.n_s * (layout.m + 1) :]

    u = int(sel_bits.sum())
    unsat_true = (1 - d.features.astype(np.int64)) @ sel_bits
    coded = x_bits @ np.arange(layout.m + 1)
    c1_violations = int((unsat_true != coded).sum())
    c2_violations = int((x_bits.sum(axis=1) != 1).sum())
    slack_levels = np.arange(1, layout.m + 1)
    c3_violated = bool(u_bits.sum() != 1 or int(slack_levels @ u_bits) != u)

    selected = np.flatnonzero(sel_bits)
    if selected.size:
        fingerprint = FingerprintSet(tuple(int(j) for j in selected))
        g = stump.interaction_values(d, fingerprint)
    else:
        fingerprint = None
        g = np.ones(d.n_samples, dtype=np.uint8)
    sw = stump.swmse(stump.split_stats(d.targets, g), d.n_samples)

    valid = (
        c1_violations == 0
        and c2_violations == 0
        and not c3_violated
        and 1 <= u <= layout.m
    )
    return DecodedSolution(fingerprint, u, c1_violations, c2_violations, c3_violated, sw, valid)


def valid_assignment(d: Dataset, layout: VariableLayout, f: FingerprintSet) -> Assignment:
    """Constructive zero-penalty encoding of a fingerprint: count bits set to
    the true per-sample unsatisfied counts, slack one-hot at |f|."""
    if not 1 <= f.u <= layout.m:
        raise RangeError(f"selection size {f.u} outside [1, {layout.m}]")
    if f.selected[-1] >= layout.n_f:
        raise RangeError(f"selection {f.selected} out of range for n_f={layout.n_f}")
    bits = np.zeros(layout.total, dtype=np.int8)
    for j in f.selected:
        bits[layout.f_index(j)] = 1
    sel = np.asarray(f.selected)
    unsat = (1 - d.features[:, sel].astype(np.int64)).sum(axis=1)
    for i in range(layout.n_s):
        bits[layout.x_index(i, int(unsat[i]))] = 1
    bits[layout.u_index(f.u)] = 1
    return Assignment(bits)


def export_qubo(q: QuboModel, path: str | Path) -> None:
    """Write the model in the plain-text interop format: `offset <v>`, then
    `l <i> <v>` and `q <i> <j> <v>` lines (i < j), nonzero terms only."""
    rows, cols, vals = q.coupling_arrays()
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"offset {q.offset!r}\n")
        for i, v in enumerate(q.linear):
            if v != 0.0:
                fh.write(f"l {i} {float(v)!r}\n")
        for i, j, v in zip(rows, cols, vals):
            if v != 0.0:
                fh.write(f"q {i} {j} {float(v)!r}\n")
