"""Naive full search over fingerprint subsets.

Serves two purposes: the cost baseline the heuristic pipeline is compared
against, and the correctness oracle for small instances. Candidates are
scored one by one through the stump statistics, with no pruning or reuse.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import stump
from .dataset import Dataset
from .errors import BudgetError, RangeError
from .stump import FingerprintSet

OBJECTIVES = ("swmse", "mse")

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class SearchResult:
    best: FingerprintSet
    swmse: float
    mse: float
    candidates_evaluated: int
    wall_time: float


def count_combinations(n_f: int, m: int) -> tuple[int, int]:
    """(C(n_f, m), sum over u=1..m of C(n_f, u)), in exact integer arithmetic."""
    if n_f < 0 or m < 0 or m > n_f:
        raise RangeError(f"invalid combination parameters n_f={n_f}, m={m}")
    exact_m = math.comb(n_f, m)
    cumulative = sum(math.comb(n_f, u) for u in range(1, m + 1))
    return exact_m, cumulative


def full_search(
    d: Dataset,
    m: int,
    objective: str = "swmse",
    budget: int = DEFAULT_BUDGET,
) -> SearchResult:
    """Enumerate every subset of 1..m columns and return the minimizer of the
    chosen objective. Ties break toward fewer columns, then the
    lexicographically smallest index set."""
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if not 1 <= m <= d.n_fingerprints:
        raise RangeError(f"m={m} outside [1, {d.n_fingerprints}]")
    _, cumulative = count_combinations(d.n_fingerprints, m)
    if cumulative > budget:
        raise BudgetError(
            f"{cumulative} candidates exceed the budget of {budget}; "
            "raise the budget or lower m"
        )

    score_fn = stump.swmse if objective == "swmse" else stump.mse
    features = d.features
    targets = d.targets
    n = d.n_samples
    t0 = time.perf_counter()
    best_cols: tuple[int, ...] | None = None
    best_score = math.inf
    evaluated = 0
    for u in range(1, m + 1):
        for cols in combinations(range(d.n_fingerprints), u):
            evaluated += 1
            g = features[:, cols].min(axis=1) if u > 1 else features[:, cols[0]]
            score = score_fn(stump.split_stats(targets, g), n)
            if score < best_score:
                best_cols, best_score = cols, score
    wall = time.perf_counter() - t0

    best = FingerprintSet(best_cols)
    s = stump.split_stats(targets, stump.interaction_values(d, best))
    return SearchResult(
        best=best,
        swmse=stump.swmse(s, n),
        mse=stump.mse(s, n),
        candidates_evaluated=evaluated,
        wall_time=wall,
    )
