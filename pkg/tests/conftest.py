"""Shared generators and independent oracles.

The oracles here deliberately avoid the library's own code paths: they
evaluate the unexpanded Hamiltonian term by term, accumulate split moments
sample by sample, and score subsets with plain loops, so they stay valid
checks on the expanded/vectorized implementations.
"""

import itertools

import numpy as np
import pytest

from qubofp.dataset import Dataset, augment_complements


def make_dataset(features, targets, names=None, ids=None) -> Dataset:
    features = np.asarray(features)
    n_s, n_f = features.shape
    if names is None:
        names = tuple(f"FP{j:02d}" for j in range(n_f))
    if ids is None:
        ids = tuple(f"S{i:03d}" for i in range(n_s))
    return Dataset(tuple(ids), tuple(names), features, np.asarray(targets, dtype=float))


def random_dataset(n_samples, n_fingerprints, seed, p=0.5) -> Dataset:
    rng = np.random.default_rng(seed)
    features = (rng.random((n_samples, n_fingerprints)) < p).astype(np.uint8)
    targets = rng.normal(size=n_samples)
    return make_dataset(features, targets)


def planted_dataset(n_base, n_samples, k, noise, seed, p=0.6, coef=2.0, augment=True):
    """Targets driven by a k-way AND of the first k base columns, plus noise.

    Returns (dataset, planted_indices); indices stay valid after complement
    augmentation because complements are appended after the base block.
    """
    rng = np.random.default_rng(seed)
    features = (rng.random((n_samples, n_base)) < p).astype(np.uint8)
    planted = tuple(range(k))
    g_star = features[:, planted].min(axis=1)
    targets = coef * g_star + rng.normal(0.0, noise, n_samples)
    d = make_dataset(features, targets)
    if augment:
        d = augment_complements(d)
    return d, planted


# ---------------------------------------------------------------------------
# independent oracles


def oracle_split_moments(targets, g):
    """Per-sample accumulation of group counts/sums/sums of squares."""
    n1 = n0 = 0
    s1 = s0 = q1 = q0 = 0.0
    for t, gi in zip(targets, g):
        if gi:
            n1 += 1
            s1 += t
            q1 += t * t
        else:
            n0 += 1
            s0 += t
            q0 += t * t
    return n1, n0, s1, s0, q1, q0


def oracle_split_mse(targets, g):
    """Mean squared error of group-mean predictions, summed per sample."""
    targets = np.asarray(targets, dtype=float)
    g = np.asarray(g)
    preds = {}
    for b in (0, 1):
        grp = targets[g == b]
        preds[b] = grp.mean() if grp.size else 0.0
    return sum((preds[int(gi)] - t) ** 2 for t, gi in zip(targets, g)) / len(targets)


def oracle_swmse(targets, g):
    """Group variances weighted by squared group proportions."""
    targets = np.asarray(targets, dtype=float)
    g = np.asarray(g)
    n = len(targets)
    out = 0.0
    for b in (0, 1):
        grp = targets[g == b]
        if grp.size:
            out += float(grp.var()) * (grp.size / n) ** 2
    return out


def oracle_subset_g(features, cols):
    """Interaction value by per-sample conjunction."""
    out = []
    for row in features:
        out.append(1 if all(row[j] == 1 for j in cols) else 0)
    return np.array(out, dtype=np.uint8)


def oracle_unexpanded_energy(d, m, weights, bits):
    """Term-by-term evaluation of loss plus the three penalty families,
    without expanding anything into polynomial coefficients."""
    n_f, n_s = d.n_fingerprints, d.n_samples
    bits = np.asarray(bits, dtype=float)
    th_f = bits[:n_f]
    th_x = bits[n_f : n_f + n_s * (m + 1)].reshape(n_s, m + 1)
    th_u = bits[n_f + n_s * (m + 1) :]
    t = d.targets
    t1, t2 = t.sum(), (t * t).sum()

    x0 = th_x[:, 0]
    p = (x0 * t * t).sum()
    q = x0.sum()
    r = (x0 * t).sum()
    display = p * q - r**2 + (t2 - p) * (n_s - q) - (t1 - r) ** 2
    loss = display / n_s**2

    unsat = 1.0 - d.features.astype(float)
    c_levels = np.arange(m + 1)
    c1 = sum(
        float(unsat[i] @ th_f - (c_levels * th_x[i]).sum()) ** 2 for i in range(n_s)
    )
    c2 = float(((th_x.sum(axis=1) - 1.0) ** 2).sum())
    u_levels = np.arange(1, m + 1)
    c3 = float((th_f.sum() - (u_levels * th_u).sum()) ** 2 + (th_u.sum() - 1.0) ** 2)
    return (
        loss
        + weights.lambda1 / n_s * c1
        + weights.lambda2 / n_s * c2
        + weights.lambda3 * c3
    )


def oracle_best_subset(d, m, score_fn):
    """Plain-loop enumeration of all subsets of size 1..m with explicit
    (score, size, columns) tie-breaking."""
    best = None
    for u in range(1, m + 1):
        for cols in itertools.combinations(range(d.n_fingerprints), u):
            g = oracle_subset_g(d.features, cols)
            score = score_fn(d.targets, g)
            key = (score, u, cols)
            if best is None or key < best:
                best = key
    return best


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
