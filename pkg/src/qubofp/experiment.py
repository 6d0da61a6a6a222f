"""Trial orchestration, effectiveness bookkeeping and report emission.

A trial run draws one subsample per (seed, n_samples) pair, shared across
every cardinality cap so their effect can be compared on identical samples.
Each trial anneals the compiled model, polishes with local descent, decodes
the selector bits and evaluates whether the found interaction fingerprint
strictly beats the best single-column split.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import numpy as np

from . import qubo, stump
from .dataset import COMPLEMENT_PREFIX, Dataset, subsample
from .errors import EmptyInputError, IoError, RangeError
from .qubo import DecodedSolution, PenaltyWeights
from .solver import AnnealSchedule, refine_local, simulated_anneal
from .stump import FingerprintSet

EVAL_SETS = ("sample", "full", "both")

TRIAL_CSV_COLUMNS = ("ID", "N_S", "M", "U", "I", "fingerprint")


@dataclass(frozen=True)
class TrialConfig:
    n_samples: int
    m: int
    trials: int = 10
    seed: int = 0
    schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    weights: PenaltyWeights | None = None
    eval_set: str = "sample"

    def __post_init__(self):
        if self.trials < 1:
            raise RangeError("trials must be >= 1")
        if self.eval_set not in EVAL_SETS:
            raise RangeError(f"eval_set must be one of {EVAL_SETS}")


@dataclass(frozen=True)
class TrialResult:
    trial_id: int
    n_samples: int
    m: int
    decoded: DecodedSolution
    fingerprint_string: str
    u: int
    mse_interaction: float | None
    mse_best_single: float
    effective: bool
    wall_time: float
    mse_interaction_full: float | None = None
    mse_best_single_full: float | None = None
    note: str = ""


@dataclass(frozen=True)
class OverlapMatrix:
    labels: tuple[str, ...]
    values: np.ndarray


@dataclass(frozen=True)
class ImportanceReport:
    scores: dict[str, float]
    model: dict


def render_name(name: str) -> str:
    if name.startswith(COMPLEMENT_PREFIX):
        return "¬" + name[len(COMPLEMENT_PREFIX):]
    return name


def fingerprint_string(d: Dataset, f: FingerprintSet) -> str:
    """Human-readable conjunction, complements rendered with a negation sign."""
    return "∧".join(render_name(n) for n in f.names(d))


def effectiveness(mse_interaction: float, mse_best_single: float) -> bool:
    """Strict improvement over the best single-column split."""
    return mse_interaction < mse_best_single


def run_trials(d: Dataset, cfg: TrialConfig) -> list[TrialResult]:
    """Anneal -> refine -> decode -> evaluate, cfg.trials times.

    The compiled model is identical across trials (same sample, same cap);
    trials differ only in their annealing seed block, so the full result list
    is a deterministic function of (d, cfg).
    """
    if cfg.n_samples > d.n_samples:
        raise RangeError(f"n_samples={cfg.n_samples} exceeds dataset size {d.n_samples}")
    sample = subsample(d, cfg.n_samples, cfg.seed)
    weights = cfg.weights or PenaltyWeights.for_targets(sample.targets)
    model = qubo.build_qubo(sample, cfg.m, weights)

    eval_primary = sample if cfg.eval_set in ("sample", "both") else d
    eval_full = d if cfg.eval_set == "both" else None
    _, best_single_primary = stump.best_single_baseline(eval_primary)
    best_single_full = (
        stump.best_single_baseline(eval_full)[1] if eval_full is not None else None
    )

    results = []
    for trial in range(cfg.trials):
        t0 = time.perf_counter()
        sched = replace(
            cfg.schedule, seed=cfg.schedule.seed + trial * cfg.schedule.restarts
        )
        a, _ = simulated_anneal(model, sched)
        a = refine_local(model, a)
        dec = qubo.check_constraints(sample, a, model.layout)
        wall = time.perf_counter() - t0

        if dec.fingerprint is None:
            results.append(
                TrialResult(
                    trial_id=trial,
                    n_samples=cfg.n_samples,
                    m=cfg.m,
                    decoded=dec,
                    fingerprint_string="",
                    u=0,
                    mse_interaction=None,
                    mse_best_single=best_single_primary,
                    effective=False,
                    wall_time=wall,
                    mse_best_single_full=best_single_full,
                    note="empty selection; fall back to the single-column baseline",
                )
            )
            continue

        mse_i = stump.split_mse(eval_primary, dec.fingerprint)
        mse_i_full = (
            stump.split_mse(eval_full, dec.fingerprint) if eval_full is not None else None
        )
        results.append(
            TrialResult(
                trial_id=trial,
                n_samples=cfg.n_samples,
                m=cfg.m,
                decoded=dec,
                fingerprint_string=fingerprint_string(d, dec.fingerprint),
                u=dec.u,
                mse_interaction=mse_i,
                mse_best_single=best_single_primary,
                effective=effectiveness(mse_i, best_single_primary),
                wall_time=wall,
                mse_interaction_full=mse_i_full,
                mse_best_single_full=best_single_full,
            )
        )
    return results


def overlap_matrix(d: Dataset, fps: list[FingerprintSet]) -> OverlapMatrix:
    """Pairwise fraction of samples on which two fingerprints split identically."""
    if not fps:
        raise EmptyInputError("no fingerprints to compare")
    cols = np.stack([stump.interaction_values(d, f) for f in fps], axis=1)
    k = len(fps)
    values = np.ones((k, k), dtype=np.float64)
    for a in range(k):
        for b in range(a + 1, k):
            frac = float((cols[:, a] == cols[:, b]).mean())
            values[a, b] = values[b, a] = frac
    labels = tuple(fingerprint_string(d, f) for f in fps)
    return OverlapMatrix(labels, values)


def importance(
    d: Dataset, generated: list[FingerprintSet], depth: int = 5
) -> ImportanceReport:
    """Importance from a greedy variance-reduction tree over base plus
    generated columns, fitted on all samples.

    A node splits on the column with the largest drop from parent variance to
    count-weighted child variance (ties to the lowest column index); each
    split credits its column with node_size * variance_drop.
    """
    if depth < 1:
        raise RangeError("depth must be >= 1")
    columns = [d.features]
    labels = list(d.feature_names)
    for f in generated:
        columns.append(stump.interaction_values(d, f)[:, None])
        labels.append(fingerprint_string(d, f))
    x = np.hstack(columns).astype(np.float64)
    t = d.targets
    scores = np.zeros(x.shape[1], dtype=np.float64)

    def recurse(rows: np.ndarray, level: int) -> None:
        n = rows.size
        if n < 2 or level >= depth:
            return
        tr = t[rows]
        parent_var = float(tr.var())
        if parent_var <= 0.0:
            return
        sub = x[rows]
        n1 = sub.sum(axis=0)
        n0 = n - n1
        usable = (n1 > 0) & (n0 > 0)
        if not usable.any():
            return
        s1 = tr @ sub
        q1 = (tr * tr) @ sub
        s0 = tr.sum() - s1
        q0 = (tr * tr).sum() - q1
        with np.errstate(divide="ignore", invalid="ignore"):
            var1 = np.maximum(q1 / n1 - (s1 / n1) ** 2, 0.0)
            var0 = np.maximum(q0 / n0 - (s0 / n0) ** 2, 0.0)
        child = np.where(usable, (n1 * var1 + n0 * var0) / n, np.inf)
        gains = parent_var - child
        j = int(np.argmax(np.where(usable, gains, -np.inf)))
        if gains[j] <= 0.0:
            return
        scores[j] += n * float(gains[j])
        mask = sub[:, j] != 0
        recurse(rows[mask], level + 1)
        recurse(rows[~mask], level + 1)

    recurse(np.arange(d.n_samples), 0)

    by_label: dict[str, float] = {}
    for label, score in zip(labels, scores):
        by_label[label] = by_label.get(label, 0.0) + float(score)
    model = {
        "kind": "variance_reduction_tree",
        "depth": depth,
        "n_columns": x.shape[1],
        "n_samples": d.n_samples,
    }
    return ImportanceReport(by_label, model)


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["config", "trials", "overlap", "importance", "effective_counts"],
    "additionalProperties": False,
    "properties": {
        "config": {"type": "object"},
        "trials": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "trial_id",
                    "n_samples",
                    "m",
                    "u",
                    "fingerprint",
                    "effective",
                    "mse_best_single",
                ],
                "properties": {
                    "trial_id": {"type": "integer", "minimum": 0},
                    "n_samples": {"type": "integer", "minimum": 1},
                    "m": {"type": "integer", "minimum": 1},
                    "u": {"type": "integer", "minimum": 0},
                    "fingerprint": {"type": "string"},
                    "fingerprint_indices": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0},
                    },
                    "effective": {"type": "boolean"},
                    "valid": {"type": "boolean"},
                    "c1_violations": {"type": "integer", "minimum": 0},
                    "c2_violations": {"type": "integer", "minimum": 0},
                    "c3_violated": {"type": "boolean"},
                    "swmse": {"type": "number"},
                    "mse_interaction": {"type": ["number", "null"]},
                    "mse_best_single": {"type": "number"},
                    "mse_interaction_full": {"type": ["number", "null"]},
                    "mse_best_single_full": {"type": ["number", "null"]},
                    "wall_time": {"type": "number", "minimum": 0},
                    "note": {"type": "string"},
                },
            },
        },
        "overlap": {
            "type": ["object", "null"],
            "required": ["labels", "values"],
            "properties": {
                "labels": {"type": "array", "items": {"type": "string"}},
                "values": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                },
            },
        },
        "importance": {
            "type": ["object", "null"],
            "required": ["model", "scores"],
            "properties": {
                "model": {"type": "object"},
                "scores": {
                    "type": "object",
                    "additionalProperties": {"type": "number"},
                },
            },
        },
        "effective_counts": {
            "type": "object",
            "patternProperties": {r"^\d+,\d+$": {"type": "integer", "minimum": 0}},
            "additionalProperties": False,
        },
    },
}


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def trial_to_json(r: TrialResult) -> dict:
    out = {
        "trial_id": r.trial_id,
        "n_samples": r.n_samples,
        "m": r.m,
        "u": r.u,
        "fingerprint": r.fingerprint_string,
        "fingerprint_indices": (
            list(r.decoded.fingerprint.selected) if r.decoded.fingerprint else []
        ),
        "effective": r.effective,
        "valid": r.decoded.valid,
        "c1_violations": r.decoded.c1_violations,
        "c2_violations": r.decoded.c2_violations,
        "c3_violated": r.decoded.c3_violated,
        "swmse": r.decoded.swmse,
        "mse_interaction": r.mse_interaction,
        "mse_best_single": r.mse_best_single,
        "wall_time": r.wall_time,
        "note": r.note,
    }
    if r.mse_interaction_full is not None or r.mse_best_single_full is not None:
        out["mse_interaction_full"] = r.mse_interaction_full
        out["mse_best_single_full"] = r.mse_best_single_full
    return out


def effective_counts(results: list[TrialResult]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for r in results:
        key = f"{r.n_samples},{r.m}"
        counts.setdefault(key, 0)
        if r.effective:
            counts[key] += 1
    return counts


def build_report(
    results: list[TrialResult],
    overlap: OverlapMatrix | None,
    imp: ImportanceReport | None,
    config: dict | None = None,
) -> dict:
    report = {
        "config": config or {},
        "trials": [trial_to_json(r) for r in results],
        "overlap": (
            {
                "labels": list(overlap.labels),
                "values": [[float(v) for v in row] for row in overlap.values],
            }
            if overlap is not None
            else None
        ),
        "importance": (
            {"model": imp.model, "scores": {k: float(v) for k, v in imp.scores.items()}}
            if imp is not None
            else None
        ),
        "effective_counts": effective_counts(results),
    }
    validate_report(report)
    return report


def write_report_files(report: dict, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json plus the two CSV views; returns the paths written.

    JSON is serialized with sorted keys so writing, reading back and
    re-serializing is byte-identical.
    """
    validate_report(report)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / "report.json"
        json_path.write_text(
            json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

        scores = (report["importance"] or {}).get("scores", {})
        rows_path = out / "effective_fingerprints.csv"
        lines = [",".join(TRIAL_CSV_COLUMNS)]
        ordered = sorted(
            (t for t in report["trials"] if t["effective"]),
            key=lambda t: (t["n_samples"], t["m"], t["trial_id"]),
        )
        for idx, t in enumerate(ordered, start=1):
            score = scores.get(t["fingerprint"])
            lines.append(
                ",".join(
                    [
                        str(idx),
                        str(t["n_samples"]),
                        str(t["m"]),
                        str(t["u"]),
                        "" if score is None else repr(float(score)),
                        t["fingerprint"],
                    ]
                )
            )
        rows_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        counts = report["effective_counts"]
        cells = {}
        for key, count in counts.items():
            ns, m = (int(p) for p in key.split(","))
            cells[(ns, m)] = count
        ns_values = sorted({ns for ns, _ in cells})
        m_values = sorted({m for _, m in cells})
        counts_path = out / "effective_counts.csv"
        lines = ["n_samples," + ",".join(f"m={m}" for m in m_values)]
        for ns in ns_values:
            row = [str(ns)]
            for m in m_values:
                row.append("" if (ns, m) not in cells else str(cells[(ns, m)]))
            lines.append(",".join(row))
        counts_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write report files under {out}: {exc}") from exc
    return {"json": json_path, "trials_csv": rows_path, "counts_csv": counts_path}


def emit_report(
    results: list[TrialResult],
    overlap: OverlapMatrix | None,
    imp: ImportanceReport | None,
    path: str | Path,
    config: dict | None = None,
) -> dict:
    """Assemble, validate and write the full report; returns the report dict."""
    report = build_report(results, overlap, imp, config)
    write_report_files(report, path)
    return report
