"""Command-line interface.

Subcommands: search (QUBO trial runs), fullsearch, evaluate, overlap,
report, export-qubo.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import experiment, qubo, search as search_mod, stump
from .dataset import augment_complements, center_targets, load_dataset, subsample
from .errors import QubofpError
from .qubo import PenaltyWeights
from .solver import AnnealSchedule
from .stump import FingerprintSet


def _load(dataset_path, augment, center):
    d = load_dataset(dataset_path)
    if augment:
        d = augment_complements(d)
    if center:
        d = center_targets(d)
    return d


def _parse_fingerprint(d, spec: str) -> FingerprintSet:
    indices = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        indices.append(int(token) if token.isdigit() else d.column(token))
    return FingerprintSet(tuple(indices))


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


dataset_option = click.option(
    "--dataset", "dataset_path", required=True, type=click.Path(exists=True),
    help="Dataset CSV (id,target,<binary fingerprint columns...>).",
)
augment_option = click.option(
    "--augment", is_flag=True, help="Append NOT_<name> complement columns on load."
)
center_option = click.option(
    "--center", is_flag=True, help="Mean-center targets on load (off by default)."
)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except QubofpError as exc:
            raise click.ClickException(str(exc)) from exc


@click.group(cls=_Group)
def main():
    """Interaction-fingerprint search via QUBO annealing."""


@main.command("search")
@dataset_option
@augment_option
@center_option
@click.option("--m", "m_values", type=int, multiple=True, required=True,
              help="Cardinality cap; repeat for a sweep.")
@click.option("--n-samples", "n_samples_values", type=int, multiple=True,
              help="Subsample size; repeat for a sweep (default: all rows).")
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sweeps", type=int, default=5000, show_default=True)
@click.option("--restarts", type=int, default=8, show_default=True)
@click.option("--penalty-scale", type=float, default=1.0, show_default=True,
              help="Multiplier on the default penalty weights 2*N_S*Var(t).")
@click.option("--eval-set", type=click.Choice(experiment.EVAL_SETS), default="sample",
              show_default=True, help="Where effectiveness is judged.")
@click.option("--importance-depth", type=int, default=5, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for report.json and the CSV views.")
def search_cmd(dataset_path, augment, center, m_values, n_samples_values, trials,
               seed, sweeps, restarts, penalty_scale, eval_set, importance_depth,
               out_dir):
    """Run annealing trials over (n_samples, m) cells and emit a report."""
    d = _load(dataset_path, augment, center)
    if not n_samples_values:
        n_samples_values = (d.n_samples,)
    schedule = AnnealSchedule(sweeps=sweeps, restarts=restarts, seed=seed)

    results = []
    for n_samples in n_samples_values:
        sample = subsample(d, n_samples, seed)
        weights = PenaltyWeights.for_targets(sample.targets, scale=penalty_scale)
        for m in m_values:
            cfg = experiment.TrialConfig(
                n_samples=n_samples, m=m, trials=trials, seed=seed,
                schedule=schedule, weights=weights, eval_set=eval_set,
            )
            cell = experiment.run_trials(d, cfg)
            results.extend(cell)
            n_eff = sum(r.effective for r in cell)
            click.echo(f"n_samples={n_samples} m={m}: {n_eff}/{trials} effective trials")

    seen = set()
    effective_fps = []
    for r in results:
        if r.effective and r.decoded.fingerprint is not None:
            if r.decoded.fingerprint.selected not in seen:
                seen.add(r.decoded.fingerprint.selected)
                effective_fps.append(r.decoded.fingerprint)
    overlap = experiment.overlap_matrix(d, effective_fps) if effective_fps else None
    imp = experiment.importance(d, effective_fps, depth=importance_depth)
    config = {
        "dataset": str(dataset_path),
        "augment": augment,
        "center": center,
        "m": list(m_values),
        "n_samples": list(n_samples_values),
        "trials": trials,
        "seed": seed,
        "sweeps": sweeps,
        "restarts": restarts,
        "penalty_scale": penalty_scale,
        "eval_set": eval_set,
        "importance_depth": importance_depth,
    }
    experiment.emit_report(results, overlap, imp, out_dir, config)
    click.echo(f"report written to {Path(out_dir) / 'report.json'}")


@main.command("fullsearch")
@dataset_option
@augment_option
@center_option
@click.option("--m", type=int, required=True)
@click.option("--objective", type=click.Choice(search_mod.OBJECTIVES),
              default="swmse", show_default=True)
@click.option("--budget", type=int, default=search_mod.DEFAULT_BUDGET, show_default=True)
@click.option("--n-samples", type=int, default=None, help="Optional subsample size.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Optional JSON output file.")
def fullsearch_cmd(dataset_path, augment, center, m, objective, budget, n_samples,
                   seed, out_path):
    """Exhaustive subset search up to the cardinality cap."""
    d = _load(dataset_path, augment, center)
    if n_samples is not None:
        d = subsample(d, n_samples, seed)
    result = search_mod.full_search(d, m, objective=objective, budget=budget)
    payload = {
        "fingerprint": experiment.fingerprint_string(d, result.best),
        "fingerprint_indices": list(result.best.selected),
        "u": result.best.u,
        "swmse": result.swmse,
        "mse": result.mse,
        "candidates_evaluated": result.candidates_evaluated,
        "wall_time": result.wall_time,
        "objective": objective,
    }
    if out_path:
        Path(out_path).write_text(
            json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    _echo_json(payload)


@main.command("evaluate")
@dataset_option
@augment_option
@center_option
@click.option("--fingerprint", "fingerprint_spec", required=True,
              help="Comma-separated column names or indices, e.g. OH,RING,NOT_N.")
def evaluate_cmd(dataset_path, augment, center, fingerprint_spec):
    """Score one interaction fingerprint against the single-column baseline."""
    d = _load(dataset_path, augment, center)
    f = _parse_fingerprint(d, fingerprint_spec)
    g = stump.interaction_values(d, f)
    s = stump.split_stats(d.targets, g)
    mse_i = stump.mse(s, d.n_samples)
    best_j, best_mse = stump.best_single_baseline(d)
    _echo_json({
        "fingerprint": experiment.fingerprint_string(d, f),
        "u": f.u,
        "support": int(g.sum()),
        "mse": mse_i,
        "swmse": stump.swmse(s, d.n_samples),
        "best_single": {"name": d.feature_names[best_j], "mse": best_mse},
        "effective": experiment.effectiveness(mse_i, best_mse),
    })


@main.command("overlap")
@dataset_option
@augment_option
@click.option("--fingerprint", "fingerprint_specs", multiple=True, required=True,
              help="Repeatable: one comma-separated fingerprint per flag.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def overlap_cmd(dataset_path, augment, fingerprint_specs, out_path):
    """Pairwise match fractions between interaction fingerprints."""
    d = _load(dataset_path, augment, False)
    fps = [_parse_fingerprint(d, spec) for spec in fingerprint_specs]
    om = experiment.overlap_matrix(d, fps)
    payload = {
        "labels": list(om.labels),
        "values": [[float(v) for v in row] for row in om.values],
    }
    if out_path:
        Path(out_path).write_text(
            json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    _echo_json(payload)


@main.command("report")
@click.option("--in", "in_paths", multiple=True, required=True,
              type=click.Path(exists=True), help="Repeatable: report.json inputs.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def report_cmd(in_paths, out_dir):
    """Merge one or more report.json files and re-emit the report views."""
    merged_trials = []
    configs = []
    overlap = None
    imp = None
    for p in in_paths:
        data = json.loads(Path(p).read_text(encoding="utf-8"))
        merged_trials.extend(data["trials"])
        configs.append(data.get("config", {}))
        if len(in_paths) == 1:
            overlap = data.get("overlap")
            imp = data.get("importance")
    counts: dict[str, int] = {}
    for t in merged_trials:
        key = f"{t['n_samples']},{t['m']}"
        counts.setdefault(key, 0)
        if t["effective"]:
            counts[key] += 1
    report = {
        "config": {"merged_from": [str(p) for p in in_paths], "inputs": configs},
        "trials": merged_trials,
        "overlap": overlap,
        "importance": imp,
        "effective_counts": counts,
    }
    experiment.write_report_files(report, out_dir)
    click.echo(f"merged report written to {Path(out_dir) / 'report.json'}")


@main.command("export-qubo")
@dataset_option
@augment_option
@center_option
@click.option("--m", type=int, required=True)
@click.option("--n-samples", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--penalty-scale", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def export_qubo_cmd(dataset_path, augment, center, m, n_samples, seed,
                    penalty_scale, out_path):
    """Compile the QUBO and write it in the plain-text interop format."""
    d = _load(dataset_path, augment, center)
    if n_samples is not None:
        d = subsample(d, n_samples, seed)
    weights = PenaltyWeights.for_targets(d.targets, scale=penalty_scale)
    model = qubo.build_qubo(d, m, weights)
    qubo.export_qubo(model, out_path)
    click.echo(f"{model.n_variables} variables, "
               f"{len(model.quadratic)} couplings -> {out_path}")


if __name__ == "__main__":
    main()
