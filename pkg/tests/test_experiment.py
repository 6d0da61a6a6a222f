import dataclasses
import json

import numpy as np
import pytest

from qubofp.dataset import subsample
from qubofp.errors import EmptyInputError, RangeError
from qubofp.experiment import (
    ImportanceReport,
    OverlapMatrix,
    TrialConfig,
    TrialResult,
    build_report,
    effective_counts,
    effectiveness,
    emit_report,
    fingerprint_string,
    importance,
    overlap_matrix,
    run_trials,
    validate_report,
    write_report_files,
)
from qubofp.qubo import DecodedSolution
from qubofp.solver import AnnealSchedule
from qubofp.stump import FingerprintSet, best_single_baseline, split_mse

from conftest import make_dataset, planted_dataset, random_dataset


def fast_schedule(seed=0):
    return AnnealSchedule(sweeps=400, restarts=2, seed=seed)


def strip_wall_time(results):
    return [dataclasses.replace(r, wall_time=0.0) for r in results]


class TestEffectiveness:
    def test_strict_improvement(self):
        assert effectiveness(0.4, 0.5)

    def test_tie_is_not_improvement(self):
        assert not effectiveness(0.5, 0.5)

    def test_worse(self):
        assert not effectiveness(0.6, 0.5)


class TestRunTrials:
    def test_cardinality_and_ids(self):
        d = random_dataset(30, 6, seed=1)
        cfg = TrialConfig(n_samples=20, m=2, trials=10, seed=3, schedule=fast_schedule())
        results = run_trials(d, cfg)
        assert len(results) == 10
        assert [r.trial_id for r in results] == list(range(10))

    def test_deterministic(self):
        d = random_dataset(30, 6, seed=2)
        cfg = TrialConfig(n_samples=25, m=2, trials=4, seed=5, schedule=fast_schedule())
        a = run_trials(d, cfg)
        b = run_trials(d, cfg)
        assert strip_wall_time(a) == strip_wall_time(b)

    def test_planted_interaction_found_effective(self):
        d, planted = planted_dataset(n_base=15, n_samples=100, k=3, noise=0.1, seed=11)
        cfg = TrialConfig(
            n_samples=100, m=3, trials=10, seed=7,
            schedule=AnnealSchedule(sweeps=2000, restarts=4, seed=7),
        )
        results = run_trials(d, cfg)
        assert sum(r.effective for r in results) >= 8

    def test_m1_never_effective(self):
        d = random_dataset(40, 8, seed=9)
        cfg = TrialConfig(n_samples=30, m=1, trials=6, seed=1, schedule=fast_schedule())
        results = run_trials(d, cfg)
        assert all(not r.effective for r in results)

    def test_shared_subsample_across_m(self):
        # the same (seed, n_samples) pair must see identical rows for every m
        d = random_dataset(50, 6, seed=4)
        rows = subsample(d, 20, 13)
        for m in (1, 2):
            cfg = TrialConfig(n_samples=20, m=m, trials=1, seed=13,
                              schedule=fast_schedule())
            results = run_trials(d, cfg)
            assert results[0].mse_best_single == pytest.approx(
                best_single_baseline(rows)[1]
            )

    def test_eval_set_both_reports_full_numbers(self):
        d, _ = planted_dataset(n_base=8, n_samples=60, k=2, noise=0.1, seed=21)
        cfg = TrialConfig(n_samples=30, m=2, trials=2, seed=2,
                          schedule=fast_schedule(), eval_set="both")
        results = run_trials(d, cfg)
        for r in results:
            assert r.mse_best_single_full is not None
            if r.decoded.fingerprint is not None:
                assert r.mse_interaction_full == pytest.approx(
                    split_mse(d, r.decoded.fingerprint)
                )

    def test_oversized_sample_rejected(self):
        d = random_dataset(10, 4, seed=6)
        cfg = TrialConfig(n_samples=20, m=2, trials=1, seed=0, schedule=fast_schedule())
        with pytest.raises(RangeError):
            run_trials(d, cfg)

    def test_empty_decode_marks_trial_ineffective(self, monkeypatch):
        # a solver returning no selector bits must not abort the run
        import qubofp.experiment as experiment_mod
        from qubofp.qubo import Assignment, energy

        d = random_dataset(12, 4, seed=8)

        def all_zero_anneal(q, s):
            a = Assignment(np.zeros(q.layout.total, dtype=np.int8))
            return a, energy(q, a)

        monkeypatch.setattr(experiment_mod, "simulated_anneal", all_zero_anneal)
        monkeypatch.setattr(experiment_mod, "refine_local", lambda q, a: a)
        cfg = TrialConfig(n_samples=10, m=2, trials=2, seed=0, schedule=fast_schedule())
        results = run_trials(d, cfg)
        assert len(results) == 2
        for r in results:
            assert not r.effective
            assert r.u == 0
            assert r.mse_interaction is None
            assert r.note != ""


class TestOverlapMatrix:
    def test_identical_sets_match_fully(self):
        d = random_dataset(25, 5, seed=14)
        f = FingerprintSet((0, 2))
        om = overlap_matrix(d, [f, f])
        assert om.values[0, 1] == 1.0

    def test_complementary_splits_never_match(self):
        d = make_dataset([[1, 0], [1, 0], [0, 1]], [0.0, 1.0, 2.0], names=("A", "B"))
        om = overlap_matrix(d, [FingerprintSet((0,)), FingerprintSet((1,))])
        assert om.values[0, 1] == 0.0

    def test_half_agreement(self):
        d = make_dataset(
            [[1, 1], [1, 1], [1, 0], [1, 0]], [0.0] * 4, names=("A", "B")
        )
        om = overlap_matrix(d, [FingerprintSet((0,)), FingerprintSet((1,))])
        assert om.values[0, 1] == 0.5

    def test_symmetry_unit_diagonal_and_range(self, rng):
        d = random_dataset(40, 7, seed=15)
        fps = [
            FingerprintSet(tuple(sorted(rng.choice(7, size=rng.integers(1, 4), replace=False))))
            for _ in range(5)
        ]
        om = overlap_matrix(d, fps)
        assert np.allclose(om.values, om.values.T)
        assert np.all(np.diag(om.values) == 1.0)
        assert ((om.values >= 0.0) & (om.values <= 1.0)).all()
        assert len(om.labels) == 5

    def test_empty_input(self):
        d = random_dataset(5, 3, seed=16)
        with pytest.raises(EmptyInputError):
            overlap_matrix(d, [])


class TestImportance:
    def test_constant_target_all_zero(self):
        d = make_dataset([[1, 0], [0, 1], [1, 1]], [2.0, 2.0, 2.0])
        rep = importance(d, [], depth=3)
        assert all(v == 0.0 for v in rep.scores.values())

    def test_single_predictive_column_takes_all(self):
        d = make_dataset(
            [[1, 1], [1, 0], [0, 1], [0, 0]],
            [1.0, 1.0, 3.0, 3.0],
            names=("GOOD", "NOISE"),
        )
        rep = importance(d, [], depth=1)
        assert rep.scores["GOOD"] > 0
        assert rep.scores["NOISE"] == 0.0
        # the root split removes all variance: score is n * Var(t)
        assert rep.scores["GOOD"] == pytest.approx(4 * d.targets.var())

    def test_matches_recursive_bruteforce_oracle(self):
        def oracle_tree(x, t, depth):
            scores = {}

            def var(v):
                return float(np.var(v)) if len(v) else 0.0

            def rec(rows, level):
                if len(rows) < 2 or level >= depth:
                    return
                tv = t[rows]
                parent = var(tv)
                if parent <= 0:
                    return
                best = None
                for j in range(x.shape[1]):
                    ones = [i for i in rows if x[i, j] == 1]
                    zeros = [i for i in rows if x[i, j] == 0]
                    if not ones or not zeros:
                        continue
                    child = (len(ones) * var(t[ones]) + len(zeros) * var(t[zeros])) / len(rows)
                    gain = parent - child
                    if best is None or gain > best[0] + 1e-15:
                        best = (gain, j, ones, zeros)
                if best is None or best[0] <= 0:
                    return
                gain, j, ones, zeros = best
                scores[j] = scores.get(j, 0.0) + len(rows) * gain
                rec(ones, level + 1)
                rec(zeros, level + 1)

            rec(list(range(x.shape[0])), 0)
            return scores

        d = random_dataset(20, 5, seed=17)
        rep = importance(d, [], depth=2)
        expected = oracle_tree(d.features, d.targets, 2)
        for j, name in enumerate(d.feature_names):
            assert rep.scores[name] == pytest.approx(expected.get(j, 0.0), rel=1e-9)

    def test_generated_columns_get_labels(self):
        d, planted = planted_dataset(n_base=6, n_samples=40, k=2, noise=0.05, seed=18)
        fp = FingerprintSet(planted)
        rep = importance(d, [fp], depth=3)
        label = fingerprint_string(d, fp)
        assert label in rep.scores
        assert rep.scores[label] > 0  # the planted conjunction drives the target

    def test_scores_nonnegative(self):
        d = random_dataset(30, 6, seed=19)
        rep = importance(d, [FingerprintSet((0, 1))], depth=4)
        assert all(v >= 0.0 for v in rep.scores.values())

    def test_depth_validation(self):
        d = random_dataset(5, 2, seed=20)
        with pytest.raises(RangeError):
            importance(d, [], depth=0)


class TestFingerprintString:
    def test_renders_negation(self):
        d = make_dataset(
            [[1, 1, 0, 0, 0, 1]],
            [0.0],
            names=("OH", "RING", "N", "NOT_OH", "NOT_RING", "NOT_N"),
        )
        assert fingerprint_string(d, FingerprintSet((0, 1, 5))) == "OH∧RING∧¬N"


def make_trial(trial_id, n_samples, m, u, fingerprint, effective, indices=(0,)):
    dec = DecodedSolution(
        fingerprint=FingerprintSet(tuple(indices)),
        u=u,
        c1_violations=0,
        c2_violations=0,
        c3_violated=False,
        swmse=0.25,
        valid=True,
    )
    return TrialResult(
        trial_id=trial_id,
        n_samples=n_samples,
        m=m,
        decoded=dec,
        fingerprint_string=fingerprint,
        u=u,
        mse_interaction=0.3 if effective else 0.9,
        mse_best_single=0.5,
        effective=effective,
        wall_time=0.01,
    )


class TestEmitReport:
    def test_empty_results(self, tmp_path):
        report = emit_report([], None, None, tmp_path / "out")
        assert report["trials"] == []
        assert report["effective_counts"] == {}
        assert (tmp_path / "out" / "report.json").exists()
        assert (tmp_path / "out" / "effective_fingerprints.csv").read_text(
            encoding="utf-8"
        ).startswith("ID,N_S,M,U,I,fingerprint")

    def test_round_trip_is_byte_identical(self, tmp_path):
        results = [
            make_trial(0, 50, 3, 2, "A∧B", True),
            make_trial(1, 50, 3, 1, "A", False),
        ]
        om = OverlapMatrix(labels=("A∧B",), values=np.ones((1, 1)))
        imp = ImportanceReport(scores={"A∧B": 12.5}, model={"depth": 5})
        emit_report(results, om, imp, tmp_path, config={"seed": 1})
        path = tmp_path / "report.json"
        first = path.read_text(encoding="utf-8")
        write_report_files(json.loads(first), tmp_path)
        assert path.read_text(encoding="utf-8") == first

    def test_table_row_shape(self, tmp_path):
        results = [
            make_trial(0, 50, 3, 3, "X∧Y∧Z", True),
            make_trial(1, 50, 3, 3, "P∧Q∧R", True),
            make_trial(2, 50, 4, 3, "U∧V∧W", True),
            make_trial(3, 50, 4, 2, "RING∧¬QCH3", True),
            make_trial(4, 50, 4, 2, "IGNORED", False),
        ]
        imp = ImportanceReport(
            scores={"RING∧¬QCH3": 1027.0}, model={"depth": 5}
        )
        emit_report(results, None, imp, tmp_path)
        lines = (tmp_path / "effective_fingerprints.csv").read_text(
            encoding="utf-8"
        ).splitlines()
        assert lines[0] == "ID,N_S,M,U,I,fingerprint"
        row4 = lines[4].split(",")
        assert row4[0] == "4"
        assert row4[1] == "50"
        assert row4[2] == "4"
        assert row4[3] == "2"
        assert float(row4[4]) == 1027.0
        assert row4[5] == "RING∧¬QCH3"
        assert len(row4) == 6

    def test_counts_matrix_shape(self, tmp_path):
        results = [
            make_trial(0, 50, 2, 1, "A", False),
            make_trial(1, 50, 3, 2, "A∧B", True),
            make_trial(2, 100, 3, 2, "A∧B", True),
            make_trial(3, 100, 3, 2, "A∧C", True),
        ]
        report = emit_report(results, None, None, tmp_path)
        assert report["effective_counts"] == {"50,2": 0, "50,3": 1, "100,3": 2}
        lines = (tmp_path / "effective_counts.csv").read_text(
            encoding="utf-8"
        ).splitlines()
        assert lines[0] == "n_samples,m=2,m=3"
        assert lines[1] == "50,0,1"
        assert lines[2] == "100,,2"

    def test_counts_equal_effective_trials(self):
        d, _ = planted_dataset(n_base=10, n_samples=60, k=2, noise=0.1, seed=30)
        all_results = []
        for m in (1, 2):
            cfg = TrialConfig(n_samples=40, m=m, trials=5, seed=3,
                              schedule=fast_schedule(3))
            all_results.extend(run_trials(d, cfg))
        counts = effective_counts(all_results)
        for (key, count) in counts.items():
            ns, m = (int(x) for x in key.split(","))
            expected = sum(
                r.effective for r in all_results if r.n_samples == ns and r.m == m
            )
            assert count == expected

    def test_schema_validation_rejects_garbage(self):
        with pytest.raises(Exception):
            validate_report({"config": {}, "trials": "nope"})

    def test_unwritable_path_raises_io_error(self, tmp_path):
        from qubofp.errors import IoError

        blocker = tmp_path / "blocked"
        blocker.write_text("i am a file, not a directory", encoding="utf-8")
        with pytest.raises(IoError):
            emit_report([], None, None, blocker / "sub")

    def test_report_from_run_trials_validates(self, tmp_path):
        d, _ = planted_dataset(n_base=8, n_samples=50, k=2, noise=0.1, seed=31)
        cfg = TrialConfig(n_samples=30, m=2, trials=3, seed=8,
                          schedule=fast_schedule(8))
        results = run_trials(d, cfg)
        fps = [r.decoded.fingerprint for r in results if r.decoded.fingerprint]
        om = overlap_matrix(d, fps) if fps else None
        imp = importance(d, fps, depth=3)
        report = build_report(results, om, imp, config={"seed": 8})
        validate_report(report)
        emit_report(results, om, imp, tmp_path / "r")
