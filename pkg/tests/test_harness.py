import os
import textwrap

import numpy as np
import pytest

import hlab.harness as harness_mod
from hlab.config import load_config
from hlab.cv import make_cv_plan
from hlab.data import save_table, synth_gaussians
from hlab.errors import HlabError
from hlab.harness import (
    RunRecord,
    failed_records,
    fold_profile,
    load_records,
    resolve_cache_dir,
    run_experiment,
)
from hlab.learners import LearnerSpec
from hlab.report import collect_accuracies, make_report, render_report_tsv


def small_config(tmp_path, methods=None, datasets=2):
    for i in range(datasets):
        save_table(
            synth_gaussians(20, dims=2, separation=3.0, noise_rate=0.1, seed=i, name=f"ds{i}"),
            str(tmp_path / f"ds{i}.csv"),
        )
    dataset_lines = "\n".join(f"ds{i} = {tmp_path}/ds{i}.csv" for i in range(datasets))
    methods = methods or "orig = plain:nb\nih75 = plain:nb filtered"
    body = textwrap.dedent(
        """
        [cv]
        repeats = 1
        folds = 2
        seed = 3

        [hardness]
        repeats = 1
        folds = 3
        learner.ib1.kind = knn
        learner.ib1.k = 1
        learner.nb.kind = naive-bayes

        [boost]
        iterations = 2

        [curriculum]
        trigger = epochs:5

        [methods]
        """
    )
    text = f"[datasets]\n{dataset_lines}\n{body}{methods}\n"
    path = tmp_path / "exp.ini"
    path.write_text(text)
    return load_config(str(path))


class TestRunExperiment:
    def test_counts_and_records(self, tmp_path):
        cfg = small_config(tmp_path)
        out = str(tmp_path / "out")
        records = run_experiment(cfg, out_dir=out)
        assert len(records) == 4  # 2 datasets x 2 methods
        for rec in records:
            assert rec.error is None
            assert len(rec.accuracies) == 2  # 1 repeat x 2 folds
            assert 0.0 <= rec.mean_accuracy <= 1.0
        assert len(load_records(os.path.join(out, "records.jsonl"))) == 4

    def test_resume_serves_from_cache_without_running(self, tmp_path, monkeypatch):
        cfg = small_config(tmp_path)
        out = str(tmp_path / "out")
        first = run_experiment(cfg, out_dir=out)

        def explode(args):
            raise AssertionError("cells must come from the record cache")

        monkeypatch.setattr(harness_mod, "run_cell", explode)
        second = run_experiment(cfg, out_dir=out)
        assert [r.to_json() for r in first] == [r.to_json() for r in second]

    def test_changed_config_reruns(self, tmp_path):
        cfg = small_config(tmp_path)
        out = str(tmp_path / "out")
        run_experiment(cfg, out_dir=out)
        cfg.master_seed = 999
        run_experiment(cfg, out_dir=out)
        assert len(load_records(os.path.join(out, "records.jsonl"))) == 8

    def test_failures_recorded_not_fatal(self, tmp_path):
        # tau high enough that filtering never strips a class won't fail;
        # force failure instead with an impossible fold count
        cfg = small_config(tmp_path, methods="orig = plain:nb")
        cfg.ih_folds = 50  # larger than any training fold
        cfg.methods = [
            cfg.methods[0],
            type(cfg.methods[0])("bad", "plain", "nb", filtered=True),
        ]
        out = str(tmp_path / "out")
        records = run_experiment(cfg, out_dir=out)
        failures = failed_records(records)
        assert len(failures) == 2  # the filtered method on both datasets
        assert all(r.method == "bad" for r in failures)
        assert all(r.error for r in failures)
        ok = [r for r in records if r.error is None]
        assert len(ok) == 2

    def test_worker_pool_matches_serial(self, tmp_path):
        cfg = small_config(tmp_path)
        out_serial = str(tmp_path / "serial")
        out_pool = str(tmp_path / "pool")
        serial = run_experiment(cfg, out_dir=out_serial, workers=1)
        pooled = run_experiment(cfg, out_dir=out_pool, workers=4)
        a = {(r.dataset, r.method): r.accuracies for r in serial}
        b = {(r.dataset, r.method): r.accuracies for r in pooled}
        assert a == b


class TestFoldProfileCache:
    def test_cache_key_ignores_test_data(self, tmp_path):
        cfg = small_config(tmp_path)
        ds = synth_gaussians(24, dims=2, separation=3.0, seed=5)
        plan = make_cv_plan(ds, 1, 3, master_seed=1)
        train = ds.subset(plan.train_rows(0, 0))
        cache = str(tmp_path / "cache")
        os.makedirs(cache)
        p1 = fold_profile(train, cfg, inner_seed=7, cache_dir=cache)
        files_before = sorted(os.listdir(cache))
        # same training fold again: served from the same file, bit-identical
        p2 = fold_profile(train, cfg, inner_seed=7, cache_dir=cache)
        assert sorted(os.listdir(cache)) == files_before
        assert np.array_equal(p1.ih, p2.ih)

    def test_env_var_overrides_cache_dir(self, tmp_path, monkeypatch):
        override = tmp_path / "elsewhere"
        monkeypatch.setenv("HLAB_CACHE_DIR", str(override))
        chosen = resolve_cache_dir(str(tmp_path / "out"))
        assert chosen == str(override)
        assert override.is_dir()


class TestReport:
    def records(self):
        accs = {
            ("m1", "d1"): 0.9, ("m1", "d2"): 0.8,
            ("m2", "d1"): 0.7, ("m2", "d2"): 0.85,
        }
        return [
            RunRecord(dataset=d, method=m, accuracies=[a], mean_accuracy=a)
            for (m, d), a in sorted(accs.items())
        ]

    def test_grid_shape_and_unit_diagonal(self):
        text = render_report_tsv(self.records(), methods=["m1", "m2"])
        lines = text.splitlines()
        assert lines[0] == "method\trow\tm1\tm2"
        assert lines[1].startswith("average\tacc\t0.8500\t0.7750")
        assert len(lines) == 2 + 2 * 2  # average + (p, wtl) per method
        m1_p = lines[2].split("\t")
        assert m1_p[0] == "m1" and m1_p[2] == "1"  # unit diagonal
        m1_wtl = lines[3].split("\t")
        assert m1_wtl[2] == "0-2-0"

    def test_identical_methods_tie_everywhere(self):
        records = [
            RunRecord(dataset=d, method=m, accuracies=[0.8], mean_accuracy=0.8)
            for d in ("d1", "d2") for m in ("m1", "m2")
        ]
        text = render_report_tsv(records, methods=["m1", "m2"])
        lines = text.splitlines()
        assert lines[2].split("\t")[3] == "1"
        assert lines[3].split("\t")[3] == "0-2-0"

    def test_coverage_mismatch_lists_missing_pairs(self):
        records = self.records()[:-1]
        with pytest.raises(HlabError, match="m2/d2"):
            collect_accuracies(records, methods=["m1", "m2"])

    def test_report_regenerates_from_persisted_records(self, tmp_path):
        cfg = small_config(tmp_path)
        out = str(tmp_path / "out")
        run_experiment(cfg, out_dir=out)
        persisted = load_records(os.path.join(out, "records.jsonl"))
        paths = make_report(persisted, out, methods=["orig", "ih75"])
        assert os.path.exists(paths["report.tsv"])
        assert os.path.exists(paths["report.md"])
        content = open(paths["report.tsv"]).read()
        assert content.startswith("method\trow\torig\tih75")

    def test_eight_method_grid(self, tmp_path):
        methods = "\n".join(
            f"m{i} = plain:nb" if i % 2 == 0 else f"m{i} = plain:ib1"
            for i in range(8)
        )
        cfg = small_config(tmp_path, methods=methods, datasets=1)
        cfg.learners = [
            LearnerSpec("knn", "ib1", {"k": 1}),
            LearnerSpec("naive-bayes", "nb"),
        ]
        out = str(tmp_path / "out")
        records = run_experiment(cfg, out_dir=out)
        assert len(records) == 8
        text = render_report_tsv(records, methods=[m.name for m in cfg.methods])
        lines = text.splitlines()
        assert len(lines[0].split("\t")) == 2 + 8
        assert len(lines) == 2 + 16


class TestCrashResume:
    def test_interrupted_run_resumes_remaining_cells_only(self, tmp_path, monkeypatch):
        cfg = small_config(tmp_path)  # 2 datasets x 2 methods = 4 cells
        out = str(tmp_path / "out")
        real_run_cell = harness_mod.run_cell
        calls = {"n": 0}

        def crash_on_third(args):
            calls["n"] += 1
            if calls["n"] == 3:
                raise KeyboardInterrupt
            return real_run_cell(args)

        monkeypatch.setattr(harness_mod, "run_cell", crash_on_third)
        with pytest.raises(KeyboardInterrupt):
            run_experiment(cfg, out_dir=out)
        survived = load_records(os.path.join(out, "records.jsonl"))
        assert len(survived) == 2  # the two completed cells hit the log

        calls["n"] = 0
        monkeypatch.setattr(harness_mod, "run_cell", real_run_cell)
        seen = []

        def counting(args):
            seen.append((args[1], args[3].name))
            return real_run_cell(args)

        monkeypatch.setattr(harness_mod, "run_cell", counting)
        records = run_experiment(cfg, out_dir=out)
        assert len(records) == 4
        assert len(seen) == 2  # only the two missing cells were trained
        assert not failed_records(records)
