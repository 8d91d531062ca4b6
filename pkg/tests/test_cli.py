import os

import pytest

from hlab.cli import main
from hlab.data import load_table
from hlab.hardness import load_profile


@pytest.fixture
def synth_file(tmp_path):
    path = str(tmp_path / "data.csv")
    code = main(
        [
            "synth", "--out", path, "--n-per-class", "20", "--dims", "2",
            "--separation", "3.0", "--noise", "0.1", "--seed", "4",
        ]
    )
    assert code == 0
    return path


@pytest.fixture
def profile_file(tmp_path, synth_file):
    path = str(tmp_path / "profile.tsv")
    code = main(
        [
            "hardness", "--data", synth_file, "--repeats", "1", "--folds", "3",
            "--seed", "2", "--out", path,
        ]
    )
    assert code == 0
    return path


class TestSynth:
    def test_writes_dataset_and_sidecar(self, tmp_path, synth_file, capsys):
        ds = load_table(synth_file)
        assert ds.n_instances == 40
        sidecar = str(tmp_path / "data.flips.tsv")
        assert os.path.exists(sidecar)
        lines = open(sidecar).read().splitlines()
        assert lines[0] == "instance_id\toriginal_label"
        assert len(lines) == 1 + 4  # 10% of 40, rounded


class TestHardnessOrderFilter:
    def test_profile_is_loadable(self, profile_file):
        profile = load_profile(profile_file)
        assert profile.n_instances == 40
        assert profile.matrix.n_trials == 7  # default 7 learners x 1 repeat

    def test_order_prints_ascending(self, synth_file, profile_file, capsys):
        code = main(["order", "--profile", profile_file, "--data", synth_file])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "instance_id\tih"
        ih_values = [float(line.split("\t")[1]) for line in out[1:]]
        assert ih_values == sorted(ih_values)
        assert len(ih_values) == 40

    def test_order_detects_modified_dataset(self, tmp_path, profile_file, capsys):
        other = str(tmp_path / "other.csv")
        main(["synth", "--out", other, "--n-per-class", "20", "--seed", "99"])
        code = main(["order", "--profile", profile_file, "--data", other])
        assert code == 2
        assert "does not match" in capsys.readouterr().err

    def test_filter_writes_survivors(self, tmp_path, synth_file, profile_file, capsys):
        out = str(tmp_path / "filtered.csv")
        code = main(
            ["filter", "--data", synth_file, "--profile", profile_file,
             "--tau", "0.75", "--out", out]
        )
        assert code == 0
        profile = load_profile(profile_file)
        survivors = load_table(out)
        assert survivors.n_instances == int((profile.ih < 0.75).sum())


class TestClusterCod:
    def test_prints_clusters_and_newick(self, synth_file, capsys):
        code = main(
            ["cluster-cod", "--data", synth_file, "--repeats", "1", "--folds", "3",
             "--seed", "0", "--cut", "0.18"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("newick: (")
        assert "-> representative" in out


class TestTrainCurriculum:
    def test_stage_log_written(self, tmp_path, synth_file, profile_file, capsys):
        log_path = str(tmp_path / "stages.tsv")
        code = main(
            ["train-curriculum", "--data", synth_file, "--profile", profile_file,
             "--base", "mlp", "--trigger", "epochs:5", "--initial-ih", "0.5",
             "--seed", "1", "--stage-log", log_path]
        )
        assert code == 0
        lines = open(log_path).read().splitlines()
        assert lines[0] == "stage\tthreshold\tactive\tepochs_or_converged"
        assert len(lines) >= 2
        assert "resubstitution accuracy" in capsys.readouterr().out

    def test_dt_base_with_prune_flags(self, tmp_path, synth_file, profile_file):
        code = main(
            ["train-curriculum", "--data", synth_file, "--profile", profile_file,
             "--base", "c45", "--trigger", "epochs:5", "--no-prune", "--seed", "1"]
        )
        assert code == 0


class TestBoost:
    def test_adaboost_summary(self, synth_file, capsys):
        code = main(
            ["boost", "--data", synth_file, "--algo", "adaboost", "--base", "c45",
             "--iters", "3", "--seed", "0"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "adaboost: " in out
        assert "training-set accuracy" in out

    def test_filtered_boost_requires_profile(self, synth_file, capsys):
        code = main(
            ["boost", "--data", synth_file, "--filter-tau", "0.75"]
        )
        assert code == 2
        assert "requires --profile" in capsys.readouterr().err

    def test_filtered_boost_with_profile(self, synth_file, profile_file):
        code = main(
            ["boost", "--data", synth_file, "--algo", "multiboost", "--base", "c45",
             "--iters", "3", "--seed", "0", "--filter-tau", "0.75",
             "--profile", profile_file]
        )
        assert code == 0


class TestRunCompareReport:
    def write_config(self, tmp_path, synth_file):
        other = str(tmp_path / "second.csv")
        main(["synth", "--out", other, "--n-per-class", "15", "--seed", "8",
              "--noise", "0.1"])
        cfg = tmp_path / "exp.ini"
        cfg.write_text(
            "\n".join(
                [
                    "[datasets]",
                    f"one = {synth_file}",
                    f"two = {other}",
                    "[cv]",
                    "repeats = 1",
                    "folds = 2",
                    "seed = 5",
                    "[hardness]",
                    "repeats = 1",
                    "folds = 3",
                    "learner.ib1.kind = knn",
                    "learner.ib1.k = 1",
                    "learner.nb.kind = naive-bayes",
                    "[methods]",
                    "orig = plain:nb",
                    "ih75 = plain:nb filtered",
                    "",
                ]
            )
        )
        return str(cfg)

    def test_run_compare_report_cycle(self, tmp_path, synth_file, capsys):
        cfg = self.write_config(tmp_path, synth_file)
        out_dir = str(tmp_path / "out")
        assert main(["run", "--config", cfg, "--out-dir", out_dir, "--quiet"]) == 0
        records = os.path.join(out_dir, "records.jsonl")
        assert os.path.exists(records)
        assert os.path.exists(os.path.join(out_dir, "report.tsv"))
        capsys.readouterr()

        assert main(
            ["compare", "--records", records, "--method-a", "ih75",
             "--method-b", "orig"]
        ) == 0
        out = capsys.readouterr().out
        assert "wilcoxon signed-rank" in out
        assert ">-=-<" in out

        report_dir = str(tmp_path / "fresh-report")
        assert main(
            ["report", "--records", records, "--out-dir", report_dir,
             "--methods", "orig,ih75"]
        ) == 0
        text = open(os.path.join(report_dir, "report.tsv")).read()
        assert text.splitlines()[0] == "method\trow\torig\tih75"

    def test_run_exit_code_on_failure(self, tmp_path, synth_file, capsys):
        cfg_path = self.write_config(tmp_path, synth_file)
        text = open(cfg_path).read().replace("folds = 3", "folds = 50")
        open(cfg_path, "w").write(text)
        out_dir = str(tmp_path / "out2")
        code = main(["run", "--config", cfg_path, "--out-dir", out_dir, "--quiet"])
        assert code == 1
        assert "FAILED" in capsys.readouterr().out


class TestVersionAndErrors:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(["transmogrify"])


class TestOutputSection:
    def test_run_uses_config_output_dir(self, tmp_path, synth_file):
        out_dir = tmp_path / "configured-out"
        cfg = tmp_path / "exp.ini"
        cfg.write_text(
            "\n".join(
                [
                    "[datasets]",
                    f"one = {synth_file}",
                    "[cv]",
                    "repeats = 1",
                    "folds = 2",
                    "seed = 5",
                    "[hardness]",
                    "repeats = 1",
                    "folds = 3",
                    "learner.ib1.kind = knn",
                    "learner.ib1.k = 1",
                    "learner.nb.kind = naive-bayes",
                    "[methods]",
                    "orig = plain:nb",
                    "[output]",
                    f"dir = {out_dir}",
                    "",
                ]
            )
        )
        assert main(["run", "--config", str(cfg), "--quiet"]) == 0
        assert (out_dir / "records.jsonl").exists()


class TestLearnerSetConfigFlag:
    def test_hardness_with_custom_learner_set(self, tmp_path, synth_file):
        cfg = tmp_path / "learners.ini"
        cfg.write_text(
            "[hardness]\n"
            "learner.ib1.kind = knn\n"
            "learner.ib1.k = 1\n"
            "learner.stump.kind = decision-stump\n"
        )
        out = str(tmp_path / "p2.tsv")
        assert main(
            ["hardness", "--data", synth_file, "--repeats", "2", "--folds", "3",
             "--seed", "0", "--out", out, "--config", str(cfg)]
        ) == 0
        profile = load_profile(out)
        assert profile.matrix.learner_names == ("ib1", "stump")
        assert profile.matrix.n_trials == 4  # 2 learners x 2 repeats

    def test_cluster_cod_linkage_choices(self, synth_file, capsys):
        for linkage in ("single", "complete"):
            assert main(
                ["cluster-cod", "--data", synth_file, "--repeats", "1",
                 "--folds", "3", "--seed", "0", "--linkage", linkage,
                 "--cut", "0.5"]
            ) == 0
            assert "newick" in capsys.readouterr().out


class TestConfigScopedRecords:
    def test_report_uses_latest_config_only(self, tmp_path, synth_file):
        cfg_path = TestRunCompareReport().write_config(tmp_path, synth_file)
        out_dir = str(tmp_path / "out")
        assert main(["run", "--config", cfg_path, "--out-dir", out_dir, "--quiet"]) == 0
        # change the seed and rerun into the same log
        text = open(cfg_path).read().replace("seed = 5", "seed = 6")
        open(cfg_path, "w").write(text)
        assert main(["run", "--config", cfg_path, "--out-dir", out_dir, "--quiet"]) == 0
        records_path = os.path.join(out_dir, "records.jsonl")
        from hlab.harness import load_records

        all_records = load_records(records_path)
        assert len(all_records) == 8  # 4 cells per config, two configs
        report_dir = str(tmp_path / "rep")
        assert main(
            ["report", "--records", records_path, "--out-dir", report_dir]
        ) == 0
        # report columns came from a single (the latest) config's records:
        # regenerating with the explicit older hash gives different numbers
        older = all_records[0].config_hash
        report_dir2 = str(tmp_path / "rep-old")
        assert main(
            ["report", "--records", records_path, "--out-dir", report_dir2,
             "--config-hash", older]
        ) == 0
        a = open(os.path.join(report_dir, "accuracies.tsv")).read()
        b = open(os.path.join(report_dir2, "accuracies.tsv")).read()
        assert a != b
