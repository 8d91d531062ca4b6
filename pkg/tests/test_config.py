import textwrap

import pytest

from hlab.config import (
    MethodSpec,
    coerce,
    default_methods,
    load_config,
    parse_learner_entries,
    parse_method,
    parse_trigger,
)
from hlab.data import save_table, synth_gaussians
from hlab.errors import ConfigError


def write_config(tmp_path, body, datasets=2):
    paths = {}
    for i in range(datasets):
        name = f"ds{i}"
        path = tmp_path / f"{name}.csv"
        save_table(synth_gaussians(15, seed=i, name=name), str(path))
        paths[name] = path
    dataset_lines = "\n".join(f"{n} = {p}" for n, p in paths.items())
    text = f"[datasets]\n{dataset_lines}\n" + textwrap.dedent(body)
    cfg_path = tmp_path / "exp.ini"
    cfg_path.write_text(text)
    return str(cfg_path)


class TestPrimitives:
    def test_coerce(self):
        assert coerce("5") == 5
        assert coerce("0.5") == 0.5
        assert coerce("true") is True
        assert coerce("off") is False
        assert coerce("knn") == "knn"

    def test_parse_trigger(self):
        assert parse_trigger("convergence") == ("convergence", 0)
        assert parse_trigger("epochs:25") == ("every_n_epochs", 25)
        with pytest.raises(ConfigError):
            parse_trigger("epochs:zero")
        with pytest.raises(ConfigError):
            parse_trigger("whenever")

    def test_parse_method(self):
        m = parse_method("cl75", "curriculum:mlp filtered initial_ih=0.5")
        assert m.kind == "curriculum"
        assert m.base == "mlp"
        assert m.filtered
        assert m.params == {"initial_ih": 0.5}
        with pytest.raises(ConfigError):
            parse_method("x", "plainmlp")
        with pytest.raises(ConfigError):
            parse_method("x", "plain:mlp what")

    def test_default_methods_grid(self):
        methods = default_methods("mlp")
        assert [m.name for m in methods] == [
            "orig", "ih75", "ab", "mb", "cl", "ab75", "mb75", "cl75",
        ]
        assert sum(m.filtered for m in methods) == 4

    def test_parse_learner_entries(self):
        specs = parse_learner_entries(
            [
                ("learner.ib1.kind", "knn"),
                ("learner.ib1.k", "1"),
                ("learner.nb.kind", "naive-bayes"),
                ("repeats", "5"),
            ]
        )
        assert [s.name for s in specs] == ["ib1", "nb"]
        assert specs[0].params == {"k": 1}
        with pytest.raises(ConfigError, match="missing its kind"):
            parse_learner_entries([("learner.x.k", "1")])


class TestLoadConfig:
    BODY = """
        [cv]
        repeats = 1
        folds = 3
        seed = 5

        [hardness]
        repeats = 2
        folds = 4
        learner.ib1.kind = knn
        learner.ib1.k = 1
        learner.nb.kind = naive-bayes

        [filter]
        tau = 0.8

        [boost]
        iterations = 3

        [curriculum]
        trigger = epochs:20
        initial_ih = 0
        filtered_initial_ih = 0.5
        step = 0.25

        [methods]
        orig = plain:mlp
        ab75 = adaboost:c45 filtered
        cl = curriculum:mlp trigger=convergence
    """

    def test_full_parse(self, tmp_path):
        cfg = load_config(write_config(tmp_path, self.BODY))
        assert set(cfg.datasets) == {"ds0", "ds1"}
        assert cfg.cv_repeats == 1 and cfg.cv_folds == 3 and cfg.master_seed == 5
        assert cfg.ih_repeats == 2 and cfg.ih_folds == 4
        assert [s.name for s in cfg.learners] == ["ib1", "nb"]
        assert cfg.tau == 0.8
        assert cfg.boost_iterations == 3
        assert [m.name for m in cfg.methods] == ["orig", "ab75", "cl"]
        sched = cfg.schedule_for(cfg.methods[2])
        assert sched.trigger == "convergence"
        assert sched.initial_ih == 0.0

    def test_filtered_curriculum_gets_filtered_initial(self, tmp_path):
        cfg = load_config(write_config(tmp_path, self.BODY))
        cl75 = MethodSpec("cl75", "curriculum", "mlp", filtered=True)
        assert cfg.schedule_for(cl75).initial_ih == 0.5

    def test_defaults_when_sections_missing(self, tmp_path):
        cfg = load_config(write_config(tmp_path, ""))
        assert cfg.cv_repeats == 5 and cfg.cv_folds == 10
        assert len(cfg.learners) == 7
        assert len(cfg.methods) == 8
        assert cfg.tau == 0.75

    def test_missing_dataset_path_fails_validation(self, tmp_path):
        path = write_config(tmp_path, "")
        (tmp_path / "ds0.csv").unlink()
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "nope.ini"))

    def test_unknown_base_rejected(self, tmp_path):
        body = "[methods]\nx = plain:fern\n"
        with pytest.raises(ConfigError, match="fern"):
            load_config(write_config(tmp_path, body))


class TestConfigHash:
    def test_stable_across_loads(self, tmp_path):
        path = write_config(tmp_path, TestLoadConfig.BODY)
        assert load_config(path).config_hash() == load_config(path).config_hash()

    def test_sensitive_to_dataset_contents(self, tmp_path):
        path = write_config(tmp_path, TestLoadConfig.BODY)
        before = load_config(path).config_hash()
        save_table(synth_gaussians(15, seed=99, name="ds0"), str(tmp_path / "ds0.csv"))
        assert load_config(path).config_hash() != before

    def test_sensitive_to_seed(self, tmp_path):
        path = write_config(tmp_path, TestLoadConfig.BODY)
        cfg = load_config(path)
        before = cfg.config_hash()
        cfg.master_seed = 123
        assert cfg.config_hash() != before
