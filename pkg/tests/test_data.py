import math

import numpy as np
import pytest

from hlab.data import (
    load_flips,
    load_table,
    save_flips,
    save_table,
    synth_gaussians,
)
from hlab.errors import ParseError
from hlab.learners import LearnerSpec
from hlab.cv import make_cv_plan
from hlab.stats import cv_accuracy


def write(path, text):
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_four_row_numeric(self, tmp_path):
        path = write(
            tmp_path / "d.csv",
            "f1,f2,label\n1,2,a\n3,4,b\n5,6,a\n7,8,b\n",
        )
        ds = load_table(path)
        assert ds.n_instances == 4
        assert [f.is_categorical for f in ds.features] == [False, False]
        assert ds.classes == ("a", "b")
        assert ds.ids.tolist() == [0, 1, 2, 3]
        assert ds.X[0].tolist() == [1.0, 2.0]

    def test_missing_marker_keeps_column_numeric(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,label\n1,a\n?,b\n3,a\n")
        ds = load_table(path)
        assert not ds.features[0].is_categorical
        assert math.isnan(ds.X[1, 0])
        assert not math.isnan(ds.X[0, 0])

    def test_single_class_rejected(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,label\n1,a\n2,a\n")
        with pytest.raises(ParseError, match="single-class"):
            load_table(path)

    def test_empty_file_rejected(self, tmp_path):
        path = write(tmp_path / "d.csv", "")
        with pytest.raises(ParseError):
            load_table(path)

    def test_header_only_rejected(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,label\n")
        with pytest.raises(ParseError, match="no data rows"):
            load_table(path)

    def test_ragged_row_reports_line(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,f2,label\n1,2,a\n3,b\n")
        with pytest.raises(ParseError, match="line 3"):
            load_table(path)

    def test_missing_class_label_rejected(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,label\n1,a\n2,?\n3,b\n")
        with pytest.raises(ParseError, match="class"):
            load_table(path)

    def test_class_col_flag(self, tmp_path):
        path = write(tmp_path / "d.csv", "label,f1\na,1\nb,2\n")
        ds = load_table(path, class_col="label")
        assert ds.classes == ("a", "b")
        assert ds.features[0].name == "f1"

    def test_categorical_inference_first_appearance_order(self, tmp_path):
        path = write(tmp_path / "d.csv", "f1,label\nzebra,a\napple,b\nzebra,a\n")
        ds = load_table(path)
        assert ds.features[0].categories == ("zebra", "apple")
        assert ds.X[:, 0].tolist() == [0.0, 1.0, 0.0]


class TestAnnotatedFormat:
    TEXT = (
        "% comment\n"
        "@relation demo\n"
        "@attribute size numeric\n"
        "@attribute color {red,green,blue}\n"
        "@attribute class {a,b}\n"
        "@data\n"
        "1.5,red,a\n"
        "?,blue,b\n"
        "2.5,?,a\n"
    )

    def test_load(self, tmp_path):
        ds = load_table(write(tmp_path / "d.arff", self.TEXT))
        assert ds.name == "demo"
        assert ds.features[1].categories == ("red", "green", "blue")
        assert math.isnan(ds.X[1, 0]) and math.isnan(ds.X[2, 1])
        assert ds.classes == ("a", "b")

    def test_undeclared_category_rejected(self, tmp_path):
        bad = self.TEXT.replace("2.5,?,a", "2.5,mauve,a")
        with pytest.raises(ParseError, match="mauve"):
            load_table(write(tmp_path / "d.arff", bad))

    def test_round_trip(self, tmp_path):
        ds = load_table(write(tmp_path / "d.arff", self.TEXT))
        out = tmp_path / "copy.arff"
        save_table(ds, str(out))
        back = load_table(str(out))
        assert back.classes == ds.classes
        assert [f.categories for f in back.features] == [f.categories for f in ds.features]
        assert np.array_equal(back.y, ds.y)
        assert np.allclose(back.X, ds.X, equal_nan=True)


class TestCsvRoundTrip:
    def test_identity_with_missing_and_categoricals(self, tmp_path, mixed_dataset):
        out = tmp_path / "m.csv"
        save_table(mixed_dataset, str(out))
        back = load_table(str(out))
        assert back.classes == mixed_dataset.classes
        assert [f.name for f in back.features] == [f.name for f in mixed_dataset.features]
        assert [f.categories for f in back.features] == [
            f.categories for f in mixed_dataset.features
        ]
        assert np.array_equal(back.y, mixed_dataset.y)
        assert np.allclose(back.X, mixed_dataset.X, equal_nan=True)
        assert np.array_equal(back.ids, mixed_dataset.ids)

    def test_float_values_survive_exactly(self, tmp_path):
        ds = synth_gaussians(10, dims=3, separation=2.0, seed=5)
        out = tmp_path / "g.csv"
        save_table(ds, str(out))
        back = load_table(str(out))
        assert np.array_equal(back.X, ds.X)


class TestSynthGaussians:
    def test_zero_noise_has_empty_flip_list(self):
        ds = synth_gaussians(50, noise_rate=0.0, seed=1)
        assert len(ds.meta["flipped_ids"]) == 0

    def test_flip_count_is_rounded_fraction(self):
        ds = synth_gaussians(100, noise_rate=0.1, seed=1)
        assert len(ds.meta["flipped_ids"]) == 20
        flipped = ds.meta["flipped_ids"]
        original = ds.meta["original_labels"]
        assert np.array_equal(ds.y[flipped], 1 - original)

    def test_cluster_centers(self):
        ds = synth_gaussians(2000, dims=2, separation=4.0, seed=3)
        assert ds.X[ds.y == 0, 0].mean() == pytest.approx(-2.0, abs=0.1)
        assert ds.X[ds.y == 1, 0].mean() == pytest.approx(2.0, abs=0.1)

    def test_noise_rate_bounds(self):
        with pytest.raises(ValueError):
            synth_gaussians(10, noise_rate=0.5)

    def test_zero_separation_accuracy_near_chance(self):
        # Bayes accuracy is 0.5; any learner should sit in [0.35, 0.65].
        spec = LearnerSpec("knn", "ib5", {"k": 5})
        for seed in range(10):
            ds = synth_gaussians(30, dims=2, separation=0.0, seed=seed)
            plan = make_cv_plan(ds, repeats=1, folds=3, master_seed=seed)
            acc = cv_accuracy(spec, ds, plan, seed=seed)
            assert 0.35 <= acc <= 0.65

    def test_flips_sidecar_round_trip(self, tmp_path):
        ds = synth_gaussians(20, noise_rate=0.2, seed=9)
        path = tmp_path / "s.flips.tsv"
        save_flips(ds, str(path))
        ids, labels = load_flips(str(path), ds.classes)
        assert np.array_equal(ids, ds.meta["flipped_ids"])
        assert np.array_equal(labels, ds.meta["original_labels"])


class TestDatasetBasics:
    def test_subset_preserves_ids(self, mixed_dataset):
        sub = mixed_dataset.subset([3, 5])
        assert sub.ids.tolist() == [3, 5]
        assert sub.n_instances == 2

    def test_validate_accepts_fresh(self, mixed_dataset):
        mixed_dataset.validate()

    def test_validate_rejects_single_class(self, mixed_dataset):
        broken = mixed_dataset.subset([0, 1, 2])  # all class a
        with pytest.raises(ValueError, match="single-class"):
            broken.validate()

    def test_instance_view(self, mixed_dataset):
        inst = mixed_dataset.instance(1)
        assert inst.id == 1
        assert inst.label == 0
        assert inst.features.tolist() == [2.0, 1.0]


class TestAnnotatedClassCol:
    def test_middle_attribute_as_class(self, tmp_path):
        text = (
            "@relation demo\n"
            "@attribute a numeric\n"
            "@attribute verdict {yes,no}\n"
            "@attribute b numeric\n"
            "@data\n"
            "1,yes,10\n"
            "2,no,20\n"
        )
        path = tmp_path / "mid.arff"
        path.write_text(text)
        ds = load_table(str(path), class_col="verdict")
        assert ds.classes == ("yes", "no")
        assert [f.name for f in ds.features] == ["a", "b"]
        assert ds.X[1].tolist() == [2.0, 20.0]
