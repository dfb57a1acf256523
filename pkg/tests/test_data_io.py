import json

import numpy as np
import pytest
from pydantic import ValidationError

from latent_multiview_ssc.errors import (
    ConfigurationError,
    DataParseError,
    DimensionMismatchError,
    RateTooLowError,
)
from latent_multiview_ssc.services.data_io import DatasetManifest, load, make_split, save_views
from latent_multiview_ssc.services.synthetic import SyntheticSpec, generate_synthetic


def _write_manifest(tmp_path, views, labels, dims, classes=2):
    for v, rows in enumerate(views):
        (tmp_path / f"v{v}.csv").write_text(rows)
    (tmp_path / "labels.txt").write_text(labels)
    manifest = {
        "name": "toy",
        "views": [f"v{v}.csv" for v in range(len(views))],
        "labels": "labels.txt",
        "dims": dims,
        "classes": classes,
    }
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(manifest))
    return path


def test_save_then_load_is_exact(tmp_path, rng):
    views = [rng.normal(size=(3, 12)) * 1e3, rng.uniform(size=(5, 12))]
    labels = rng.integers(0, 3, size=12)
    manifest_path = save_views(tmp_path, "roundtrip", views, labels, 3, base_seed=4)

    loaded_views, loaded_labels = load(manifest_path)
    for original, loaded in zip(views, loaded_views):
        np.testing.assert_array_equal(loaded, original)
    np.testing.assert_array_equal(loaded_labels, labels)
    assert DatasetManifest.from_file(manifest_path).base_seed == 4


def test_sonar_shaped_manifest_loads(tmp_path, rng):
    views = [rng.uniform(size=(20, 208)) for _ in range(3)]
    labels = np.array([0] * 97 + [1] * 111)
    manifest_path = save_views(tmp_path, "sonar", views, labels, 2)

    loaded_views, loaded_labels = load(manifest_path)
    assert [view.shape for view in loaded_views] == [(20, 208)] * 3
    assert loaded_labels.shape == (208,)


def test_feature_count_disagreeing_with_manifest(tmp_path):
    path = _write_manifest(tmp_path, ["1,2,3\n4,5,6\n"], "0\n1\n", [[2, 2]])
    with pytest.raises(DimensionMismatchError, match="view 0"):
        load(path)


def test_sample_count_disagreeing_with_manifest(tmp_path):
    path = _write_manifest(tmp_path, ["1,2\n4,5\n"], "0\n1\n0\n", [[2, 3]])
    with pytest.raises(DimensionMismatchError, match="view 0"):
        load(path)


def test_empty_label_file_is_a_parse_error(tmp_path):
    path = _write_manifest(tmp_path, ["1,2\n4,5\n"], "", [[2, 2]])
    with pytest.raises(DataParseError, match="empty label file"):
        load(path)


def test_bad_value_reports_line(tmp_path):
    path = _write_manifest(tmp_path, ["1,2\n4,x\n7,8\n"], "0\n1\n0\n", [[2, 3]])
    with pytest.raises(DataParseError) as info:
        load(path)
    assert info.value.line == 2


def test_label_outside_class_range(tmp_path):
    path = _write_manifest(tmp_path, ["1,2\n4,5\n"], "0\n2\n", [[2, 2]])
    with pytest.raises(DataParseError) as info:
        load(path)
    assert info.value.line == 2


def test_manifest_invariants():
    with pytest.raises(ValidationError):
        DatasetManifest(name="x", views=[], labels="l.txt", dims=[], classes=2)
    with pytest.raises(ValidationError):
        DatasetManifest(name="x", views=["a.csv"], labels="l.txt", dims=[[0, 5]], classes=2)


def test_make_split_one_per_class_at_low_rate():
    labels = np.array([0] * 10 + [1] * 10)
    mask = make_split(labels, 0.1, 0)
    assert mask.sum() == 2
    assert mask[:10].sum() == 1 and mask[10:].sum() == 1


def test_make_split_sonar_shaped_half():
    labels = np.array([0] * 97 + [1] * 111)
    assert make_split(labels, 0.5, 0).sum() == 104


def test_make_split_is_deterministic_per_seed():
    labels = np.repeat(np.arange(4), 50)
    np.testing.assert_array_equal(make_split(labels, 0.2, 3), make_split(labels, 0.2, 3))
    assert not np.array_equal(make_split(labels, 0.2, 3), make_split(labels, 0.2, 4))


@pytest.mark.parametrize("rate", [0.1, 0.2, 0.3, 0.5])
def test_make_split_count_slack(rng, rate):
    labels = rng.integers(0, 5, size=173)
    classes = np.unique(labels).size
    mask = make_split(labels, rate, 1)
    assert abs(mask.sum() - rate * labels.size) <= classes
    for label in np.unique(labels):
        assert mask[labels == label].any()


def test_make_split_rejects_bad_rates():
    labels = np.array([0] * 5 + [1] * 5)
    with pytest.raises(RateTooLowError):
        make_split(labels, 0.1, 0)
    with pytest.raises(ConfigurationError):
        make_split(labels, 1.0, 0)


def test_synthetic_clusters_are_nearest_center_separable(planted_spec):
    data = generate_synthetic(planted_spec)
    distances = np.linalg.norm(data.latent[:, :, None] - data.centers[:, None, :], axis=0)
    np.testing.assert_array_equal(np.argmin(distances, axis=1), data.labels)
    assert [view.shape for view in data.views] == [(20, 200), (30, 200), (40, 200)]


def test_noise_free_synthetic_is_exactly_low_rank():
    data = generate_synthetic(SyntheticSpec(n_samples=30, n_classes=3, noise_sigma=0.0))
    for view, factor in zip(data.views, data.view_factors):
        np.testing.assert_allclose(view, factor @ data.latent, atol=0.0)


def test_synthetic_seeds_differ_in_values_not_shapes():
    first = generate_synthetic(SyntheticSpec(rng_seed=1))
    second = generate_synthetic(SyntheticSpec(rng_seed=2))
    assert [v.shape for v in first.views] == [v.shape for v in second.views]
    assert not np.allclose(first.views[0], second.views[0])


def test_synthetic_spec_invariants():
    with pytest.raises(ValidationError):
        SyntheticSpec(n_samples=5, n_classes=3)
    with pytest.raises(ValidationError):
        SyntheticSpec(view_dims=[4, 0])
