import datetime

import numpy as np
import pytest

from storm_forecast.clustering import DbscanParams
from storm_forecast.errors import FeatureError, ImagingError
from storm_forecast.features import (
    DailySunspotRecord,
    DatasetStore,
    FeatureStore,
    FeatureVector,
    LabeledExample,
    Scaler,
    assemble_examples,
    dataset_csv_text,
    extract_features,
    fit_scaler,
    transform,
    transform_examples,
    wolf_proxy,
)
from storm_forecast.imaging import CannyParams, GrayImage
from storm_forecast.ingest import KpDay
from storm_forecast.models.storm import StormClass

D = datetime.date


def kp_day(day, peak):
    return KpDay(day, (1.0, 1.0, 2.0, peak, 2.0, 1.0, 1.0, 1.0))


def test_feature_vector_validation():
    with pytest.raises(FeatureError):
        FeatureVector((1, 2, 3))
    with pytest.raises(FeatureError):
        FeatureVector((1, 2, 0.5, 3, 4))
    with pytest.raises(FeatureError):
        FeatureVector((-1, 2, 0, 3, 4))
    assert FeatureVector((-0.2, 1.5, 0.5, 0, 0), scaled=True)[0] == -0.2


def test_record_validation_and_consistency():
    with pytest.raises(FeatureError):
        DailySunspotRecord(D(2015, 1, 1), -1, 0)
    assert DailySunspotRecord(D(2015, 1, 1), 5, 2).is_consistent()
    assert not DailySunspotRecord(D(2015, 1, 1), 1, 3).is_consistent()
    assert wolf_proxy(DailySunspotRecord(None, 7, 3)) == 37


def test_scaler_maps_min_to_zero_and_max_to_one():
    vectors = [FeatureVector((2, 1, 0, 4, 1)), FeatureVector((10, 5, 1, 8, 3)), FeatureVector((6, 3, 0, 6, 2))]
    scaler = fit_scaler(vectors)
    assert transform(scaler, vectors[0]).values == (0.0, 0.0, 0.0, 0.0, 0.0)
    assert transform(scaler, vectors[1]).values == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert transform(scaler, vectors[2]).values == (0.5, 0.5, 0.0, 0.5, 0.5)


def test_scaler_degenerate_feature_maps_to_zero():
    scaler = fit_scaler([FeatureVector((3, 1, 0, 2, 1)), FeatureVector((3, 2, 1, 4, 1))])
    assert scaler.degenerate == (True, False, False, False, True)
    scaled = transform(scaler, FeatureVector((9, 1, 0, 3, 7)))
    assert scaled.values[0] == 0.0 and scaled.values[4] == 0.0
    assert scaled.values[3] == 0.5


def test_scaler_does_not_clip_out_of_range_values():
    scaler = fit_scaler([FeatureVector((0, 0, 0, 0, 0)), FeatureVector((10, 10, 1, 10, 10))])
    scaled = transform(scaler, FeatureVector((20, 5, 1, 0, 0)))
    assert scaled.scaled
    assert scaled.values[0] == 2.0


def test_scaler_errors():
    with pytest.raises(FeatureError):
        fit_scaler([])
    scaler = fit_scaler([FeatureVector((0, 0, 0, 0, 0)), FeatureVector((1, 1, 1, 1, 1))])
    scaled = transform(scaler, FeatureVector((1, 1, 1, 1, 1)))
    with pytest.raises(FeatureError, match="already scaled"):
        transform(scaler, scaled)
    with pytest.raises(FeatureError, match="raw"):
        fit_scaler([scaled, scaled])
    with pytest.raises(FeatureError, match="at least 2"):
        fit_scaler([FeatureVector((1, 1, 0, 1, 1))])
    with pytest.raises(FeatureError):
        Scaler(mins=(1, 0, 0, 0, 0), maxs=(0, 1, 1, 1, 1))
    assert Scaler.from_dict(scaler.to_dict()) == scaler


def test_transform_examples_keeps_labels():
    examples = [LabeledExample(D(2015, 1, k), FeatureVector((k, 0, 0, k, 1)), StormClass.NO_STORM)
                for k in range(1, 4)]
    scaled = transform_examples(fit_scaler(examples), examples)
    assert [e.date for e in scaled] == [e.date for e in examples]
    assert all(e.features.scaled for e in scaled)


def test_assemble_labels_with_next_day_kp():
    records = [DailySunspotRecord(D(2015, 3, d), d, d % 3) for d in (15, 16, 17, 18)]
    kp = [kp_day(D(2015, 3, 15), 5.0), kp_day(D(2015, 3, 16), 2.0),
          kp_day(D(2015, 3, 17), 4.67), kp_day(D(2015, 3, 18), 6.0)]
    skipped = []
    examples = assemble_examples(records, kp, skipped=skipped)

    assert [e.date for e in examples] == [D(2015, 3, 16), D(2015, 3, 17)]
    first, second = examples
    # prev = Mar 15 (storm), cur = Mar 16, label from Mar 17 (4.67 -> no storm)
    assert first.features.values == (15.0, 0.0, 1.0, 16.0, 1.0)
    assert first.label is StormClass.NO_STORM
    assert second.features.values == (16.0, 1.0, 0.0, 17.0, 2.0)
    assert second.label is StormClass.STORM
    assert skipped == [D(2015, 3, 15), D(2015, 3, 18)]


def test_assemble_skips_gaps():
    records = [DailySunspotRecord(D(2015, 3, d), 1, 1) for d in (1, 2, 4, 5)]
    kp = [kp_day(D(2015, 3, d), 1.0) for d in range(1, 7)]
    examples = assemble_examples(records, kp)
    assert [e.date for e in examples] == [D(2015, 3, 2), D(2015, 3, 5)]


def test_assemble_rejects_undated_records():
    with pytest.raises(FeatureError):
        assemble_examples([DailySunspotRecord(None, 1, 1)], [])


def test_extract_features_counts(sun_image):
    record = extract_features(sun_image(n_spots=5, n_groups=2), CannyParams(), DbscanParams(),
                              day=D(2015, 1, 2))
    assert record.date == D(2015, 1, 2)
    assert (record.sunspots, record.regions) == (5, 2)


def test_extract_features_spotless_sun(sun_image):
    record = extract_features(sun_image(n_spots=0, size=512), CannyParams(), DbscanParams())
    assert (record.sunspots, record.regions) == (0, 0)


def test_extract_features_blank_image():
    with pytest.raises(ImagingError, match="no solar disk detected"):
        extract_features(GrayImage.filled(64, 64, 0.0), CannyParams(), DbscanParams())


def test_extract_features_debug_dump(sun_image, tmp_path):
    extract_features(sun_image(n_spots=2, size=256), CannyParams(), DbscanParams(),
                     day=D(2015, 1, 2), debug_dir=str(tmp_path))
    day_dir = tmp_path / "2015-01-02"
    assert (day_dir / "binary.pgm").exists()
    assert (day_dir / "clusters.csv").read_text().startswith("x,y,label")


def test_feature_store_merge_and_reload(tmp_path):
    store = FeatureStore(str(tmp_path / "features.csv"))
    assert store.load() == []
    store.merge([DailySunspotRecord(D(2015, 1, 3), 4, 2), DailySunspotRecord(D(2015, 1, 1), 1, 1)])
    store.merge([DailySunspotRecord(D(2015, 1, 2), 0, 0), DailySunspotRecord(D(2015, 1, 3), 5, 2)])
    records = store.load()
    assert [r.date for r in records] == [D(2015, 1, 1), D(2015, 1, 2), D(2015, 1, 3)]
    assert records[-1].sunspots == 5
    assert (tmp_path / "features.csv").read_text().splitlines()[0] == "date,sunspots,regions"
    assert not list(tmp_path.glob(".*.tmp"))


def test_dataset_store_round_trip(tmp_path, examples_factory):
    examples = examples_factory(4, 8)
    store = DatasetStore(str(tmp_path / "dataset.csv"))
    store.save(examples)
    loaded = store.load()
    assert [(e.date, e.features.values, e.label) for e in loaded] == \
        [(e.date, e.features.values, e.label) for e in sorted(examples, key=lambda e: e.date)]
    assert dataset_csv_text(loaded) == (tmp_path / "dataset.csv").read_text()
    header = dataset_csv_text(loaded).splitlines()[0]
    assert header == "date,prev_sunspots,prev_regions,prev_storm,cur_sunspots,cur_regions,label"


def test_dataset_store_missing_file(tmp_path):
    with pytest.raises(FeatureError):
        DatasetStore(str(tmp_path / "nope.csv")).load()


def test_feature_matrix_shape(examples_factory):
    from storm_forecast.features import feature_matrix
    X = feature_matrix([e.features for e in examples_factory(2, 3)])
    assert X.shape == (5, 5)
    assert feature_matrix([]).shape == (0, 5)
    assert np.isfinite(X).all()


def random_vectors(rng, n):
    return [FeatureVector((int(rng.integers(0, 30)), int(rng.integers(0, 6)), int(rng.integers(0, 2)),
                           int(rng.integers(0, 30)), int(rng.integers(0, 6)))) for _ in range(n)]


def test_scaled_fitting_set_lies_in_unit_box():
    rng = np.random.default_rng(14)
    for _ in range(50):
        vectors = random_vectors(rng, int(rng.integers(2, 20)))
        scaler = fit_scaler(vectors)
        for v in vectors:
            values = np.asarray(transform(scaler, v).values)
            assert np.all((values >= 0.0) & (values <= 1.0))


def test_scaler_is_affine_per_coordinate():
    rng = np.random.default_rng(15)
    for _ in range(50):
        scaler = fit_scaler(random_vectors(rng, 10))
        live = ~np.asarray(scaler.degenerate)
        x, y = rng.uniform(0.0, 40.0, size=(2, 5))
        a = float(rng.uniform())
        mixed = scaler.transform_array(a * x + (1.0 - a) * y)
        combined = a * scaler.transform_array(x) + (1.0 - a) * scaler.transform_array(y)
        assert np.allclose(mixed[live], combined[live], atol=1e-12)
