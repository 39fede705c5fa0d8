import datetime
import os

import numpy as np
import pytest

from storm_forecast.cli.synthetic import plan_spots, render_sun
from storm_forecast.features import FeatureVector, LabeledExample
from storm_forecast.imaging import GrayImage
from storm_forecast.models.storm import StormClass

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return os.path.join(FIXTURES, name)
    return _path


@pytest.fixture
def sun_image():
    """Builder: disk with ``n_spots`` dark spots in ``n_groups`` groups."""
    def _build(n_spots: int = 0, n_groups: int = 1, size: int = 1024) -> GrayImage:
        return GrayImage(render_sun(size, plan_spots(size, n_spots, n_groups)).astype(np.float64))
    return _build


def make_examples(n_storm: int, n_no_storm: int, seed: int = 0,
                  start: datetime.date = datetime.date(2015, 1, 1)):
    """Raw labeled examples where storms have clearly more spots than quiet days."""
    rng = np.random.default_rng(seed)
    labels = [StormClass.STORM] * n_storm + [StormClass.NO_STORM] * n_no_storm
    order = rng.permutation(len(labels))
    examples = []
    for k, idx in enumerate(order):
        label = labels[idx]
        base = 6 if label.is_storm else 1
        values = (base + int(rng.integers(0, 3)), int(rng.integers(0, 3)), float(rng.integers(0, 2)),
                  base + int(rng.integers(0, 3)), 1 + int(rng.integers(0, 2)))
        examples.append(LabeledExample(start + datetime.timedelta(days=k), FeatureVector(values), label))
    return examples


@pytest.fixture
def examples_factory():
    return make_examples
