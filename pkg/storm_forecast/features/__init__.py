from .records import (
    FEATURE_NAMES,
    N_FEATURES,
    PREV_STORM_INDEX,
    DailySunspotRecord,
    FeatureVector,
    LabeledExample,
    feature_matrix,
)
from .scaling import Scaler, fit_scaler, transform, transform_examples
from .assemble import assemble_examples, wolf_proxy
from .extract import extract_features
from .store import DatasetStore, FeatureStore, atomic_write_text, dataset_csv_text

__all__ = [
    "FEATURE_NAMES",
    "N_FEATURES",
    "PREV_STORM_INDEX",
    "DailySunspotRecord",
    "FeatureVector",
    "LabeledExample",
    "feature_matrix",
    "Scaler",
    "fit_scaler",
    "transform",
    "transform_examples",
    "assemble_examples",
    "wolf_proxy",
    "extract_features",
    "DatasetStore",
    "FeatureStore",
    "atomic_write_text",
    "dataset_csv_text",
]
