from .config import AUTO, SmoteConfig, SplitConfig, SvmConfig
from .split import holdout_count, stratified_split
from .smote import RoundRobinSampler, Smote, SyntheticPoint, smote, synthetic_count
from .balance import ClassBalance, oversample
from .svm import (
    SvmModel,
    TrainingTrace,
    auto_gamma,
    classify,
    decision_value,
    decision_values,
    fit_gsvm,
    kkt_violation,
    predict,
    rbf_kernel,
    train_gsvm,
)
from .persistence import dataset_fingerprint, load_model, save_model
from .grid import GridSearchResult, grid_search

__all__ = [
    "AUTO",
    "SmoteConfig",
    "SplitConfig",
    "SvmConfig",
    "holdout_count",
    "stratified_split",
    "RoundRobinSampler",
    "Smote",
    "SyntheticPoint",
    "smote",
    "synthetic_count",
    "ClassBalance",
    "oversample",
    "SvmModel",
    "TrainingTrace",
    "auto_gamma",
    "classify",
    "decision_value",
    "decision_values",
    "fit_gsvm",
    "kkt_violation",
    "predict",
    "rbf_kernel",
    "train_gsvm",
    "dataset_fingerprint",
    "load_model",
    "save_model",
    "GridSearchResult",
    "grid_search",
]
