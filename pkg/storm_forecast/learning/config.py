from dataclasses import dataclass
from typing import Any, Dict, Union

from ..errors import LearningError

# gamma = 1 / (5 * mean per-feature variance of the training data)
AUTO = "auto"

SCALER_FIT_CHOICES = ("train", "global")


@dataclass(frozen=True)
class SplitConfig:
    """Stratified hold-out split.

    ``scaler_fit`` selects the rows the min-max scaler is fitted on:
    ``train`` (default) or ``global`` (train and test together).
    """
    test_fraction: float = 0.2
    seed: int = 0
    scaler_fit: str = "train"

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise LearningError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.scaler_fit not in SCALER_FIT_CHOICES:
            raise LearningError(f"scaler_fit must be one of {SCALER_FIT_CHOICES}, got {self.scaler_fit!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {"test_fraction": self.test_fraction, "seed": self.seed, "scaler_fit": self.scaler_fit}


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    target_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise LearningError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if not self.target_ratio > 0:
            raise LearningError(f"target_ratio must be > 0, got {self.target_ratio}")

    def to_dict(self) -> Dict[str, Any]:
        return {"k_neighbors": self.k_neighbors, "target_ratio": self.target_ratio, "seed": self.seed}


@dataclass(frozen=True)
class SvmConfig:
    """Soft-margin Gaussian SVM settings.

    ``max_passes`` counts sweeps of n pair updates, n being the training size.
    """
    c: float = 1.0
    gamma: Union[float, str] = AUTO
    tolerance: float = 1e-3
    max_passes: int = 10_000
    grid_search: bool = False

    def __post_init__(self):
        if not self.c > 0:
            raise LearningError(f"C must be > 0, got {self.c}")
        if self.gamma != AUTO:
            try:
                gamma = float(self.gamma)
            except (TypeError, ValueError) as e:
                raise LearningError(f"gamma must be a positive number or '{AUTO}', got {self.gamma!r}", e)
            if not gamma > 0:
                raise LearningError(f"gamma must be > 0, got {gamma}")
            object.__setattr__(self, "gamma", gamma)
        if not self.tolerance > 0:
            raise LearningError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_passes < 1:
            raise LearningError(f"max_passes must be >= 1, got {self.max_passes}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "gamma": self.gamma,
            "tolerance": self.tolerance,
            "max_passes": self.max_passes,
            "grid_search": self.grid_search,
        }
