import logging
from dataclasses import dataclass, replace
from typing import List, Sequence

from ..evaluation.roc import roc_curve
from ..features.records import LabeledExample, feature_matrix
from ..features.scaling import fit_scaler, transform_examples
from .balance import oversample
from .config import SmoteConfig, SplitConfig, SvmConfig
from .split import stratified_split
from .svm import auto_gamma, decision_values, train_gsvm

logger = logging.getLogger(__name__)

C_GRID = (0.1, 1.0, 10.0)
GAMMA_MULTIPLIERS = (0.01, 0.1, 1.0)
VALIDATION_FRACTION = 0.2


@dataclass(frozen=True)
class GridPoint:
    c: float
    gamma: float
    gamma_multiplier: float
    auc: float


@dataclass(frozen=True)
class GridSearchResult:
    best: SvmConfig
    points: List[GridPoint]


def grid_search(train: Sequence[LabeledExample], cfg: SvmConfig, smote_cfg: SmoteConfig,
                seed: int) -> GridSearchResult:
    """
    Pick C and gamma by validation AUC on a stratified fold of ``train``.

    Candidates are C in C_GRID and gamma in GAMMA_MULTIPLIERS x AUTO, where
    AUTO is computed on the scaled, oversampled fitting fold. Ties keep the
    first candidate in grid order.

    Args:
        train: Raw (unscaled) authentic training examples
        cfg: Base solver settings; tolerance and max_passes are kept
        smote_cfg: Oversampling applied to the fitting fold
        seed: Seed of the validation split
    """
    fit_part, validation = stratified_split(train, SplitConfig(test_fraction=VALIDATION_FRACTION, seed=seed))
    scaler = fit_scaler(fit_part)
    balanced, _, _ = oversample(fit_part, smote_cfg)
    scaled = transform_examples(scaler, balanced)
    base_gamma = auto_gamma(feature_matrix([e.features for e in scaled]))

    val_scaled = transform_examples(scaler, validation)
    X_val = feature_matrix([e.features for e in val_scaled])
    y_val = [e.label for e in validation]

    points = []
    best = None
    for c in C_GRID:
        for multiplier in GAMMA_MULTIPLIERS:
            candidate = replace(cfg, c=c, gamma=multiplier * base_gamma, grid_search=False)
            model = train_gsvm(scaled, candidate)
            auc = roc_curve(decision_values(model, X_val), y_val).auc
            point = GridPoint(c=c, gamma=candidate.gamma, gamma_multiplier=multiplier, auc=auc)
            points.append(point)
            logger.info(f"Grid C={c} gamma={candidate.gamma:.4g} ({multiplier} x auto): validation AUC={auc:.4f}")
            if best is None or auc > best[1].auc:
                best = (candidate, point)

    logger.info(f"Grid search picked C={best[1].c}, gamma={best[1].gamma:.4g} (AUC {best[1].auc:.4f})")
    return GridSearchResult(best=best[0], points=points)
