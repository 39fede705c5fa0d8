"""
Gaussian-kernel soft-margin SVM trained with sequential minimal optimization.

The solver works on the dual

    max W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

with K(x, z) = exp(-gamma * |x - z|^2). Each iteration picks the maximal
violating pair (i, j) from the gradient G = Q a - 1, solves the two-variable
subproblem analytically and clips it to the box, keeping sum a_i y_i fixed.
Training stops once the violation m(a) - M(a) drops to the tolerance.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from sklearn.metrics.pairwise import pairwise_kernels

from ..errors import LearningError
from ..features.records import FeatureVector, LabeledExample, feature_matrix
from ..features.scaling import Scaler, transform
from ..models.storm import StormClass
from .config import AUTO, SvmConfig

logger = logging.getLogger(__name__)

# curvature floor for pairs of identical points
TAU = 1e-12
KERNEL_CACHE_ROWS = 4096


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return pairwise_kernels(np.atleast_2d(A), np.atleast_2d(B), metric="rbf", gamma=gamma)


def auto_gamma(X: np.ndarray) -> float:
    """1 / (5 * mean per-feature variance); 1.0 when every feature is constant."""
    mean_variance = float(np.mean(np.var(X, axis=0)))
    if mean_variance <= 0.0:
        logger.warning("All training features are constant; using gamma=1.0")
        return 1.0
    return 1.0 / (5.0 * mean_variance)


class KernelRows:
    """Kernel matrix rows computed on demand, least recently used dropped first."""

    def __init__(self, X: np.ndarray, gamma: float, max_rows: int = KERNEL_CACHE_ROWS):
        self.X = X
        self.gamma = gamma
        self.max_rows = max_rows
        self._rows = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        if i in self._rows:
            self._rows.move_to_end(i)
            return self._rows[i]
        values = rbf_kernel(self.X[i], self.X, self.gamma)[0]
        self._rows[i] = values
        if len(self._rows) > self.max_rows:
            self._rows.popitem(last=False)
        return values


@dataclass(eq=False)
class TrainingTrace:
    """Solver telemetry. ``objective[k]`` is W after k pair updates."""
    iterations: int
    objective: List[float]
    final_gap: float
    converged: bool
    alphas: np.ndarray

    @property
    def n_support(self) -> int:
        return int(np.sum(self.alphas > 0))


@dataclass(frozen=True, eq=False)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    gamma: float
    c: float
    scaler: Optional[Scaler] = None
    train_meta: Dict[str, str] = field(default_factory=dict)
    converged: bool = True
    trace: Optional[TrainingTrace] = None

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    @property
    def n_support(self) -> int:
        return self.support_vectors.shape[0]


def _violating_pair(alpha: np.ndarray, G: np.ndarray, y: np.ndarray, C: float):
    """(i, j, m - M) for the maximal violating pair; i is None when no pair exists."""
    minus_yG = -y * G
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    if not up.any() or not low.any():
        return None, None, 0.0
    i = int(np.argmax(np.where(up, minus_yG, -np.inf)))
    j = int(np.argmin(np.where(low, minus_yG, np.inf)))
    return i, j, float(minus_yG[i] - minus_yG[j])


def _solve_pair(alpha: np.ndarray, G: np.ndarray, y: np.ndarray, i: int, j: int,
                quad: float, C: float) -> None:
    """Analytic two-variable step, clipped to the box, in place."""
    quad = max(quad, TAU)
    if y[i] != y[j]:
        delta = (-G[i] - G[j]) / quad
        diff = alpha[i] - alpha[j]
        alpha[i] += delta
        alpha[j] += delta
        if diff > 0:
            if alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = diff
        elif alpha[i] < 0:
            alpha[i] = 0.0
            alpha[j] = -diff
        if diff > 0:
            if alpha[i] > C:
                alpha[i] = C
                alpha[j] = C - diff
        elif alpha[j] > C:
            alpha[j] = C
            alpha[i] = C + diff
    else:
        delta = (G[i] - G[j]) / quad
        total = alpha[i] + alpha[j]
        alpha[i] -= delta
        alpha[j] += delta
        if total > C:
            if alpha[i] > C:
                alpha[i] = C
                alpha[j] = total - C
        elif alpha[j] < 0:
            alpha[j] = 0.0
            alpha[i] = total
        if total > C:
            if alpha[j] > C:
                alpha[j] = C
                alpha[i] = total - C
        elif alpha[i] < 0:
            alpha[i] = 0.0
            alpha[j] = total


def _bias(alpha: np.ndarray, G: np.ndarray, y: np.ndarray, C: float) -> float:
    """b from the free vectors, else the midpoint of the feasible interval."""
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return -float(np.mean(yG[free]))

    at_upper, at_lower = alpha >= C, alpha <= 0
    upper_side = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lower_side = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = float(yG[upper_side].min()) if upper_side.any() else None
    lb = float(yG[lower_side].max()) if lower_side.any() else None
    if ub is None and lb is None:
        return 0.0
    if ub is None or lb is None:
        return -(ub if lb is None else lb)
    return -(ub + lb) / 2.0


def fit_gsvm(X: np.ndarray, y: np.ndarray, cfg: SvmConfig, scaler: Optional[Scaler] = None,
             train_meta: Optional[Dict[str, str]] = None) -> SvmModel:
    """
    Train on an (n, d) matrix with labels in {+1, -1}.

    Raises:
        LearningError: on shape mismatch or when only one class is present
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise LearningError(f"training matrix {X.shape} does not match {len(y)} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise LearningError("labels must be +1 or -1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise LearningError("training set must contain both classes")

    gamma = auto_gamma(X) if cfg.gamma == AUTO else float(cfg.gamma)
    C = float(cfg.c)
    n = len(y)

    alpha = np.zeros(n)
    G = -np.ones(n)
    kernel = KernelRows(X, gamma)
    objective = [0.0]
    max_iterations = cfg.max_passes * n

    converged = False
    iterations = 0
    gap = float("inf")
    while iterations < max_iterations:
        i, j, gap = _violating_pair(alpha, G, y, C)
        if i is None or gap <= cfg.tolerance:
            converged = True
            break

        Ki, Kj = kernel.row(i), kernel.row(j)
        old_i, old_j = alpha[i], alpha[j]
        _solve_pair(alpha, G, y, i, j, Ki[i] + Kj[j] - 2.0 * Ki[j], C)
        G += y * (y[i] * (alpha[i] - old_i) * Ki + y[j] * (alpha[j] - old_j) * Kj)
        objective.append(0.5 * float(alpha.sum()) - 0.5 * float(alpha @ G))
        iterations += 1

    if not converged:
        gap = _violating_pair(alpha, G, y, C)[2]
        logger.warning(f"SMO stopped after {iterations} iterations ({cfg.max_passes} passes) "
                       f"with KKT gap {gap:.3g} > {cfg.tolerance}")

    bias = _bias(alpha, G, y, C)
    support = alpha > 0
    trace = TrainingTrace(iterations=iterations, objective=objective, final_gap=gap,
                          converged=converged, alphas=alpha)
    logger.info(f"Trained G-SVM: n={n}, gamma={gamma:.4g}, C={C}, {int(support.sum())} support vectors, "
                f"{iterations} iterations, W={objective[-1]:.6g}, b={bias:.6g}")
    return SvmModel(support_vectors=X[support].copy(), dual_coefs=(alpha * y)[support],
                    bias=bias, gamma=gamma, c=C, scaler=scaler, train_meta=dict(train_meta or {}),
                    converged=converged, trace=trace)


def train_gsvm(train: Sequence[LabeledExample], cfg: SvmConfig, scaler: Optional[Scaler] = None,
               train_meta: Optional[Dict[str, str]] = None) -> SvmModel:
    """
    Train on scaled labeled examples; storm is the +1 class.

    Args:
        train: Scaled training examples (authentic and synthetic)
        cfg: Solver settings
        scaler: The scaler the examples went through, stored with the model
        train_meta: Provenance stored with the model

    Returns:
        SvmModel: the trained classifier; ``converged`` is False if max_passes ran out
    """
    if any(not e.features.scaled for e in train):
        raise LearningError("train_gsvm expects scaled feature vectors")
    X = feature_matrix([e.features for e in train])
    y = np.array([e.label.as_sign() for e in train], dtype=np.float64)
    return fit_gsvm(X, y, cfg, scaler=scaler, train_meta=train_meta)


def _as_matrix(m: SvmModel, v: Union[FeatureVector, np.ndarray]) -> np.ndarray:
    if isinstance(v, FeatureVector):
        if m.scaler is not None and not v.scaled:
            raise LearningError("decision_value expects a vector scaled by the model's scaler")
        v = v.as_array()
    X = np.atleast_2d(np.asarray(v, dtype=np.float64))
    if X.shape[1] != m.n_features:
        raise LearningError(f"dimension mismatch: model has {m.n_features} features, got {X.shape[1]}")
    return X


def decision_values(m: SvmModel, X: np.ndarray) -> np.ndarray:
    """sum_i a_i y_i K(sv_i, x) + b for every row of X."""
    X = _as_matrix(m, X)
    return rbf_kernel(X, m.support_vectors, m.gamma) @ m.dual_coefs + m.bias


def decision_value(m: SvmModel, v: Union[FeatureVector, np.ndarray]) -> float:
    return float(decision_values(m, _as_matrix(m, v))[0])


def classify(value: float) -> StormClass:
    """Storm iff the decision value is >= 0; the boundary belongs to storm."""
    return StormClass.STORM if value >= 0.0 else StormClass.NO_STORM


def predict(m: SvmModel, raw: FeatureVector) -> StormClass:
    """Scale a raw vector with the model's scaler and classify it."""
    v = transform(m.scaler, raw) if m.scaler is not None else raw
    return classify(decision_value(m, v))


def kkt_violation(m: SvmModel, X: np.ndarray, y: np.ndarray) -> float:
    """
    Largest KKT residual of the trained model over its training set.

    a_i = 0 needs y_i f(x_i) >= 1, a_i = C needs y_i f(x_i) <= 1 and
    0 < a_i < C needs y_i f(x_i) = 1.
    """
    if m.trace is None:
        raise LearningError("model carries no training trace; KKT check needs the full alpha vector")
    alpha = m.trace.alphas
    y = np.asarray(y, dtype=np.float64)
    if len(alpha) != len(y):
        raise LearningError(f"{len(y)} labels for a model trained on {len(alpha)} samples")

    margins = y * decision_values(m, np.asarray(X, dtype=np.float64))
    residual = np.where(alpha <= 0, np.maximum(0.0, 1.0 - margins),
                        np.where(alpha >= m.c, np.maximum(0.0, margins - 1.0), np.abs(margins - 1.0)))
    return float(residual.max()) if residual.size else 0.0
