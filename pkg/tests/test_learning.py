import numpy as np
import pytest

from storm_forecast.errors import LearningError
from storm_forecast.features import FeatureVector, LabeledExample, fit_scaler, transform_examples
from storm_forecast.learning import (
    ClassBalance,
    RoundRobinSampler,
    Smote,
    SmoteConfig,
    SplitConfig,
    SvmConfig,
    auto_gamma,
    classify,
    dataset_fingerprint,
    decision_value,
    decision_values,
    fit_gsvm,
    grid_search,
    holdout_count,
    kkt_violation,
    load_model,
    oversample,
    predict,
    rbf_kernel,
    save_model,
    smote,
    stratified_split,
    synthetic_count,
    train_gsvm,
)
from storm_forecast.learning.grid import C_GRID, GAMMA_MULTIPLIERS
from storm_forecast.learning.persistence import MAGIC, model_from_text, model_to_text
from storm_forecast.models.storm import StormClass


def random_problem(n=40, seed=3):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 5))
    y = np.where(X[:, 0] + 0.5 * X[:, 3] + rng.normal(0.0, 0.15, n) > 0.75, 1.0, -1.0)
    return X, y


# ---- split ----

@pytest.mark.parametrize("n,fraction,expected", [(10, 0.2, 2), (5, 0.2, 1), (2, 0.5, 1), (3, 0.9, 2), (12, 0.25, 3)])
def test_holdout_count(n, fraction, expected):
    assert holdout_count(n, fraction) == expected


def test_stratified_split_per_class_counts(examples_factory):
    examples = examples_factory(10, 40)
    train, test = stratified_split(examples, SplitConfig(test_fraction=0.2, seed=5))
    assert ClassBalance.of(test) == ClassBalance(storm=2, no_storm=8)
    assert ClassBalance.of(train) == ClassBalance(storm=8, no_storm=32)
    assert {e.date for e in train}.isdisjoint({e.date for e in test})
    assert [e.date for e in train] == sorted(e.date for e in train)


def test_stratified_split_is_deterministic(examples_factory):
    examples = examples_factory(10, 40)
    first = stratified_split(examples, SplitConfig(seed=9))
    again = stratified_split(examples, SplitConfig(seed=9))
    other = stratified_split(examples, SplitConfig(seed=10))
    assert [e.date for e in first[1]] == [e.date for e in again[1]]
    assert [e.date for e in first[1]] != [e.date for e in other[1]]


def test_stratified_split_needs_two_per_class(examples_factory):
    with pytest.raises(LearningError, match="storm"):
        stratified_split(examples_factory(1, 10), SplitConfig())


def test_config_validation():
    with pytest.raises(LearningError):
        SplitConfig(test_fraction=1.0)
    with pytest.raises(LearningError):
        SplitConfig(scaler_fit="everything")
    with pytest.raises(LearningError):
        SmoteConfig(k_neighbors=0)
    with pytest.raises(LearningError):
        SvmConfig(c=0.0)
    with pytest.raises(LearningError):
        SvmConfig(gamma="wide")
    assert SvmConfig(gamma="2.5").gamma == 2.5


# ---- SMOTE ----

def test_round_robin_sampler_cycles():
    sampler = RoundRobinSampler([2, 0, 1])
    assert [sampler.next_index() for _ in range(7)] == [2, 0, 1, 2, 0, 1, 2]
    with pytest.raises(LearningError):
        RoundRobinSampler([])


def test_synthetic_count():
    assert synthetic_count(10, 30, 1.0) == 20
    assert synthetic_count(10, 30, 0.5) == 5
    assert synthetic_count(40, 30, 1.0) == 0


def test_smote_points_lie_on_neighbour_segments():
    rng = np.random.default_rng(21)
    X = rng.uniform(0.0, 10.0, size=(15, 5))
    k = 4
    points = Smote(k_neighbors=k, seed=2).fit(X).sample(60)

    dist = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    for p in points:
        nearest = [j for j in np.argsort(dist[p.base_index]) if j != p.base_index][:k]
        assert p.neighbor_index in nearest
        assert 0.0 <= p.u < 1.0
        expected = X[p.base_index] + p.u * (X[p.neighbor_index] - X[p.base_index])
        assert np.allclose(p.vector, expected, atol=1e-12)


def test_smote_bases_are_round_robin():
    X = np.random.default_rng(4).uniform(size=(8, 5))
    points = Smote(k_neighbors=3, seed=7).fit(X).sample(16)
    bases = [p.base_index for p in points]
    assert sorted(bases[:8]) == list(range(8))
    assert bases[8:] == bases[:8]


def test_smote_rounds_binary_column():
    rng = np.random.default_rng(8)
    minority = [FeatureVector((rng.integers(0, 9), rng.integers(0, 4), rng.integers(0, 2),
                               rng.integers(0, 9), rng.integers(0, 4))) for _ in range(12)]
    synthetic = smote(minority, 40, SmoteConfig(k_neighbors=5, seed=1))
    assert len(synthetic) == 28
    assert all(v[2] in (0.0, 1.0) for v in synthetic)
    assert not any(v.scaled for v in synthetic)


def test_smote_stays_inside_minority_bounds():
    rng = np.random.default_rng(16)
    for _ in range(30):
        n = int(rng.integers(7, 20))
        minority = [FeatureVector((rng.integers(0, 12), rng.integers(0, 5), rng.integers(0, 2),
                                   rng.integers(0, 12), rng.integers(0, 5))) for _ in range(n)]
        X = np.array([v.values for v in minority], dtype=float)
        low, high = X.min(axis=0), X.max(axis=0)
        for v in smote(minority, 3 * n, SmoteConfig(k_neighbors=5, seed=int(rng.integers(0, 1000)))):
            values = np.asarray(v.values)
            assert np.all(values >= low - 1e-12) and np.all(values <= high + 1e-12)


def test_smote_needs_more_than_k_samples():
    minority = [FeatureVector((k, 0, 0, k, 1)) for k in range(5)]
    with pytest.raises(LearningError):
        smote(minority, 20, SmoteConfig(k_neighbors=5))


def test_oversample_balances_classes(examples_factory):
    train = examples_factory(6, 20)
    balanced, before, after = oversample(train, SmoteConfig(k_neighbors=5, seed=0))
    assert before == ClassBalance(storm=6, no_storm=20)
    assert after == ClassBalance(storm=20, no_storm=20)
    assert balanced[:len(train)] == list(train)
    assert all(e.date is None and e.label is StormClass.STORM for e in balanced[len(train):])
    assert before.describe() == "26 examples: no_storm 20 (76.9%), storm 6 (23.1%)"


def test_oversample_is_seeded(examples_factory):
    train = examples_factory(6, 20)
    a, _, _ = oversample(train, SmoteConfig(seed=3))
    b, _, _ = oversample(train, SmoteConfig(seed=3))
    assert [e.features.values for e in a] == [e.features.values for e in b]


# ---- SVM ----

def test_auto_gamma():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    assert auto_gamma(X) == pytest.approx(0.8)
    assert auto_gamma(np.ones((3, 2))) == 1.0


def test_xor_is_learned():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    model = fit_gsvm(X, y, SvmConfig(c=10.0))
    assert model.converged
    assert np.array_equal(np.sign(decision_values(model, X)), y)


def test_trained_model_satisfies_kkt():
    X, y = random_problem()
    model = fit_gsvm(X, y, SvmConfig(c=1.0, tolerance=1e-4))
    assert model.converged
    assert kkt_violation(model, X, y) <= 1e-3
    assert abs(float(np.sum(model.trace.alphas * y))) <= 1e-6
    assert np.all(model.trace.alphas >= 0.0) and np.all(model.trace.alphas <= model.c)


def test_dual_objective_never_decreases():
    X, y = random_problem(seed=12)
    trace = fit_gsvm(X, y, SvmConfig(c=2.0)).trace
    steps = np.diff(trace.objective)
    assert trace.iterations == len(steps)
    assert np.all(steps >= -1e-9 * max(1.0, abs(trace.objective[-1])))
    assert trace.objective[-1] > 0.0


def test_mirrored_dataset_has_zero_bias():
    rng = np.random.default_rng(5)
    rows, labels = [], []
    for _ in range(15):
        p = rng.uniform(-1.0, 1.0, size=3)
        label = 1.0 if p[0] + 0.3 * p[1] > 0 else -1.0
        rows += [p, -p]
        labels += [label, -label]
    model = fit_gsvm(np.array(rows), np.array(labels), SvmConfig(c=1.0, gamma=0.5))
    assert abs(model.bias) <= 1e-6


def test_decision_value_is_kernel_expansion():
    X, y = random_problem(seed=1)
    model = fit_gsvm(X, y, SvmConfig())
    x = np.random.default_rng(2).uniform(size=5)
    direct = sum(coef * np.exp(-model.gamma * np.sum((sv - x) ** 2))
                 for coef, sv in zip(model.dual_coefs, model.support_vectors)) + model.bias
    assert decision_value(model, x) == pytest.approx(direct, abs=1e-12)


def test_rbf_kernel_matches_closed_form():
    rng = np.random.default_rng(3)
    A, B = rng.uniform(size=(4, 5)), rng.uniform(size=(3, 5))
    K = rbf_kernel(A, B, 0.7)
    expected = np.exp(-0.7 * ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2))
    assert K.shape == (4, 3)
    np.testing.assert_allclose(K, expected, atol=1e-12)
    # single vectors are promoted to one-row matrices
    assert rbf_kernel(A[0], A[0], 0.7) == pytest.approx(np.ones((1, 1)))


def test_classify_boundary_is_storm():
    assert classify(0.0) is StormClass.STORM
    assert classify(-1e-9) is StormClass.NO_STORM


def test_fit_rejects_bad_input():
    with pytest.raises(LearningError):
        fit_gsvm(np.zeros((3, 2)), np.array([1.0, 1.0, 1.0]), SvmConfig())
    with pytest.raises(LearningError):
        fit_gsvm(np.zeros((3, 2)), np.array([1.0, -1.0]), SvmConfig())
    with pytest.raises(LearningError):
        fit_gsvm(np.zeros((2, 2)), np.array([1.0, 0.0]), SvmConfig())


def test_train_gsvm_needs_scaled_examples(examples_factory):
    with pytest.raises(LearningError, match="scaled"):
        train_gsvm(examples_factory(3, 3), SvmConfig())


def test_max_passes_exhaustion_is_reported():
    X, y = random_problem(n=30, seed=6)
    model = fit_gsvm(X, y, SvmConfig(c=100.0, tolerance=1e-9, max_passes=1))
    assert not model.converged
    assert model.trace.iterations == len(y)


def test_predict_scales_raw_vectors(examples_factory):
    examples = examples_factory(15, 15, seed=4)
    scaler = fit_scaler(examples)
    model = train_gsvm(transform_examples(scaler, examples), SvmConfig(), scaler=scaler)
    assert predict(model, FeatureVector((8, 2, 1, 8, 2))) is StormClass.STORM
    assert predict(model, FeatureVector((1, 0, 0, 1, 1))) is StormClass.NO_STORM


# ---- persistence ----

def test_model_file_round_trip(tmp_path, examples_factory):
    examples = examples_factory(10, 20)
    scaler = fit_scaler(examples)
    meta = {"seed": "7", "dataset_sha256": dataset_fingerprint(examples)}
    model = train_gsvm(transform_examples(scaler, examples), SvmConfig(), scaler=scaler, train_meta=meta)

    path = tmp_path / "models" / "gsvm.model"
    save_model(model, str(path))
    loaded = load_model(str(path))

    assert path.read_text().splitlines()[0] == MAGIC
    assert np.array_equal(loaded.support_vectors, model.support_vectors)
    assert np.array_equal(loaded.dual_coefs, model.dual_coefs)
    assert (loaded.bias, loaded.gamma, loaded.c) == (model.bias, model.gamma, model.c)
    assert loaded.scaler == scaler
    assert loaded.train_meta == meta
    assert model_to_text(loaded) == path.read_text()


def test_model_file_errors(tmp_path):
    with pytest.raises(LearningError, match="not a storm-forecast model"):
        model_from_text("hello\n")
    with pytest.raises(LearningError, match="support vector block"):
        model_from_text(MAGIC + "\nformat_version=1\n")
    with pytest.raises(LearningError):
        load_model(str(tmp_path / "missing.model"))


def test_dataset_fingerprint_is_order_independent(examples_factory):
    examples = examples_factory(4, 6)
    assert dataset_fingerprint(examples) == dataset_fingerprint(list(reversed(examples)))
    assert len(dataset_fingerprint(examples)) == 64


# ---- grid search ----

def test_grid_search_covers_the_grid(examples_factory):
    train = examples_factory(20, 40, seed=2)
    result = grid_search(train, SvmConfig(), SmoteConfig(seed=1), seed=4)
    assert len(result.points) == len(C_GRID) * len(GAMMA_MULTIPLIERS)
    assert result.best.c in C_GRID
    assert not result.best.grid_search
    best_auc = max(p.auc for p in result.points)
    first_best = next(p for p in result.points if p.auc == best_auc)
    assert (result.best.c, result.best.gamma) == (first_best.c, first_best.gamma)
    assert best_auc >= 0.9
