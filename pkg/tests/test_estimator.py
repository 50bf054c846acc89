import numpy as np
import pytest
from sklearn.base import clone
from sklearn.model_selection import GridSearchCV
from sklearn.pipeline import make_pipeline
from sklearn.utils.estimator_checks import parametrize_with_checks

from ghostimaging.estimator import GhostImager
from ghostimaging.experiments import ExperimentConfig, run_trial, target_object
from ghostimaging.imaging import Scene

EXPECTED_FAILED = {
    # int-cast random data has all-zero rows, whose reconstruction is a
    # constant image that min-max normalization rejects by design
    "check_estimators_dtypes": "constant images cannot be normalized",
}


@parametrize_with_checks([GhostImager(random_state=0)],
                         expected_failed_checks=lambda est: EXPECTED_FAILED)
def test_sklearn_compatible(estimator, check):
    check(estimator)


def scenes(n=5, shape=(4, 8), seed=0):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, shape[0] * shape[1])).astype(float)
    X[:, 0], X[:, 1] = 0, 1
    return X


def test_default_measurement_count():
    X = scenes()
    assert GhostImager().fit(X).n_measurements_ == 40
    assert GhostImager(pattern_kind="pseudo_hadamard").fit(X).n_measurements_ == 32
    assert GhostImager(pattern_kind="random_binary").fit(X).n_measurements_ == 32


def test_noiseless_special_recovers_scenes():
    X = scenes()
    est = GhostImager(random_state=3).fit(X)
    assert np.allclose(est.predict(X), X, atol=1e-12)
    assert est.score(X) >= -1e-12


def test_noiseless_pseudo_drops_first_pixel():
    X = scenes()
    est = GhostImager(pattern_kind="pseudo_hadamard").fit(X)
    pred = est.predict(X)
    assert pred.shape == (5, 31)
    assert np.allclose(pred, X[:, 1:], atol=1e-12)


def test_inverse_transform_is_correlation():
    X = scenes()
    est = GhostImager(random_state=1).fit(X)
    B = est.transform(X)
    assert B.shape == (5, 40)
    G = est.inverse_transform(B)
    assert np.allclose(G, X.sum(axis=1, keepdims=True) / 4 + X / 4, atol=1e-12)
    with pytest.raises(ValueError):
        est.inverse_transform(B[:, :10])


def test_matches_experiment_pipeline():
    t = target_object((4, 8)).reshape(1, -1)
    est = GhostImager(n_measurements=64, sigma=0.05, random_state=17).fit(t)
    cfg = ExperimentConfig(count=64, sigma=0.05, scene_shape=(4, 8))
    _, recon = run_trial(cfg, Scene((4, 8), t[0]), 17)
    assert np.array_equal(est.predict(t)[0], recon.normalized)


def test_invalid_parameters():
    X = scenes()
    with pytest.raises(ValueError):
        GhostImager(pattern_kind="speckle").fit(X)
    with pytest.raises(ValueError):
        GhostImager(sigma=-1).fit(X)
    with pytest.raises(ValueError):
        GhostImager(n_measurements=50).fit(X)


def test_pipeline_and_grid_search():
    X = scenes(n=6)
    pipe = make_pipeline(GhostImager(sigma=0.05, random_state=0))
    assert pipe.fit_transform(X).shape == (6, 40)
    search = GridSearchCV(GhostImager(sigma=0.05, random_state=0),
                          {"n_measurements": [64, 256]}, cv=2)
    search.fit(X)
    assert search.best_params_["n_measurements"] == 256
    assert clone(search.best_estimator_).get_params()["n_measurements"] == 256
