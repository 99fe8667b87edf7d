"""Scikit-learn estimator contracts for the classifier wrappers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from wdl.estimators import (
    RobustSGLDClassifier,
    SplitNetClassifier,
    VanillaWirelessClassifier,
)
from wdl.harness.datasets import make_dataset


@pytest.fixture(scope="module")
def blobs():
    return make_dataset("blobs2", 160, 0.4, 3)


class TestSplitNetClassifier:
    def test_fit_predict(self, blobs):
        clf = SplitNetClassifier(
            hidden_layer_sizes=(8, 4), activation="tanh", split_index=2,
            epochs=40, random_state=0,
        )
        clf.fit(blobs.x_train, blobs.y_train)
        assert clf.score(blobs.x_test, blobs.y_test) > 0.9
        probs = clf.predict_proba(blobs.x_test)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)
        assert set(clf.predict(blobs.x_test)) <= set(clf.classes_)

    def test_get_set_params_roundtrip(self):
        clf = SplitNetClassifier(epochs=7, learning_rate=0.02)
        params = clf.get_params()
        assert params["epochs"] == 7
        cloned = clone(clf)
        assert cloned.get_params() == params

    def test_unfitted_raises(self, blobs):
        with pytest.raises(NotFittedError):
            SplitNetClassifier().predict(blobs.x_test)

    def test_string_labels_supported(self, blobs):
        labels = np.array(["alpha", "beta"])[blobs.y_train]
        clf = SplitNetClassifier(epochs=20, random_state=1).fit(blobs.x_train, labels)
        assert set(clf.predict(blobs.x_test)) <= {"alpha", "beta"}

    def test_composes_in_pipeline(self, blobs):
        pipe = make_pipeline(
            StandardScaler(),
            SplitNetClassifier(epochs=30, random_state=2),
        )
        pipe.fit(blobs.x_train, blobs.y_train)
        assert pipe.score(blobs.x_test, blobs.y_test) > 0.9

    def test_deterministic_fit(self, blobs):
        a = SplitNetClassifier(epochs=10, random_state=4).fit(blobs.x_train, blobs.y_train)
        b = SplitNetClassifier(epochs=10, random_state=4).fit(blobs.x_train, blobs.y_train)
        assert np.array_equal(a.params_, b.params_)

    def test_wireless_score(self, blobs):
        clf = SplitNetClassifier(
            hidden_layer_sizes=(8, 4), activation="tanh", split_index=2,
            epochs=40, random_state=0,
        ).fit(blobs.x_train, blobs.y_train)
        acc = clf.wireless_score(blobs.x_test, blobs.y_test, ("awgn", 10.0, "qpsk"), seed=0)
        assert 0.5 <= acc <= 1.0


class TestFineTuners:
    @pytest.mark.parametrize("cls", [RobustSGLDClassifier, VanillaWirelessClassifier])
    def test_fit_records_trace(self, cls, blobs):
        clf = cls(
            hidden_layer_sizes=(8, 4), activation="tanh", split_index=2,
            epochs=20, finetune_epochs=3, random_state=0,
            channel_conditions=(("awgn", 10.0, "qpsk"),),
            eval_channel=("awgn", 10.0, "qpsk"),
        )
        clf.fit(blobs.x_train, blobs.y_train, eval_set=(blobs.x_test, blobs.y_test))
        assert len(clf.trace_.epochs) == 3
        assert clf.prior_params_.shape == clf.params_.shape
        assert clf.score(blobs.x_test, blobs.y_test) > 0.8

    def test_shared_prior_between_arms(self, blobs):
        base = SplitNetClassifier(
            hidden_layer_sizes=(8, 4), activation="tanh", split_index=2,
            epochs=20, random_state=0,
        ).fit(blobs.x_train, blobs.y_train)
        kwargs = dict(
            hidden_layer_sizes=(8, 4), activation="tanh", split_index=2,
            finetune_epochs=2, random_state=5,
            channel_conditions=(("awgn", 10.0, "qpsk"),),
        )
        robust = RobustSGLDClassifier(**kwargs)
        vanilla = VanillaWirelessClassifier(**kwargs)
        robust.fit(blobs.x_train, blobs.y_train, prior_params=base.params_)
        vanilla.fit(blobs.x_train, blobs.y_train, prior_params=base.params_)
        assert np.array_equal(robust.prior_params_, base.params_)
        assert np.array_equal(vanilla.prior_params_, base.params_)
        assert not np.array_equal(robust.params_, vanilla.params_)

    def test_clone_preserves_params(self):
        clf = RobustSGLDClassifier(temperature=0.05, prior_variance=0.25)
        assert clone(clf).get_params()["temperature"] == 0.05
        assert clone(clf).get_params()["prior_variance"] == 0.25
