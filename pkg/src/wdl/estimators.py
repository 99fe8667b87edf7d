"""Scikit-learn style estimators wrapping the training loops.

SplitNetClassifier fits the split network on clean data (this is the
pretraining stage and the prior mean for fine-tuning).  The two wireless
fine-tuners share its clean fit machinery and then adapt the weights to a
channel: RobustSGLDClassifier with the Langevin/prior objective,
VanillaWirelessClassifier with plain Adam.  All three follow the sklearn
estimator contract (get_params/set_params, fit/predict/predict_proba,
validation helpers), so they compose with pipelines and model selection.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_is_fitted, validate_data

from . import network as net
from .training import (
    ChannelPolicy,
    TrainConfig,
    pretrain_standard,
    train_robust,
    train_vanilla,
    wireless_accuracy,
)

__all__ = [
    "SplitNetClassifier",
    "RobustSGLDClassifier",
    "VanillaWirelessClassifier",
]


class SplitNetClassifier(ClassifierMixin, BaseEstimator):
    """Split feedforward classifier trained on the clean pipeline.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
        Widths of the hidden layers.
    activation : str or tuple of str
        Hidden activation(s): relu, tanh, or identity.
    split_index : int
        Layer boundary between the device-side encoder and the
        server-side decoder.
    epochs, batch_size, learning_rate, clip, tol, random_state
        Training-loop hyperparameters; clip bounds the loss in [0, clip].
    """

    def __init__(
        self,
        hidden_layer_sizes=(16, 8),
        activation="relu",
        split_index=1,
        epochs=60,
        batch_size=32,
        learning_rate=0.01,
        clip=4.0,
        tol=None,
        random_state=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.split_index = split_index
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.clip = clip
        self.tol = tol
        self.random_state = random_state

    def _make_spec(self, n_features: int, n_classes: int) -> net.NetworkSpec:
        sizes = (n_features, *self.hidden_layer_sizes, n_classes)
        return net.NetworkSpec(
            layer_sizes=sizes,
            split_index=self.split_index,
            activation=self.activation,
        )

    def _encode_labels(self, y: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.classes_, y)

    def _pretrain_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            clip=self.clip,
            seed=self.random_state,
            tolerance=self.tol,
            pipeline="none",
        )

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64)
        self.classes_ = unique_labels(y)
        spec = self._make_spec(X.shape[1], len(self.classes_))
        params, risk = pretrain_standard(
            spec, X, self._encode_labels(y), self._pretrain_config()
        )
        self.spec_ = spec
        self.params_ = params
        self.final_risk_ = risk
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "params_")
        X = validate_data(self, X, reset=False, dtype=np.float64)
        _, probs = net.forward_batch(self.spec_, self.params_, X)
        return probs

    def predict(self, X):
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]

    def wireless_score(self, X, y, condition, seed=0):
        """Accuracy with features sent over (kind, snr_db, scheme)."""
        check_is_fitted(self, "params_")
        X = validate_data(self, X, reset=False, dtype=np.float64)
        return wireless_accuracy(
            self.spec_,
            self.params_,
            X,
            self._encode_labels(np.asarray(y)),
            condition,
            np.random.default_rng(seed),
        )


class _WirelessFineTuner(SplitNetClassifier):
    """Shared clean-pretrain + wireless fine-tune skeleton."""

    _method = ""

    def __init__(
        self,
        hidden_layer_sizes=(16, 8),
        activation="relu",
        split_index=1,
        epochs=60,
        batch_size=32,
        learning_rate=0.01,
        clip=4.0,
        tol=None,
        random_state=0,
        finetune_epochs=20,
        finetune_learning_rate=0.003,
        temperature=0.01,
        prior_variance=1.0,
        schedule="polynomial",
        schedule_k0=100.0,
        channel_conditions=(("awgn", 10.0, "qpsk"),),
        pipeline="wireless",
        surrogate_step=0.1,
        mi_window=500,
        mi_rho=0.99,
        mi_snapshots=10,
        eval_channel=None,
    ):
        super().__init__(
            hidden_layer_sizes=hidden_layer_sizes,
            activation=activation,
            split_index=split_index,
            epochs=epochs,
            batch_size=batch_size,
            learning_rate=learning_rate,
            clip=clip,
            tol=tol,
            random_state=random_state,
        )
        self.finetune_epochs = finetune_epochs
        self.finetune_learning_rate = finetune_learning_rate
        self.temperature = temperature
        self.prior_variance = prior_variance
        self.schedule = schedule
        self.schedule_k0 = schedule_k0
        self.channel_conditions = channel_conditions
        self.pipeline = pipeline
        self.surrogate_step = surrogate_step
        self.mi_window = mi_window
        self.mi_rho = mi_rho
        self.mi_snapshots = mi_snapshots
        self.eval_channel = eval_channel

    def _finetune_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.finetune_epochs,
            batch_size=self.batch_size,
            learning_rate=self.finetune_learning_rate,
            temperature=self.temperature if self._method == "robust" else 0.0,
            schedule=self.schedule,
            schedule_k0=self.schedule_k0,
            prior_variance=self.prior_variance,
            clip=self.clip,
            seed=self.random_state,
            channel=ChannelPolicy(tuple(tuple(c) for c in self.channel_conditions)),
            pipeline=self.pipeline,
            surrogate_step=self.surrogate_step,
            mi_window=self.mi_window,
            mi_rho=self.mi_rho,
            mi_snapshots=self.mi_snapshots,
            eval_channel=self.eval_channel,
        )

    def fit(self, X, y, prior_params=None, eval_set=None):
        """Pretrain on the clean pipeline (unless prior_params is given),
        then fine-tune over the channel policy.

        eval_set = (X_test, y_test) supplies the per-epoch accuracy data;
        it defaults to the training set.
        """
        X, y = validate_data(self, X, y, dtype=np.float64)
        self.classes_ = unique_labels(y)
        spec = self._make_spec(X.shape[1], len(self.classes_))
        codes = self._encode_labels(y)
        if prior_params is None:
            prior_params, _ = pretrain_standard(spec, X, codes, self._pretrain_config())
        else:
            prior_params = np.asarray(prior_params, dtype=np.float64)
        if eval_set is None:
            x_eval, y_eval = X, codes
        else:
            x_eval = np.asarray(eval_set[0], dtype=np.float64)
            y_eval = self._encode_labels(np.asarray(eval_set[1]))
        train = train_robust if self._method == "robust" else train_vanilla
        params, trace = train(
            spec, X, codes, self._finetune_config(), prior_params, x_eval, y_eval
        )
        self.spec_ = spec
        self.prior_params_ = prior_params
        self.params_ = params
        self.trace_ = trace
        return self


class RobustSGLDClassifier(_WirelessFineTuner):
    """Wireless fine-tuning by SGLD on the loss-plus-prior energy.

    temperature weighs the Gaussian prior anchored at the pretrained
    weights and scales the injected Langevin noise; both decay along the
    configured schedule.
    """

    _method = "robust"


class VanillaWirelessClassifier(_WirelessFineTuner):
    """Wireless fine-tuning baseline: Adam on the wireless loss alone."""

    _method = "vanilla"
