"""scikit-learn estimator wrapper around the mesh classifier.

``PhotonicClassifier`` exposes the standard fit/predict/predict_proba surface
so the photonic model drops into pipelines, grid search, and cross-validation.
Feature count fixes the mesh width, so inputs should already be scaled to a
bounded range (pair with ``MinMaxScaler`` in a pipeline for raw data).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .model import build_benchmark_model, model_forward, softmax
from .train import TrainConfig, fit_arrays


class PhotonicClassifier(ClassifierMixin, BaseEstimator):
    """Classifier backed by two programmable interferometer meshes.

    Parameters
    ----------
    mesh : {"clements", "fldzhyan"}
        Block family of the two mesh stages.
    nl : int or None
        Layers per mesh; defaults to the number of features (square mesh).
    epochs, learning_rate, batch_size, rho, eps : training hyperparameters
        for the RMSProp loop.
    include_bias_gain : bool
        Keep the trainable per-port bias and gain stages after detection.
    normalize_inputs : bool
        L2-normalize each sample's amplitude vector before propagation.
    seed : int
        Drives phase initialization and epoch shuffling.
    """

    def __init__(
        self,
        mesh: str = "clements",
        nl: int | None = None,
        epochs: int = 150,
        learning_rate: float = 5e-4,
        batch_size: int = 512,
        rho: float = 0.999,
        eps: float = 1e-8,
        include_bias_gain: bool = True,
        normalize_inputs: bool = False,
        seed: int = 0,
    ):
        self.mesh = mesh
        self.nl = nl
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.rho = rho
        self.eps = eps
        self.include_bias_gain = include_bias_gain
        self.normalize_inputs = normalize_inputs
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        self.n_features_in_ = X.shape[1]
        if self.n_features_in_ < 2:
            raise ValueError("a mesh needs at least 2 input ports (features)")
        if len(self.classes_) > self.n_features_in_:
            raise ValueError(
                f"{len(self.classes_)} classes exceed the {self.n_features_in_} mesh ports"
            )
        class_index = {c: i for i, c in enumerate(self.classes_)}
        labels = np.array([class_index[v] for v in y], dtype=np.int64)
        self.model_ = build_benchmark_model(
            self.mesh,
            self.n_features_in_,
            self.nl,
            num_classes=len(self.classes_),
            include_bias_gain=self.include_bias_gain,
            seed=self.seed,
            normalize_inputs=self.normalize_inputs,
        )
        cfg = TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
            rho=self.rho,
            eps=self.eps,
        )
        self.history_ = fit_arrays(self.model_, X, labels, cfg)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, estimator was fitted with {self.n_features_in_}"
            )
        logits, _ = model_forward(self.model_, X)
        return logits

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        logits = self.decision_function(X)
        return self.classes_[np.argmax(logits, axis=1)]
