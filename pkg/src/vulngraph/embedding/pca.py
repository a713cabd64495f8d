"""Principal component reducers (batch and streaming).

Both estimators follow the scikit-learn fit/transform convention and fix
the component sign so that each component's largest-magnitude entry is
positive, making results comparable against an eigendecomposition oracle
without sign ambiguity.

BatchPCA computes a thin SVD of the centered data. IncrementalPCA never
materializes the full dataset: it accumulates the running sum and scatter
matrix batch by batch and eigendecomposes the resulting covariance, so
its components agree with batch PCA to floating-point accuracy regardless
of how the rows are split into batches.
"""
from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin


def flip_signs(components: np.ndarray) -> np.ndarray:
    """Make each row's largest-magnitude entry positive (in place)."""
    for row in components:
        idx = np.argmax(np.abs(row))
        if row[idx] < 0:
            row *= -1.0
    return components


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {X.shape}")
    return X


class BatchPCA(BaseEstimator, TransformerMixin):
    """Exact PCA via thin SVD of the centered data matrix."""

    def __init__(self, n_components: int):
        self.n_components = n_components

    def fit(self, X, y=None) -> "BatchPCA":
        X = _as_matrix(X)
        n, d = X.shape
        k = self.n_components
        if n < 2:
            raise ValueError("need at least 2 samples to fit")
        if not 1 <= k <= min(n - 1, d):
            raise ValueError(f"n_components={k} out of range [1, {min(n - 1, d)}]")
        self.mean_ = X.mean(axis=0)
        _, s, vt = np.linalg.svd(X - self.mean_, full_matrices=False)
        self.components_ = flip_signs(vt[:k].copy())
        self.explained_variance_ = (s[:k] ** 2) / (n - 1)
        self.n_samples_ = n
        return self

    def transform(self, X) -> np.ndarray:
        return (_as_matrix(X) - self.mean_) @ self.components_.T

    def inverse_transform(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) @ self.components_ + self.mean_


class IncrementalPCA(BaseEstimator, TransformerMixin):
    """Streaming PCA from accumulated mean and scatter statistics.

    partial_fit consumes one row batch at a time; fit() streams an
    in-memory matrix (or an iterable of batches) through partial_fit in
    batch_size chunks. Column count must be uniform across batches and
    total rows must reach n_components + 1.
    """

    def __init__(self, n_components: int, batch_size: int = 256):
        self.n_components = n_components
        self.batch_size = batch_size

    def _reset(self, d: int) -> None:
        self._sum = np.zeros(d)
        self._scatter = np.zeros((d, d))
        self._n = 0
        self._d = d

    def partial_fit(self, X, y=None) -> "IncrementalPCA":
        X = _as_matrix(X)
        if not hasattr(self, "_n"):
            self._reset(X.shape[1])
        if X.shape[1] != self._d:
            raise ValueError(f"batch has {X.shape[1]} columns, expected {self._d}")
        self._sum += X.sum(axis=0)
        self._scatter += X.T @ X
        self._n += X.shape[0]
        if self._n >= max(2, self.n_components + 1):
            self._solve()
        return self

    def _solve(self) -> None:
        n, d, k = self._n, self._d, self.n_components
        if not 1 <= k <= min(n - 1, d):
            raise ValueError(f"n_components={k} out of range [1, {min(n - 1, d)}]")
        mean = self._sum / n
        cov = (self._scatter - n * np.outer(mean, mean)) / (n - 1)
        cov = (cov + cov.T) / 2.0
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][:k]
        self.mean_ = mean
        self.components_ = flip_signs(eigvecs[:, order].T.copy())
        self.explained_variance_ = np.clip(eigvals[order], 0.0, None)
        self.n_samples_ = n

    def fit(self, X, y=None) -> "IncrementalPCA":
        """Fit from a matrix or an iterable of row batches."""
        if hasattr(self, "_n"):
            del self._n
        if isinstance(X, (list, tuple)) and X and np.asarray(X[0]).ndim == 2:
            batches: Iterable = X
        elif isinstance(X, np.ndarray) or isinstance(X, (list, tuple)):
            X = _as_matrix(X)
            batches = (X[s:s + self.batch_size] for s in range(0, X.shape[0], self.batch_size))
        else:
            batches = X  # assume an iterator of matrices
        for batch in batches:
            self.partial_fit(batch)
        if not hasattr(self, "_n") or self._n < max(2, self.n_components + 1):
            raise ValueError("not enough rows to fit")
        self._solve()
        return self

    def transform(self, X) -> np.ndarray:
        return (_as_matrix(X) - self.mean_) @ self.components_.T


def fit_incremental(batches: Iterable[np.ndarray], n_components: int,
                    batch_size: int = 256) -> IncrementalPCA:
    """Fit streaming PCA over an iterable of matrices."""
    model = IncrementalPCA(n_components, batch_size=batch_size)
    return model.fit(iter(batches))


def save_pca(path, model) -> None:
    np.savez(path, mean=model.mean_, components=model.components_,
             explained_variance=model.explained_variance_,
             n_samples=model.n_samples_)


def load_pca(path) -> BatchPCA:
    data = np.load(path)
    model = BatchPCA(n_components=int(data["components"].shape[0]))
    model.mean_ = data["mean"]
    model.components_ = data["components"]
    model.explained_variance_ = data["explained_variance"]
    model.n_samples_ = int(data["n_samples"])
    return model
