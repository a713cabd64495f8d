"""Embedding model registry and providers.

Four model identities are served, each with a fixed native dimension.
HASH_DEFAULT is a deterministic token-hashing embedder built in (so the
whole platform runs offline); the transformer- and fasttext-style models
are provider plug-ins: register a callable, or configure an external
process that receives texts as JSON on stdin and answers with vectors.
"""
from __future__ import annotations

import hashlib
import json
import re
import subprocess
from typing import Callable, Iterable, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

MODEL_DIMS: dict[str, int] = {
    "MPNET_LIKE": 768,
    "SECBERT_LIKE": 768,
    "FASTTEXT_LIKE": 300,
    "HASH_DEFAULT": 768,
}

DEFAULT_MODEL = "HASH_DEFAULT"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbeddingError(ValueError):
    """Bad embedding input (empty text, unknown model)."""


class ProviderUnavailableError(RuntimeError):
    """The configured external embedding provider cannot be reached."""


class HashingTextEmbedder(BaseEstimator, TransformerMixin):
    """Deterministic signed feature hashing of lower-cased tokens.

    Each token is hashed (blake2b, stable across platforms) into one of
    n_features buckets with a +/-1 sign; vectors are L2-normalized.
    Identical text always yields byte-identical vectors.
    """

    def __init__(self, n_features: int = 768):
        self.n_features = n_features

    def fit(self, X, y=None) -> "HashingTextEmbedder":
        return self

    def embed(self, text: str) -> np.ndarray:
        if not isinstance(text, str) or not text.strip():
            raise EmbeddingError("empty text")
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            raise EmbeddingError("text contains no tokens")
        vec = np.zeros(self.n_features, dtype=np.float64)
        for token in tokens:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "big")
            sign = 1.0 if value & 1 == 0 else -1.0
            vec[(value >> 1) % self.n_features] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec

    def transform(self, X: Iterable[str]) -> np.ndarray:
        return np.vstack([self.embed(text) for text in X])


class ExternalProcessEmbedder:
    """Bridge to an out-of-process model (real transformer weights etc.).

    The command is run once per batch with {"texts": [...]} on stdin and
    must print {"vectors": [[...], ...]} on stdout.
    """

    def __init__(self, command: list[str], dim: int, timeout: float = 300.0):
        self.command = command
        self.dim = dim
        self.timeout = timeout

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        try:
            proc = subprocess.run(
                self.command,
                input=json.dumps({"texts": texts}).encode("utf-8"),
                capture_output=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ProviderUnavailableError(f"embedding provider failed: {exc}") from None
        if proc.returncode != 0:
            raise ProviderUnavailableError(
                f"embedding provider exited {proc.returncode}: "
                f"{proc.stderr.decode('utf-8', 'replace')[:200]}")
        try:
            vectors = np.asarray(json.loads(proc.stdout)["vectors"], dtype=np.float64)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ProviderUnavailableError(f"bad provider output: {exc}") from None
        if vectors.ndim != 2 or vectors.shape != (len(texts), self.dim):
            raise ProviderUnavailableError(
                f"provider returned shape {vectors.shape}, expected {(len(texts), self.dim)}")
        return vectors


class EmbedderRegistry:
    """Resolves a model id to something that can embed batches of text."""

    def __init__(self):
        self._providers: dict[str, Callable[[list[str]], np.ndarray]] = {}
        self._hash = HashingTextEmbedder(MODEL_DIMS[DEFAULT_MODEL])

    def register(self, model: str, provider: Callable[[list[str]], np.ndarray]) -> None:
        if model not in MODEL_DIMS:
            raise EmbeddingError(f"unknown model: {model}")
        self._providers[model] = provider

    def register_external(self, model: str, command: list[str]) -> None:
        self.register(model, ExternalProcessEmbedder(command, MODEL_DIMS[model]).embed_batch)

    def dim(self, model: str) -> int:
        if model not in MODEL_DIMS:
            raise EmbeddingError(f"unknown model: {model}")
        return MODEL_DIMS[model]

    def embed_batch(self, texts: list[str], model: str = DEFAULT_MODEL) -> np.ndarray:
        for text in texts:
            if not isinstance(text, str) or not text.strip():
                raise EmbeddingError("empty text")
        if model == DEFAULT_MODEL:
            return self._hash.transform(texts)
        provider = self._providers.get(model)
        if provider is None:
            if model not in MODEL_DIMS:
                raise EmbeddingError(f"unknown model: {model}")
            raise ProviderUnavailableError(f"no provider registered for {model}")
        vectors = provider(texts)
        expected = (len(texts), MODEL_DIMS[model])
        if vectors.shape != expected:
            raise ProviderUnavailableError(
                f"provider for {model} returned shape {vectors.shape}, expected {expected}")
        return vectors

    def embed(self, text: str, model: str = DEFAULT_MODEL) -> np.ndarray:
        return self.embed_batch([text], model)[0]


_default_registry = EmbedderRegistry()


def default_registry() -> EmbedderRegistry:
    return _default_registry


def embed(text: str, model: str = DEFAULT_MODEL) -> np.ndarray:
    """Embed one text with the process-wide registry."""
    return _default_registry.embed(text, model)
