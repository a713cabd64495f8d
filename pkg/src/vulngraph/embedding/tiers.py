"""Tiered embedding cache: full, mid (beta) and light (alpha) matrices.

For every (year, model) pair the cache keeps three row-aligned matrices
over the same cveID index: the native-dimension matrix (losslessly
compressed for long-term retention) and two PCA-reduced tiers stored
ready to serve. Tier files are written to temp files and renamed, so
readers never observe a partial write.

Tier file layout (little-endian):

    magic "EMT1" | u32 version | u32 year | u16 model len | model utf-8
    u32 n | u32 dim | n x (u16 len + cveID utf-8) | n*dim float32
"""
from __future__ import annotations

import gzip
import json
import logging
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .models import EmbedderRegistry, default_registry
from .pca import BatchPCA, load_pca, save_pca

logger = logging.getLogger(__name__)

TIER_MAGIC = b"EMT1"
TIER_VERSION = 1

FULL_FILE = "full.bin.gz"
ALPHA_FILE = "alpha.bin"
BETA_FILE = "beta.bin"
PCA_ALPHA_FILE = "pca_alpha.npz"
PCA_BETA_FILE = "pca_beta.npz"
META_FILE = "meta.json"


class MissingTierError(LookupError):
    """No tier set has been built for the requested (year, model)."""


class TierFormatError(ValueError):
    """A tier file is corrupt or not a tier file."""


def write_matrix(path: Path, year: int, model: str, ids: list[str],
                 matrix: np.ndarray, compress: bool = False) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    n, dim = matrix.shape
    if n != len(ids):
        raise ValueError("row index and matrix row count differ")
    tmp = path.with_suffix(path.suffix + ".tmp")
    opener = gzip.open if compress else open
    with opener(tmp, "wb") as fh:
        fh.write(TIER_MAGIC)
        model_bytes = model.encode("utf-8")
        fh.write(struct.pack("<IIH", TIER_VERSION, year, len(model_bytes)))
        fh.write(model_bytes)
        fh.write(struct.pack("<II", n, dim))
        for cve_id in ids:
            raw = cve_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        fh.write(matrix.tobytes())
    os.replace(tmp, path)


def read_matrix(path: Path, compress: bool = False) -> tuple[int, str, list[str], np.ndarray]:
    opener = gzip.open if compress else open
    with opener(path, "rb") as fh:
        if fh.read(4) != TIER_MAGIC:
            raise TierFormatError(f"{path} is not a tier file")
        version, year, model_len = struct.unpack("<IIH", fh.read(10))
        if version != TIER_VERSION:
            raise TierFormatError(f"unsupported tier version {version}")
        model = fh.read(model_len).decode("utf-8")
        n, dim = struct.unpack("<II", fh.read(8))
        ids = []
        for _ in range(n):
            (length,) = struct.unpack("<H", fh.read(2))
            ids.append(fh.read(length).decode("utf-8"))
        data = fh.read(n * dim * 4)
        if len(data) != n * dim * 4:
            raise TierFormatError(f"{path} is truncated")
        matrix = np.frombuffer(data, dtype="<f4").reshape(n, dim)
    return year, model, ids, matrix


@dataclass
class TierSet:
    year: int
    model: str
    dim: int
    cve_ids: list[str]
    full: np.ndarray
    alpha: Optional[np.ndarray]
    beta: Optional[np.ndarray]
    pca_alpha: Optional[BatchPCA]
    pca_beta: Optional[BatchPCA]

    @property
    def n(self) -> int:
        return len(self.cve_ids)

    @property
    def alpha_dim(self) -> Optional[int]:
        return None if self.alpha is None else self.alpha.shape[1]

    @property
    def beta_dim(self) -> Optional[int]:
        return None if self.beta is None else self.beta.shape[1]

    def positions(self, ids: list[str]) -> tuple[list[int], list[str]]:
        """Map requested cveIDs to row positions (tier index order)."""
        index = {cve: i for i, cve in enumerate(self.cve_ids)}
        found = sorted(index[i] for i in set(ids) & index.keys())
        missing = [i for i in ids if i not in index]
        return found, missing


class EmbeddingCache:
    """Builds, persists and serves per-(year, model) tier sets."""

    def __init__(self, root: str | Path, alpha: int = 32, beta: int = 128,
                 registry: Optional[EmbedderRegistry] = None):
        if not 0 < alpha < beta:
            raise ValueError("tier dims must satisfy 0 < alpha < beta")
        self.root = Path(root)
        self.alpha = alpha
        self.beta = beta
        self.registry = registry or default_registry()

    def tier_dir(self, year: int, model: str) -> Path:
        return self.root / model / str(year)

    def has(self, year: int, model: str) -> bool:
        return (self.tier_dir(year, model) / META_FILE).exists()

    def years(self, model: str) -> list[int]:
        base = self.root / model
        if not base.is_dir():
            return []
        return sorted(int(p.name) for p in base.iterdir() if p.name.isdigit())

    def info(self, year: int, model: str) -> dict:
        """Tier metadata (row count, dims) without loading the matrices."""
        meta = self.tier_dir(year, model) / META_FILE
        if not meta.exists():
            raise MissingTierError(f"no tier set for year={year} model={model}")
        return json.loads(meta.read_text())

    # -- building -----------------------------------------------------------

    def build(self, year: int, model: str, cve_ids: list[str],
              texts: list[str]) -> Optional[TierSet]:
        """Embed texts and persist all three tiers; no-op on empty input."""
        if not cve_ids:
            logger.warning("no vulnerabilities for year %d, skipping tier build", year)
            return None
        full = self.registry.embed_batch(texts, model)
        return self._persist(year, model, list(cve_ids), full)

    def build_from_store(self, store, year: int, model: str) -> Optional[TierSet]:
        """Build tiers for every vulnerability of a cveID year in the store."""
        ids, texts = [], []
        for node in store.scan("Vulnerability"):
            cve = node.props["cveID"]
            desc = node.props.get("description") or ""
            if int(cve.split("-")[1]) == year and desc.strip():
                ids.append(cve)
                texts.append(desc)
        return self.build(year, model, ids, texts)

    def _persist(self, year: int, model: str, ids: list[str],
                 full: np.ndarray) -> TierSet:
        n, dim = full.shape
        beta_k = min(self.beta, n - 1, dim) if n >= 2 else 0
        alpha_k = min(self.alpha, beta_k)
        if n >= 2 and (alpha_k < self.alpha or beta_k < self.beta):
            logger.warning(
                "year %d has only %d rows: tiers clamped to alpha=%d beta=%d",
                year, n, alpha_k, beta_k)

        pca_alpha = pca_beta = alpha_m = beta_m = None
        if beta_k >= 1:
            pca_beta = BatchPCA(beta_k).fit(full)
            pca_alpha = BatchPCA(alpha_k).fit(full)
            beta_m = pca_beta.transform(full)
            alpha_m = pca_alpha.transform(full)
        else:
            logger.warning("year %d has %d row(s): reduced tiers unavailable", year, n)

        d = self.tier_dir(year, model)
        d.mkdir(parents=True, exist_ok=True)
        write_matrix(d / FULL_FILE, year, model, ids, full, compress=True)
        if alpha_m is not None:
            write_matrix(d / ALPHA_FILE, year, model, ids, alpha_m)
            write_matrix(d / BETA_FILE, year, model, ids, beta_m)
            save_pca(d / PCA_ALPHA_FILE, pca_alpha)
            save_pca(d / PCA_BETA_FILE, pca_beta)
        meta = {"year": year, "model": model, "n": n, "dim": dim,
                "alpha": alpha_k or None, "beta": beta_k or None}
        tmp = d / (META_FILE + ".tmp")
        tmp.write_text(json.dumps(meta, sort_keys=True))
        os.replace(tmp, d / META_FILE)
        return self.load(year, model)

    def append(self, year: int, model: str, cve_ids: list[str],
               texts: list[str]) -> Optional[TierSet]:
        """Add new rows, projecting through the already-fitted reducers.

        Models are not refit here; a full rebuild is an explicit offline
        operation (embed-build).
        """
        if not self.has(year, model):
            return self.build(year, model, cve_ids, texts)
        tiers = self.load(year, model)
        fresh = [(i, t) for i, t in zip(cve_ids, texts) if i not in set(tiers.cve_ids)]
        if not fresh:
            return tiers
        new_ids = [i for i, _ in fresh]
        new_vecs = self.registry.embed_batch([t for _, t in fresh], model)
        ids = tiers.cve_ids + new_ids
        full = np.vstack([tiers.full, new_vecs.astype(np.float32)])
        d = self.tier_dir(year, model)
        write_matrix(d / FULL_FILE, year, model, ids, full, compress=True)
        if tiers.pca_alpha is not None:
            alpha_m = np.vstack([tiers.alpha,
                                 tiers.pca_alpha.transform(new_vecs).astype(np.float32)])
            beta_m = np.vstack([tiers.beta,
                                tiers.pca_beta.transform(new_vecs).astype(np.float32)])
            write_matrix(d / ALPHA_FILE, year, model, ids, alpha_m)
            write_matrix(d / BETA_FILE, year, model, ids, beta_m)
        meta = json.loads((d / META_FILE).read_text())
        meta["n"] = len(ids)
        tmp = d / (META_FILE + ".tmp")
        tmp.write_text(json.dumps(meta, sort_keys=True))
        os.replace(tmp, d / META_FILE)
        return self.load(year, model)

    # -- loading ------------------------------------------------------------

    def load(self, year: int, model: str) -> TierSet:
        d = self.tier_dir(year, model)
        if not (d / META_FILE).exists():
            raise MissingTierError(f"no tier set for year={year} model={model}")
        _, _, ids, full = read_matrix(d / FULL_FILE, compress=True)
        alpha_m = beta_m = pca_alpha = pca_beta = None
        if (d / ALPHA_FILE).exists():
            _, _, ids_a, alpha_m = read_matrix(d / ALPHA_FILE)
            _, _, ids_b, beta_m = read_matrix(d / BETA_FILE)
            if ids_a != ids or ids_b != ids:
                raise TierFormatError("tier row indexes out of sync")
            pca_alpha = load_pca(d / PCA_ALPHA_FILE)
            pca_beta = load_pca(d / PCA_BETA_FILE)
        return TierSet(year, model, full.shape[1], ids, full,
                       alpha_m, beta_m, pca_alpha, pca_beta)
