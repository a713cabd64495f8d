"""Storage and reduction cost benchmark across embedding dimensions.

For each dimension, measures the wall time and peak memory of reducing an
n_rows x dim matrix to half its dimensionality, plus the float32 storage
footprint of the matrix itself. Absolute timings are hardware-dependent;
the useful invariants are the shape of the table and the monotone growth
of time and storage with dimension.
"""
from __future__ import annotations

import time
import tracemalloc
from dataclasses import dataclass

import numpy as np

from .pca import BatchPCA

DEFAULT_DIMS = (16, 32, 64, 128, 256, 512, 768)


@dataclass
class CostRow:
    dim: int
    storage_bytes: int
    time_ms: float
    peak_mem_bytes: int


def benchmark_pca(dims=DEFAULT_DIMS, n_rows: int = 2000, repeats: int = 3,
                  seed: int = 0) -> list[CostRow]:
    """Measure PCA-to-half-dimension cost for each dim; best-of-repeats."""
    dims = list(dims)
    if not dims:
        raise ValueError("dims must not be empty")
    if any(d < 2 for d in dims):
        raise ValueError("dims must be >= 2")
    if n_rows < 2 * max(dims):
        raise ValueError(f"n_rows must be >= {2 * max(dims)} for dims {dims}")

    rng = np.random.default_rng(seed)
    BatchPCA(2).fit(rng.standard_normal((8, 4)))  # warm up BLAS paths

    rows = []
    for dim in dims:
        X = rng.standard_normal((n_rows, dim))
        k = dim // 2
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            BatchPCA(k).fit(X).transform(X)
            best = min(best, time.perf_counter() - start)
        tracemalloc.start()
        BatchPCA(k).fit(X).transform(X)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        rows.append(CostRow(
            dim=dim,
            storage_bytes=n_rows * dim * 4,
            time_ms=best * 1000.0,
            peak_mem_bytes=peak,
        ))
    return rows


def cost_table_csv(rows: list[CostRow]) -> str:
    """Render the cost table as CSV (sizes in MB, decimal)."""
    lines = ["dim,storage_mb,time_ms,peak_mem_mb"]
    for row in rows:
        lines.append(
            f"{row.dim},{row.storage_bytes / 1e6:.2f},"
            f"{row.time_ms:.1f},{row.peak_mem_bytes / 1e6:.2f}"
        )
    return "\n".join(lines) + "\n"
