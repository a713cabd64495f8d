"""Sub-pipeline and full-run orchestration.

A sub-pipeline run is ingestion -> transformation (normalize) ->
validation -> one atomic merge batch. Incremental behavior comes from
the per-source watermark: for the timestamped core feed only records
newer than the cursor are processed, and the cursor advances to the
newest processed timestamp on success. Supplementary sources carry no
per-record timestamps and are re-processed in full; merges are
idempotent so a re-run is a store no-op.

A full run drives the core stream first (feed, then enrichment and
embedding generation for the newly merged CVEs), then the supplementary
stream in order, then retries deferred cross-source links. Failures are
isolated per source; an embedding failure never affects graph writes.
"""
from __future__ import annotations

import logging
import time
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from ..graph.store import GraphStore
from ..ingest.normalize import normalize
from ..ingest.parsers import (
    FeedFormatError,
    parse_cvedetails_export,
    parse_cwe_catalog,
    parse_exploitdb_index,
    parse_nvd_feed,
)
from ..ingest.records import CanonicalVulnRecord, iso, parse_timestamp
from .config import PipelineConfig, SourceConfig, STREAM_CORE
from .loader import (
    dedup_deferred,
    load_enrichment_record,
    load_exploit_record,
    load_vuln_record,
    load_weakness_record,
    resolve_deferred,
    validate_batch,
)
from .state import OUTCOME_FAILED, OUTCOME_PARTIAL, OUTCOME_SUCCESS, PipelineState

logger = logging.getLogger(__name__)

PARSERS = {
    "NVD": parse_nvd_feed,
    "CWE": parse_cwe_catalog,
    "CVE_DETAILS": parse_cvedetails_export,
    "EXPLOITDB": parse_exploitdb_index,
}

SUPPLEMENTARY_ORDER = ("CWE", "CVE_DETAILS", "EXPLOITDB")


@dataclass
class RunReport:
    source: str
    stream: str
    outcome: str
    parsed: int = 0
    rejected: int = 0
    merged_nodes: int = 0
    merged_edges: int = 0
    deferred: int = 0
    duration_s: float = 0.0
    errors: list[str] = field(default_factory=list)
    watermark: Optional[str] = None
    processed_cves: list[str] = field(default_factory=list)

    def line(self) -> str:
        bits = (f"{self.source}[{self.stream}] {self.outcome} "
                f"parsed={self.parsed} rejected={self.rejected} "
                f"nodes={self.merged_nodes} edges={self.merged_edges} "
                f"deferred={self.deferred}")
        if self.errors:
            bits += f" errors={len(self.errors)}"
        return bits


def fetch_bytes(locator: str, spool_dir: Optional[Path] = None,
                source_id: str = "feed") -> bytes:
    """Read a local path or fetch a URL (spooling raw bytes if asked)."""
    if "://" in locator:
        with urllib.request.urlopen(locator, timeout=60) as resp:
            data = resp.read()
        if spool_dir is not None:
            spool_dir.mkdir(parents=True, exist_ok=True)
            stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
            (spool_dir / f"{source_id}-{stamp}.raw").write_bytes(data)
        return data
    return Path(locator).read_bytes()


def run_subpipeline(cfg: SourceConfig, state: PipelineState, store: GraphStore,
                    only_cves: Optional[set[str]] = None,
                    stream: Optional[str] = None,
                    spool_dir: Optional[Path] = None) -> RunReport:
    """Run one source end to end as a single atomic write batch."""
    report = RunReport(source=cfg.source, stream=stream or cfg.stream,
                       outcome=OUTCOME_SUCCESS)
    started = time.perf_counter()
    src_state = state.source(cfg.source)

    try:
        data = fetch_bytes(cfg.locator, spool_dir, cfg.source)
    except OSError as exc:
        report.outcome = OUTCOME_FAILED
        report.errors.append(f"input unreachable: {exc}")
        report.duration_s = time.perf_counter() - started
        state.record_run(cfg.source, OUTCOME_FAILED)
        return report

    try:
        result = PARSERS[cfg.source](data)
    except FeedFormatError as exc:
        report.outcome = OUTCOME_FAILED
        report.errors.append(str(exc))
        report.duration_s = time.perf_counter() - started
        state.record_run(cfg.source, OUTCOME_FAILED)
        return report

    records = result.records
    rejects = list(result.rejects)

    if cfg.source == "NVD" and src_state.watermark is not None:
        cursor = parse_timestamp(src_state.watermark)
        records = [r for r in records if r.lastModified > cursor]
    if only_cves is not None:
        records = [r for r in records if r.cveID in only_cves]

    records = [normalize(r) for r in records]
    accepted, invalid = validate_batch(records)
    rejects.extend(invalid)

    deferred_items: list[dict] = []
    with store.batch() as batch:
        for rec in accepted:
            if cfg.source == "NVD":
                load_vuln_record(batch, rec)
            elif cfg.source == "CWE":
                load_weakness_record(batch, rec)
            elif cfg.source == "CVE_DETAILS":
                item = load_enrichment_record(batch, rec)
                if item is not None:
                    deferred_items.append(item)
            elif cfg.source == "EXPLOITDB":
                deferred_items.extend(load_exploit_record(batch, rec))
        merged_nodes = batch.nodes_merged
        merged_edges = batch.edges_merged

    report.parsed = len(accepted)
    report.rejected = len(rejects)
    report.merged_nodes = merged_nodes
    report.merged_edges = merged_edges
    report.deferred = len(deferred_items)
    report.errors.extend(f"entry {r.index}: {r.reason}" for r in rejects)
    if cfg.source == "NVD":
        report.processed_cves = [r.cveID for r in accepted]
        if accepted:
            state.advance_watermark("NVD", iso(max(r.lastModified for r in accepted)))

    state.deferred = dedup_deferred(state.deferred + deferred_items)
    report.outcome = OUTCOME_PARTIAL if rejects else OUTCOME_SUCCESS
    state.record_run(cfg.source, report.outcome)
    report.watermark = state.source(cfg.source).watermark
    report.duration_s = time.perf_counter() - started
    return report


class EmbeddingService:
    """Keeps the per-year tier caches in step with newly merged CVEs."""

    def __init__(self, cache, models: Optional[list[str]] = None):
        self.cache = cache
        self.models = list(models or ["HASH_DEFAULT"])

    def update(self, store: GraphStore, cve_ids: list[str]) -> dict[int, int]:
        """Append embeddings for new CVEs, projecting through fitted models."""
        by_year: dict[int, list[str]] = {}
        for cve in cve_ids:
            by_year.setdefault(int(cve.split("-")[1]), []).append(cve)
        updated = {}
        for year, ids in sorted(by_year.items()):
            texts, kept = [], []
            for cve in ids:
                node = store.get_node("Vulnerability", cve)
                desc = (node.props.get("description") or "") if node else ""
                if desc.strip():
                    kept.append(cve)
                    texts.append(desc)
            if not kept:
                continue
            for model in self.models:
                self.cache.append(year, model, kept, texts)
            updated[year] = len(kept)
        return updated

    def rebuild(self, store: GraphStore, year: int, model: str):
        """Full offline recomputation for one (year, model)."""
        return self.cache.build_from_store(store, year, model)


def run_full(config: PipelineConfig, state: PipelineState, store: GraphStore,
             embedder: Optional[EmbeddingService] = None) -> list[RunReport]:
    """Run the core stream, then the supplementary stream, then retries."""
    reports: list[RunReport] = []
    spool = Path(config.store_path) / "spool"

    def run_isolated(cfg: SourceConfig, **kwargs) -> RunReport:
        try:
            return run_subpipeline(cfg, state, store, spool_dir=spool, **kwargs)
        except Exception as exc:  # a broken source must not stop the others
            logger.exception("sub-pipeline %s failed", cfg.source)
            state.record_run(cfg.source, OUTCOME_FAILED)
            return RunReport(source=cfg.source, stream=cfg.stream,
                             outcome=OUTCOME_FAILED, errors=[repr(exc)])

    new_cves: list[str] = []
    nvd = config.source("NVD")
    if nvd is not None and nvd.enabled:
        report = run_isolated(nvd)
        reports.append(report)
        new_cves = report.processed_cves

        details = config.source("CVE_DETAILS")
        if details is not None and details.enabled and new_cves:
            reports.append(run_isolated(details, only_cves=set(new_cves),
                                        stream=STREAM_CORE))
        if embedder is not None and new_cves:
            try:
                embedder.update(store, new_cves)
            except Exception as exc:  # embeddings never gate graph updates
                logger.exception("embedding generation failed")
                report.errors.append(f"embedding: {exc!r}")

    for source_id in SUPPLEMENTARY_ORDER:
        cfg = config.source(source_id)
        if cfg is not None and cfg.enabled:
            reports.append(run_isolated(cfg))

    resolved, remaining = resolve_deferred(store, state.deferred)
    if resolved:
        logger.info("resolved %d deferred links", resolved)
    state.deferred = remaining

    state.save(config.state_path)
    return reports
