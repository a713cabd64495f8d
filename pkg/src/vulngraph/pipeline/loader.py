"""Record-to-graph loading and batch validation.

All merges for one sub-pipeline run go through a single write batch, so
a run is atomic. Cross-source references that cannot be resolved yet
(an exploit naming a CVE the graph has not seen, enrichment for an
unknown CVE) are not dropped and not satisfied with placeholder nodes;
they queue as deferred items and are retried after later runs.
"""
from __future__ import annotations

import json
from typing import Iterable, Optional

from ..graph.store import GraphStore, WriteBatch
from ..ingest.records import (
    CanonicalVulnRecord,
    EnrichmentRecord,
    ExploitRecord,
    RecordInvalid,
    RejectedEntry,
    WeaknessRecord,
    iso,
)


def validate_batch(records: Iterable) -> tuple[list, list[RejectedEntry]]:
    """Re-check record invariants and dedup within the batch.

    Duplicate vulnerability records (same cveID) are folded into the
    first occurrence: scalar fields take the latest non-null value,
    list fields are unioned, lastModified takes the maximum.
    """
    accepted: list = []
    rejected: list[RejectedEntry] = []
    vuln_index: dict[str, CanonicalVulnRecord] = {}
    for position, record in enumerate(records, start=1):
        try:
            record.validate()
        except RecordInvalid as exc:
            rejected.append(RejectedEntry(position, str(exc)))
            continue
        if isinstance(record, CanonicalVulnRecord):
            existing = vuln_index.get(record.cveID)
            if existing is not None:
                _union_vuln(existing, record)
                continue
            vuln_index[record.cveID] = record
        accepted.append(record)
    return accepted, rejected


def _union_vuln(base: CanonicalVulnRecord, extra: CanonicalVulnRecord) -> None:
    if extra.description:
        base.description = extra.description
    if extra.cvssV2severity is not None:
        base.cvssV2severity = extra.cvssV2severity
    if extra.cvssV3exploitabilityScore is not None:
        base.cvssV3exploitabilityScore = extra.cvssV3exploitabilityScore
    base.lastModified = max(base.lastModified, extra.lastModified)
    base.published = min(base.published, extra.published)
    base.cweIDs = list(dict.fromkeys(base.cweIDs + extra.cweIDs))
    base.affectedProducts = list(dict.fromkeys(base.affectedProducts + extra.affectedProducts))
    base.referenceUrls = list(dict.fromkeys(base.referenceUrls + extra.referenceUrls))


# -- per-record loaders -------------------------------------------------------

def load_vuln_record(batch: WriteBatch, rec: CanonicalVulnRecord) -> None:
    props = {
        "description": rec.description,
        "published": iso(rec.published),
        "lastModified": iso(rec.lastModified),
    }
    if rec.cvssV2severity is not None:
        props["v2severity"] = rec.cvssV2severity
    if rec.cvssV3exploitabilityScore is not None:
        props["v3exploitabilityScore"] = float(rec.cvssV3exploitabilityScore)
    v = batch.merge_node("Vulnerability", {"cveID": rec.cveID}, props)
    for cwe in rec.cweIDs:
        w = batch.merge_node("Weakness", {"cweID": cwe})
        batch.merge_edge("EXAMPLE_OF", v, w)
    _load_product_pairs(batch, v, rec.affectedProducts)
    for host in rec.referenceUrls:
        dom = batch.merge_node("Domain", {"url": host})
        batch.merge_edge("REFERS_TO", v, dom)


def _load_product_pairs(batch: WriteBatch, vuln_handle: int, pairs) -> None:
    for vendor, product in pairs:
        ven = batch.merge_node("Vendor", {"name": vendor})
        prod = batch.merge_node("Product", {"name": product, "vendorName": vendor})
        batch.merge_edge("AFFECTS", vuln_handle, prod)
        batch.merge_edge("BELONGS_TO", prod, ven)


def load_weakness_record(batch: WriteBatch, rec: WeaknessRecord) -> None:
    batch.merge_node("Weakness", {"cweID": rec.cweID},
                     {"name": rec.name, "description": rec.description})


def load_exploit_record(batch: WriteBatch, rec: ExploitRecord) -> list[dict]:
    """Load an exploit; returns deferred link items for unseen CVEs."""
    props = {"title": rec.title, "exploitType": rec.exploitType}
    if rec.sourceUrl:
        props["sourceUrl"] = rec.sourceUrl
    ex = batch.merge_node("Exploit", {"exploitID": rec.exploitID}, props)
    author = batch.merge_node("Author", {"name": rec.authorName})
    batch.merge_edge("WRITES", author, ex)
    deferred = []
    for cve in rec.cveIDs:
        v = batch.get_node("Vulnerability", cve)
        if v is None:
            deferred.append({"kind": "exploit_link", "exploitID": rec.exploitID,
                             "cveID": cve, "author": rec.authorName})
        else:
            batch.merge_edge("EXPLOITS", ex, v.id)
            batch.merge_edge("WRITES", author, v.id)
    return deferred


def load_enrichment_record(batch: WriteBatch, rec: EnrichmentRecord) -> Optional[dict]:
    """Enrich an existing vulnerability; defers if the CVE is unknown."""
    v = batch.get_node("Vulnerability", rec.cveID)
    if v is None:
        return {
            "kind": "enrichment",
            "cveID": rec.cveID,
            "extraProps": rec.extraProps,
            "productMappings": [list(p) for p in rec.productMappings],
            "referenceDomains": rec.referenceDomains,
        }
    if rec.extraProps:
        batch.merge_node("Vulnerability", {"cveID": rec.cveID}, rec.extraProps)
    _load_product_pairs(batch, v.id, rec.productMappings)
    for host in rec.referenceDomains:
        dom = batch.merge_node("Domain", {"url": host})
        batch.merge_edge("REFERS_TO", v.id, dom)
    return None


# -- deferred queue -----------------------------------------------------------

def dedup_deferred(items: list[dict]) -> list[dict]:
    seen: set[str] = set()
    out = []
    for item in items:
        fingerprint = json.dumps(item, sort_keys=True)
        if fingerprint not in seen:
            seen.add(fingerprint)
            out.append(item)
    return out


def resolve_deferred(store: GraphStore, items: list[dict]) -> tuple[int, list[dict]]:
    """Retry deferred links; returns (resolved count, still-deferred items)."""
    if not items:
        return 0, []
    remaining: list[dict] = []
    resolved = 0
    with store.batch() as batch:
        for item in dedup_deferred(items):
            target = batch.get_node("Vulnerability", item["cveID"])
            if target is None:
                remaining.append(item)
                continue
            if item["kind"] == "exploit_link":
                ex = batch.get_node("Exploit", item["exploitID"])
                author = batch.get_node("Author", item["author"])
                if ex is None or author is None:
                    remaining.append(item)
                    continue
                batch.merge_edge("EXPLOITS", ex.id, target.id)
                batch.merge_edge("WRITES", author.id, target.id)
            elif item["kind"] == "enrichment":
                rec = EnrichmentRecord(
                    cveID=item["cveID"],
                    extraProps=dict(item.get("extraProps") or {}),
                    productMappings=[tuple(p) for p in item.get("productMappings") or []],
                    referenceDomains=list(item.get("referenceDomains") or []),
                )
                load_enrichment_record(batch, rec)
            else:
                remaining.append(item)
                continue
            resolved += 1
    return resolved, remaining
