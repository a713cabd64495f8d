"""Per-source feed parsers.

Input formats (all offline-testable; live fetch adapters spool raw bytes
to disk and reuse these parsers):

  - NVD-style feed: line-delimited JSON, one CVE per line with fields
    cveID, description, published, lastModified, cvssV2severity,
    cvssV3exploitabilityScore, cweIDs, affectedProducts
    ([{vendorName, productName}]), referenceUrls.
  - CWE catalog: line-delimited JSON {cweID, name, description}.
  - Exploit index: CSV with header exploitID,title,type,author,cveIDs,url
    (cveIDs semicolon-joined).
  - Enrichment export: line-delimited JSON {cveID, extraProps,
    productMappings, referenceDomains}.

Parsers are total with per-entry rejects: a malformed entry is recorded
with a reason and never silently dropped, so |records| + |rejects|
always equals the number of input entries. A top-level format problem
(undecodable bytes, wrong CSV header) is fatal instead.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Callable

from .records import (
    CanonicalVulnRecord,
    EnrichmentRecord,
    ExploitRecord,
    ParseResult,
    RecordInvalid,
    RejectedEntry,
    WeaknessRecord,
    parse_timestamp,
)

EXPLOIT_INDEX_HEADER = ["exploitID", "title", "type", "author", "cveIDs", "url"]


class FeedFormatError(ValueError):
    """The input is not in the documented feed format at all."""


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FeedFormatError(f"feed is not valid UTF-8: {exc}") from None


def _json_lines(data: bytes | str):
    for lineno, line in enumerate(_decode(data).splitlines(), start=1):
        if line.strip():
            yield lineno, line


def _parse_ndjson(data: bytes | str, build: Callable[[dict], Any]) -> ParseResult:
    records, rejects = [], []
    for lineno, line in _json_lines(data):
        try:
            entry = json.loads(line)
            if not isinstance(entry, dict):
                raise RecordInvalid("entry is not an object")
            record = build(entry)
            record.validate()
        except json.JSONDecodeError:
            rejects.append(RejectedEntry(lineno, "invalid json"))
        except RecordInvalid as exc:
            rejects.append(RejectedEntry(lineno, str(exc)))
        else:
            records.append(record)
    return ParseResult(records, rejects)


def _require(entry: dict, field: str):
    if field not in entry:
        raise RecordInvalid(f"missing field: {field}")
    return entry[field]


def _product_pairs(raw) -> list[tuple[str, str]]:
    if raw is None:
        return []
    pairs = []
    for item in raw:
        if isinstance(item, dict):
            try:
                pairs.append((item["vendorName"], item["productName"]))
            except KeyError as exc:
                raise RecordInvalid(f"product mapping missing {exc.args[0]}") from None
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            pairs.append((item[0], item[1]))
        else:
            raise RecordInvalid(f"bad product pair: {item!r}")
    return pairs


def parse_nvd_feed(data: bytes | str) -> ParseResult:
    """Parse the NVD-style feed into CanonicalVulnRecords."""

    def build(entry: dict) -> CanonicalVulnRecord:
        score = entry.get("cvssV3exploitabilityScore")
        return CanonicalVulnRecord(
            cveID=_require(entry, "cveID"),
            description=_require(entry, "description"),
            published=parse_timestamp(_require(entry, "published")),
            lastModified=parse_timestamp(_require(entry, "lastModified")),
            cvssV2severity=entry.get("cvssV2severity"),
            cvssV3exploitabilityScore=float(score) if score is not None else None,
            cweIDs=list(entry.get("cweIDs") or []),
            affectedProducts=_product_pairs(entry.get("affectedProducts")),
            referenceUrls=list(entry.get("referenceUrls") or []),
        )

    return _parse_ndjson(data, build)


def parse_cwe_catalog(data: bytes | str) -> ParseResult:
    """Parse the weakness catalog; duplicate cweIDs keep the first entry."""

    def build(entry: dict) -> WeaknessRecord:
        return WeaknessRecord(
            cweID=_require(entry, "cweID"),
            name=_require(entry, "name"),
            description=entry.get("description", ""),
        )

    result = _parse_ndjson(data, build)
    seen: set[str] = set()
    records, extra_rejects = [], []
    for offset, record in enumerate(result.records):
        if record.cweID in seen:
            extra_rejects.append(RejectedEntry(offset + 1, f"duplicate cweID: {record.cweID}"))
        else:
            seen.add(record.cweID)
            records.append(record)
    return ParseResult(records, result.rejects + extra_rejects)


def parse_exploitdb_index(data: bytes | str) -> ParseResult:
    """Parse the exploit index CSV.

    Blank authors default to "unknown"; rows with no CVE reference are
    kept (flagged unlinked on the record); duplicate exploitIDs keep the
    first row.
    """
    text = _decode(data)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FeedFormatError("exploit index is empty (missing header)") from None
    if [h.strip() for h in header] != EXPLOIT_INDEX_HEADER:
        raise FeedFormatError(
            f"bad exploit index header: expected {','.join(EXPLOIT_INDEX_HEADER)}")

    records, rejects = [], []
    seen: set[str] = set()
    for rowno, row in enumerate(reader, start=1):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != len(EXPLOIT_INDEX_HEADER):
            rejects.append(RejectedEntry(rowno, f"expected {len(EXPLOIT_INDEX_HEADER)} columns"))
            continue
        exploit_id, title, etype, author, cve_field, url = (cell.strip() for cell in row)
        record = ExploitRecord(
            exploitID=exploit_id,
            title=title,
            exploitType=etype,
            authorName=author or "unknown",
            cveIDs=[c.strip() for c in cve_field.split(";") if c.strip()],
            sourceUrl=url or None,
        )
        try:
            record.validate()
        except RecordInvalid as exc:
            rejects.append(RejectedEntry(rowno, str(exc)))
            continue
        if record.exploitID in seen:
            rejects.append(RejectedEntry(rowno, f"duplicate exploitID: {record.exploitID}"))
            continue
        seen.add(record.exploitID)
        records.append(record)
    return ParseResult(records, rejects)


def parse_cvedetails_export(data: bytes | str) -> ParseResult:
    """Parse the enrichment export into EnrichmentRecords."""

    def build(entry: dict) -> EnrichmentRecord:
        extra = entry.get("extraProps") or {}
        if not isinstance(extra, dict):
            raise RecordInvalid("extraProps is not an object")
        return EnrichmentRecord(
            cveID=_require(entry, "cveID"),
            extraProps=dict(extra),
            productMappings=_product_pairs(entry.get("productMappings")),
            referenceDomains=list(entry.get("referenceDomains") or []),
        )

    return _parse_ndjson(data, build)
