"""Canonical per-source records produced by the feed parsers.

Every record type validates its own invariants; parsers and batch
validation both call validate() so a record is checked the same way no
matter how it was constructed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Optional

CVE_ID_RE = re.compile(r"^CVE-\d{4}-\d{4,}$")
CWE_ID_RE = re.compile(r"^CWE-\d+$")
V2_SEVERITIES = ("LOW", "MEDIUM", "HIGH")
RESERVED_ENRICHMENT_KEYS = ("cveID", "published")


class RecordInvalid(ValueError):
    """A record violates a field invariant; message doubles as reject reason."""


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    if not isinstance(value, str):
        raise RecordInvalid("bad timestamp")
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise RecordInvalid(f"bad timestamp: {value!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def iso(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def _dedup(items):
    return list(dict.fromkeys(items))


@dataclass
class CanonicalVulnRecord:
    cveID: str
    description: str
    published: datetime
    lastModified: datetime
    cvssV2severity: Optional[str] = None
    cvssV3exploitabilityScore: Optional[float] = None
    cweIDs: list[str] = field(default_factory=list)
    affectedProducts: list[tuple[str, str]] = field(default_factory=list)  # (vendor, product)
    referenceUrls: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if not CVE_ID_RE.match(self.cveID or ""):
            raise RecordInvalid(f"bad cveID: {self.cveID!r}")
        if not isinstance(self.description, str):
            raise RecordInvalid("bad description")
        if self.published > self.lastModified:
            raise RecordInvalid("timestamp order")
        if self.cvssV2severity is not None and self.cvssV2severity not in V2_SEVERITIES:
            raise RecordInvalid(f"bad v2severity: {self.cvssV2severity!r}")
        if self.cvssV3exploitabilityScore is not None:
            score = self.cvssV3exploitabilityScore
            if not isinstance(score, (int, float)) or isinstance(score, bool) \
                    or not 0.0 <= float(score) <= 10.0:
                raise RecordInvalid("score out of range")
        for cwe in self.cweIDs:
            if not CWE_ID_RE.match(cwe or ""):
                raise RecordInvalid(f"bad cweID: {cwe!r}")
        for pair in self.affectedProducts:
            if len(pair) != 2 or not all(isinstance(p, str) and p for p in pair):
                raise RecordInvalid(f"bad product pair: {pair!r}")
        self.cweIDs = _dedup(self.cweIDs)
        self.affectedProducts = _dedup(tuple(p) for p in self.affectedProducts)
        self.referenceUrls = _dedup(self.referenceUrls)

    @property
    def year(self) -> int:
        return int(self.cveID.split("-")[1])


@dataclass
class WeaknessRecord:
    cweID: str
    name: str
    description: str = ""

    def validate(self) -> None:
        if not CWE_ID_RE.match(self.cweID or ""):
            raise RecordInvalid(f"bad cweID: {self.cweID!r}")
        if not self.name:
            raise RecordInvalid("missing name")


@dataclass
class ExploitRecord:
    exploitID: str
    title: str
    exploitType: str
    authorName: str
    cveIDs: list[str] = field(default_factory=list)
    sourceUrl: Optional[str] = None

    def validate(self) -> None:
        if not self.exploitID:
            raise RecordInvalid("missing exploitID")
        if not self.exploitType:
            raise RecordInvalid("missing type")
        if not self.authorName:
            raise RecordInvalid("missing author")
        for cve in self.cveIDs:
            if not CVE_ID_RE.match(cve or ""):
                raise RecordInvalid(f"bad cveID: {cve!r}")
        self.cveIDs = _dedup(self.cveIDs)

    @property
    def unlinked(self) -> bool:
        """True when the exploit references no CVE at all."""
        return not self.cveIDs


@dataclass
class EnrichmentRecord:
    cveID: str
    extraProps: dict[str, Any] = field(default_factory=dict)
    productMappings: list[tuple[str, str]] = field(default_factory=list)
    referenceDomains: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if not CVE_ID_RE.match(self.cveID or ""):
            raise RecordInvalid(f"bad cveID: {self.cveID!r}")
        for key, value in self.extraProps.items():
            if key in RESERVED_ENRICHMENT_KEYS:
                raise RecordInvalid(f"reserved key: {key}")
            if isinstance(value, (dict, list)):
                raise RecordInvalid(f"non-scalar extra property: {key}")
        for pair in self.productMappings:
            if len(pair) != 2 or not all(isinstance(p, str) and p for p in pair):
                raise RecordInvalid(f"bad product pair: {pair!r}")
        self.productMappings = _dedup(tuple(p) for p in self.productMappings)
        self.referenceDomains = _dedup(self.referenceDomains)


@dataclass
class RejectedEntry:
    index: int  # 1-based position in the input (line or data row number)
    reason: str


@dataclass
class ParseResult:
    records: list
    rejects: list[RejectedEntry]

    @property
    def total(self) -> int:
        return len(self.records) + len(self.rejects)
