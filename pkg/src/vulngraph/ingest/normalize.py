"""Normalization rules applied between parsing and loading.

All rules are total and idempotent: vendor/product names are lower-cased
with whitespace collapsed to underscores, reference URLs are reduced to
their registrable host (Domain nodes are keyed by host), and free text
has runs of whitespace collapsed.
"""
from __future__ import annotations

import dataclasses
import re
from urllib.parse import urlsplit

from .records import (
    CanonicalVulnRecord,
    EnrichmentRecord,
    ExploitRecord,
    WeaknessRecord,
)

_WS = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    """Lower-case a vendor/product name, whitespace becomes underscores."""
    return _WS.sub("_", name.strip().lower())


def collapse_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


def registrable_host(url: str) -> str:
    """Reduce a URL (or bare host) to its lower-cased host, no port/path."""
    url = url.strip()
    if not url:
        return ""
    target = url if "://" in url else "//" + url
    try:
        host = urlsplit(target).hostname
    except ValueError:
        return ""
    return (host or "").lstrip().rstrip(". \t")


def _hosts(urls) -> list[str]:
    out = []
    for url in urls:
        host = registrable_host(url)
        if host and host not in out:
            out.append(host)
    return out


def _pairs(pairs) -> list[tuple[str, str]]:
    out = []
    for vendor, product in pairs:
        pair = (normalize_name(vendor), normalize_name(product))
        if pair not in out:
            out.append(pair)
    return out


def normalize(record):
    """Return a normalized copy of any parsed record (total, idempotent)."""
    if isinstance(record, CanonicalVulnRecord):
        return dataclasses.replace(
            record,
            description=collapse_ws(record.description),
            affectedProducts=_pairs(record.affectedProducts),
            referenceUrls=_hosts(record.referenceUrls),
        )
    if isinstance(record, WeaknessRecord):
        return dataclasses.replace(
            record,
            name=collapse_ws(record.name),
            description=collapse_ws(record.description),
        )
    if isinstance(record, ExploitRecord):
        return dataclasses.replace(
            record,
            title=collapse_ws(record.title),
            authorName=collapse_ws(record.authorName),
        )
    if isinstance(record, EnrichmentRecord):
        return dataclasses.replace(
            record,
            productMappings=_pairs(record.productMappings),
            referenceDomains=_hosts(record.referenceDomains),
        )
    raise TypeError(f"not a canonical record: {type(record).__name__}")
