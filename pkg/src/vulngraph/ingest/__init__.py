from .normalize import collapse_ws, normalize, normalize_name, registrable_host
from .parsers import (
    EXPLOIT_INDEX_HEADER,
    FeedFormatError,
    parse_cvedetails_export,
    parse_cwe_catalog,
    parse_exploitdb_index,
    parse_nvd_feed,
)
from .records import (
    CanonicalVulnRecord,
    EnrichmentRecord,
    ExploitRecord,
    ParseResult,
    RecordInvalid,
    RejectedEntry,
    WeaknessRecord,
    iso,
    parse_timestamp,
)

__all__ = [
    "collapse_ws",
    "normalize",
    "normalize_name",
    "registrable_host",
    "EXPLOIT_INDEX_HEADER",
    "FeedFormatError",
    "parse_cvedetails_export",
    "parse_cwe_catalog",
    "parse_exploitdb_index",
    "parse_nvd_feed",
    "CanonicalVulnRecord",
    "EnrichmentRecord",
    "ExploitRecord",
    "ParseResult",
    "RecordInvalid",
    "RejectedEntry",
    "WeaknessRecord",
    "iso",
    "parse_timestamp",
]
