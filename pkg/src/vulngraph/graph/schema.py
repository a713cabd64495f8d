"""Graph schema: node labels, identity keys, and edge type signatures.

The schema is closed: seven node labels and six edge types. Every label
has a key property (or pair) under which nodes are unique, and every edge
type constrains the labels of its endpoints.
"""
from __future__ import annotations

from typing import Any, Mapping, Tuple

NODE_LABELS: tuple[str, ...] = (
    "Vulnerability",
    "Exploit",
    "Weakness",
    "Product",
    "Vendor",
    "Author",
    "Domain",
)

# Identity properties per label. Product identity is composite because
# product names collide across vendors.
KEY_PROPS: dict[str, tuple[str, ...]] = {
    "Vulnerability": ("cveID",),
    "Exploit": ("exploitID",),
    "Weakness": ("cweID",),
    "Product": ("name", "vendorName"),
    "Vendor": ("name",),
    "Author": ("name",),
    "Domain": ("url",),
}

# Allowed (src_label, dst_label) pairs per edge type. WRITES carries two:
# authorship of an exploit, and attribution of the author to the
# vulnerability the exploit targets (the subgraph-exploration query
# traverses Author->Vulnerability directly).
EDGE_SIGNATURES: dict[str, tuple[Tuple[str, str], ...]] = {
    "EXPLOITS": (("Exploit", "Vulnerability"),),
    "AFFECTS": (("Vulnerability", "Product"),),
    "BELONGS_TO": (("Product", "Vendor"),),
    "EXAMPLE_OF": (("Vulnerability", "Weakness"),),
    "WRITES": (("Author", "Exploit"), ("Author", "Vulnerability")),
    "REFERS_TO": (("Vulnerability", "Domain"),),
}

EDGE_TYPES: tuple[str, ...] = tuple(EDGE_SIGNATURES)


class SchemaError(ValueError):
    """A write violates the graph schema (label, key, type, or signature)."""


class NotFoundError(KeyError):
    """A node or edge handle does not resolve to a live element."""


def check_label(label: str) -> str:
    if label not in KEY_PROPS:
        raise SchemaError(f"unknown label: {label!r}")
    return label


def check_edge_type(etype: str) -> str:
    if etype not in EDGE_SIGNATURES:
        raise SchemaError(f"unknown edge type: {etype!r}")
    return etype


def check_signature(etype: str, src_label: str, dst_label: str) -> None:
    if (src_label, dst_label) not in EDGE_SIGNATURES[etype]:
        allowed = " or ".join(f"{s}->{d}" for s, d in EDGE_SIGNATURES[etype])
        raise SchemaError(
            f"signature violation: {etype} requires {allowed}, "
            f"got {src_label}->{dst_label}"
        )


def value_kind(value: Any) -> str:
    """Classify a property value for conflict checks.

    Supported scalars: string, number (int/float), boolean, and lists of
    strings. Anything else (nested maps, mixed lists, None) is rejected.
    """
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, str):
        return "string"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return "string-list"
    raise SchemaError(f"unsupported property value type: {type(value).__name__}")


def check_props(props: Mapping[str, Any]) -> dict[str, Any]:
    out = {}
    for name, value in props.items():
        if not isinstance(name, str) or not name:
            raise SchemaError(f"invalid property name: {name!r}")
        value_kind(value)
        out[name] = value
    return out


def normalize_key(label: str, key: Any) -> tuple[str, ...]:
    """Coerce a key argument into the label's key tuple.

    Accepts a bare string for single-key labels, an ordered tuple, or a
    mapping naming exactly the key properties. Key values must be
    non-empty strings.
    """
    fields = KEY_PROPS[check_label(label)]
    if isinstance(key, str):
        if len(fields) != 1:
            raise SchemaError(f"{label} key needs properties {fields}, got a bare string")
        values = (key,)
    elif isinstance(key, Mapping):
        if set(key) != set(fields):
            raise SchemaError(f"{label} key must contain exactly {fields}, got {sorted(key)}")
        values = tuple(key[f] for f in fields)
    elif isinstance(key, tuple):
        if len(key) != len(fields):
            raise SchemaError(f"{label} key needs {len(fields)} values, got {len(key)}")
        values = key
    else:
        raise SchemaError(f"unsupported key argument: {key!r}")
    for field, value in zip(fields, values):
        if not isinstance(value, str) or not value:
            raise SchemaError(f"empty or non-string key property {field!r} for {label}")
    return values


def key_string(label: str, key: tuple[str, ...]) -> str:
    """Human-readable canonical key (vendor-qualified for Product)."""
    if label == "Product":
        return f"{key[1]}/{key[0]}"
    return key[0]
