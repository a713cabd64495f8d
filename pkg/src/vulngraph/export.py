"""Node and relationship exports (CSV / JSON), shared by API and CLI.

Rows are emitted in ascending key order so exports are reproducible.
Missing properties become empty CSV cells / JSON nulls. Relationship
rows carry the source and target node keys (vendor-qualified for
Product) plus any requested edge properties.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any

from .graph.schema import EDGE_SIGNATURES, KEY_PROPS, SchemaError, key_string
from .graph.store import GraphStore

FORMATS = ("csv", "json")


class ExportError(ValueError):
    pass


def _check(label_or_type: str, table: dict, kind: str) -> str:
    if label_or_type not in table:
        raise ExportError(f"unknown {kind}: {label_or_type!r}")
    return label_or_type


def _check_format(file_format: str) -> str:
    if file_format not in FORMATS:
        raise ExportError(f"unsupported format: {file_format!r} (use csv or json)")
    return file_format


def _check_props(props: list[str]) -> list[str]:
    if not props:
        raise ExportError("props must not be empty")
    for name in props:
        if not name or not all(c.isalnum() or c == "_" for c in name):
            raise ExportError(f"invalid property name: {name!r}")
    return props


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _cell(row.get(c)) for c in columns})
    return buf.getvalue()


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def export_nodes(store: GraphStore, node_type: str, props: list[str],
                 file_format: str = "csv") -> str:
    """One row per node of the label, with the selected properties."""
    _check(node_type, KEY_PROPS, "label")
    _check_format(file_format)
    _check_props(props)
    rows = [
        {p: node.props.get(p) for p in props}
        for node in store.scan(node_type)
    ]
    if file_format == "json":
        return json.dumps(rows, indent=2)
    return _csv(rows, props)


def export_relationships(store: GraphStore, rel_type: str, props: list[str],
                         file_format: str = "csv") -> str:
    """One row per edge: source key, target key, selected edge properties."""
    _check(rel_type, EDGE_SIGNATURES, "relationship type")
    _check_format(file_format)
    props = [p for p in props if p not in ("src", "dst")]
    if props:
        _check_props(props)
    rows = []
    for edge in store.edges_by_type(rel_type):
        src = store.node(edge.src)
        dst = store.node(edge.dst)
        row = {"src": key_string(src.label, src.key), "dst": key_string(dst.label, dst.key)}
        row.update({p: edge.props.get(p) for p in props})
        rows.append(row)
    rows.sort(key=lambda r: (r["src"], r["dst"]))
    columns = ["src", "dst"] + props
    if file_format == "json":
        return json.dumps(rows, indent=2)
    return _csv(rows, columns)
