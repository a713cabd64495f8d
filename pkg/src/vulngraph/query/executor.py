"""Pattern-match executor over a graph store read view.

Each MATCH clause is evaluated to a set of variable bindings by walking
the path left to right; clauses are then combined in written order with
a hash join on shared variables. Bindings are plain homomorphisms: the
same node (or edge) may satisfy several pattern positions. Result rows
are deduplicated (set semantics), canonically ordered, and truncated by
LIMIT last, so identical queries always produce identical tables.

Missing properties never error during WHERE evaluation; a comparison
against an absent property is simply false.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Optional

from ..graph.schema import EDGE_SIGNATURES, KEY_PROPS
from ..graph.store import GraphStore, Node
from .ast import Condition, Literal, NodePattern, PatternPath, PropRef, Query

_MISSING = object()


class QueryExecutionError(ValueError):
    """The query references an unknown label or edge type."""


@dataclass(frozen=True)
class NodeCell:
    """A node projected into a result row: label, identity key, properties."""
    label: str
    key: tuple[str, ...]
    props: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "key": list(self.key), "props": self.props}


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]

    def to_dict(self) -> dict[str, Any]:
        return {
            "columns": self.columns,
            "rows": [
                [cell.to_dict() if isinstance(cell, NodeCell) else cell for cell in row]
                for row in self.rows
            ],
        }

    def column(self, name: str) -> list[Any]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _validate_schema_names(query: Query) -> None:
    for path in query.matches:
        for node in path.nodes:
            if node.label is not None and node.label not in KEY_PROPS:
                raise QueryExecutionError(f"unknown label: {node.label}")
        for edge in path.edges:
            if edge.etype is not None and edge.etype not in EDGE_SIGNATURES:
                raise QueryExecutionError(f"unknown edge type: {edge.etype}")


def _node_matches(node: Node, pattern: NodePattern) -> bool:
    if pattern.label is not None and node.label != pattern.label:
        return False
    for name, value in pattern.props:
        if node.props.get(name, _MISSING) != value:
            return False
    return True


def _eval_path(path: PatternPath, store: GraphStore) -> tuple[set[str], list[dict]]:
    """All bindings for one path; returns (named vars, binding dicts)."""
    named = {n.var for n in path.nodes if n.var}
    results: set[tuple] = set()
    order = sorted(named)

    if path.nodes[0].label is not None:
        start_nodes = store.nodes_by_label(path.nodes[0].label)
    else:
        start_nodes = store.all_nodes()

    def walk(pos: int, node: Node, binding: dict) -> None:
        pattern = path.nodes[pos]
        if not _node_matches(node, pattern):
            return
        if pattern.var:
            bound = binding.get(pattern.var)
            if bound is not None and bound != node.id:
                return
            binding = {**binding, pattern.var: node.id}
        if pos == len(path.edges):
            results.add(tuple(binding.get(v) for v in order))
            return
        edge = path.edges[pos]
        if edge.direction == "out":
            hops = [(e.dst,) for e in store.out_edges(node.id, edge.etype)]
        else:
            hops = [(e.src,) for e in store.in_edges(node.id, edge.etype)]
        for (next_id,) in hops:
            walk(pos + 1, store.node(next_id), binding)

    for node in start_nodes:
        walk(0, node, {})

    rows = [dict(zip(order, values)) for values in sorted(results, key=repr)]
    return named, rows


def _hash_join(left_vars: set[str], left: list[dict],
               right_vars: set[str], right: list[dict]) -> tuple[set[str], list[dict]]:
    shared = sorted(left_vars & right_vars)
    if not shared:
        return left_vars | right_vars, [{**l, **r} for l in left for r in right]
    index: dict[tuple, list[dict]] = {}
    for row in right:
        index.setdefault(tuple(row[v] for v in shared), []).append(row)
    out = []
    for row in left:
        for match in index.get(tuple(row[v] for v in shared), ()):
            out.append({**row, **match})
    return left_vars | right_vars, out


def _operand_value(operand, binding: dict, store: GraphStore):
    if isinstance(operand, Literal):
        return operand.value
    node = store.node(binding[operand.var])
    return node.props.get(operand.prop, _MISSING)


def _compare(lhs, op: str, rhs) -> bool:
    if lhs is _MISSING or rhs is _MISSING:
        return False
    if op == "=":
        return lhs == rhs
    if op == "<>":
        return lhs != rhs
    if op == "contains":
        return isinstance(lhs, str) and isinstance(rhs, str) and rhs in lhs
    both_num = (isinstance(lhs, (int, float)) and not isinstance(lhs, bool)
                and isinstance(rhs, (int, float)) and not isinstance(rhs, bool))
    both_str = isinstance(lhs, str) and isinstance(rhs, str)
    if not (both_num or both_str):
        return False
    return {"<": lhs < rhs, "<=": lhs <= rhs, ">": lhs > rhs, ">=": lhs >= rhs}[op]


def _where_ok(conds: Iterable[Condition], binding: dict, store: GraphStore) -> bool:
    return all(
        _compare(_operand_value(c.lhs, binding, store), c.op,
                 _operand_value(c.rhs, binding, store))
        for c in conds
    )


def _cell_sort_key(cell) -> str:
    if isinstance(cell, NodeCell):
        return json.dumps(["node", cell.label, list(cell.key)])
    return json.dumps(["val", str(type(cell).__name__), cell], default=str)


def execute(query: Query, store: GraphStore) -> ResultTable:
    """Run a parsed query against the store and return the result table."""
    _validate_schema_names(query)

    acc_vars: set[str] = set()
    acc: list[dict] = [{}]
    for path in query.matches:
        path_vars, path_rows = _eval_path(path, store)
        acc_vars, acc = _hash_join(acc_vars, acc, path_vars, path_rows)
        if not acc:
            break

    if query.where:
        acc = [row for row in acc if _where_ok(query.where, row, store)]

    columns = [item.column for item in query.returns]
    seen: set[tuple] = set()
    projected: list[tuple] = []
    for binding in acc:
        cells = []
        identity = []
        for item in query.returns:
            node = store.node(binding[item.var])
            if item.prop is None:
                cells.append(NodeCell(node.label, node.key, dict(node.props)))
                identity.append(("node", node.label, node.key))
            else:
                value = node.props.get(item.prop)
                cells.append(value)
                identity.append(("val", repr(value)))
        fingerprint = tuple(identity)
        if fingerprint not in seen:
            seen.add(fingerprint)
            projected.append(tuple(cells))

    projected.sort(key=lambda row: [_cell_sort_key(c) for c in row])
    if query.limit is not None:
        projected = projected[: query.limit]
    return ResultTable(columns, projected)
