"""AST for the read-only Cypher-compatible query subset."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union


@dataclass(frozen=True)
class NodePattern:
    var: Optional[str] = None
    label: Optional[str] = None
    props: tuple[tuple[str, Any], ...] = ()


@dataclass(frozen=True)
class EdgePattern:
    etype: Optional[str] = None
    direction: str = "out"  # "out": left-[]->right, "in": left<-[]-right


@dataclass(frozen=True)
class PatternPath:
    """Alternating node/edge patterns; starts and ends with a node."""
    nodes: tuple[NodePattern, ...]
    edges: tuple[EdgePattern, ...]


@dataclass(frozen=True)
class PropRef:
    var: str
    prop: str


@dataclass(frozen=True)
class Literal:
    value: Any


Operand = Union[PropRef, Literal]


@dataclass(frozen=True)
class Condition:
    lhs: Operand
    op: str  # = <> < <= > >= contains
    rhs: Operand


@dataclass(frozen=True)
class ReturnItem:
    var: str
    prop: Optional[str] = None

    @property
    def column(self) -> str:
        return self.var if self.prop is None else f"{self.var}.{self.prop}"


@dataclass(frozen=True)
class Query:
    matches: tuple[PatternPath, ...]
    where: tuple[Condition, ...] = ()
    returns: tuple[ReturnItem, ...] = ()
    limit: Optional[int] = None

    def variables(self) -> set[str]:
        bound = set()
        for path in self.matches:
            for node in path.nodes:
                if node.var:
                    bound.add(node.var)
        return bound


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(value)


def _format_node(node: NodePattern) -> str:
    inner = node.var or ""
    if node.label:
        inner += f":{node.label}"
    if node.props:
        pairs = ", ".join(f"{k}: {_format_value(v)}" for k, v in node.props)
        inner += (" " if inner else "") + "{" + pairs + "}"
    return f"({inner})"


def _format_operand(op: Operand) -> str:
    if isinstance(op, PropRef):
        return f"{op.var}.{op.prop}"
    return _format_value(op.value)


def to_text(query: Query) -> str:
    """Render a query back to canonical text (parse . to_text = identity)."""
    parts = []
    for path in query.matches:
        bits = [_format_node(path.nodes[0])]
        for edge, node in zip(path.edges, path.nodes[1:]):
            typed = f":{edge.etype}" if edge.etype else ""
            arrow = f"-[{typed}]->" if edge.direction == "out" else f"<-[{typed}]-"
            bits.append(arrow)
            bits.append(_format_node(node))
        parts.append("MATCH " + "".join(bits))
    if query.where:
        conds = " AND ".join(
            f"{_format_operand(c.lhs)} {'CONTAINS' if c.op == 'contains' else c.op} "
            f"{_format_operand(c.rhs)}"
            for c in query.where
        )
        parts.append("WHERE " + conds)
    parts.append("RETURN " + ", ".join(item.column for item in query.returns))
    if query.limit is not None:
        parts.append(f"LIMIT {query.limit}")
    return "\n".join(parts)
