"""Tokenizer and recursive-descent parser for the query subset.

Grammar (keywords case-insensitive):

    query  := match+ where? return limit? ";"?
    match  := "MATCH" path ("," path)*
    path   := node (edge node)*
    node   := "(" var? (":" label)? props? ")"
    edge   := "-[" (":" type)? "]->" | "<-[" (":" type)? "]-"
    where  := "WHERE" cond ("AND" cond)*
    cond   := operand cmp operand
    return := "RETURN" item ("," item)*
    limit  := "LIMIT" int

Only the read-only subset is accepted; any mutation keyword (CREATE,
MERGE, DELETE, SET, REMOVE, DETACH, DROP) is rejected outright.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Optional

from .ast import (
    Condition,
    EdgePattern,
    Literal,
    NodePattern,
    PatternPath,
    PropRef,
    Query,
    ReturnItem,
)


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class QuerySemanticError(ValueError):
    """Structurally valid query with an unbound variable or similar."""


class ReadOnlyViolation(ValueError):
    def __init__(self, keyword: str):
        super().__init__(f"read-only subset: {keyword} is not allowed")
        self.keyword = keyword


KEYWORDS = {"MATCH", "WHERE", "AND", "RETURN", "LIMIT", "CONTAINS", "TRUE", "FALSE"}
MUTATION_KEYWORDS = {"CREATE", "MERGE", "DELETE", "DETACH", "SET", "REMOVE", "DROP"}


@dataclass(frozen=True)
class Token:
    kind: str  # KW, IDENT, STRING, NUMBER, OP, EOF
    value: Any
    line: int
    col: int


_TWO_CHAR_OPS = ("<=", ">=", "<>", "!=")
_ONE_CHAR_OPS = "()[]{}:,.-<>=;"
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"\d+(\.\d+)?")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token("OP", two, line, col))
            i += 2
            col += 2
            continue
        if ch in ("'", '"'):
            value, consumed = _read_string(text, i, line, col)
            tokens.append(Token("STRING", value, line, col))
            i += consumed
            col += consumed
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            raw = m.group(0)
            tokens.append(Token("NUMBER", float(raw) if "." in raw else int(raw), line, col))
            i = m.end()
            col += len(raw)
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            upper = word.upper()
            if upper in MUTATION_KEYWORDS:
                raise ReadOnlyViolation(upper)
            if upper in KEYWORDS:
                tokens.append(Token("KW", upper, line, col))
            else:
                tokens.append(Token("IDENT", word, line, col))
            i = m.end()
            col += len(word)
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise QuerySyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", None, line, col))
    return tokens


def _read_string(text: str, start: int, line: int, col: int) -> tuple[str, int]:
    quote = text[start]
    out = []
    i = start + 1
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
            continue
        if ch == quote:
            return "".join(out), i - start + 1
        if ch == "\n":
            break
        out.append(ch)
        i += 1
    raise QuerySyntaxError("unterminated string literal", line, col)


def validate_read_only(text: str) -> None:
    """Raise ReadOnlyViolation if the text contains a mutation keyword."""
    tokenize(text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> QuerySyntaxError:
        tok = self.peek()
        return QuerySyntaxError(message, tok.line, tok.col)

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.value != op:
            raise self.error(f"expected {op!r}")
        return self.advance()

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.value == op

    def at_kw(self, kw: str) -> bool:
        tok = self.peek()
        return tok.kind == "KW" and tok.value == kw

    def expect_kw(self, kw: str) -> Token:
        if not self.at_kw(kw):
            raise self.error(f"expected {kw}")
        return self.advance()

    def expect_ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.error(f"expected {what}")
        return self.advance().value

    # -- grammar -------------------------------------------------------

    def parse(self) -> Query:
        matches = []
        while self.at_kw("MATCH"):
            self.advance()
            matches.append(self.parse_path())
            while self.at_op(","):
                self.advance()
                matches.append(self.parse_path())
        if not matches:
            raise self.error("expected MATCH")
        where: tuple = ()
        if self.at_kw("WHERE"):
            self.advance()
            conds = [self.parse_condition()]
            while self.at_kw("AND"):
                self.advance()
                conds.append(self.parse_condition())
            where = tuple(conds)
        self.expect_kw("RETURN")
        returns = [self.parse_return_item()]
        while self.at_op(","):
            self.advance()
            returns.append(self.parse_return_item())
        limit = None
        if self.at_kw("LIMIT"):
            self.advance()
            tok = self.peek()
            if tok.kind != "NUMBER" or not isinstance(tok.value, int) or tok.value <= 0:
                raise self.error("LIMIT expects a positive integer")
            limit = self.advance().value
        if self.at_op(";"):
            self.advance()
        if self.peek().kind != "EOF":
            raise self.error("unexpected trailing input")
        return Query(tuple(matches), where, tuple(returns), limit)

    def parse_path(self) -> PatternPath:
        nodes = [self.parse_node()]
        edges = []
        while self.at_op("-") or self.at_op("<"):
            edges.append(self.parse_edge())
            nodes.append(self.parse_node())
        return PatternPath(tuple(nodes), tuple(edges))

    def parse_node(self) -> NodePattern:
        self.expect_op("(")
        var = None
        label = None
        props: tuple = ()
        if self.peek().kind == "IDENT":
            var = self.advance().value
        if self.at_op(":"):
            self.advance()
            label = self.expect_ident("a node label")
        if self.at_op("{"):
            props = self.parse_prop_map()
        self.expect_op(")")
        return NodePattern(var, label, props)

    def parse_prop_map(self) -> tuple:
        self.expect_op("{")
        pairs = []
        if not self.at_op("}"):
            pairs.append(self.parse_prop_pair())
            while self.at_op(","):
                self.advance()
                pairs.append(self.parse_prop_pair())
        self.expect_op("}")
        return tuple(pairs)

    def parse_prop_pair(self) -> tuple:
        name = self.expect_ident("a property name")
        self.expect_op(":")
        return (name, self.parse_literal())

    def parse_literal(self) -> Any:
        tok = self.peek()
        if tok.kind == "STRING":
            return self.advance().value
        if tok.kind == "NUMBER":
            return self.advance().value
        if tok.kind == "OP" and tok.value == "-":
            self.advance()
            num = self.peek()
            if num.kind != "NUMBER":
                raise self.error("expected a number after '-'")
            return -self.advance().value
        if tok.kind == "KW" and tok.value in ("TRUE", "FALSE"):
            self.advance()
            return tok.value == "TRUE"
        raise self.error("expected a literal value")

    def parse_edge(self) -> EdgePattern:
        if self.at_op("<"):
            # <-[:TYPE]-
            self.advance()
            self.expect_op("-")
            self.expect_op("[")
            etype = self.parse_edge_type()
            self.expect_op("]")
            self.expect_op("-")
            return EdgePattern(etype, "in")
        # -[:TYPE]->
        self.expect_op("-")
        self.expect_op("[")
        etype = self.parse_edge_type()
        self.expect_op("]")
        self.expect_op("-")
        self.expect_op(">")
        return EdgePattern(etype, "out")

    def parse_edge_type(self) -> Optional[str]:
        if self.at_op(":"):
            self.advance()
            return self.expect_ident("an edge type")
        return None

    def parse_condition(self) -> Condition:
        lhs = self.parse_operand()
        tok = self.peek()
        if tok.kind == "KW" and tok.value == "CONTAINS":
            self.advance()
            op = "contains"
        elif tok.kind == "OP" and tok.value in ("=", "<>", "!=", "<", "<=", ">", ">="):
            self.advance()
            op = "<>" if tok.value == "!=" else tok.value
        else:
            raise self.error("expected a comparator")
        return Condition(lhs, op, self.parse_operand())

    def parse_operand(self):
        tok = self.peek()
        if tok.kind == "IDENT":
            var = self.advance().value
            self.expect_op(".")
            prop = self.expect_ident("a property name")
            return PropRef(var, prop)
        return Literal(self.parse_literal())

    def parse_return_item(self) -> ReturnItem:
        var = self.expect_ident("a variable")
        prop = None
        if self.at_op("."):
            self.advance()
            prop = self.expect_ident("a property name")
        return ReturnItem(var, prop)


def parse_query(text: str) -> Query:
    """Parse query text into an AST, or raise a positioned error.

    Raises QuerySyntaxError (with line/column), ReadOnlyViolation for
    mutation keywords, and QuerySemanticError for unbound variables.
    """
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 1, 1)
    query = _Parser(tokenize(text)).parse()
    bound = query.variables()
    for item in query.returns:
        if item.var not in bound:
            raise QuerySemanticError(f"unbound variable in RETURN: {item.var}")
    for cond in query.where:
        for operand in (cond.lhs, cond.rhs):
            if isinstance(operand, PropRef) and operand.var not in bound:
                raise QuerySemanticError(f"unbound variable in WHERE: {operand.var}")
    return query
