from .ast import Query, to_text
from .executor import NodeCell, QueryExecutionError, ResultTable, execute
from .parser import (
    QuerySemanticError,
    QuerySyntaxError,
    ReadOnlyViolation,
    parse_query,
    validate_read_only,
)

__all__ = [
    "Query",
    "to_text",
    "NodeCell",
    "QueryExecutionError",
    "ResultTable",
    "execute",
    "QuerySemanticError",
    "QuerySyntaxError",
    "ReadOnlyViolation",
    "parse_query",
    "validate_read_only",
]
