from .schema import (
    EDGE_SIGNATURES,
    EDGE_TYPES,
    KEY_PROPS,
    NODE_LABELS,
    NotFoundError,
    SchemaError,
    key_string,
)
from .store import (
    Edge,
    FilterError,
    GraphStore,
    Node,
    SnapshotFormatError,
    StoreBusyError,
    WriteBatch,
)

__all__ = [
    "EDGE_SIGNATURES",
    "EDGE_TYPES",
    "KEY_PROPS",
    "NODE_LABELS",
    "NotFoundError",
    "SchemaError",
    "key_string",
    "Edge",
    "FilterError",
    "GraphStore",
    "Node",
    "SnapshotFormatError",
    "StoreBusyError",
    "WriteBatch",
]
