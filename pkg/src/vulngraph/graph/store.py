"""Embedded property-graph store with idempotent MERGE semantics.

Nodes are unique per (label, key); edges are unique per (type, src, dst).
Merging an existing element updates properties field-wise (last writer
wins per property); re-applying any merge sequence is a no-op.

Durability is an append-only write log plus optional snapshots. A write
batch stages its mutations and publishes them atomically at commit: the
batch's ops are appended to the log, fsynced, terminated with a commit
marker, and only then applied to the in-memory structures. Replay ignores
any trailing ops that lack a commit marker, so a crash mid-batch leaves
the store at the previous batch boundary.

Concurrency: single writer, many readers. Readers share a mutex with the
(short) commit apply step only, never with batch construction, so they
always observe a consistent committed view.
"""
from __future__ import annotations

import io
import json
import logging
import os
import struct
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from .schema import (
    EDGE_SIGNATURES,
    KEY_PROPS,
    NotFoundError,
    SchemaError,
    check_edge_type,
    check_label,
    check_props,
    check_signature,
    normalize_key,
    value_kind,
)

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b"PGS1"
SNAPSHOT_VERSION = 1
LOG_FILENAME = "write.log"
SNAPSHOT_FILENAME = "snapshot.bin"

READ_LOCK_TIMEOUT = 5.0


class StoreBusyError(RuntimeError):
    """The store could not grant a consistent read view in time."""


class SnapshotFormatError(ValueError):
    """Snapshot file is corrupt or not a snapshot; carries a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass
class Node:
    id: int
    label: str
    props: dict[str, Any]

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(self.props[f] for f in KEY_PROPS[self.label])


@dataclass
class Edge:
    id: int
    etype: str
    src: int
    dst: int
    props: dict[str, Any]


def _merge_props(existing: dict[str, Any], updates: Mapping[str, Any]) -> bool:
    """Apply updates last-writer-wins; return True if anything changed."""
    changed = False
    for name, value in updates.items():
        if name in existing:
            if value_kind(existing[name]) != value_kind(value):
                raise SchemaError(
                    f"type-conflicting overwrite of {name!r}: "
                    f"{value_kind(existing[name])} -> {value_kind(value)}"
                )
            if existing[name] == value:
                continue
        existing[name] = value
        changed = True
    return changed


class WriteBatch:
    """Staging area for one atomic group of merges.

    Merges observe the committed store plus this batch's own staged
    changes (read-your-writes), so intra-batch dedup works. Nothing is
    visible to readers until commit.
    """

    def __init__(self, store: "GraphStore"):
        self._store = store
        self._nodes: dict[int, Node] = {}
        self._key_index: dict[tuple[str, tuple[str, ...]], int] = {}
        self._edges: dict[int, Edge] = {}
        self._edge_index: dict[tuple[str, int, int], int] = {}
        self._ops: list[str] = []
        self._closed = False
        self.nodes_merged = 0
        self.edges_merged = 0
        self.nodes_created = 0
        self.edges_created = 0

    # -- effective (committed + staged) lookups ---------------------------

    def _find_node(self, label: str, key: tuple[str, ...]) -> Optional[Node]:
        nid = self._key_index.get((label, key))
        if nid is not None:
            return self._nodes[nid]
        committed = self._store._key_index[label].get(key)
        if committed is None:
            return None
        if committed in self._nodes:
            return self._nodes[committed]
        return self._store._nodes[committed]

    def _node_by_handle(self, handle: int) -> Node:
        if handle in self._nodes:
            return self._nodes[handle]
        node = self._store._nodes.get(handle)
        if node is None:
            raise NotFoundError(f"no node with handle {handle}")
        return node

    def get_node(self, label: str, key) -> Optional[Node]:
        return self._find_node(check_label(label), normalize_key(label, key))

    # -- merges ------------------------------------------------------------

    def merge_node(self, label: str, key, props: Optional[Mapping[str, Any]] = None) -> int:
        self._check_open()
        label = check_label(label)
        key_t = normalize_key(label, key)
        props = check_props(props or {})
        for f, v in zip(KEY_PROPS[label], key_t):
            if f in props and props[f] != v:
                raise SchemaError(f"property {f!r} conflicts with the merge key")
        node = self._find_node(label, key_t)
        changed = False
        if node is None:
            nid = self._store._take_node_id()
            node_props = dict(zip(KEY_PROPS[label], key_t))
            node_props.update(props)
            node = Node(nid, label, node_props)
            self._nodes[nid] = node
            self._key_index[(label, key_t)] = nid
            self.nodes_created += 1
            changed = True
        else:
            if node.id not in self._nodes:
                node = Node(node.id, node.label, dict(node.props))
            changed = _merge_props(node.props, props)
            if changed:
                self._nodes[node.id] = node
                self._key_index[(label, key_t)] = node.id
        if changed:
            self.nodes_merged += 1
            self._ops.append(json.dumps(
                {"node": [label, list(key_t), props]}, sort_keys=True))
        return node.id

    def merge_edge(self, etype: str, src: int, dst: int,
                   props: Optional[Mapping[str, Any]] = None) -> int:
        self._check_open()
        etype = check_edge_type(etype)
        src_node = self._node_by_handle(src)
        dst_node = self._node_by_handle(dst)
        check_signature(etype, src_node.label, dst_node.label)
        props = check_props(props or {})
        eid = self._edge_index.get((etype, src, dst))
        edge = self._edges.get(eid) if eid is not None else None
        if edge is None:
            committed = self._store._edge_index.get((etype, src, dst))
            if committed is not None:
                edge = self._edges.get(committed) or self._store._edges[committed]
        changed = False
        if edge is None:
            eid = self._store._take_edge_id()
            edge = Edge(eid, etype, src, dst, dict(props))
            self._edges[eid] = edge
            self._edge_index[(etype, src, dst)] = eid
            self.edges_created += 1
            changed = True
        else:
            if edge.id not in self._edges:
                edge = Edge(edge.id, edge.etype, edge.src, edge.dst, dict(edge.props))
            changed = _merge_props(edge.props, props)
            if changed:
                self._edges[edge.id] = edge
                self._edge_index[(etype, src, dst)] = edge.id
        if changed:
            self.edges_merged += 1
            self._ops.append(json.dumps(
                {"edge": [etype,
                          [src_node.label, list(src_node.key)],
                          [dst_node.label, list(dst_node.key)],
                          props]}, sort_keys=True))
        return edge.id

    # -- lifecycle ----------------------------------------------------------

    def _check_open(self):
        if self._closed:
            raise RuntimeError("write batch already committed or abandoned")

    def __enter__(self) -> "WriteBatch":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self._store._commit(self)
        else:
            self._store._abandon(self)
        self._closed = True


class GraphStore:
    """In-memory property graph with optional log-backed durability."""

    def __init__(self, log_path: Optional[str | Path] = None):
        self._nodes: dict[int, Node] = {}
        self._key_index: dict[str, dict[tuple[str, ...], int]] = {
            label: {} for label in KEY_PROPS
        }
        self._edges: dict[int, Edge] = {}
        self._edge_index: dict[tuple[str, int, int], int] = {}
        self._out: dict[int, list[int]] = {}
        self._in: dict[int, list[int]] = {}
        self._edge_counts: dict[str, int] = {t: 0 for t in EDGE_SIGNATURES}
        self._next_node_id = 1
        self._next_edge_id = 1
        self._lock = threading.RLock()
        self._id_lock = threading.Lock()
        self._batch_active = threading.Lock()
        self._log_path = Path(log_path) if log_path else None
        self._log_file: Optional[io.TextIOWrapper] = None
        self._commit_seq = 0

    # -- construction -------------------------------------------------------

    @classmethod
    def open(cls, directory: str | Path) -> "GraphStore":
        """Open (or create) a durable store directory.

        Restores the latest snapshot if present, then replays the write
        log suffix; uncommitted trailing ops are discarded.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        snap = directory / SNAPSHOT_FILENAME
        log = directory / LOG_FILENAME
        offset = 0
        if snap.exists():
            store = cls.load_snapshot(snap)
            offset = store._snapshot_log_offset
            store._log_path = log
        else:
            store = cls(log_path=log)
        if log.exists():
            store._replay_log(log, offset)
        return store

    def _take_node_id(self) -> int:
        with self._id_lock:
            nid = self._next_node_id
            self._next_node_id += 1
            return nid

    def _take_edge_id(self) -> int:
        with self._id_lock:
            eid = self._next_edge_id
            self._next_edge_id += 1
            return eid

    # -- write path ----------------------------------------------------------

    def batch(self) -> WriteBatch:
        """Start an atomic write batch; use as a context manager.

        Only one batch may be active at a time (single-writer rule).
        """
        if not self._batch_active.acquire(timeout=READ_LOCK_TIMEOUT):
            raise StoreBusyError("another write batch is active")
        return WriteBatch(self)

    def merge_node(self, label: str, key, props: Optional[Mapping[str, Any]] = None) -> int:
        """Merge a single node in its own batch."""
        with self.batch() as b:
            handle = b.merge_node(label, key, props)
        return handle

    def merge_edge(self, etype: str, src: int, dst: int,
                   props: Optional[Mapping[str, Any]] = None) -> int:
        """Merge a single edge in its own batch."""
        with self.batch() as b:
            handle = b.merge_edge(etype, src, dst, props)
        return handle

    def _commit(self, batch: WriteBatch) -> None:
        try:
            if not batch._ops:
                return
            self._commit_seq += 1
            lines = batch._ops + [json.dumps({"commit": self._commit_seq})]
            self._append_log(lines)
            with self._lock:
                for nid, node in batch._nodes.items():
                    fresh = nid not in self._nodes
                    self._nodes[nid] = node
                    if fresh:
                        self._key_index[node.label][node.key] = nid
                        self._out.setdefault(nid, [])
                        self._in.setdefault(nid, [])
                for eid, edge in batch._edges.items():
                    fresh = eid not in self._edges
                    self._edges[eid] = edge
                    if fresh:
                        self._edge_index[(edge.etype, edge.src, edge.dst)] = eid
                        self._out.setdefault(edge.src, []).append(eid)
                        self._in.setdefault(edge.dst, []).append(eid)
                        self._edge_counts[edge.etype] += 1
        finally:
            self._batch_active.release()

    def _abandon(self, batch: WriteBatch) -> None:
        """Drop a failed batch's staging without applying anything."""
        self._batch_active.release()

    def _append_log(self, lines: list[str]) -> None:
        if self._log_path is None:
            return
        if self._log_file is None:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
            self._log_file = open(self._log_path, "a", encoding="utf-8")
        self._log_file.write("".join(line + "\n" for line in lines))
        self._log_file.flush()
        os.fsync(self._log_file.fileno())

    def _replay_log(self, log: Path, offset: int) -> None:
        """Apply committed op groups from the log, starting at offset."""
        with open(log, "r", encoding="utf-8") as fh:
            fh.seek(offset)
            pending: list[dict] = []
            applied = 0
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    op = json.loads(line)
                except json.JSONDecodeError:
                    logger.warning("discarding malformed log line during replay")
                    pending = []
                    continue
                if "commit" in op:
                    self._apply_replayed(pending)
                    self._commit_seq = max(self._commit_seq, int(op["commit"]))
                    applied += len(pending)
                    pending = []
                else:
                    pending.append(op)
            if pending:
                logger.warning("discarding %d uncommitted trailing ops", len(pending))
        if applied:
            logger.info("replayed %d ops from %s", applied, log)

    def _apply_replayed(self, ops: list[dict]) -> None:
        saved_log, self._log_path = self._log_path, None
        try:
            with self.batch() as b:
                for op in ops:
                    if "node" in op:
                        label, key, props = op["node"]
                        b.merge_node(label, tuple(key), props)
                    elif "edge" in op:
                        etype, (sl, sk), (dl, dk), props = op["edge"]
                        src = b.get_node(sl, tuple(sk))
                        dst = b.get_node(dl, tuple(dk))
                        if src is None or dst is None:
                            raise SnapshotFormatError("edge references unknown node", 0)
                        b.merge_edge(etype, src.id, dst.id, props)
        finally:
            self._log_path = saved_log

    # -- read path -------------------------------------------------------------

    @contextmanager
    def _read_view(self):
        if not self._lock.acquire(timeout=READ_LOCK_TIMEOUT):
            raise StoreBusyError("timed out waiting for a consistent read view")
        try:
            yield
        finally:
            self._lock.release()

    def get_node(self, label: str, key) -> Optional[Node]:
        """Return the unique node for (label, key), or None. Never creates."""
        label = check_label(label)
        key_t = normalize_key(label, key)
        with self._read_view():
            nid = self._key_index[label].get(key_t)
            return self._nodes[nid] if nid is not None else None

    def node(self, handle: int) -> Node:
        with self._read_view():
            node = self._nodes.get(handle)
        if node is None:
            raise NotFoundError(f"no node with handle {handle}")
        return node

    def count(self, name: str) -> int:
        """Exact cardinality of a node label or edge type."""
        if name in KEY_PROPS:
            with self._read_view():
                return len(self._key_index[name])
        if name in EDGE_SIGNATURES:
            with self._read_view():
                return self._edge_counts[name]
        raise SchemaError(f"unknown label or edge type: {name!r}")

    def counts(self) -> dict[str, int]:
        with self._read_view():
            out = {label: len(idx) for label, idx in self._key_index.items()}
            out.update(self._edge_counts)
            return out

    def scan(self, label: str, where: Optional[Sequence[tuple]] = None) -> Iterator[Node]:
        """Yield nodes of a label in ascending key order, filtered.

        `where` is a conjunction of (property, comparator, value) triples;
        comparators: = != < <= > >= contains.
        """
        label = check_label(label)
        with self._read_view():
            ordered = [self._nodes[nid] for _, nid in sorted(self._key_index[label].items())]
        for node in ordered:
            if where is None or all(_match(node.props, c) for c in where):
                yield node

    def nodes_by_label(self, label: str) -> list[Node]:
        return list(self.scan(label))

    def all_nodes(self) -> list[Node]:
        with self._read_view():
            return sorted(self._nodes.values(), key=lambda n: (n.label, n.key))

    def all_edges(self) -> list[Edge]:
        with self._read_view():
            return sorted(self._edges.values(), key=lambda e: (e.etype, e.src, e.dst))

    def edge(self, handle: int) -> Edge:
        with self._read_view():
            edge = self._edges.get(handle)
        if edge is None:
            raise NotFoundError(f"no edge with handle {handle}")
        return edge

    def edges_by_type(self, etype: str) -> list[Edge]:
        etype = check_edge_type(etype)
        with self._read_view():
            return sorted((e for e in self._edges.values() if e.etype == etype),
                          key=lambda e: (e.src, e.dst))

    def out_edges(self, handle: int, etype: Optional[str] = None) -> list[Edge]:
        with self._read_view():
            edges = [self._edges[eid] for eid in self._out.get(handle, ())]
        return [e for e in edges if etype is None or e.etype == etype]

    def in_edges(self, handle: int, etype: Optional[str] = None) -> list[Edge]:
        with self._read_view():
            edges = [self._edges[eid] for eid in self._in.get(handle, ())]
        return [e for e in edges if etype is None or e.etype == etype]

    # -- snapshots ----------------------------------------------------------------

    _snapshot_log_offset: int = 0

    def _log_size(self) -> int:
        if self._log_file is not None:
            self._log_file.flush()
            return self._log_file.tell()
        if self._log_path is not None and self._log_path.exists():
            return self._log_path.stat().st_size
        return 0

    def save_snapshot(self, path: str | Path) -> None:
        """Write a point-in-time snapshot (atomic via rename)."""
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with self._read_view():
            meta = {
                "next_node_id": self._next_node_id,
                "next_edge_id": self._next_edge_id,
                "commit_seq": self._commit_seq,
                "log_offset": self._log_size(),
                "indexes": {label: list(fields) for label, fields in KEY_PROPS.items()},
            }
            with open(tmp, "wb") as fh:
                fh.write(SNAPSHOT_MAGIC)
                fh.write(struct.pack("<I", SNAPSHOT_VERSION))
                buf = io.StringIO()
                buf.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
                for nid in sorted(self._nodes):
                    n = self._nodes[nid]
                    buf.write(json.dumps({"n": [n.id, n.label, n.props]}, sort_keys=True) + "\n")
                for eid in sorted(self._edges):
                    e = self._edges[eid]
                    buf.write(json.dumps(
                        {"e": [e.id, e.etype, e.src, e.dst, e.props]}, sort_keys=True) + "\n")
                fh.write(buf.getvalue().encode("utf-8"))
        os.replace(tmp, path)

    def write_snapshot(self) -> Path:
        """Snapshot a managed store into its own directory."""
        if self._log_path is None:
            raise RuntimeError("store is not directory-backed")
        target = self._log_path.parent / SNAPSHOT_FILENAME
        self.save_snapshot(target)
        return target

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "GraphStore":
        """Restore exactly the snapshotted state (no log replay)."""
        path = Path(path)
        store = cls()
        with open(path, "rb") as fh:
            head = fh.read(8)
            if len(head) < 8 or head[:4] != SNAPSHOT_MAGIC:
                raise SnapshotFormatError("not a graph snapshot (bad magic)", 0)
            version = struct.unpack("<I", head[4:8])[0]
            if version != SNAPSHOT_VERSION:
                raise SnapshotFormatError(f"unsupported snapshot version {version}", 4)
            offset = 8
            for raw in fh.read().split(b"\n"):
                if not raw.strip():
                    offset += len(raw) + 1
                    continue
                try:
                    rec = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    raise SnapshotFormatError("malformed snapshot record", offset)
                store._load_record(rec, offset)
                offset += len(raw) + 1
        return store

    def _load_record(self, rec: dict, offset: int) -> None:
        if "meta" in rec:
            meta = rec["meta"]
            self._next_node_id = meta["next_node_id"]
            self._next_edge_id = meta["next_edge_id"]
            self._commit_seq = meta.get("commit_seq", 0)
            self._snapshot_log_offset = meta.get("log_offset", 0)
        elif "n" in rec:
            nid, label, props = rec["n"]
            if label not in KEY_PROPS:
                raise SnapshotFormatError(f"unknown label {label!r}", offset)
            node = Node(nid, label, props)
            self._nodes[nid] = node
            self._key_index[label][node.key] = nid
            self._out.setdefault(nid, [])
            self._in.setdefault(nid, [])
        elif "e" in rec:
            eid, etype, src, dst, props = rec["e"]
            if etype not in EDGE_SIGNATURES:
                raise SnapshotFormatError(f"unknown edge type {etype!r}", offset)
            if src not in self._nodes or dst not in self._nodes:
                raise SnapshotFormatError("edge references missing node", offset)
            self._edges[eid] = Edge(eid, etype, src, dst, props)
            self._edge_index[(etype, src, dst)] = eid
            self._out.setdefault(src, []).append(eid)
            self._in.setdefault(dst, []).append(eid)
            self._edge_counts[etype] += 1
        else:
            raise SnapshotFormatError("unrecognized snapshot record", offset)

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None


class FilterError(ValueError):
    """Scan predicate uses an unknown comparator or mismatched types."""


_ORDER_OPS = {"<", "<=", ">", ">="}


def _match(props: Mapping[str, Any], cond: tuple) -> bool:
    prop, op, expected = cond
    if prop not in props:
        return False
    actual = props[prop]
    if op == "=":
        return actual == expected
    if op == "!=":
        return actual != expected
    if op == "contains":
        if not isinstance(actual, str) or not isinstance(expected, str):
            raise FilterError("contains requires string operands")
        return expected in actual
    if op in _ORDER_OPS:
        both_num = (isinstance(actual, (int, float)) and not isinstance(actual, bool)
                    and isinstance(expected, (int, float)) and not isinstance(expected, bool))
        both_str = isinstance(actual, str) and isinstance(expected, str)
        if not (both_num or both_str):
            raise FilterError(
                f"cannot order {type(actual).__name__} against {type(expected).__name__}")
        if op == "<":
            return actual < expected
        if op == "<=":
            return actual <= expected
        if op == ">":
            return actual > expected
        return actual >= expected
    raise FilterError(f"unknown comparator {op!r}")
