from __future__ import annotations

import json
import random

import pytest

from conftest import store_fingerprint
from vulngraph.graph import (
    EDGE_SIGNATURES,
    GraphStore,
    NotFoundError,
    SchemaError,
    SnapshotFormatError,
)
from vulngraph.graph.store import FilterError


def seeded_store() -> GraphStore:
    s = GraphStore()
    v = s.merge_node("Vulnerability", {"cveID": "CVE-2017-0144"},
                     {"description": "SMBv1 remote code execution",
                      "v3exploitabilityScore": 2.2})
    w = s.merge_node("Weakness", {"cweID": "CWE-20"},
                     {"name": "Improper Input Validation"})
    ex = s.merge_node("Exploit", {"exploitID": "41891"}, {"exploitType": "DoS"})
    s.merge_edge("EXAMPLE_OF", v, w)
    s.merge_edge("EXPLOITS", ex, v)
    return s


class TestMergeNode:
    def test_merge_twice_is_idempotent(self):
        s = GraphStore()
        s.merge_node("Vulnerability", {"cveID": "CVE-2017-0144"},
                     {"description": "SMBv1 ..."})
        s.merge_node("Vulnerability", {"cveID": "CVE-2017-0144"},
                     {"description": "SMBv1 ..."})
        assert s.count("Vulnerability") == 1

    def test_merge_updates_props_last_writer_wins(self):
        s = GraphStore()
        h1 = s.merge_node("Weakness", {"cweID": "CWE-20"}, {"name": "draft"})
        h2 = s.merge_node("Weakness", {"cweID": "CWE-20"},
                          {"name": "Improper Input Validation"})
        assert h1 == h2
        assert s.get_node("Weakness", "CWE-20").props["name"] == "Improper Input Validation"

    def test_empty_key_rejected(self):
        s = GraphStore()
        with pytest.raises(SchemaError):
            s.merge_node("Vulnerability", {"cveID": ""}, {})

    def test_unknown_label_rejected(self):
        s = GraphStore()
        with pytest.raises(SchemaError):
            s.merge_node("Malware", {"name": "x"}, {})

    def test_type_conflicting_overwrite_rejected(self):
        s = GraphStore()
        s.merge_node("Vulnerability", "CVE-2020-0001", {"severity": "HIGH"})
        with pytest.raises(SchemaError, match="type-conflicting"):
            s.merge_node("Vulnerability", "CVE-2020-0001", {"severity": 7.5})

    def test_nested_values_rejected(self):
        s = GraphStore()
        with pytest.raises(SchemaError):
            s.merge_node("Vulnerability", "CVE-2020-0001", {"meta": {"a": 1}})

    def test_product_composite_key(self):
        s = GraphStore()
        s.merge_node("Product", {"name": "windows_7", "vendorName": "microsoft"})
        s.merge_node("Product", {"name": "windows_7", "vendorName": "kolibri"})
        assert s.count("Product") == 2
        node = s.get_node("Product", {"name": "windows_7", "vendorName": "microsoft"})
        assert node is not None and node.props["vendorName"] == "microsoft"


class TestMergeEdge:
    def test_edge_idempotent(self):
        s = seeded_store()
        ex = s.get_node("Exploit", "41891")
        v = s.get_node("Vulnerability", "CVE-2017-0144")
        s.merge_edge("EXPLOITS", ex.id, v.id)
        s.merge_edge("EXPLOITS", ex.id, v.id)
        assert s.count("EXPLOITS") == 1

    def test_signature_violation(self):
        s = GraphStore()
        author = s.merge_node("Author", {"name": "sleepya"})
        product = s.merge_node("Product", {"name": "windows_7", "vendorName": "microsoft"})
        with pytest.raises(SchemaError, match="signature"):
            s.merge_edge("AFFECTS", author, product)

    def test_dangling_handle(self):
        s = GraphStore()
        v = s.merge_node("Vulnerability", "CVE-2020-0001", {})
        with pytest.raises(NotFoundError):
            s.merge_edge("EXPLOITS", 9999, v)

    def test_writes_allows_exploit_and_vulnerability_targets(self):
        s = seeded_store()
        a = s.merge_node("Author", {"name": "sleepya"})
        ex = s.get_node("Exploit", "41891")
        v = s.get_node("Vulnerability", "CVE-2017-0144")
        s.merge_edge("WRITES", a, ex.id)
        s.merge_edge("WRITES", a, v.id)
        assert s.count("WRITES") == 2
        w = s.get_node("Weakness", "CWE-20")
        with pytest.raises(SchemaError):
            s.merge_edge("WRITES", a, w.id)


class TestReads:
    def test_get_node_read_your_write(self):
        s = seeded_store()
        assert s.get_node("Vulnerability", "CVE-2017-0144").props["cveID"] == "CVE-2017-0144"

    def test_get_node_absent(self):
        assert GraphStore().get_node("Vulnerability", "CVE-9999-0000") is None

    def test_count_empty(self):
        assert GraphStore().count("Vulnerability") == 0

    def test_count_unknown_name(self):
        with pytest.raises(SchemaError):
            GraphStore().count("Bogus")

    def test_scan_score_filter(self):
        s = seeded_store()
        rows = list(s.scan("Vulnerability", [("v3exploitabilityScore", ">=", 0)]))
        assert len(rows) == 1

    def test_scan_contains(self):
        s = seeded_store()
        assert len(list(s.scan("Vulnerability", [("cveID", "contains", "2017")]))) == 1
        assert len(list(s.scan("Vulnerability", [("cveID", "contains", "2020")]))) == 0

    def test_scan_missing_property_never_matches(self):
        s = seeded_store()
        assert list(s.scan("Vulnerability", [("nonexistent", "=", 1)])) == []

    def test_scan_type_mismatch_raises(self):
        s = seeded_store()
        with pytest.raises(FilterError):
            list(s.scan("Vulnerability", [("cveID", "<", 42)]))

    def test_scan_order_is_ascending_key(self):
        s = GraphStore()
        for cve in ["CVE-2020-0003", "CVE-2019-0002", "CVE-2021-0001"]:
            s.merge_node("Vulnerability", cve, {})
        keys = [n.props["cveID"] for n in s.scan("Vulnerability")]
        assert keys == sorted(keys)


class TestIdempotenceProperty:
    def test_random_merge_sequences(self):
        rng = random.Random(7)
        ops = []
        for _ in range(120):
            cve = f"CVE-2020-{rng.randint(1000, 1009)}"
            cwe = f"CWE-{rng.randint(1, 4)}"
            ops.append(("v", cve, {"description": f"d{rng.randint(0, 3)}"}))
            ops.append(("w", cwe, {}))
            ops.append(("e", cve, cwe))

        def apply(store, times):
            for _ in range(times):
                for op in ops:
                    if op[0] == "v":
                        store.merge_node("Vulnerability", op[1], op[2])
                    elif op[0] == "w":
                        store.merge_node("Weakness", op[1], op[2])
                    else:
                        v = store.get_node("Vulnerability", op[1])
                        w = store.get_node("Weakness", op[2])
                        store.merge_edge("EXAMPLE_OF", v.id, w.id)
            return store

        once = apply(GraphStore(), 1)
        twice = apply(GraphStore(), 2)
        assert store_fingerprint(once) == store_fingerprint(twice)

    def test_key_uniqueness_invariant(self):
        s = seeded_store()
        for label in ("Vulnerability", "Weakness", "Exploit"):
            keys = [n.key for n in s.scan(label)]
            assert len(keys) == len(set(keys))

    def test_edge_signature_closure(self):
        s = seeded_store()
        for edge in s.all_edges():
            src = s.node(edge.src)
            dst = s.node(edge.dst)
            assert (src.label, dst.label) in EDGE_SIGNATURES[edge.etype]


class TestBatchLifecycle:
    def test_failed_batch_applies_nothing_and_releases_writer(self):
        s = seeded_store()
        before = store_fingerprint(s)
        with pytest.raises(SchemaError):
            with s.batch() as b:
                b.merge_node("Vulnerability", "CVE-2020-0001", {})
                b.merge_node("Nope", "x", {})
        assert store_fingerprint(s) == before
        s.merge_node("Vulnerability", "CVE-2020-0002", {})  # writer lock is free
        assert s.get_node("Vulnerability", "CVE-2020-0002") is not None

    def test_reads_from_other_threads_during_batch(self):
        import threading

        s = seeded_store()
        results = []
        with s.batch() as b:
            b.merge_node("Vulnerability", "CVE-2020-0003", {})
            t = threading.Thread(
                target=lambda: results.append(s.count("Vulnerability")))
            t.start()
            t.join(5)
        # the reader ran mid-batch and saw only the committed view
        assert results == [1]
        assert s.count("Vulnerability") == 2


class TestSnapshot:
    def test_round_trip(self, tmp_path):
        s = seeded_store()
        path = tmp_path / "snap.bin"
        s.save_snapshot(path)
        restored = GraphStore.load_snapshot(path)
        assert store_fingerprint(restored) == store_fingerprint(s)

    def test_restore_empty_file_fails(self, tmp_path):
        path = tmp_path / "empty.bin"
        path.write_bytes(b"")
        with pytest.raises(SnapshotFormatError):
            GraphStore.load_snapshot(path)

    def test_restore_foreign_file_fails_with_offset(self, tmp_path):
        path = tmp_path / "foreign.bin"
        path.write_bytes(b"not a snapshot at all")
        with pytest.raises(SnapshotFormatError) as err:
            GraphStore.load_snapshot(path)
        assert err.value.offset == 0

    def test_snapshot_isolation(self, tmp_path):
        s = seeded_store()
        path = tmp_path / "snap.bin"
        s.save_snapshot(path)
        s.merge_node("Vulnerability", "CVE-2021-9999", {})
        restored = GraphStore.load_snapshot(path)
        assert restored.get_node("Vulnerability", "CVE-2021-9999") is None
        assert restored.count("Vulnerability") == s.count("Vulnerability") - 1


class TestDurability:
    def test_log_replay_restores_state(self, tmp_path):
        store = GraphStore.open(tmp_path / "db")
        with store.batch() as b:
            v = b.merge_node("Vulnerability", "CVE-2017-0144", {"description": "x"})
            w = b.merge_node("Weakness", "CWE-20", {})
            b.merge_edge("EXAMPLE_OF", v, w)
        store.close()
        reopened = GraphStore.open(tmp_path / "db")
        assert reopened.count("Vulnerability") == 1
        assert reopened.count("EXAMPLE_OF") == 1

    def test_uncommitted_tail_is_discarded(self, tmp_path):
        store = GraphStore.open(tmp_path / "db")
        store.merge_node("Vulnerability", "CVE-2017-0144", {})
        store.close()
        log = tmp_path / "db" / "write.log"
        with open(log, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"node": ["Vulnerability", ["CVE-2020-1111"], {}]}) + "\n")
        reopened = GraphStore.open(tmp_path / "db")
        assert reopened.count("Vulnerability") == 1
        assert reopened.get_node("Vulnerability", "CVE-2020-1111") is None

    def test_snapshot_plus_log_suffix(self, tmp_path):
        store = GraphStore.open(tmp_path / "db")
        store.merge_node("Vulnerability", "CVE-2017-0144", {})
        store.write_snapshot()
        store.merge_node("Vulnerability", "CVE-2018-0001", {})
        store.close()
        reopened = GraphStore.open(tmp_path / "db")
        assert reopened.count("Vulnerability") == 2
        assert store_fingerprint(reopened) == store_fingerprint(store)

    def test_no_op_rerun_leaves_log_identical(self, tmp_path):
        store = GraphStore.open(tmp_path / "db")
        store.merge_node("Vulnerability", "CVE-2017-0144", {"description": "x"})
        store.close()
        log = tmp_path / "db" / "write.log"
        before = log.read_bytes()
        again = GraphStore.open(tmp_path / "db")
        again.merge_node("Vulnerability", "CVE-2017-0144", {"description": "x"})
        again.close()
        assert log.read_bytes() == before
