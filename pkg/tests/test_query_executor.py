from __future__ import annotations

import random

import pytest

from conftest import FIXTURES
from oracles import brute_force_execute, canonical_rows
from vulngraph.graph import GraphStore
from vulngraph.query import QueryExecutionError, execute, parse_query

CASE_STUDY_QUERY = (FIXTURES / "subgraph_query.cypher").read_text()


def random_graph(seed: int) -> GraphStore:
    """A small random store honoring all edge signatures."""
    rng = random.Random(seed)
    s = GraphStore()
    severities = ["LOW", "MEDIUM", "HIGH"]
    words = ["overflow", "smb", "xss", "kernel", "auth", "bypass", "heap"]

    vulns, weaknesses, products, vendors, exploits, authors, domains = [], [], [], [], [], [], []
    for i in range(rng.randint(4, 9)):
        props = {"description": " ".join(rng.sample(words, 3)),
                 "v3exploitabilityScore": round(rng.uniform(0, 10), 1)}
        if rng.random() < 0.7:
            props["v2severity"] = rng.choice(severities)
        vulns.append(s.merge_node("Vulnerability", f"CVE-201{rng.randint(5, 9)}-{1000 + i}", props))
    for i in range(rng.randint(2, 5)):
        weaknesses.append(s.merge_node("Weakness", f"CWE-{i + 1}", {"name": f"weakness {i}"}))
    for i in range(rng.randint(2, 5)):
        vendors.append((f"vendor_{i}", s.merge_node("Vendor", f"vendor_{i}")))
    for i in range(rng.randint(2, 6)):
        vendor_name, vendor = rng.choice(vendors)
        p = s.merge_node("Product", {"name": f"product_{i}", "vendorName": vendor_name})
        s.merge_edge("BELONGS_TO", p, vendor)
        products.append(p)
    for i in range(rng.randint(2, 6)):
        e = s.merge_node("Exploit", f"{40000 + i}",
                         {"exploitType": rng.choice(["Remote", "DoS", "Local"])})
        exploits.append(e)
    for i in range(rng.randint(2, 4)):
        authors.append(s.merge_node("Author", f"author_{i}"))
    for i in range(rng.randint(1, 4)):
        domains.append(s.merge_node("Domain", f"host{i}.example.org"))

    for v in vulns:
        for w in rng.sample(weaknesses, k=min(len(weaknesses), rng.randint(0, 2))):
            s.merge_edge("EXAMPLE_OF", v, w)
        for p in rng.sample(products, k=min(len(products), rng.randint(0, 3))):
            s.merge_edge("AFFECTS", v, p)
        for d in rng.sample(domains, k=min(len(domains), rng.randint(0, 2))):
            s.merge_edge("REFERS_TO", v, d)
    for e in exploits:
        author = rng.choice(authors)
        s.merge_edge("WRITES", author, e)
        for v in rng.sample(vulns, k=min(len(vulns), rng.randint(0, 2))):
            s.merge_edge("EXPLOITS", e, v)
            s.merge_edge("WRITES", author, v)
    return s


# Spans every grammar construct: labels, anonymous and prop-constrained
# nodes, typed/untyped edges in both directions, multi-clause joins,
# every WHERE comparator, RETURN of nodes and properties, LIMIT.
ORACLE_QUERY_CORPUS = [
    "MATCH (v:Vulnerability) RETURN v",
    "MATCH (v:Vulnerability) RETURN v.cveID",
    "MATCH (v:Vulnerability {cveID: 'CVE-2015-1003'}) RETURN v",
    "MATCH (e:Exploit)-[:EXPLOITS]->(v:Vulnerability) RETURN e.exploitID, v.cveID",
    "MATCH (v)-[:AFFECTS]->(p:Product)-[:BELONGS_TO]->(d:Vendor) RETURN v, p, d",
    "MATCH (v:Vulnerability)-[:EXAMPLE_OF]->(w:Weakness) "
    "MATCH (e:Exploit)-[:EXPLOITS]->(v) RETURN w.cweID, e.exploitID",
    "MATCH (a:Author)-[:WRITES]->(x:Exploit) RETURN a.name, x",
    "MATCH (x)-[]->(y:Domain) RETURN x, y",
    "MATCH (w:Weakness)<-[:EXAMPLE_OF]-(v:Vulnerability) RETURN w, v.cveID",
    "MATCH (v:Vulnerability) WHERE v.v3exploitabilityScore >= 5.0 RETURN v.cveID",
    "MATCH (v:Vulnerability) WHERE v.v3exploitabilityScore < 5.0 "
    "AND v.cveID CONTAINS '201' RETURN v",
    "MATCH (v:Vulnerability) WHERE v.v2severity = 'HIGH' RETURN v.cveID",
    "MATCH (v:Vulnerability) WHERE v.v2severity <> 'HIGH' RETURN v.cveID",
    "MATCH (p:Product)<-[:AFFECTS]-(v)-[:EXAMPLE_OF]->(w) RETURN p, w",
    "MATCH (a:Author)-[:WRITES]->(e:Exploit)-[:EXPLOITS]->(v:Vulnerability) "
    "RETURN a.name, v.cveID",
    "MATCH (v:Vulnerability) WHERE v.v3exploitabilityScore <= 9.9 "
    "AND v.v3exploitabilityScore > 0.1 RETURN v",
    "MATCH (v:Vulnerability), (w:Weakness) RETURN v.cveID, w.cweID LIMIT 4",
    "MATCH (v:Vulnerability) RETURN v.cveID LIMIT 2",
]


def check_against_oracle(store: GraphStore, query_text: str) -> None:
    ast = parse_query(query_text)
    table = execute(ast, store)
    got = canonical_rows(table)
    expected = brute_force_execute(ast, store)
    assert len(table.rows) == len(got), "executor returned duplicate rows"
    if ast.limit is None:
        assert got == expected, query_text
    else:
        assert len(table.rows) == min(ast.limit, len(expected)), query_text
        assert got <= expected, query_text


def test_oracle_equivalence_on_random_graphs():
    for seed in range(12):
        store = random_graph(seed)
        for query_text in ORACLE_QUERY_CORPUS:
            check_against_oracle(store, query_text)


def test_simple_property_projection(eternalblue_store):
    table = execute(parse_query(
        'MATCH (v:Vulnerability {cveID:"CVE-2017-0144"}) RETURN v.cveID'), eternalblue_store)
    assert table.rows == [("CVE-2017-0144",)]


def test_case_study_query_on_fixture(eternalblue_store):
    table = execute(parse_query(CASE_STUDY_QUERY), eternalblue_store)
    assert table.columns == ["v", "p", "d", "dom", "w", "ex", "a"]
    exploits = {cell.key[0] for cell in table.column("ex")}
    authors = {cell.key[0] for cell in table.column("a")}
    assert exploits == {"41891", "41987", "42030", "42031"}
    assert {"sleepya", "JuanSacco"} <= authors


def test_determinism(eternalblue_store):
    ast = parse_query(CASE_STUDY_QUERY)
    first = execute(ast, eternalblue_store)
    second = execute(ast, eternalblue_store)
    assert first.columns == second.columns
    assert first.rows == second.rows


def test_limit_bounds(eternalblue_store):
    total = len(execute(parse_query("MATCH (e:Exploit) RETURN e"), eternalblue_store).rows)
    assert total == 4
    for k in (1, 3, 4, 9):
        table = execute(parse_query(f"MATCH (e:Exploit) RETURN e LIMIT {k}"), eternalblue_store)
        assert len(table.rows) == min(k, total)


def test_unknown_label_is_an_error():
    with pytest.raises(QueryExecutionError, match="Bogus"):
        execute(parse_query("MATCH (n:Bogus) RETURN n"), GraphStore())


def test_signature_impossible_pattern_yields_empty(eternalblue_store):
    table = execute(parse_query(
        "MATCH (a:Author)-[:AFFECTS]->(p:Product) RETURN a"), eternalblue_store)
    assert table.rows == []


def test_cross_clause_join_vs_oracle(eternalblue_store):
    check_against_oracle(
        eternalblue_store,
        "MATCH (v:Vulnerability)-[:AFFECTS]->(p:Product) "
        "MATCH (e:Exploit)-[:EXPLOITS]->(v) RETURN p.name, e.exploitID")
