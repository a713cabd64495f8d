"""Vulnerability graph platform.

An embedded property graph over CVE/CWE/exploit intelligence, fed by an
incremental multi-source pipeline, queried through a read-only
Cypher-compatible subset, and enriched with tiered, adaptively served
text embeddings.
"""

__version__ = "0.1.0"
