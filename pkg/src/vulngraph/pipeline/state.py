"""Persistent pipeline run state: watermarks, outcomes, deferred links.

The state file is small JSON written atomically (write-to-temp, rename).
Watermarks are per-source lastModified cursors and only ever move
forward on successful runs.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

OUTCOME_SUCCESS = "SUCCESS"
OUTCOME_PARTIAL = "PARTIAL"
OUTCOME_FAILED = "FAILED"


@dataclass
class SourceState:
    watermark: Optional[str] = None  # ISO-8601 UTC of the newest processed record
    last_run: Optional[str] = None
    last_outcome: Optional[str] = None


@dataclass
class PipelineState:
    sources: dict[str, SourceState] = field(default_factory=dict)
    deferred: list[dict] = field(default_factory=list)

    def source(self, source_id: str) -> SourceState:
        return self.sources.setdefault(source_id, SourceState())

    def advance_watermark(self, source_id: str, candidate: Optional[str]) -> None:
        """Move the cursor forward, never backward."""
        if candidate is None:
            return
        state = self.source(source_id)
        if state.watermark is None or candidate > state.watermark:
            state.watermark = candidate

    def record_run(self, source_id: str, outcome: str) -> None:
        state = self.source(source_id)
        state.last_run = datetime.now(timezone.utc).isoformat()
        state.last_outcome = outcome

    # -- persistence ---------------------------------------------------------

    @classmethod
    def load(cls, path: str | Path) -> "PipelineState":
        path = Path(path)
        if not path.exists():
            return cls()
        raw = json.loads(path.read_text(encoding="utf-8"))
        sources = {
            name: SourceState(**entry) for name, entry in raw.get("sources", {}).items()
        }
        return cls(sources=sources, deferred=list(raw.get("deferred", [])))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "sources": {
                name: {
                    "watermark": s.watermark,
                    "last_run": s.last_run,
                    "last_outcome": s.last_outcome,
                }
                for name, s in self.sources.items()
            },
            "deferred": self.deferred,
        }
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)
