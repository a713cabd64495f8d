"""Fixed-interval pipeline scheduler with overlap suppression.

One runner invocation per tick; if a tick fires while the previous run
is still active the tick is skipped and counted. Failures are logged and
retried on the next tick, never fatal to the loop.
"""
from __future__ import annotations

import logging
import threading
import time
from typing import Callable, Optional

logger = logging.getLogger(__name__)

MIN_INTERVAL_S = 60


class PipelineScheduler:
    def __init__(self, runner: Callable[[], object], interval_s: int,
                 clock: Callable[[], float] = time.monotonic):
        if interval_s < MIN_INTERVAL_S:
            raise ValueError(f"interval must be at least {MIN_INTERVAL_S}s")
        self.runner = runner
        self.interval_s = interval_s
        self.clock = clock
        self.runs = 0
        self.failures = 0
        self.skipped_ticks = 0
        self._active = threading.Lock()

    def tick(self) -> bool:
        """Run once now unless a run is already active; True if it ran."""
        if not self._active.acquire(blocking=False):
            self.skipped_ticks += 1
            logger.info("tick skipped: previous run still active")
            return False
        try:
            self.runner()
            self.runs += 1
            return True
        except Exception:
            self.failures += 1
            logger.exception("pipeline run failed; will retry next tick")
            return True
        finally:
            self._active.release()

    def run_forever(self, stop: Optional[threading.Event] = None) -> None:
        stop = stop or threading.Event()
        while not stop.is_set():
            deadline = self.clock() + self.interval_s
            self.tick()
            remaining = deadline - self.clock()
            if remaining > 0 and stop.wait(remaining):
                break
