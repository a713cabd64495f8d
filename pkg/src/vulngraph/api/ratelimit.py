"""Per-client token-bucket rate limiting for the API.

Each client key (API key header when present, else client address) gets
a bucket of `per_minute` tokens refilled continuously. An exhausted
bucket answers 429 with a Retry-After hint. The clock is injectable so
tests can simulate elapsed time.
"""
from __future__ import annotations

import threading
import time
from typing import Callable

API_KEY_HEADER = "x-api-key"


class RateLimiter:
    def __init__(self, per_minute: int, clock: Callable[[], float] = time.monotonic):
        if per_minute < 1:
            raise ValueError("rate limit must be >= 1 per minute")
        self.capacity = float(per_minute)
        self.rate = per_minute / 60.0  # tokens per second
        self.clock = clock
        self._buckets: dict[str, tuple[float, float]] = {}  # key -> (tokens, stamp)
        self._lock = threading.Lock()

    def check(self, key: str) -> tuple[bool, float]:
        """Consume one token; returns (allowed, retry_after_seconds)."""
        now = self.clock()
        with self._lock:
            tokens, stamp = self._buckets.get(key, (self.capacity, now))
            tokens = min(self.capacity, tokens + (now - stamp) * self.rate)
            if tokens >= 1.0:
                self._buckets[key] = (tokens - 1.0, now)
                return True, 0.0
            self._buckets[key] = (tokens, now)
            return False, (1.0 - tokens) / self.rate


def client_key(scope_headers, client_host: str) -> str:
    for name, value in scope_headers:
        if name.decode("latin-1").lower() == API_KEY_HEADER:
            return f"key:{value.decode('latin-1')}"
    return f"ip:{client_host}"
