"""Persistent store for expensive exact counts.

One JSON file maps request keys to entries ``{"value", "nodes", "millis",
"timestamp", "version"}``; integer values are decimal strings.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .field import field_for_order

ENV_VAR = "CAPCOUNT_CACHE"
FILENAME = "capcount-cache.json"


def geometry_hash(q: int) -> str:
    f = field_for_order(q)
    doc = {"q": q, "p": f.p, "d": f.d, "modulus": list(f.modulus), "points": q**3 + q**2 + q + 1}
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def request_key(kind: str, q: int | None = None, **params) -> str:
    parts = [kind]
    if q is not None:
        parts.append(f"q={q}")
        parts.append(f"geom={geometry_hash(q)}")
    parts.extend(f"{k}={params[k]}" for k in sorted(params))
    return "|".join(parts)


class CountCache:
    """Read-through cache; ``directory=None`` keeps entries in memory only."""

    def __init__(self, directory: str | Path | None = None):
        if directory is None and os.environ.get(ENV_VAR):
            directory = os.environ[ENV_VAR]
        self.path = Path(directory) / FILENAME if directory is not None else None
        self.entries: dict[str, dict] = {}
        self.computed = 0
        if self.path is not None and self.path.exists():
            self.entries = json.loads(self.path.read_text())

    def get(self, key: str) -> dict | None:
        return self.entries.get(key)

    def put(self, key: str, value: Any, nodes: int = 0, millis: int = 0) -> dict:
        entry = {
            "value": str(value) if isinstance(value, int) else value,
            "nodes": int(nodes),
            "millis": int(millis),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "version": __version__,
        }
        self.entries[key] = entry
        self._flush()
        return entry

    def fetch(self, key: str, compute: Callable[[], tuple[Any, int]]) -> dict:
        """Return the entry for ``key``, running ``compute() -> (value, nodes)`` on a miss."""
        hit = self.get(key)
        if hit is not None:
            return hit
        t0 = time.perf_counter()
        value, nodes = compute()
        self.computed += 1
        return self.put(key, value, nodes, round((time.perf_counter() - t0) * 1000))

    def _flush(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self.entries, indent=1, sort_keys=True))
        tmp.replace(self.path)
