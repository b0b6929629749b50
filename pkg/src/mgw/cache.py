"""Content-addressed on-disk cache for computed tables.

Entries are JSON files named by the sha256 of their key.  Each file stores
the key, the payload and a checksum of the payload; a checksum or version
mismatch is treated as a miss so the caller recomputes.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

log = logging.getLogger(__name__)

# bump whenever a stored table's meaning changes
NORMALIZATION_VERSION = 1
DEFAULT_DIR = ".mgw-cache"


def default_cache_dir() -> Path:
    return Path(os.environ.get("MGW_CACHE") or DEFAULT_DIR)


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def checksum(payload) -> str:
    return hashlib.sha256(_canonical(payload).encode()).hexdigest()


class Cache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def key(self, module: str, type_label: str, params: dict | None = None) -> dict:
        return {
            "module": module,
            "type": type_label,
            "params": params or {},
            "version": NORMALIZATION_VERSION,
        }

    def path_for(self, key: dict) -> Path:
        digest = hashlib.sha256(_canonical(key).encode()).hexdigest()
        return self.root / f"{key['module']}-{key['type']}-{digest[:24]}.json"

    def write(self, key: dict, payload) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.path_for(key)
        entry = {"key": key, "payload": payload, "checksum": checksum(payload)}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(_canonical(entry))
        os.replace(tmp, path)
        return path

    def read(self, key: dict):
        """Return the stored payload, or ``None`` on a miss of any kind."""
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            log.warning("unreadable cache entry %s: %s", path, exc)
            return None
        if entry.get("key") != key:
            log.warning("cache key mismatch in %s, recomputing", path)
            return None
        if entry.get("checksum") != checksum(entry.get("payload")):
            log.warning("cache checksum mismatch in %s, recomputing", path)
            return None
        return entry["payload"]

    def entries(self) -> list[Path]:
        if not self.root.exists():
            return []
        return sorted(self.root.glob("*.json"))

    def clear(self) -> int:
        n = 0
        for p in self.entries():
            p.unlink()
            n += 1
        return n
