"""Content-addressed store of execution results.

Keys are sha256 digests over (code bytes || 0x00 || runtime name ||
0x00 || runtime version), so editing a snippet or updating a runtime
changes every affected key and nothing else. One JSON file per entry at
<store>/<first 2 hex>/<digest>.json, written via temp-file-then-rename:
concurrent writers are safe and readers never observe partial entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .runner import ExecutionResult

HASH_ALGORITHM = "sha256"
META_FILENAME = "cache-meta.json"


class CacheError(Exception):
    pass


class CorruptEntry(CacheError):
    """Entry file exists but does not parse. Builds treat this as a miss."""

    def __init__(self, key: "CacheKey"):
        super().__init__(f"corrupt cache entry {key.digest}")
        self.key = key


class StoreUnwritable(CacheError):
    pass


@dataclass(frozen=True)
class CacheKey:
    digest: str  # 64 lowercase hex chars


def make_key(code: bytes, runtime_name: str, runtime_version: str) -> CacheKey:
    hasher = hashlib.sha256()
    hasher.update(code)
    hasher.update(b"\x00")
    hasher.update(runtime_name.encode("utf-8"))
    hasher.update(b"\x00")
    hasher.update(runtime_version.encode("utf-8"))
    return CacheKey(hasher.hexdigest())


class ResultStore:
    """On-disk cache; concurrent readers unrestricted, writers atomic."""

    def __init__(self, root):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            meta = self.root / META_FILENAME
            if not meta.exists():
                meta.write_text(json.dumps({"hashAlgorithm": HASH_ALGORITHM,
                                            "layoutVersion": 1}) + "\n",
                                encoding="utf-8")
        except OSError as exc:
            raise StoreUnwritable(f"cannot initialize store at {root}: {exc}") from exc

    def _entry_path(self, key: CacheKey) -> Path:
        return self.root / key.digest[:2] / f"{key.digest}.json"

    def get(self, key: CacheKey) -> ExecutionResult | None:
        path = self._entry_path(key)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise CorruptEntry(key) from exc
        try:
            data = json.loads(text)
            return ExecutionResult(
                status=data["status"],
                output=data["output"],
                diagnostics=data["diagnostics"],
                elapsed_ms=data["elapsedMs"],
                runtime_name=data["runtimeName"],
                runtime_version=data["runtimeVersion"],
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptEntry(key) from exc

    def put(self, key: CacheKey, result: ExecutionResult) -> None:
        path = self._entry_path(key)
        payload = {
            "status": result.status,
            "output": result.output,
            "diagnostics": result.diagnostics,
            "elapsedMs": result.elapsed_ms,
            "runtimeName": result.runtime_name,
            "runtimeVersion": result.runtime_version,
            "createdAt": datetime.now(timezone.utc).isoformat(),
        }
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_path = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    json.dump(payload, handle)
                    handle.write("\n")
                os.replace(tmp_path, path)
            finally:
                if os.path.exists(tmp_path):
                    os.unlink(tmp_path)
        except OSError as exc:
            raise StoreUnwritable(f"cannot write entry {key.digest}: {exc}") from exc

    def clear(self) -> int:
        """Remove all entries; returns how many were removed."""
        removed = 0
        if not self.root.exists():
            return 0
        try:
            for bucket in sorted(self.root.iterdir()):
                if not bucket.is_dir():
                    continue
                for entry in sorted(bucket.glob("*.json")):
                    entry.unlink()
                    removed += 1
                if not any(bucket.iterdir()):
                    bucket.rmdir()
        except OSError as exc:
            raise StoreUnwritable(f"cannot clear store at {self.root}: {exc}") from exc
        return removed
