"""JSON file cache for expensive artefacts (character tables, witnesses, growth tables).

One file per key under ``CACHE_DIR``. Corrupted files count as misses; write
failures are logged and swallowed.
"""
from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional

from src import config
from src.errors import CacheError
from src.metrics import CACHE_LOOKUPS_TOTAL

logger = logging.getLogger(__name__)


def cache_key(kind: str, p: int, **params: Any) -> str:
    """sha256 of the canonical JSON dump of (kind, p, sorted params)."""
    blob = json.dumps([kind, int(p), sorted(params.items())], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class JsonCache:
    def __init__(self, directory: Optional[str | Path] = None, enabled: Optional[bool] = None):
        self.directory = Path(directory if directory is not None else config.CACHE_DIR)
        self.enabled = config.CACHE_ENABLED if enabled is None else enabled

    def _path(self, kind: str, p: int, params: dict) -> Path:
        return self.directory / f"{kind}-p{int(p)}-{cache_key(kind, p, **params)[:16]}.json"

    def get(self, kind: str, p: int, **params: Any) -> Optional[Any]:
        if not self.enabled:
            return None
        path = self._path(kind, p, params)
        if not path.exists():
            CACHE_LOOKUPS_TOTAL.labels(result="miss").inc()
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                payload = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            logger.warning(f"Повреждённый файл кэша {path.name}: {e}")
            CACHE_LOOKUPS_TOTAL.labels(result="corrupt").inc()
            return None
        CACHE_LOOKUPS_TOTAL.labels(result="hit").inc()
        logger.debug("cache hit: %s", path.name)
        return payload

    def put(self, kind: str, p: int, payload: Any, **params: Any) -> Optional[Path]:
        if not self.enabled:
            return None
        path = self._path(kind, p, params)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".json.tmp")
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(payload, f, indent=2)
            tmp.replace(path)
        except (OSError, TypeError) as e:
            logger.error(f"Не удалось сохранить кэш {path.name}: {e}")
            return None
        logger.info("cache write: %s", path.name)
        return path

    def clear(self) -> int:
        """Remove every cached file; returns the number removed."""
        if not self.directory.exists():
            return 0
        removed = 0
        try:
            for path in self.directory.glob("*.json"):
                path.unlink()
                removed += 1
        except OSError as e:
            raise CacheError(f"cannot clear {self.directory}: {e}")
        return removed
