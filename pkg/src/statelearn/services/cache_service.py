import hashlib
import json
import logging
from typing import Any, Dict, Optional

import diskcache

from ..config import section
from ..models.partition import StatePartition
from ..models.reports import ValidityReport

logger = logging.getLogger(__name__)


class CacheService:
    """diskcache-backed store of evaluated candidates.

    Entries are keyed by the data digest, the partition and every setting
    that changes an evaluation, so a cached report is only reused for an
    identical evaluation.
    """

    def __init__(self, cache_dir: Optional[str] = None, default_ttl: Optional[int] = None):
        """
        Initialize cache service

        Args:
            cache_dir: Directory for cache storage (default: ``cache.dir``)
            default_ttl: Default TTL in seconds (default: ``cache.ttl``)
        """
        cache_cfg = section("cache")
        self.cache_dir = cache_dir or cache_cfg.get("dir", ".cache/evaluations")
        self.default_ttl = int(cache_cfg.get("ttl", 86400)) if default_ttl is None else default_ttl
        self.cache = diskcache.Cache(self.cache_dir)
        logger.info("Cache service initialized cache_dir=%s default_ttl=%ss", self.cache_dir, self.default_ttl)

    def __getstate__(self) -> Dict[str, Any]:
        return {"cache_dir": self.cache_dir, "default_ttl": self.default_ttl}

    def __setstate__(self, state: Dict[str, Any]) -> None:
        self.cache_dir = state["cache_dir"]
        self.default_ttl = state["default_ttl"]
        self.cache = diskcache.Cache(self.cache_dir)

    @staticmethod
    def evaluation_key(data_digest: str, part: StatePartition, settings: Dict[str, Any]) -> str:
        """
        Generate cache key for one candidate evaluation

        Args:
            data_digest: SHA-256 of the observed frame
            part: Candidate partition (block order matters for stored matrices)
            settings: Strategy, alpha and tolerances used

        Returns:
            Cache key string
        """
        key_data = {"data": data_digest, "partition": part.encode(), "settings": settings}
        key_string = json.dumps(key_data, sort_keys=True)
        return "eval:" + hashlib.sha256(key_string.encode()).hexdigest()

    def get_report(self, key: str) -> Optional[ValidityReport]:
        raw = self.cache.get(key)
        if raw is None:
            logger.debug("Cache miss for key: %s", key)
            return None
        logger.debug("Cache hit for key: %s", key)
        return ValidityReport.model_validate_json(raw)

    def set_report(self, key: str, report: ValidityReport, ttl: Optional[int] = None) -> bool:
        ttl = ttl if ttl is not None else self.default_ttl
        return bool(self.cache.set(key, report.model_dump_json(), expire=ttl))

    def delete(self, key: str) -> bool:
        result = bool(self.cache.delete(key))
        logger.info("Deleted cache entry for key: %s", key)
        return result

    def clear(self) -> int:
        """
        Clear all cache entries

        Returns:
            Number of entries cleared
        """
        count = len(self.cache)
        self.cache.clear()
        logger.info("Cleared %d cache entries", count)
        return count

    def close(self) -> None:
        self.cache.close()
