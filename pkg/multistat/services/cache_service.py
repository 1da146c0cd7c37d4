"""
Result cache for expensive exact computations (reduced systems, projections).
"""
import asyncio
import hashlib
import json
import logging
import pickle
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, Optional

from ..utils.config import CacheConfig

logger = logging.getLogger(__name__)


@dataclass
class CacheEntry:
    """A cached value with metadata."""
    key: str
    value: Any
    expires_at: datetime
    domain: str
    access_count: int
    created_at: datetime
    last_accessed: datetime


class ResultCache:
    """In-memory cache with an optional pickle directory behind it."""

    def __init__(self, config: Optional[CacheConfig] = None):
        self.config = config or CacheConfig()
        self.default_ttl = self.config.default_ttl
        self.directory = Path(self.config.directory) if self.config.directory else None
        self.local_cache: Dict[str, CacheEntry] = {}
        self.cache_stats = {
            'hits': 0,
            'misses': 0,
            'sets': 0,
            'deletes': 0,
            'errors': 0
        }

    def _generate_cache_key(self, domain: str, key: str) -> str:
        """Generate a namespaced cache key."""
        return f"multistat:{domain}:{key}"

    def hash_key(self, data: Any) -> str:
        """Stable hash for structured request data."""
        if isinstance(data, (dict, list)):
            data_str = json.dumps(data, sort_keys=True, default=str)
        else:
            data_str = str(data)
        return hashlib.md5(data_str.encode()).hexdigest()

    def _path_for(self, cache_key: str) -> Optional[Path]:
        if self.directory is None:
            return None
        digest = hashlib.md5(cache_key.encode()).hexdigest()
        return self.directory / f"{digest}.pkl"

    async def get(self, key: str, domain: str = "default") -> Optional[Any]:
        """Get value from cache."""
        if not self.config.enabled:
            return None
        cache_key = self._generate_cache_key(domain, key)

        try:
            entry = self.local_cache.get(cache_key)
            if entry is None:
                entry = await asyncio.to_thread(self._read_entry, cache_key)
                if entry is not None:
                    self.local_cache[cache_key] = entry

            if entry is not None:
                if entry.expires_at > datetime.utcnow():
                    self.cache_stats['hits'] += 1
                    entry.access_count += 1
                    entry.last_accessed = datetime.utcnow()
                    return entry.value
                # Expired entry
                await self.delete(key, domain)

            self.cache_stats['misses'] += 1
            return None

        except Exception as e:
            logger.error(f"Cache get error for {cache_key}: {e}")
            self.cache_stats['errors'] += 1
            return None

    async def set(self, key: str, value: Any, domain: str = "default",
                  ttl: Optional[int] = None) -> bool:
        """Set value in cache with optional TTL."""
        if not self.config.enabled:
            return False
        cache_key = self._generate_cache_key(domain, key)
        ttl = ttl or self.default_ttl
        now = datetime.utcnow()

        try:
            entry = CacheEntry(
                key=cache_key,
                value=value,
                expires_at=now + timedelta(seconds=ttl),
                domain=domain,
                access_count=0,
                created_at=now,
                last_accessed=now
            )
            self.local_cache[cache_key] = entry
            await asyncio.to_thread(self._write_entry, entry)

            self.cache_stats['sets'] += 1
            return True

        except Exception as e:
            logger.error(f"Cache set error for {cache_key}: {e}")
            self.cache_stats['errors'] += 1
            return False

    async def delete(self, key: str, domain: str = "default") -> bool:
        """Delete value from cache."""
        cache_key = self._generate_cache_key(domain, key)

        try:
            self.local_cache.pop(cache_key, None)
            path = self._path_for(cache_key)
            if path is not None and path.exists():
                path.unlink()

            self.cache_stats['deletes'] += 1
            return True

        except Exception as e:
            logger.error(f"Cache delete error for {cache_key}: {e}")
            self.cache_stats['errors'] += 1
            return False

    async def get_or_set(self, key: str, value_func, domain: str = "default",
                         ttl: Optional[int] = None) -> Any:
        """Get value from cache or compute and store it."""
        cached_value = await self.get(key, domain)

        if cached_value is not None:
            return cached_value

        try:
            if asyncio.iscoroutinefunction(value_func):
                new_value = await value_func()
            else:
                new_value = value_func()

            await self.set(key, new_value, domain, ttl)
            return new_value

        except Exception as e:
            logger.error(f"Error generating value for cache key {key}: {e}")
            raise

    async def cleanup_expired_entries(self) -> int:
        """Drop expired entries from memory and disk."""
        now = datetime.utcnow()
        expired = [k for k, entry in self.local_cache.items() if entry.expires_at <= now]
        for cache_key in expired:
            del self.local_cache[cache_key]
            path = self._path_for(cache_key)
            if path is not None and path.exists():
                path.unlink()

        if self.directory is not None and self.directory.exists():
            for path in self.directory.glob("*.pkl"):
                try:
                    with open(path, "rb") as f:
                        entry = pickle.load(f)
                    if entry.expires_at <= now:
                        path.unlink()
                        expired.append(entry.key)
                except Exception as e:
                    logger.warning(f"Removing unreadable cache file {path}: {e}")
                    path.unlink()

        logger.info(f"Cleaned up {len(expired)} expired cache entries")
        return len(expired)

    async def get_cache_stats(self) -> Dict[str, Any]:
        """Get cache performance statistics."""
        total_operations = sum(self.cache_stats.values())
        hit_rate = self.cache_stats['hits'] / max(
            self.cache_stats['hits'] + self.cache_stats['misses'], 1
        )
        return {
            **self.cache_stats,
            'total_operations': total_operations,
            'hit_rate': round(hit_rate * 100, 2),
            'local_cache_size': len(self.local_cache),
            'directory': str(self.directory) if self.directory else None,
        }

    def _read_entry(self, cache_key: str) -> Optional[CacheEntry]:
        path = self._path_for(cache_key)
        if path is None or not path.exists():
            return None
        with open(path, "rb") as f:
            return pickle.load(f)

    def _write_entry(self, entry: CacheEntry) -> None:
        path = self._path_for(entry.key)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            pickle.dump(entry, f)
