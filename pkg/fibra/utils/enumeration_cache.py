"""Simple in-memory cache for expensive enumerations (automorphism groups)."""

import threading
from collections import OrderedDict
from typing import Any, Hashable, Optional


class EnumerationCache:
    """Least-recently-used memo shared by concurrent callers."""

    def __init__(self, max_items: int = 64):
        """Initialize the cache.

        Args:
            max_items: Number of entries kept before the oldest is evicted
        """
        self.max_items = max_items
        self._cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._lock = threading.RLock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Optional[Any]:
        """Get an item from cache if it exists.

        Args:
            key: Cache key to look up

        Returns:
            Cached value or None if not found
        """
        with self._lock:
            if key not in self._cache:
                self.misses += 1
                return None
            self._cache.move_to_end(key)
            self.hits += 1
            return self._cache[key]

    def set(self, key: Hashable, value: Any) -> None:
        """Store an item, evicting the least recently used entry when full."""
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            while len(self._cache) > self.max_items:
                self._cache.popitem(last=False)

    def delete(self, key: Hashable) -> bool:
        """Delete an item from cache.

        Returns:
            True if item was deleted, False if not found
        """
        with self._lock:
            if key in self._cache:
                del self._cache[key]
                return True
            return False

    def clear(self) -> None:
        """Clear all items and counters."""
        with self._lock:
            self._cache.clear()
            self.hits = 0
            self.misses = 0

    def resize(self, max_items: int) -> None:
        """Change the capacity, evicting old entries if needed."""
        with self._lock:
            self.max_items = max_items
            while len(self._cache) > self.max_items:
                self._cache.popitem(last=False)

    def size(self) -> int:
        """Get the current number of cached items."""
        with self._lock:
            return len(self._cache)


# Global cache instance
_enumeration_cache = EnumerationCache()


def get_enumeration_cache() -> EnumerationCache:
    """Get the global enumeration cache instance."""
    return _enumeration_cache
