# utils/memory_cache.py
import sys
import logging
import threading
from collections import OrderedDict

import numpy as np


def estimate_size(value) -> int:
    """Approximate footprint in bytes; numpy arrays count their buffer"""
    if value is None:
        return 0
    if isinstance(value, np.ndarray):
        return int(value.nbytes) + 128
    if isinstance(value, (tuple, list)):
        return sys.getsizeof(value) + sum(estimate_size(item) for item in value)
    try:
        return sys.getsizeof(value)
    except TypeError:
        return 1024


class MemoryAwareCache:
    """
    Thread-safe LRU cache bounded by item count and by estimated memory.

    Holds per-graph BFS results (sphere-size arrays, the diameter). The graphs are
    immutable, so entries never go stale and only the two limits evict.
    """

    def __init__(self, name="cache", maxsize=100, max_memory_mb=100):
        """
        Parameters:
        - name: Name for this cache (for logging)
        - maxsize: Maximum number of items
        - max_memory_mb: Maximum estimated memory in MB
        """
        self.name = name
        self.maxsize = maxsize
        self.max_memory_bytes = max_memory_mb * 1024 * 1024
        self._entries = OrderedDict()  # key -> (value, size_bytes), least recent first
        self._memory = 0
        self._lock = threading.RLock()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def get(self, key):
        """Cached value or None; a hit makes the key most recent"""
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                self.misses += 1
                return None
            self._entries.move_to_end(key)
            self.hits += 1
            return entry[0]

    def set(self, key, value):
        """Store value under key (None is never stored); returns whether it was kept"""
        if value is None:
            return False
        size = estimate_size(value)
        with self._lock:
            if size > self.max_memory_bytes:
                logging.debug(f"{self.name}: value of {size} bytes exceeds the cache limit, not stored")
                return False
            old = self._entries.pop(key, None)
            if old is not None:
                self._memory -= old[1]
            self._entries[key] = (value, size)
            self._memory += size
            self._shrink()
            return True

    def _shrink(self):
        freed = 0
        dropped = 0
        while self._entries and (len(self._entries) > self.maxsize or self._memory > self.max_memory_bytes):
            _, (_, size) = self._entries.popitem(last=False)
            self._memory -= size
            freed += size
            dropped += 1
        if dropped:
            self.evictions += dropped
            logging.debug(f"{self.name}: evicted {dropped} entries ({freed / 1024 / 1024:.2f}MB), "
                          f"{len(self._entries)} left")

    def invalidate(self, key):
        with self._lock:
            entry = self._entries.pop(key, None)
            if entry is None:
                return False
            self._memory -= entry[1]
            return True

    def clear(self):
        with self._lock:
            self._entries.clear()
            self._memory = 0

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def stats(self):
        """Counters for debug logging"""
        with self._lock:
            return {
                "name": self.name,
                "items": len(self._entries),
                "memory_mb": self._memory / 1024 / 1024,
                "hits": self.hits,
                "misses": self.misses,
                "evictions": self.evictions,
                "hit_ratio": self.hits / max(self.hits + self.misses, 1),
            }
