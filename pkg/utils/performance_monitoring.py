import os
import time
import logging
import functools
import threading

# For memory profiling
try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False
    logging.warning("psutil not available. Install with: pip install psutil")

# Log timing for operations taking over 500ms
TIMING_LOG_THRESHOLD = 500

# Global tracking
performance_data = {
    "function_times": {},   # call count and total time by function
    "memory_samples": [],   # (timestamp, context, rss_mb)
    "peak_memory": 0,
    "slow_operations": [],  # most recent slow calls
}

# time_function runs inside worker threads (--jobs)
_lock = threading.Lock()

# ======= 1. Memory Profiling =======

def log_memory_usage(context=""):
    """
    Sample the resident set size of this process and log it

    Returns the RSS in MB, or None when psutil is missing.
    """
    if not PSUTIL_AVAILABLE:
        return None

    try:
        process = psutil.Process(os.getpid())
        memory_mb = process.memory_info().rss / 1024 / 1024

        with _lock:
            performance_data["memory_samples"].append((time.time(), context, memory_mb))
            if len(performance_data["memory_samples"]) > 1000:
                performance_data["memory_samples"].pop(0)
            if memory_mb > performance_data["peak_memory"]:
                performance_data["peak_memory"] = memory_mb

        logging.info(f"Memory usage ({context}): {memory_mb:.2f} MB, Peak: {performance_data['peak_memory']:.2f} MB")
        return memory_mb
    except Exception as e:
        logging.error(f"Error in memory monitoring: {e}")
        return None

# ======= 2. Performance Timing =======

def time_function(function=None, *, name=None, log_always=False):
    """
    Decorator to time function execution

    Parameters:
    - name: Optional custom name for the function in logs
    - log_always: If True, log every call regardless of duration
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed_ms = (time.perf_counter() - start_time) * 1000
                func_name = name or func.__name__

                with _lock:
                    stats = performance_data["function_times"].setdefault(func_name, {"count": 0, "total_ms": 0.0})
                    stats["count"] += 1
                    stats["total_ms"] += elapsed_ms

                    if elapsed_ms > TIMING_LOG_THRESHOLD:
                        performance_data["slow_operations"].append({
                            "function": func_name,
                            "time_ms": elapsed_ms,
                            "timestamp": time.time()
                        })
                        # Keep only the 100 most recent slow operations
                        if len(performance_data["slow_operations"]) > 100:
                            performance_data["slow_operations"].pop(0)

                if log_always or elapsed_ms > TIMING_LOG_THRESHOLD:
                    logging.info(f"Performance: {func_name} executed in {elapsed_ms:.2f}ms")

        return wrapper

    # Handle both @time_function and @time_function() syntax
    if function is None:
        return decorator
    return decorator(function)

# ======= 3. Summary =======

def get_performance_summary():
    """Return per-function averages sorted by total time, slowest first"""
    with _lock:
        snapshot = {func_name: dict(stats) for func_name, stats in performance_data["function_times"].items()}
    summary = []
    for func_name, stats in snapshot.items():
        summary.append({
            "function": func_name,
            "count": stats["count"],
            "total_ms": stats["total_ms"],
            "avg_ms": stats["total_ms"] / max(stats["count"], 1)
        })
    summary.sort(key=lambda item: item["total_ms"], reverse=True)
    return summary

def log_performance_summary(limit=10):
    """Log the most expensive functions of this run at debug level"""
    for item in get_performance_summary()[:limit]:
        logging.debug(f"Performance summary: {item['function']} called {item['count']}x, "
                      f"avg {item['avg_ms']:.2f}ms, total {item['total_ms']:.2f}ms")
