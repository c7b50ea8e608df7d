import os
from dotenv import load_dotenv

load_dotenv()

# Truncation settings
TRUNCATION_SETTINGS = {
    "MAX_VERTICES": int(os.getenv("ISOGROWTH_MAX_VERTICES", 2_000_000)),  # resource cap for materialize
    "MEMORY_LOG_THRESHOLD": 100_000  # log RSS after materializing at least this many vertices
}

# Growth settings
GROWTH_SETTINGS = {
    "PINCH_REL_TOL": 1e-12,     # slack on c^-1 a^r <= |B| <= c a^r comparisons
    "EQUALITY_REL_TOL": 1e-9    # |B| within this of a bound is reported as an equality case
}

# Certificate settings
CERTIFICATE_SETTINGS = {
    "REL_TOL": 1e-9  # Z identity: histogram sum vs direct double sum
}

# Search settings
SEARCH_SETTINGS = {
    "BUDGET": int(os.getenv("ISOGROWTH_BUDGET", 5_000_000)),  # max sets visited per call
    "MAX_ALL_REGION": 24,  # mode=all scans every subset, so the region must stay tiny
    "GREEDY_SEEDS": 8,
    "CHAINS": 4,
    "ANNEAL": {
        "INITIAL_TEMPERATURE": 2.0,
        "COOLING": 0.995,
        "STEPS": 2000
    }
}

CACHE_CONFIG = {
    "ball_cache": {
        "max_size": 4096,
        "max_memory_mb": 256
    }
}

LOGGING = {
    "LEVEL": os.getenv("ISOGROWTH_LOG_LEVEL", "INFO"),
    "FILE": os.getenv("ISOGROWTH_LOG_FILE")  # optional
}

# Paths
PATHS = {
    "OUTPUT_DIR": os.getenv("ISOGROWTH_OUTPUT_DIR", "")  # relative --out paths resolve against this
}

def load_config():
    """Return a configuration dictionary assembled from the settings above"""
    config = {
        "TRUNCATION_SETTINGS": TRUNCATION_SETTINGS,
        "GROWTH_SETTINGS": GROWTH_SETTINGS,
        "CERTIFICATE_SETTINGS": CERTIFICATE_SETTINGS,
        "SEARCH_SETTINGS": SEARCH_SETTINGS,
        "CACHE_CONFIG": CACHE_CONFIG,
        "LOGGING": LOGGING,
        "PATHS": PATHS
    }

    return config
