import os
from os.path import dirname, expanduser, join, realpath

XAIBENCH_PROJ_ROOT = dirname(dirname(dirname(dirname(realpath(__file__)))))
XAIBENCH_ASSETS_ROOT = join(XAIBENCH_PROJ_ROOT, "assets")

XAIBENCH_CACHE_DIR = os.getenv(
    "XAIBENCH_CACHE_DIR", join(expanduser("~"), ".cache", "xaibench")
)
XAIBENCH_LOG_LEVEL = os.getenv("XAIBENCH_LOG_LEVEL", "INFO").upper()
