# Shared defaults for all imagedim components

import os

from dotenv import load_dotenv

"""
These are shared run defaults for every imagedim entry point.
This centralizes environment handling so that:
- thread counts and output locations are set in one place
- a `.env` file next to the working directory is honoured everywhere
- CLI flags can override a single, well-known default
"""

load_dotenv()

DEFAULT_THREADS = int(os.getenv("IMAGEDIM_THREADS", "1"))
DEFAULT_OUTPUT_DIR = os.getenv("IMAGEDIM_OUTPUT_DIR", "runs")
DEFAULT_LOG_LEVEL = os.getenv("IMAGEDIM_LOG_LEVEL", "INFO")

_tolerance = os.getenv("IMAGEDIM_TOLERANCE")
DEFAULT_TOLERANCE = float(_tolerance) if _tolerance else None

# Exhaustive enumerations refuse to run past this many tuples.
ENUMERATION_GUARD = 10_000_000

# Coincident image points are merged after snapping to this lattice.
IMAGE_SNAP = 2.0 ** -40

# Jitter added (once) to near-singular covariance matrices, relative to trace/n.
JITTER_SCALE = 1e-12
