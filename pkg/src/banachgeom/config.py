"""Global tolerances and environment switches.

All comparisons against these constants are done with plain floats; exact
rational arithmetic is available separately (see exactlp) for borderline
LP verdicts.
"""

import os

# Norm / duality comparisons.
TOL = 1e-9

# LP feasibility slack (solver noise floor).
LP_TOL = 1e-8

# Interior retreat for strict inequalities realised as closed constraints.
ETA = 1e-7

# Vertex enumeration cap: double-description / qhull up to this dimension,
# sampling fallbacks above it.
VERTEX_ENUM_MAX_DIM = 6

# Hard cap on materialised vertex sets (2**13 = corners of a 13-cube).
VERTEX_ENUM_MAX_COUNT = 8192

BACKEND_ENV = "BANACH_GEOM_BACKEND"
THREADS_ENV = "BANACH_GEOM_THREADS"


def kernel_backend() -> str:
    """Selected kernel backend: 'numba' unless overridden or unavailable."""
    choice = os.environ.get(BACKEND_ENV, "").strip().lower()
    if choice in ("numpy", "python"):
        return "numpy"
    if choice == "numba":
        return "numba"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def thread_cap() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(1, n)
