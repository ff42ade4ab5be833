"""Backend selection for the greedy search inner loop.

The compiled extension ``rspca._greedy`` is used when importable; otherwise
the pure-numpy twin ``rspca._greedy_py`` takes over. Set ``RSPCA_PURE_PYTHON``
to a nonempty value (other than "0") to force the fallback, e.g. for
benchmark comparisons.
"""

import os

_force_py = os.environ.get("RSPCA_PURE_PYTHON", "0") not in ("", "0")

if _force_py:
    from . import _greedy_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _greedy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _greedy_py as _impl

        BACKEND = "python"

greedy_run = _impl.greedy_run


def available_backends():
    """Names of importable kernel backends (always includes "python")."""
    names = ["python"]
    try:
        from . import _greedy  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_kernel(name: str):
    """Fetch a specific backend's greedy_run (for benchmarks/tests)."""
    if name == "python":
        from . import _greedy_py

        return _greedy_py.greedy_run
    if name == "compiled":
        from . import _greedy

        return _greedy.greedy_run
    raise ValueError(f"unknown kernel backend {name!r}")
