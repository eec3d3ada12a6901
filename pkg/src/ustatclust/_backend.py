"""Backend selection: compiled core when available, NumPy fallback otherwise.

Set ``USTATCLUST_BACKEND=python`` to force the pure NumPy backend, or
``USTATCLUST_BACKEND=compiled`` to require the extension (raising if it is
not built).  Anything else selects the extension when importable.

Only the steepest-ascent searches and the exhaustive scan are routed to the
extension: their per-move work is scalar and branch-heavy, where compiled
loops win by one to two orders of magnitude.  Batch statistic evaluation is
a matrix product at heart and stays on the BLAS-backed NumPy implementation
in both lanes (see benchmarks/benchmark_backends.py for the measurements).
"""

from __future__ import annotations

import os

from ._purepy import bn_batch, bn_from_sums, group_from_key, membership_key  # noqa: F401

_requested = os.environ.get("USTATCLUST_BACKEND", "auto").lower()

if _requested in {"python", "purepy", "numpy"}:
    from . import _purepy as _impl
elif _requested in {"compiled", "c", "ext"}:
    from . import _core as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _purepy as _impl

BACKEND_NAME = "compiled" if _impl.COMPILED else "python"

relocate_search = _impl.relocate_search
swap_search = _impl.swap_search
exhaustive_scan = _impl.exhaustive_scan
