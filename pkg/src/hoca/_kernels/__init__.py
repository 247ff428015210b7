"""Hot kernels with a compiled core and a pure-Python fallback.

Two kernels dominate the run time of the analyses:

* ``prestar`` -- pushdown-system saturation (the inner loop of the
  returns-table fixpoint and of every regular-reachability query), and
* ``l2_reach`` -- explicit-state breadth-first search over level-2
  counter-automaton configurations (the bounded oracle).

Both exist twice with identical semantics: a Cython/C++ extension
(``_speedups``) and a pure-Python twin (``_pure``).  The compiled module is
preferred at import time; set ``HOCA_PURE=1`` to force the fallback.
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

if os.environ.get("HOCA_PURE"):
    from . import _pure as _impl

    COMPILED = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _pure as _impl

        COMPILED = False

prestar = _impl.prestar
l2_reach = _impl.l2_reach

__all__ = ["prestar", "l2_reach", "COMPILED"]
