"""Bulk-run kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it imports; set ``S3_PURE_PYTHON=1`` to
force the fallback.  Both backends expose the same functions and return
identical results for identical seeds.
"""

from __future__ import annotations

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("S3_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend or python_backend

BACKEND = _active.BACKEND
seq_trials = _active.seq_trials
seq_memory = _active.seq_memory
chain_trials = _active.chain_trials
chain_memory = _active.chain_memory
ts_trials = _active.ts_trials
ts_memory = _active.ts_memory

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "seq_trials",
    "seq_memory",
    "chain_trials",
    "chain_memory",
    "ts_trials",
    "ts_memory",
]
