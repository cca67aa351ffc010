"""Timing of the compiled kernels against the pure-Python fallback."""

from __future__ import annotations

import time

import numpy as np

from . import compiled_backend, python_backend


def _cases(trials: int):
    times = np.arange(8, dtype=np.int64)
    counts = np.array([5, 9, 3, 12, 30, 2, 7, 25], dtype=np.int64)
    return [
        ("seq_trials wr k=4", lambda b: b.seq_trials(64, 4, False, 151, trials, 1)),
        ("seq_trials wor k=4", lambda b: b.seq_trials(64, 4, True, 151, trials, 1)),
        ("ts_trials wr k=4", lambda b: b.ts_trials(times, counts, 4, 4, False, trials, 1, 7)),
        ("ts_trials wor k=4", lambda b: b.ts_trials(times, counts, 4, 4, True, trials, 1, 7)),
        ("chain_trials n=32", lambda b: b.chain_trials(32, 96, trials, 1)),
        ("seq_memory n=64 k=4", lambda b: b.seq_memory(64, 4, True, 50 * trials, 1)),
    ]


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def compare_backends(trials: int = 2000) -> list[dict]:
    """Run each kernel on both backends; report seconds, speedup and output equality."""
    if compiled_backend is None:
        raise RuntimeError("compiled kernels are not available (build the extension first)")
    rows = []
    for name, fn in _cases(trials):
        t = time.perf_counter()
        py_out = fn(python_backend)
        py_s = time.perf_counter() - t
        t = time.perf_counter()
        c_out = fn(compiled_backend)
        c_s = time.perf_counter() - t
        rows.append({
            "kernel": name,
            "trials": trials,
            "python_s": round(py_s, 4),
            "compiled_s": round(c_s, 6),
            "speedup": round(py_s / c_s, 1) if c_s > 0 else float("inf"),
            "identical": _same(py_out, c_out),
        })
    return rows
