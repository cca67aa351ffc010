"""Stream generators for memory audits and benchmarks."""

from __future__ import annotations

from itertools import count
from typing import Iterator

import numpy as np

from ..core import BudgetExceeded, ContractViolation, Element, SeededSource

MAX_LOWER_BOUND_T0 = 12


def lower_bound_runs(t0: int, tail: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Run-length form ``(timestamps, counts)`` of :func:`lower_bound_workload`.

    Timestamp ``i <= 2 t0`` carries ``2**(2 t0 - i)`` elements; after that
    one element per timestamp, ``tail`` of them (default ``2 t0``).
    """
    if t0 < 1:
        raise ContractViolation(f"t0 must be positive, got {t0}")
    if t0 > MAX_LOWER_BOUND_T0:
        raise BudgetExceeded(f"t0={t0} would emit 2**{2 * t0 + 1} elements; the cap is t0={MAX_LOWER_BOUND_T0}")
    if tail is None:
        tail = 2 * t0
    burst = [1 << (2 * t0 - i) for i in range(2 * t0 + 1)]
    times = np.arange(2 * t0 + 1 + tail, dtype=np.int64)
    counts = np.array(burst + [1] * tail, dtype=np.int64)
    return times, counts


def lower_bound_workload(t0: int, tail: int | None = None) -> Iterator[Element]:
    """Exponentially front-loaded stream used by the logarithmic lower bound.

    With ``tail=None`` the trailing one-per-timestamp part never ends.
    """
    if t0 < 1:
        raise ContractViolation(f"t0 must be positive, got {t0}")
    if t0 > MAX_LOWER_BOUND_T0:
        raise BudgetExceeded(f"t0={t0} would emit 2**{2 * t0 + 1} elements; the cap is t0={MAX_LOWER_BOUND_T0}")
    index = 0
    for ts in range(2 * t0 + 1):
        for _ in range(1 << (2 * t0 - ts)):
            yield Element(index, ts, index)
            index += 1
    ticks = count(2 * t0 + 1) if tail is None else range(2 * t0 + 1, 2 * t0 + 1 + tail)
    for ts in ticks:
        yield Element(index, ts, index)
        index += 1


def burst_runs(seed: int, ticks: int, max_burst: int, idle_every: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Random bursty timestamp stream: 1..max_burst arrivals per tick.

    With ``idle_every > 0`` every that-many ticks is skipped, so windows
    occasionally empty out completely.
    """
    src = SeededSource(seed)
    times = []
    counts = []
    for t in range(ticks):
        if idle_every and t % idle_every == idle_every - 1:
            continue
        times.append(t)
        counts.append(1 + src.uniform_index(max_burst))
    return np.array(times, dtype=np.int64), np.array(counts, dtype=np.int64)


def runs_to_elements(times, counts) -> Iterator[Element]:
    index = 0
    for t, c in zip(times, counts):
        for _ in range(int(c)):
            yield Element(index, int(t), index)
            index += 1
