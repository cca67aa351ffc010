"""Step-by-step memory audits against the worst-case bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..core import RandomSource
from ..timestamp import TsSamplerWOR, memory_bound


@dataclass(frozen=True)
class MemoryReport:
    steps: int
    max_size: int
    max_bound: int
    passed: bool
    offending_step: int | None = None
    offending_size: int | None = None
    offending_bound: int | None = None

    def as_dict(self) -> dict:
        return {
            "steps": self.steps,
            "max_size": self.max_size,
            "max_bound": self.max_bound,
            "pass": self.passed,
            "offending_step": self.offending_step,
        }


def memory_audit(trace: Iterable[tuple[int, int, int]]) -> MemoryReport:
    """Audit ``(step, size, bound)`` records; the first overrun is reported."""
    steps = max_size = max_bound = 0
    bad = None
    for step, size, bound in trace:
        steps += 1
        max_size = max(max_size, size)
        max_bound = max(max_bound, bound)
        if bad is None and size > bound:
            bad = (step, size, bound)
    if bad is None:
        return MemoryReport(steps, max_size, max_bound, True)
    return MemoryReport(steps, max_size, max_bound, False, *bad)


def sequence_trace(sampler, elements, src: RandomSource):
    """Stored samples after each arrival; the bound is ``2k``."""
    bound = 2 * sampler.k
    for e in elements:
        sampler.observe(e, src)
        yield e.index, sampler.stored_count(), bound


def timestamp_trace(sampler, elements, src: RandomSource):
    """Buckets (plus delay buffer) after each arrival against the log bound."""
    buffered = isinstance(sampler, TsSamplerWOR)
    for e in elements:
        sampler.observe(e, src)
        yield e.index, sampler.memory_units(), memory_bound(sampler.k, e.index + 1, buffered)
