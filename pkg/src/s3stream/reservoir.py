"""Vitter reservoir sampling, the per-bucket building block."""

from __future__ import annotations

from .core import ContractViolation, Element, RandomSource


class Reservoir:
    """Uniform ``capacity``-subset of everything observed so far.

    Element ``i`` (0-based) is kept with probability 1 while ``i < k`` and
    with probability ``k/(i+1)`` afterwards, evicting a uniformly chosen slot.
    """

    __slots__ = ("capacity", "slots", "seen")

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ContractViolation(f"reservoir capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.slots: list[Element] = []
        self.seen = 0

    def observe(self, e: Element, src: RandomSource) -> bool:
        """Offer ``e``; return True if it was stored."""
        k = self.capacity
        self.seen += 1
        if len(self.slots) < k:
            self.slots.append(e)
            return True
        if src.bernoulli(k, self.seen):
            self.slots[src.uniform_index(k)] = e
            return True
        return False

    def sub_sample(self, i: int, src: RandomSource) -> list[Element]:
        """Uniform ``i``-subset of the slots (partial Fisher-Yates on a copy)."""
        size = len(self.slots)
        if i < 0 or i > size:
            raise ContractViolation(f"cannot draw {i} of {size} stored samples")
        pool = list(self.slots)
        for j in range(i):
            r = j + src.uniform_index(size - j)
            pool[j], pool[r] = pool[r], pool[j]
        return pool[:i]

    def __len__(self) -> int:
        return len(self.slots)

    def __repr__(self) -> str:
        idx = [e.index for e in self.slots]
        return f"Reservoir(capacity={self.capacity}, seen={self.seen}, slots={idx})"
