"""Earlier sliding-window samplers, kept as measurement targets.

Periodic sampling is deterministic after its first draw.  Chain sampling has
constant *expected* memory but an unbounded chain in the worst case.
Priority sampling keeps a descending-priority staircase of ``O(log n)``
expected size.  None of them is used by the succinct samplers.
"""

from __future__ import annotations

from collections import deque

from .core import ContractViolation, Element, EmptyWindowError, RandomSource, SequenceWindow, TimestampWindow, WindowSpec

PRIORITY_SPACE = 1 << 64


class PeriodicSampler:
    """Sample ``p_anchor`` then every ``n``-th successor ``p_{anchor + s n}``."""

    def __init__(self, n: int, anchor: int | None = None, src: RandomSource | None = None) -> None:
        if n < 1:
            raise ContractViolation(f"window size must be positive, got {n}")
        if anchor is None:
            if src is None:
                raise ContractViolation("need an anchor or a source to draw one")
            anchor = src.uniform_index(n)
        if not 0 <= anchor < n:
            raise ContractViolation(f"anchor must be in [0, {n}), got {anchor}")
        self.n = n
        self.anchor = anchor
        self.sample: Element | None = None

    def observe(self, e: Element, src: RandomSource | None = None) -> None:
        if e.index % self.n == self.anchor:
            self.sample = e

    def query(self) -> Element:
        if self.sample is None:
            raise EmptyWindowError(f"p_{self.anchor} has not arrived yet")
        return self.sample

    def memory(self) -> int:
        return 1


class ChainSampler:
    """Chain sampling over the last ``n`` arrivals.

    Each arrival becomes the sample with probability ``1/min(i+1, n)`` and
    immediately draws its replacement uniformly among its ``n`` successors;
    when that successor arrives it joins the chain and draws its own.
    """

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ContractViolation(f"window size must be positive, got {n}")
        self.n = n
        self.N = 0
        # (element, index of its chosen replacement)
        self.chain: deque[tuple[Element, int]] = deque()

    def observe(self, e: Element, src: RandomSource) -> None:
        i = self.N
        if e.index != i:
            raise ContractViolation(f"expected element index {i}, got {e.index}")
        if src.bernoulli(1, min(i + 1, self.n)):
            self.chain.clear()
            self.chain.append((e, i + 1 + src.uniform_index(self.n)))
        elif self.chain and self.chain[-1][1] == i:
            self.chain.append((e, i + 1 + src.uniform_index(self.n)))
        self.N += 1
        while self.chain[0][0].index < self.N - self.n:
            self.chain.popleft()

    def query(self) -> Element:
        if not self.chain:
            raise EmptyWindowError("no element has arrived yet")
        return self.chain[0][0]

    def memory(self) -> int:
        return len(self.chain)


class PrioritySampler:
    """Priority sampling: the active element with the highest random priority.

    Priorities are uniform 64-bit integers; on a tie the newer element wins.
    Works for both window kinds.
    """

    def __init__(self, window: WindowSpec) -> None:
        self.window = window
        self.N = 0
        self.now: int | None = None
        # strictly decreasing priority, increasing arrival order
        self.candidates: deque[tuple[int, Element]] = deque()

    def _expire(self) -> None:
        if isinstance(self.window, SequenceWindow):
            while self.candidates and self.candidates[0][1].index < self.N - self.window.n:
                self.candidates.popleft()
        else:
            t0 = self.window.t0
            while self.candidates and self.now - self.candidates[0][1].timestamp >= t0:
                self.candidates.popleft()

    def observe(self, e: Element, src: RandomSource) -> None:
        if self.now is not None and e.timestamp < self.now:
            raise ContractViolation(f"decreasing timestamp {e.timestamp} after {self.now}")
        prio = src.uniform_index(PRIORITY_SPACE)
        while self.candidates and self.candidates[-1][0] <= prio:
            self.candidates.pop()
        self.candidates.append((prio, e))
        self.N += 1
        self.now = e.timestamp
        self._expire()

    def advance(self, now: int) -> None:
        if isinstance(self.window, TimestampWindow):
            self.now = now
            self._expire()

    def query(self) -> Element:
        if not self.candidates:
            raise EmptyWindowError("window is empty")
        return self.candidates[0][1]

    def memory(self) -> int:
        return len(self.candidates)
