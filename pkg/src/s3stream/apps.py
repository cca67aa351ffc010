"""Frequency moments over a sequence window by sampling.

For a uniform window position with ``m`` occurrences of its value from that
position to the end of the window, ``n * (m**k - (m-1)**k)`` is an unbiased
estimate of ``F_k``.  Counters ride along with the sampler's stored
candidates, so no window buffer is needed: a stored candidate that is still
active has every later occurrence inside the window.
"""

from __future__ import annotations

from fractions import Fraction

from .core import ContractViolation, Element, EmptyWindowError, RandomSource
from .sequence import SeqSamplerWR


def frequency_moment(values, k_moment: int) -> int:
    """Exact ``F_k`` of a finite sequence (reference only)."""
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c**k_moment for c in counts.values())


class FkEstimator:
    """``r`` independent sampling estimators of ``F_k`` over the last ``n`` arrivals."""

    def __init__(self, n: int, k_moment: int, r: int) -> None:
        if k_moment < 1:
            raise ContractViolation(f"moment order must be positive, got {k_moment}")
        self.k_moment = k_moment
        self.r = r
        self.sampler = SeqSamplerWR(n, r)
        # stored candidate index -> occurrences of its value since its arrival
        self.matches: dict[int, int] = {}
        self.comparisons = 0

    @property
    def n(self) -> int:
        return self.sampler.n

    def observe(self, e: Element, src: RandomSource) -> None:
        self.sampler.observe(e, src)
        live: dict[int, int] = {}
        for cand in self.sampler.stored():
            if cand.index in live:
                continue
            if cand.index == e.index:
                live[cand.index] = 1
            else:
                self.comparisons += 1
                hit = cand.value == e.value
                live[cand.index] = self.matches[cand.index] + hit
        self.matches = live

    def estimates(self) -> list[Fraction]:
        if self.sampler.N == 0:
            raise EmptyWindowError("no element has arrived yet")
        size = self.sampler.window_size()
        k = self.k_moment
        out = []
        for z in self.sampler.query():
            m = self.matches[z.index]
            out.append(Fraction(size * (m**k - (m - 1) ** k)))
        return out

    def query(self) -> Fraction:
        est = self.estimates()
        return sum(est, Fraction(0)) / len(est)
