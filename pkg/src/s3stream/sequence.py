"""Succinct samplers for sequence-based windows (the last ``n`` arrivals).

The stream is cut into buckets ``B(i*n, (i+1)*n)``.  At any time the window
overlaps at most the last complete bucket (``active``) and the bucket still
filling up (``partial``), and each keeps an independent reservoir.  The number
of expired elements of the active bucket equals the number of arrived
elements of the partial one, which is what makes the combination uniform.
"""

from __future__ import annotations

from .core import ContractViolation, Element, EmptyWindowError, RandomSource
from .reservoir import Reservoir


class _BucketedSampler:
    def __init__(self, n: int, k: int) -> None:
        if n < 1 or k < 1:
            raise ContractViolation(f"need n >= 1 and k >= 1, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.N = 0
        self.active: list[Reservoir] | None = None
        self.partial: list[Reservoir] | None = None
        self._cache: tuple[int, object] | None = None

    def _fresh_bucket(self) -> list[Reservoir]:
        raise NotImplementedError

    def observe(self, e: Element, src: RandomSource) -> None:
        if e.index != self.N:
            raise ContractViolation(f"expected element index {self.N}, got {e.index}")
        if self.N % self.n == 0:
            self.partial = self._fresh_bucket()
        for res in self.partial:
            res.observe(e, src)
        self.N += 1
        if self.N % self.n == 0:
            # the finished bucket replaces the old active one, which is fully expired
            self.active, self.partial = self.partial, None

    @property
    def window_start(self) -> int:
        return max(0, self.N - self.n)

    def window_size(self) -> int:
        return min(self.N, self.n)

    def stored(self) -> list[Element]:
        out: list[Element] = []
        for bucket in (self.active, self.partial):
            if bucket is not None:
                for res in bucket:
                    out.extend(res.slots)
        return out

    def stored_count(self) -> int:
        return sum(len(res) for b in (self.active, self.partial) if b is not None for res in b)


class SeqSamplerWR(_BucketedSampler):
    """``k`` independent uniform samples of the window (with replacement).

    Each coordinate owns a single-slot reservoir per bucket, so at most ``2k``
    samples are stored at any time.
    """

    def _fresh_bucket(self) -> list[Reservoir]:
        return [Reservoir(1) for _ in range(self.k)]

    def query(self, src: RandomSource | None = None) -> list[Element]:
        if self.N == 0:
            raise EmptyWindowError("no element has arrived yet")
        start = self.window_start
        out = []
        for j in range(self.k):
            if self.active is not None:
                x_u = self.active[j].slots[0]
                if x_u.index >= start or self.partial is None:
                    out.append(x_u)
                    continue
            out.append(self.partial[j].slots[0])
        return out


class SeqSamplerWOR(_BucketedSampler):
    """Uniform ``k``-subset of the window (without replacement).

    If ``i`` of the active bucket's reservoir slots are expired they are
    replaced by a uniform ``i``-subset of the partial bucket's reservoir.
    Windows smaller than ``k`` are returned whole.
    """

    def _fresh_bucket(self) -> list[Reservoir]:
        return [Reservoir(self.k)]

    def query(self, src: RandomSource) -> list[Element]:
        if self.N == 0:
            raise EmptyWindowError("no element has arrived yet")
        if self._cache is not None and self._cache[0] == self.N:
            return list(self._cache[1])
        if self.active is None:
            result = list(self.partial[0].slots)
        elif self.partial is None:
            result = list(self.active[0].slots)
        else:
            start = self.window_start
            alive = [e for e in self.active[0].slots if e.index >= start]
            expired = len(self.active[0]) - len(alive)
            result = alive + self.partial[0].sub_sample(expired, src)
        result.sort(key=lambda e: e.index)
        self._cache = (self.N, tuple(result))
        return result
