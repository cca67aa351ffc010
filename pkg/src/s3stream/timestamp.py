"""Succinct samplers for timestamp-based windows.

A window element ``p`` is active at time ``t`` iff ``t - T(p) < t0``, so the
window size is unknown and arbitrary.  A single sampler instance
(:class:`TsState`) keeps either

* case 1: a decomposition of the active suffix ``zeta(l, N)``, or
* case 2: a detached *head* bucket ``[y, z)`` that straddles the expiry
  boundary plus ``zeta(z, N)``, with ``z - y <= N + 1 - z``.

In case 2 the head's sample is accepted through an event of probability
``alpha / (beta + gamma)`` built without ever knowing ``gamma``, the number
of still-active elements in the head.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .core import ContractViolation, Element, EmptyWindowError, RandomSource, floor_log2
from .zeta import (
    ALL_EXPIRED,
    ALL_ACTIVE,
    BucketStructure,
    incr,
    sample_union,
    singleton,
    split_at_expiry,
)


def gen_y(head: BucketStructure, beta: int, src: RandomSource) -> Element:
    """Sample of the head bucket skewed toward its newest elements.

    With ``alpha = head.width`` the result is ``p_{y-i}`` (``0 < i < alpha``)
    with probability ``beta / ((beta+i)(beta+i-1))`` and the boundary element
    ``p_x`` otherwise.  Only the single coin indexed by ``head.q`` is drawn.
    """
    alpha = head.width
    i = head.y - head.q.index
    if 0 < i < alpha:
        if src.bernoulli(alpha * beta, (beta + i) * (beta + i - 1)):
            return head.q
    if head.q.index == head.x:
        return head.q
    return Element(head.x, head.t_start, None)


def gen_x(head: BucketStructure, beta: int, now: int, t0: int, src: RandomSource) -> bool:
    """Coin with ``P(True) = alpha / (beta + gamma)``; ``gamma`` is never computed."""
    alpha = head.width
    if alpha > beta:
        raise ContractViolation(f"head wider than tail: alpha={alpha}, beta={beta}")
    y = gen_y(head, beta, src)
    if now - y.timestamp < t0:
        return False
    return src.bernoulli(alpha, beta)


def compose(subset: Iterable[int], single: int, newest: int) -> set[int]:
    """Grow a uniform ``a``-subset of ``[1, b]`` to a uniform ``(a+1)``-subset of ``[1, b+1]``.

    ``single`` is an independent uniform draw from ``[1, b+1]`` and
    ``newest == b + 1``.  Works for any labels, not only integers.
    """
    out = set(subset)
    if single in out:
        out.add(newest)
    else:
        out.add(single)
    return out


class TsState:
    """One independent single-sample instance over a timestamp window."""

    def __init__(self, t0: int) -> None:
        if t0 < 1:
            raise ContractViolation(f"t0 must be positive, got {t0}")
        self.t0 = t0
        self.head: BucketStructure | None = None
        self.zeta: list[BucketStructure] = []
        self.now: int | None = None
        self.arrivals = 0
        self.last_incr_cost = 0
        self._cache: tuple[tuple[int, int], Element] | None = None

    # -- maintenance ---------------------------------------------------

    def advance(self, now: int) -> None:
        """Move the clock to ``now`` and restore the case-1/case-2 invariant."""
        if self.now is not None and now < self.now:
            raise ContractViolation(f"time went backwards: {now} < {self.now}")
        self.now = now
        if not self.zeta:
            return
        split = split_at_expiry(self.zeta, now, self.t0)
        if split is ALL_ACTIVE:
            return
        if split is ALL_EXPIRED:
            self.head = None
            self.zeta = []
            return
        # the old head (if any) lies entirely before the new one
        self.head, self.zeta = split

    def observe(self, e: Element, src: RandomSource, now: int | None = None) -> None:
        """Add ``e`` at time ``now`` (defaults to ``e.timestamp``)."""
        if now is None:
            now = e.timestamp
        if e.timestamp > now:
            raise ContractViolation(f"element from the future: T={e.timestamp} > now={now}")
        self.advance(now)
        if now - e.timestamp >= self.t0:
            raise ContractViolation(f"element {e.index} is already expired at {now}")
        if not self.zeta:
            self.head = None
            self.zeta = singleton(e)
            self.last_incr_cost = 1
        else:
            self.last_incr_cost = incr(self.zeta, e, src)
        self.arrivals += 1

    # -- queries -------------------------------------------------------

    @property
    def empty(self) -> bool:
        return not self.zeta

    def head_quantities(self) -> tuple[int, int] | None:
        """``(alpha, beta)`` in case 2, ``None`` in case 1."""
        if self.head is None:
            return None
        return self.head.width, self.zeta[-1].y - self.zeta[0].x

    def bucket_count(self) -> int:
        return len(self.zeta) + (self.head is not None)

    def query(self, src: RandomSource) -> Element:
        """Uniform sample of the active elements at the current time."""
        if not self.zeta:
            raise EmptyWindowError("timestamp window is empty")
        key = (self.now, self.arrivals)
        if self._cache is not None and self._cache[0] == key:
            return self._cache[1]
        if self.head is None:
            v = sample_union(self.zeta, src)
        else:
            alpha, beta = self.head_quantities()
            if alpha > beta:
                raise AssertionError(f"case-2 invariant broken: alpha={alpha} > beta={beta}")
            r1 = self.head.r
            if self.now - r1.timestamp < self.t0 and gen_x(self.head, beta, self.now, self.t0, src):
                v = r1
            else:
                v = sample_union(self.zeta, src)
        self._cache = (key, v)
        return v


class _TsBase:
    def __init__(self, k: int, t0: int) -> None:
        if k < 1:
            raise ContractViolation(f"k must be positive, got {k}")
        self.k = k
        self.t0 = t0
        self.instances = [TsState(t0) for _ in range(k)]
        self.N = 0
        self.now: int | None = None
        self._cache = None

    def _check_arrival(self, e: Element) -> None:
        if e.index != self.N:
            raise ContractViolation(f"expected element index {self.N}, got {e.index}")
        if self.now is not None and e.timestamp < self.now:
            raise ContractViolation(f"decreasing timestamp {e.timestamp} after {self.now}")

    def advance(self, now: int) -> None:
        if self.now is not None and now < self.now:
            raise ContractViolation(f"time went backwards: {now} < {self.now}")
        self.now = now
        for inst in self.instances:
            inst.advance(now)

    def bucket_count(self) -> int:
        return sum(inst.bucket_count() for inst in self.instances)

    def memory_units(self) -> int:
        return self.bucket_count()


class TsSamplerWR(_TsBase):
    """``k`` independent uniform samples of a timestamp window."""

    def observe(self, e: Element, src: RandomSource) -> None:
        self._check_arrival(e)
        self.now = e.timestamp
        for inst in self.instances:
            inst.observe(e, src)
        self.N += 1

    def query(self, src: RandomSource, now: int | None = None) -> list[Element]:
        if now is not None:
            self.advance(now)
        if self.now is None:
            raise EmptyWindowError("no element has arrived yet")
        return [inst.query(src) for inst in self.instances]


class TsSamplerWOR(_TsBase):
    """Uniform ``k``-subset of a timestamp window.

    Instance ``i`` only sees elements once ``i`` newer ones have arrived, so
    it samples the window minus its ``i`` newest elements.  The newest ``k``
    elements sit in one shared delay buffer.  A query folds the instance
    samples together with :func:`compose`.
    """

    def __init__(self, k: int, t0: int) -> None:
        super().__init__(k, t0)
        self.buffer: deque[Element] = deque(maxlen=k)

    def observe(self, e: Element, src: RandomSource) -> None:
        self._check_arrival(e)
        self.advance(e.timestamp)
        self.buffer.append(e)
        now = e.timestamp
        for i, inst in enumerate(self.instances):
            if len(self.buffer) <= i:
                break
            released = self.buffer[-1 - i]
            # expired while delayed: the instance is already empty, skip it
            if now - released.timestamp < self.t0:
                inst.observe(released, src, now)
        self.N += 1

    def memory_units(self) -> int:
        return self.bucket_count() + len(self.buffer)

    def query(self, src: RandomSource, now: int | None = None) -> list[Element]:
        if now is not None:
            self.advance(now)
        if self.now is None:
            raise EmptyWindowError("no element has arrived yet")
        key = (self.now, self.N)
        if self._cache is not None and self._cache[0] == key:
            return list(self._cache[1])
        live = [p for p in self.buffer if self.now - p.timestamp < self.t0]
        if len(live) < self.k:
            # fewer than k active elements, and all of them are buffered
            if not live:
                raise EmptyWindowError("timestamp window is empty")
            result = live
        else:
            draws = [inst.query(src) for inst in self.instances]
            by_index = {p.index: p for p in self.buffer}
            chosen = {draws[-1].index}
            by_index[draws[-1].index] = draws[-1]
            for i in range(self.k - 2, -1, -1):
                newest = self.buffer[-1 - i]
                by_index[draws[i].index] = draws[i]
                chosen = compose(chosen, draws[i].index, newest.index)
            result = sorted((by_index[j] for j in chosen), key=lambda p: p.index)
        self._cache = (key, tuple(result))
        return list(result)


def memory_bound(k: int, arrivals: int, buffered: bool = False) -> int:
    """Worst-case bucket (plus buffer) count for ``k`` instances after ``arrivals``."""
    per_instance = 2 * floor_log2(max(1, arrivals)) + 2
    return k * per_instance + (k if buffered else 0)
