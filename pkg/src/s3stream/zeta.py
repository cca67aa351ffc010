"""Geometric bucket decomposition over a stream suffix.

``zeta(a, b)`` covers elements ``p_a .. p_b`` with a list of bucket
structures.  Its first bucket is ``[a, c)`` with
``c = a + 2**(floor_log2(b + 1 - a) - 1)`` and the rest is ``zeta(c, b)``;
``zeta(b, b)`` is the single bucket ``[b, b+1)``.  Bucket widths shrink
geometrically toward the recent end, so a decomposition holds
``O(log(b - a))`` buckets.  :func:`incr` extends ``zeta(a, b)`` to
``zeta(a, b+1)`` in place, merging two equal-width buckets at every level
whose span crosses a power of two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import ContractViolation, Element, RandomSource, floor_log2


@dataclass(slots=True)
class BucketStructure:
    """Constant-size summary of ``B(x, y) = p_x .. p_{y-1}``.

    ``r`` and ``q`` are independent uniform samples of the bucket.
    """

    x: int
    y: int
    t_start: int
    r: Element
    q: Element

    @property
    def width(self) -> int:
        return self.y - self.x

    @property
    def bounds(self) -> tuple[int, int]:
        return (self.x, self.y)


class _Marker:
    def __init__(self, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return self.name


ALL_ACTIVE = _Marker("ALL_ACTIVE")
ALL_EXPIRED = _Marker("ALL_EXPIRED")

SplitResult = Union[_Marker, tuple[BucketStructure, list[BucketStructure]]]


def boundaries(a: int, b: int) -> list[tuple[int, int]]:
    """Bucket boundaries of ``zeta(a, b)`` by direct recursion."""
    if a > b:
        raise ContractViolation(f"zeta({a}, {b}) needs a <= b")
    out = []
    while a < b:
        c = a + (1 << (floor_log2(b + 1 - a) - 1))
        out.append((a, c))
        a = c
    out.append((b, b + 1))
    return out


def width_bound(span: int) -> int:
    """Upper bound on the number of buckets of a decomposition of ``span`` elements."""
    return 2 * floor_log2(span) + 1


def singleton(e: Element) -> list[BucketStructure]:
    return [BucketStructure(e.index, e.index + 1, e.timestamp, e, e)]


def _merge(first: BucketStructure, second: BucketStructure, src: RandomSource) -> BucketStructure:
    if first.width != second.width or first.y != second.x:
        raise AssertionError(f"merge of unequal buckets {first.bounds} and {second.bounds}")
    r = first.r if src.bernoulli(1, 2) else second.r
    q = first.q if src.bernoulli(1, 2) else second.q
    return BucketStructure(first.x, second.y, first.t_start, r, q)


def incr(buckets: list[BucketStructure], e: Element, src: RandomSource) -> int:
    """Append ``e`` to the decomposition in place; return the buckets touched.

    The recursion ``Incr(zeta(a, b)) = <BS(a, v), Incr(zeta(v, b))>`` is
    unrolled into a walk from the oldest bucket.
    """
    if not buckets:
        raise ContractViolation("incr on an empty decomposition; use singleton")
    b = buckets[-1].x
    if e.index != b + 1:
        raise ContractViolation(f"expected element index {b + 1}, got {e.index}")
    if e.timestamp < buckets[-1].t_start:
        raise ContractViolation("timestamps must be non-decreasing")
    touched = 0
    i = 0
    while True:
        touched += 1
        a = buckets[i].x
        if a == b:
            buckets.append(BucketStructure(e.index, e.index + 1, e.timestamp, e, e))
            return touched
        span = b + 1 - a
        if floor_log2(span + 1) != floor_log2(span):
            buckets[i] = _merge(buckets[i], buckets[i + 1], src)
            del buckets[i + 1]
            touched += 1
        i += 1


def split_at_expiry(buckets: list[BucketStructure], now: int, t0: int) -> SplitResult:
    """Locate the bucket that straddles the expiry boundary.

    Returns :data:`ALL_ACTIVE`, :data:`ALL_EXPIRED` (the last bucket is a
    singleton, so its start is the newest element), or ``(head, tail)`` where
    ``head`` starts expired and ``tail[0]`` starts active.
    """
    if not buckets or now - buckets[0].t_start < t0:
        return ALL_ACTIVE
    if now - buckets[-1].t_start >= t0:
        return ALL_EXPIRED
    for i in range(len(buckets) - 1):
        if now - buckets[i + 1].t_start < t0:
            return buckets[i], buckets[i + 1:]
    raise AssertionError("unreachable: last bucket is active")


def sample_union(buckets: list[BucketStructure], src: RandomSource) -> Element:
    """Uniform sample of the union of contiguous buckets.

    Bucket ``i`` is chosen with probability ``width_i / total`` through a
    chain of exact Bernoulli draws, then its ``r`` is returned.
    """
    if not buckets:
        raise ContractViolation("sample_union needs at least one bucket")
    remaining = buckets[-1].y - buckets[0].x
    for bs in buckets:
        if src.bernoulli(bs.width, remaining):
            return bs.r
        remaining -= bs.width
    raise AssertionError("unreachable: last bucket has probability 1")
