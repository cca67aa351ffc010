import pytest

from s3stream.core import ContractViolation, Element, SeededSource
from s3stream.verify.oracle import enumerate_distribution
from s3stream.zeta import (
    ALL_ACTIVE,
    ALL_EXPIRED,
    BucketStructure,
    boundaries,
    incr,
    sample_union,
    singleton,
    split_at_expiry,
    width_bound,
)


def build(a, b, times=None, src=None):
    src = src or SeededSource(0)
    t = times or (lambda i: 0)
    z = singleton(Element(a, t(a)))
    for i in range(a + 1, b + 1):
        incr(z, Element(i, t(i)), src)
    return z


def test_boundaries_small():
    assert boundaries(0, 0) == [(0, 1)]
    assert boundaries(0, 1) == [(0, 1), (1, 2)]
    assert boundaries(0, 2) == [(0, 1), (1, 2), (2, 3)]
    assert boundaries(0, 3) == [(0, 2), (2, 3), (3, 4)]
    assert boundaries(0, 6) == [(0, 2), (2, 4), (4, 5), (5, 6), (6, 7)]
    assert boundaries(0, 14) == [(0, 4), (4, 8), (8, 10), (10, 12), (12, 13), (13, 14), (14, 15)]
    assert boundaries(3, 9) == [(3, 5), (5, 7), (7, 8), (8, 9), (9, 10)]


def test_boundaries_tile_the_range():
    for a in range(0, 5):
        for b in range(a, 40):
            bs = boundaries(a, b)
            assert bs[0][0] == a and bs[-1] == (b, b + 1)
            assert all(x[1] == y[0] for x, y in zip(bs, bs[1:]))
            widths = [y - x for x, y in bs]
            assert all(w & (w - 1) == 0 for w in widths)
            assert widths == sorted(widths, reverse=True)


def test_boundaries_reject_empty():
    with pytest.raises(ContractViolation):
        boundaries(3, 2)


def test_width_bound_values():
    assert [width_bound(s) for s in (1, 2, 3, 4, 8)] == [1, 3, 3, 5, 7]


def test_incr_matches_recursion_and_cost_is_logarithmic():
    src = SeededSource(1)
    z = singleton(Element(0, 0))
    for b in range(1, 600):
        cost = incr(z, Element(b, 0), src)
        assert [x.bounds for x in z] == boundaries(0, b)
        assert cost <= 2 * len(z) + 2


def test_incr_contract_checks():
    z = singleton(Element(0, 5))
    with pytest.raises(ContractViolation):
        incr(z, Element(2, 5), SeededSource(0))
    with pytest.raises(ContractViolation):
        incr(z, Element(1, 4), SeededSource(0))
    with pytest.raises(ContractViolation):
        incr([], Element(0, 0), SeededSource(0))


@pytest.mark.parametrize("b", [1, 2, 4, 6, 7])
def test_bucket_samples_uniform_and_independent(b):
    def run(src):
        z = build(0, b, src=src)
        return tuple((bs.r.index, bs.q.index) for bs in z)

    d = enumerate_distribution(run)
    for pos, (x, y) in enumerate(boundaries(0, b)):
        marg = d.marginal(pos)
        assert marg.is_uniform_over((r, q) for r in range(x, y) for q in range(x, y))


def test_sample_union_uniform():
    def run(src):
        return sample_union(build(0, 6, src=src), src).index

    assert enumerate_distribution(run).is_uniform_over(range(7))


def test_sample_union_needs_buckets():
    with pytest.raises(ContractViolation):
        sample_union([], SeededSource(0))


def test_split_at_expiry():
    times = [0, 0, 1, 1, 2, 3, 4]
    z = build(0, 6, times=lambda i: times[i])
    # buckets [0,2) [2,4) [4,5) [5,6) [6,7)
    assert split_at_expiry(z, 4, 5) is ALL_ACTIVE
    assert split_at_expiry(z, 9, 5) is ALL_EXPIRED
    head, tail = split_at_expiry(z, 2, 2)
    assert head.bounds == (0, 2) and [b.bounds for b in tail] == [(2, 4), (4, 5), (5, 6), (6, 7)]
    # the boundary falls inside [2,4) only if its start is expired
    head, tail = split_at_expiry(z, 3, 2)
    assert head.bounds == (2, 4) and [b.bounds for b in tail] == [(4, 5), (5, 6), (6, 7)]
    assert split_at_expiry([], 0, 1) is ALL_ACTIVE


def test_bucket_structure_properties():
    bs = BucketStructure(2, 6, 0, Element(3, 0), Element(4, 0))
    assert bs.width == 4 and bs.bounds == (2, 6)
