import itertools

import pytest

from s3stream.core import ContractViolation, Element, EmptyWindowError, SeededSource
from s3stream.timestamp import TsSamplerWOR, TsSamplerWR, TsState, compose, gen_x, gen_y, memory_bound
from s3stream.verify.oracle import enumerate_distribution
from s3stream.verify.suites import CASE2_SCENARIOS, active_indexes, gen_y_formula, head_gamma, ts_script
from s3stream.zeta import BucketStructure


def feed(s, times, src):
    for i, t in enumerate(times):
        s.observe(Element(i, t), src)


def test_state_validation():
    with pytest.raises(ContractViolation):
        TsState(0)
    st = TsState(2)
    with pytest.raises(EmptyWindowError):
        st.query(SeededSource(0))
    st.observe(Element(0, 5), SeededSource(0))
    with pytest.raises(ContractViolation):
        st.advance(4)
    with pytest.raises(ContractViolation):
        st.observe(Element(1, 6), SeededSource(0), now=5)
    with pytest.raises(ContractViolation):
        st.observe(Element(1, 2), SeededSource(0), now=5)


def test_state_cases():
    st = TsState(2)
    src = SeededSource(1)
    for i, t in enumerate([0, 0, 0, 1, 1, 2]):
        st.observe(Element(i, t), src)
    assert st.head is not None
    alpha, beta = st.head_quantities()
    assert alpha <= beta
    st.advance(10)
    assert st.empty and st.bucket_count() == 0


def test_state_restarts_after_full_expiry():
    st = TsState(1)
    src = SeededSource(2)
    st.observe(Element(0, 0), src)
    st.observe(Element(1, 5), src)
    assert st.head is None and [b.bounds for b in st.zeta] == [(1, 2)]
    assert st.query(src).index == 1


def test_samplers_reject_bad_arrivals():
    for cls in (TsSamplerWR, TsSamplerWOR):
        s = cls(1, 3)
        with pytest.raises(EmptyWindowError):
            s.query(SeededSource(0))
        s.observe(Element(0, 4), SeededSource(0))
        with pytest.raises(ContractViolation):
            s.observe(Element(1, 3), SeededSource(0))
        with pytest.raises(ContractViolation):
            s.observe(Element(5, 4), SeededSource(0))
    with pytest.raises(ContractViolation):
        TsSamplerWR(0, 3)


def test_empty_window_after_expiry():
    s = TsSamplerWOR(2, 2)
    feed(s, [0, 0, 1], SeededSource(0))
    with pytest.raises(EmptyWindowError):
        s.query(SeededSource(0), 5)
    s = TsSamplerWR(2, 2)
    feed(s, [0, 0, 1], SeededSource(0))
    with pytest.raises(EmptyWindowError):
        s.query(SeededSource(0), 5)


def test_samples_active_and_memory_bounded():
    src = SeededSource(8)
    times = sorted(src.uniform_index(60) for _ in range(400))
    for cls, buffered in ((TsSamplerWR, False), (TsSamplerWOR, True)):
        s = cls(3, 5)
        for i, t in enumerate(times):
            s.observe(Element(i, t), src)
            assert s.memory_units() <= memory_bound(3, i + 1, buffered)
            got = s.query(src)
            assert all(t - e.timestamp < 5 for e in got)
            if buffered:
                assert len({e.index for e in got}) == len(got)


def test_memory_bound_formula():
    assert memory_bound(1, 1) == 2
    assert memory_bound(2, 8) == 16
    assert memory_bound(2, 8, buffered=True) == 18


@pytest.mark.parametrize("times,t0", [((0, 0, 0, 1, 1, 2), 2), ((0, 1, 2, 3, 4, 5, 6, 7), 3), ((0,) * 5 + (1,), 1)])
def test_wr_exact_uniform(times, t0):
    q = times[-1]
    d = enumerate_distribution(ts_script(TsSamplerWR, 1, t0, times, q))
    assert d.is_uniform_over((i,) for i in active_indexes(times, t0, q))


@pytest.mark.parametrize("times,t0,q,gamma", CASE2_SCENARIOS)
def test_case_two_scenarios(times, t0, q, gamma):
    # gamma (active elements inside the head) is computed only by the test helper
    assert head_gamma(times, t0, q) == gamma
    d = enumerate_distribution(ts_script(TsSamplerWR, 1, t0, times, q))
    assert d.is_uniform_over((i,) for i in active_indexes(times, t0, q))


def test_case_one_has_no_head():
    assert head_gamma((0, 0, 1), 5, 1) is None


@pytest.mark.parametrize("k", [2, 3])
def test_wor_exact_uniform(k):
    times = (0, 0, 1, 1, 2, 2)
    d = enumerate_distribution(ts_script(TsSamplerWOR, k, 2, times, 2))
    assert d.is_uniform_over(itertools.combinations(active_indexes(times, 2, 2), k))


def test_wor_small_window_returns_buffer():
    s = TsSamplerWOR(3, 1)
    feed(s, [0, 0, 0, 1, 1], SeededSource(3))
    assert [e.index for e in s.query(SeededSource(3))] == [3, 4]


def test_wor_query_cached():
    s = TsSamplerWOR(2, 3)
    src = SeededSource(4)
    feed(s, [0, 0, 1, 1, 2, 2], src)
    assert s.query(src) == s.query(src)


def test_gen_y_formula_matches_oracle():
    alpha, beta = 3, 4

    def run(src):
        q = Element(src.uniform_index(alpha), 0)
        return alpha - gen_y(BucketStructure(0, alpha, 0, q, q), beta, src).index

    assert dict(enumerate_distribution(run).items()) == gen_y_formula(alpha, beta)
    assert sum(gen_y_formula(alpha, beta).values()) == 1


def test_gen_x_rejects_wide_head():
    q = Element(0, 0)
    with pytest.raises(ContractViolation):
        gen_x(BucketStructure(0, 4, 0, q, q), 3, 1, 1, SeededSource(0))


def test_compose_cases():
    assert compose({1, 2}, 3, 4) == {1, 2, 3}
    assert compose({1, 2}, 2, 4) == {1, 2, 4}
    assert compose(["a"], "a", "z") == {"a", "z"}
