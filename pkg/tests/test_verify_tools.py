from fractions import Fraction

import numpy as np
import pytest

from s3stream.core import BudgetExceeded, ContractViolation, Element, SeededSource
from s3stream.sequence import SeqSamplerWR
from s3stream.timestamp import TsSamplerWOR
from s3stream.verify import (
    EnumerationBudget,
    ExactDistribution,
    binomial_within,
    bonferroni,
    burst_runs,
    chi_square_uniform,
    counts_of,
    enumerate_distribution,
    independence_check,
    lower_bound_runs,
    lower_bound_workload,
    memory_audit,
    runs_to_elements,
    sequence_trace,
    timestamp_trace,
)


def test_oracle_weights_paths_exactly():
    def run(src):
        a = src.uniform_index(3)
        return a if a else src.uniform_index(2) + 10

    d = enumerate_distribution(run)
    assert dict(d.items()) == {1: Fraction(1, 3), 2: Fraction(1, 3), 10: Fraction(1, 6), 11: Fraction(1, 6)}
    assert d.leaves == 4 and d.total() == 1


def test_oracle_bernoulli_modes_agree():
    def run(src):
        return src.bernoulli(2, 5) + src.bernoulli(1, 3)

    fast = enumerate_distribution(run)
    slow = enumerate_distribution(run, branch_bernoulli=False)
    assert dict(fast.items()) == dict(slow.items())
    assert fast.leaves == 4 and slow.leaves == 15


def test_oracle_budget():
    def run(src):
        return tuple(src.uniform_index(10) for _ in range(4))

    with pytest.raises(BudgetExceeded):
        enumerate_distribution(run, EnumerationBudget(max_paths=100))


def test_oracle_detects_nondeterministic_script():
    calls = []

    def run(src):
        calls.append(1)
        if len(calls) == 1:
            return src.uniform_index(2), src.uniform_index(2)
        return 0

    with pytest.raises(ContractViolation):
        enumerate_distribution(run)


def test_distribution_helpers():
    d = ExactDistribution({(0, "a"): Fraction(1, 4), (1, "a"): Fraction(3, 4)})
    assert d.marginal(1)["a"] == 1
    assert d.expectation(lambda o: o[0]) == Fraction(3, 4)
    assert d.map(lambda o: o[0] > 0)[True] == Fraction(3, 4)
    assert not d.is_uniform_over([(0, "a"), (1, "a")])
    assert not d.is_uniform_over([])
    assert len(d) == 2 and set(d) == d.support()


def test_independence_check():
    indep = ExactDistribution({(a, b): Fraction(1, 4) for a in (0, 1) for b in (0, 1)})
    assert independence_check(indep)
    dep = ExactDistribution({(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
    assert not independence_check(dep)


def test_chi_square_accepts_uniform_and_rejects_skew():
    src = SeededSource(1)
    good = [src.uniform_index(8) for _ in range(8000)]
    assert chi_square_uniform(good, 8).passed
    bad = [min(src.uniform_index(8), src.uniform_index(8)) for _ in range(8000)]
    rep = chi_square_uniform(bad, 8)
    assert not rep.passed and rep.as_dict()["pass"] is False


def test_chi_square_preconditions():
    with pytest.raises(ContractViolation):
        chi_square_uniform([0] * 5, 1)
    with pytest.raises(ContractViolation):
        chi_square_uniform([0, 1] * 5, 2)
    with pytest.raises(ContractViolation):
        chi_square_uniform(counts=[5, 5, 5], m=2)
    with pytest.raises(ContractViolation):
        counts_of([3], 2)


def test_small_helpers():
    assert bonferroni(0.01, 8) == 0.00125
    assert binomial_within(500, 1000, 0.5)
    assert not binomial_within(600, 1000, 0.5)


def test_lower_bound_workload_shapes():
    times, counts = lower_bound_runs(2)
    assert times.tolist() == list(range(9))
    assert counts.tolist() == [16, 8, 4, 2, 1, 1, 1, 1, 1]
    elems = list(lower_bound_workload(2, tail=4))
    assert len(elems) == counts.sum()
    assert [e.index for e in elems] == list(range(len(elems)))
    assert elems == list(runs_to_elements(times, counts))
    with pytest.raises(BudgetExceeded):
        lower_bound_runs(13)
    with pytest.raises(ContractViolation):
        next(lower_bound_workload(0))


def test_lower_bound_workload_unbounded_tail():
    gen = lower_bound_workload(1, tail=None)
    head = [next(gen) for _ in range(20)]
    assert head[-1].timestamp == 3 + (20 - 8)


def test_burst_runs():
    times, counts = burst_runs(3, 100, 5, idle_every=10)
    assert len(times) == 90 and counts.min() >= 1 and counts.max() <= 5
    assert np.all(np.diff(times) > 0)


def test_memory_audit_reports_first_overrun():
    rep = memory_audit([(0, 1, 2), (1, 3, 2), (2, 5, 2)])
    assert not rep.passed and rep.offending_step == 1 and rep.max_size == 5
    assert memory_audit([(0, 1, 2)]).as_dict()["pass"]


def test_traces_stay_within_bounds():
    src = SeededSource(2)
    seq = memory_audit(sequence_trace(SeqSamplerWR(5, 2), (Element(i, i) for i in range(100)), src))
    assert seq.passed and seq.max_size == 4
    ts = memory_audit(timestamp_trace(TsSamplerWOR(2, 3), lower_bound_workload(3, tail=6), src))
    assert ts.passed
