"""Exact enumeration of every randomness outcome of a sampler script.

A *script* is a callable taking a :class:`~s3stream.core.RandomSource` and
returning a hashable outcome.  The oracle replays the script once per leaf
of its decision tree, steering each draw like an odometer, and weights every
leaf by its exact path probability.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable

from ..core import BudgetExceeded, ContractViolation, RandomSource


@dataclass(frozen=True)
class EnumerationBudget:
    max_paths: int = 1_000_000


@dataclass
class ExactDistribution:
    """Outcome -> exact probability."""

    probs: dict[Hashable, Fraction] = field(default_factory=dict)
    leaves: int = 0

    def __getitem__(self, outcome: Hashable) -> Fraction:
        return self.probs.get(outcome, Fraction(0))

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def items(self):
        return self.probs.items()

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def support(self) -> set:
        return {o for o, p in self.probs.items() if p}

    def map(self, fn: Callable[[Any], Hashable]) -> "ExactDistribution":
        out: dict[Hashable, Fraction] = defaultdict(Fraction)
        for o, p in self.probs.items():
            out[fn(o)] += p
        return ExactDistribution(dict(out), self.leaves)

    def marginal(self, i: int) -> "ExactDistribution":
        return self.map(lambda o: o[i])

    def expectation(self, fn: Callable[[Any], Any] = lambda o: o) -> Fraction:
        return sum((p * fn(o) for o, p in self.probs.items()), Fraction(0))

    def is_uniform_over(self, outcomes: Iterable[Hashable]) -> bool:
        outcomes = set(outcomes)
        if not outcomes or self.support() != outcomes:
            return False
        target = Fraction(1, len(outcomes))
        return all(self.probs[o] == target for o in outcomes)


class _ReplaySource(RandomSource):
    __slots__ = ("prefix", "arities", "num", "den", "branch_bernoulli")

    def __init__(self, prefix: list[int], branch_bernoulli: bool) -> None:
        self.prefix = prefix
        self.arities: list[int] = []
        self.num = 1
        self.den = 1
        self.branch_bernoulli = branch_bernoulli

    def _choose(self, arity: int) -> int:
        pos = len(self.arities)
        self.arities.append(arity)
        return self.prefix[pos] if pos < len(self.prefix) else 0

    def uniform_index(self, m: int) -> int:
        if m < 1:
            raise ContractViolation(f"uniform_index needs m >= 1, got {m}")
        if m == 1:
            return 0
        self.den *= m
        return self._choose(m)

    def bernoulli(self, num: int, den: int) -> bool:
        if not self.branch_bernoulli:
            return super().bernoulli(num, den)
        if den <= 0 or num < 0 or num > den:
            raise ContractViolation(f"bernoulli({num}, {den}) is not a probability")
        if num == 0:
            return False
        if num == den:
            return True
        # two weighted branches instead of den uniform ones
        hit = self._choose(2) == 0
        self.num *= num if hit else den - num
        self.den *= den
        return hit


def enumerate_distribution(
    script: Callable[[RandomSource], Hashable],
    budget: EnumerationBudget | None = None,
    *,
    branch_bernoulli: bool = True,
) -> ExactDistribution:
    """Exact outcome distribution of ``script`` over all its randomness.

    With ``branch_bernoulli=False`` every Bernoulli draw is explored through
    ``uniform_index(den)``, exactly as :class:`~s3stream.core.RandomSource`
    implements it; the default explores it as two weighted branches, which
    gives the same distribution with far fewer leaves.

    Raises :class:`~s3stream.core.BudgetExceeded` rather than truncating.
    """
    budget = budget or EnumerationBudget()
    probs: dict[Hashable, Fraction] = defaultdict(Fraction)
    prefix: list[int] = []
    leaves = 0
    while True:
        src = _ReplaySource(prefix, branch_bernoulli)
        outcome = script(src)
        leaves += 1
        if leaves > budget.max_paths:
            raise BudgetExceeded(f"more than {budget.max_paths} randomness paths")
        probs[outcome] += Fraction(src.num, src.den)
        arities = src.arities
        if len(arities) < len(prefix):
            raise ContractViolation("script is not deterministic given its draws")
        choices = prefix + [0] * (len(arities) - len(prefix))
        j = len(choices) - 1
        while j >= 0 and choices[j] == arities[j] - 1:
            j -= 1
        if j < 0:
            break
        prefix = choices[:j] + [choices[j] + 1]
    return ExactDistribution(dict(probs), leaves)


def independence_check(joint: ExactDistribution) -> bool:
    """True iff a distribution over pairs factorizes into its marginals exactly."""
    first = joint.marginal(0)
    second = joint.marginal(1)
    for a, pa in first.items():
        for b, pb in second.items():
            if joint[(a, b)] != pa * pb:
                return False
    return True
