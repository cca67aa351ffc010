"""Goodness-of-fit tests used by the statistical suite."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.stats import chi2

from ..core import ContractViolation

DEFAULT_ALPHA = 0.01


@dataclass(frozen=True)
class ChiSquareReport:
    statistic: float
    threshold: float
    dof: int
    alpha: float
    samples: int
    passed: bool

    def as_dict(self) -> dict:
        return {
            "statistic": round(self.statistic, 6),
            "threshold": round(self.threshold, 6),
            "dof": self.dof,
            "alpha": self.alpha,
            "samples": self.samples,
            "pass": self.passed,
        }


def counts_of(samples: Iterable[int], m: int) -> list[int]:
    counts = [0] * m
    for s in samples:
        if not 0 <= s < m:
            raise ContractViolation(f"outcome {s} outside [0, {m})")
        counts[s] += 1
    return counts


def chi_square_uniform(
    samples: Iterable[int] | None = None,
    m: int = 0,
    alpha: float = DEFAULT_ALPHA,
    *,
    counts: Sequence[int] | None = None,
) -> ChiSquareReport:
    """Pearson test of ``samples`` (outcomes in ``[0, m)``) against uniform.

    Needs at least ``10 m`` samples.
    """
    if m < 2:
        raise ContractViolation(f"need at least two outcomes, got m={m}")
    if counts is None:
        counts = counts_of(samples, m)
    elif len(counts) != m:
        raise ContractViolation(f"expected {m} counts, got {len(counts)}")
    total = sum(counts)
    if total < 10 * m:
        raise ContractViolation(f"{total} samples is too few for {m} outcomes (need {10 * m})")
    expected = total / m
    stat = sum((c - expected) ** 2 for c in counts) / expected
    threshold = float(chi2.ppf(1.0 - alpha, m - 1))
    return ChiSquareReport(stat, threshold, m - 1, alpha, total, stat <= threshold)


def bonferroni(alpha: float, tests: int) -> float:
    return alpha / tests


def binomial_within(hits: int, trials: int, p: float, sigmas: float = 3.0) -> bool:
    """True if ``hits/trials`` is within ``sigmas`` binomial standard deviations of ``p``."""
    sd = math.sqrt(trials * p * (1 - p))
    return abs(hits - trials * p) <= sigmas * sd
