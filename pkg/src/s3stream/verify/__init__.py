"""Exact oracles, statistical tests, memory audits and named check suites."""

from .memory import MemoryReport, memory_audit, sequence_trace, timestamp_trace
from .oracle import EnumerationBudget, ExactDistribution, enumerate_distribution, independence_check
from .stats import ChiSquareReport, binomial_within, bonferroni, chi_square_uniform, counts_of
from .workloads import burst_runs, lower_bound_runs, lower_bound_workload, runs_to_elements

__all__ = [
    "ChiSquareReport",
    "EnumerationBudget",
    "ExactDistribution",
    "MemoryReport",
    "binomial_within",
    "bonferroni",
    "burst_runs",
    "chi_square_uniform",
    "counts_of",
    "enumerate_distribution",
    "independence_check",
    "lower_bound_runs",
    "lower_bound_workload",
    "memory_audit",
    "runs_to_elements",
    "sequence_trace",
    "timestamp_trace",
]
