"""Uniform sampling over sliding windows with worst-case memory bounds."""

from .apps import FkEstimator, frequency_moment
from .baselines import ChainSampler, PeriodicSampler, PrioritySampler
from .core import (
    BudgetExceeded,
    ContractViolation,
    Element,
    EmptyWindowError,
    RandomSource,
    S3Error,
    SeededSource,
    SequenceWindow,
    StoredSample,
    TimestampWindow,
    WindowSpec,
    is_active,
)
from .reservoir import Reservoir
from .sequence import SeqSamplerWOR, SeqSamplerWR
from .timestamp import TsSamplerWOR, TsSamplerWR, TsState, memory_bound

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ChainSampler",
    "ContractViolation",
    "Element",
    "EmptyWindowError",
    "FkEstimator",
    "PeriodicSampler",
    "PrioritySampler",
    "RandomSource",
    "Reservoir",
    "S3Error",
    "SeededSource",
    "SeqSamplerWOR",
    "SeqSamplerWR",
    "SequenceWindow",
    "StoredSample",
    "TimestampWindow",
    "TsSamplerWOR",
    "TsSamplerWR",
    "TsState",
    "WindowSpec",
    "frequency_moment",
    "is_active",
    "memory_bound",
]
