"""Stream elements, window specifications and the randomness contract.

Every sampling decision in this package goes through a :class:`RandomSource`
using exactly two primitives, ``uniform_index(m)`` and ``bernoulli(num, den)``.
Probabilities are always integer ratios, never floats.  That is what lets the
enumeration oracle in :mod:`s3stream.verify` walk all randomness outcomes and
compute exact output distributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class S3Error(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(S3Error, ValueError):
    """A precondition of an operation was violated by the caller."""


class EmptyWindowError(S3Error):
    """A sample was requested from a window with no active elements."""


class BudgetExceeded(S3Error):
    """An exhaustive computation would exceed its configured budget."""


@dataclass(frozen=True, slots=True)
class Element:
    """One stream item: position ``index``, logical ``timestamp`` and payload."""

    index: int
    timestamp: int
    value: Any = None


# A sampled element keeps the full arrival metadata so expiry can be tested
# at any later time.
StoredSample = Element


@dataclass(frozen=True, slots=True)
class SequenceWindow:
    """The last ``n`` arrivals."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ContractViolation(f"window size must be positive, got {self.n}")


@dataclass(frozen=True, slots=True)
class TimestampWindow:
    """Elements ``p`` with ``now - T(p) < t0``."""

    t0: int

    def __post_init__(self) -> None:
        if self.t0 < 1:
            raise ContractViolation(f"t0 must be positive, got {self.t0}")


WindowSpec = Union[SequenceWindow, TimestampWindow]


def is_active(sample: Element, now: int, spec: WindowSpec | int) -> bool:
    """Return True if ``sample`` is inside the timestamp window at ``now``.

    ``spec`` may be a :class:`TimestampWindow` or a bare ``t0``.  For sequence
    windows use :func:`is_active_seq` instead.
    """
    if isinstance(spec, SequenceWindow):
        raise ContractViolation("is_active needs a timestamp window; use is_active_seq")
    t0 = spec.t0 if isinstance(spec, TimestampWindow) else spec
    return now - sample.timestamp < t0


def is_active_seq(sample: Element, arrivals: int, n: int) -> bool:
    return sample.index >= arrivals - n


def floor_log2(x: int) -> int:
    if x < 1:
        raise ContractViolation(f"floor_log2 needs a positive integer, got {x}")
    return x.bit_length() - 1


class RandomSource:
    """Randomness contract shared by every sampler.

    Subclasses implement :meth:`uniform_index`; :meth:`bernoulli` is derived
    from it so that its probability is exactly ``num/den``.
    """

    def uniform_index(self, m: int) -> int:
        raise NotImplementedError

    def bernoulli(self, num: int, den: int) -> bool:
        if den <= 0 or num < 0 or num > den:
            raise ContractViolation(f"bernoulli({num}, {den}) is not a probability")
        # Degenerate probabilities consume no randomness.
        if num == 0:
            return False
        if num == den:
            return True
        return self.uniform_index(den) < num


def _check_arity(m: int) -> None:
    if m < 1:
        raise ContractViolation(f"uniform_index needs m >= 1, got {m}")


class SeededSource(RandomSource):
    """Deterministic SplitMix64 source.

    The compiled kernels carry a bit-identical copy of this generator, so a
    kernel run and a pure-Python run from the same seed make the same choices.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform_index(self, m: int) -> int:
        _check_arity(m)
        if m == 1:
            return 0
        # Rejection keeps the draw exactly uniform: accepted values span a
        # multiple of m.
        threshold = (1 << 64) % m
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % m

    def spawn(self) -> "SeededSource":
        """Return an independent child source seeded from this one."""
        return SeededSource(self.next_u64())


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Per-trial seeds derived from a master seed (shared with the kernels)."""
    master = SeededSource(seed)
    return [master.next_u64() for _ in range(trials)]
