"""Pure-Python kernels: bulk runs driven through the library classes.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature, consuming the same SplitMix64 draws in the same order, so the two
backends return identical arrays for identical seeds.
"""

from __future__ import annotations

import numpy as np

from ..baselines import ChainSampler
from ..core import Element, EmptyWindowError, SeededSource, trial_seeds
from ..sequence import SeqSamplerWOR, SeqSamplerWR
from ..timestamp import TsSamplerWOR, TsSamplerWR, memory_bound

BACKEND = "python"


def _seq_sampler(n, k, wor):
    return SeqSamplerWOR(n, k) if wor else SeqSamplerWR(n, k)


def _ts_sampler(k, t0, wor):
    return TsSamplerWOR(k, t0) if wor else TsSamplerWR(k, t0)


def _pad(indices, k):
    return list(indices) + [-1] * (k - len(indices))


def seq_trials(n, k, wor, length, trials, seed):
    """Final query indices of ``trials`` independent runs over ``p_0 .. p_{length-1}``."""
    out = np.empty((trials, k), dtype=np.int64)
    for t, s in enumerate(trial_seeds(seed, trials)):
        src = SeededSource(s)
        sampler = _seq_sampler(n, k, wor)
        for i in range(length):
            sampler.observe(Element(i, i), src)
        out[t] = _pad([e.index for e in sampler.query(src)], k)
    return out


def seq_memory(n, k, wor, length, seed):
    """(max, mean) stored samples over one run of ``length`` arrivals."""
    src = SeededSource(seed)
    sampler = _seq_sampler(n, k, wor)
    peak = total = 0
    for i in range(length):
        sampler.observe(Element(i, i), src)
        c = sampler.stored_count()
        total += c
        if c > peak:
            peak = c
    return peak, total / max(1, length)


def chain_trials(n, length, trials, seed):
    """Offsets ``N-1-index`` of the final chain sample and the final chain length."""
    offsets = np.empty(trials, dtype=np.int64)
    lengths = np.empty(trials, dtype=np.int64)
    for t, s in enumerate(trial_seeds(seed, trials)):
        src = SeededSource(s)
        chain = ChainSampler(n)
        for i in range(length):
            chain.observe(Element(i, i), src)
        offsets[t] = length - 1 - chain.query().index
        lengths[t] = chain.memory()
    return offsets, lengths


def chain_memory(n, length, seed):
    src = SeededSource(seed)
    chain = ChainSampler(n)
    peak = total = 0
    for i in range(length):
        chain.observe(Element(i, i), src)
        c = chain.memory()
        total += c
        if c > peak:
            peak = c
    return peak, total / max(1, length)


def _arrivals(times, counts):
    i = 0
    for t, c in zip(times, counts):
        for _ in range(int(c)):
            yield Element(i, int(t))
            i += 1


def ts_trials(times, counts, t0, k, wor, trials, seed, query_time):
    """Query at ``query_time`` after feeding a run-length encoded timestamp stream.

    Rows are padded with -1; an empty window gives a row of -1.
    """
    out = np.empty((trials, k), dtype=np.int64)
    for t, s in enumerate(trial_seeds(seed, trials)):
        src = SeededSource(s)
        sampler = _ts_sampler(k, t0, wor)
        for e in _arrivals(times, counts):
            sampler.observe(e, src)
        try:
            got = [e.index for e in sampler.query(src, query_time)]
        except EmptyWindowError:
            got = []
        out[t] = _pad(got, k)
    return out


def ts_memory(times, counts, t0, k, wor, seed):
    """(max memory units, first step over the bound or -1) for one run."""
    src = SeededSource(seed)
    sampler = _ts_sampler(k, t0, wor)
    peak = 0
    violation = -1
    for e in _arrivals(times, counts):
        sampler.observe(e, src)
        units = sampler.memory_units()
        if units > peak:
            peak = units
        if violation < 0 and units > memory_bound(k, e.index + 1, wor):
            violation = e.index
    return peak, violation
