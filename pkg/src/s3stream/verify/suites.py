"""Named verification checks, grouped into suites for ``s3 verify``.

Every check returns a flat dict with at least ``suite``, ``test`` and
``pass``; the CLI prints one JSON object per check.
"""

from __future__ import annotations

import itertools
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from .. import kernels
from ..apps import FkEstimator, frequency_moment
from ..core import Element, RandomSource, SeededSource, floor_log2, trial_seeds
from ..reservoir import Reservoir
from ..sequence import SeqSamplerWOR, SeqSamplerWR
from ..timestamp import TsSamplerWOR, TsSamplerWR, compose, gen_x, gen_y
from ..zeta import BucketStructure, boundaries, incr, singleton, width_bound
from .oracle import enumerate_distribution, independence_check
from .stats import DEFAULT_ALPHA, bonferroni, chi_square_uniform
from .workloads import burst_runs, lower_bound_runs

# -- shared scripts ------------------------------------------------------


def seq_script(cls, n: int, k: int, length: int):
    def run(src: RandomSource):
        s = cls(n, k)
        for i in range(length):
            s.observe(Element(i, i), src)
        return tuple(sorted(e.index for e in s.query(src)))

    return run


def ts_script(cls, k: int, t0: int, times, query_time: int):
    def run(src: RandomSource):
        s = cls(k, t0)
        for i, t in enumerate(times):
            s.observe(Element(i, t), src)
        return tuple(sorted(e.index for e in s.query(src, query_time)))

    return run


def active_indexes(times, t0: int, now: int) -> list[int]:
    return [i for i, t in enumerate(times) if now - t < t0]


def head_gamma(times, t0: int, query_time: int) -> int | None:
    """Active elements inside the case-2 head after replaying ``times`` (None in case 1).

    The samplers never compute this; only the checks do.
    """
    state = TsSamplerWR(1, t0)
    src = SeededSource(0)
    for i, t in enumerate(times):
        state.observe(Element(i, t), src)
    state.advance(query_time)
    head = state.instances[0].head
    if head is None:
        return None
    return sum(1 for j in range(head.x, head.y) if query_time - times[j] < t0)


def _result(suite: str, test: str, passed: bool, started: float, **extra) -> dict:
    out = {"suite": suite, "test": test, "pass": bool(passed), "seconds": round(time.perf_counter() - started, 3)}
    out.update(extra)
    return out


# -- exact suite ---------------------------------------------------------


def check_bernoulli_exact() -> dict:
    t = time.perf_counter()
    ok = True
    for den in range(1, 13):
        for num in range(den + 1):
            d = enumerate_distribution(lambda src: src.bernoulli(num, den), branch_bernoulli=False)
            ok &= d[True] == Fraction(num, den) and d.total() == 1
    return _result("exact", "bernoulli_rational", ok, t, max_den=12)


def check_reservoir_uniform() -> dict:
    t = time.perf_counter()
    ok = True
    for k in range(1, 4):
        for m in range(1, 9):
            def run(src, k=k, m=m):
                r = Reservoir(k)
                for i in range(m):
                    r.observe(Element(i, i), src)
                return tuple(sorted(e.index for e in r.slots))

            d = enumerate_distribution(run)
            ok &= d.is_uniform_over(itertools.combinations(range(m), min(k, m)))
    return _result("exact", "reservoir_uniform", ok, t, max_m=8, max_k=3)


def check_seq_wr_exact() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    for n in range(1, 5):
        for length in range(1, 9):
            d = enumerate_distribution(seq_script(SeqSamplerWR, n, 1, length))
            w = min(n, length)
            ok &= d.is_uniform_over((i,) for i in range(length - w, length))
            ok &= d.total() == 1
            cases += 1
    return _result("exact", "sequence_wr_uniform", ok, t, cases=cases)


def check_seq_wor_exact() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    for n in range(1, 6):
        for k in range(1, 4):
            for length in range(1, 9):
                d = enumerate_distribution(seq_script(SeqSamplerWOR, n, k, length))
                w = min(n, length)
                ok &= d.is_uniform_over(itertools.combinations(range(length - w, length), min(k, w)))
                cases += 1
    return _result("exact", "sequence_wor_uniform", ok, t, cases=cases)


def ts_wr_scripts():
    """Every non-decreasing timestamp stream of up to 6 arrivals over ticks 0..4,
    plus seeded longer ones (7-8 arrivals) and queries after the last arrival."""
    for length in range(1, 7):
        for times in itertools.combinations_with_replacement(range(5), length):
            for t0 in (1, 2, 3):
                yield times, t0, times[-1]
    src = SeededSource(20240601)
    for _ in range(120):
        length = 7 + src.uniform_index(2)
        times = sorted(src.uniform_index(6) for _ in range(length))
        t0 = 1 + src.uniform_index(4)
        yield tuple(times), t0, times[-1] + src.uniform_index(2)


# (times, t0, query time, active elements inside the case-2 head)
CASE2_SCENARIOS = [
    ((0, 1, 2), 2, 2, 0),
    ((0, 1, 1, 1, 2), 2, 2, 1),
    ((0, 0, 1, 1, 1, 1, 1, 1), 2, 2, 2),
]


def check_ts_wr_exact() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    gammas: set[int] = set()
    scripts = list(ts_wr_scripts()) + [(times, t0, q) for times, t0, q, _ in CASE2_SCENARIOS]
    for times, t0, q in scripts:
        live = active_indexes(times, t0, q)
        if not live:
            continue
        d = enumerate_distribution(ts_script(TsSamplerWR, 1, t0, times, q))
        ok &= d.is_uniform_over((i,) for i in live)
        g = head_gamma(times, t0, q)
        if g is not None:
            gammas.add(g)
        cases += 1
    scenarios_ok = all(head_gamma(times, t0, q) == g for times, t0, q, g in CASE2_SCENARIOS)
    return _result("exact", "timestamp_wr_uniform", ok and scenarios_ok, t, cases=cases,
                   case2_gammas=sorted(gammas))


TS_WOR_PATTERNS = [
    (0, 0, 0, 0, 0, 0),
    (0, 1, 2, 3, 4, 5),
    (0, 0, 1, 1, 2, 2),
    (0, 0, 0, 1, 2, 2),
    (0, 1, 1, 1, 1, 3),
    (0, 0, 0, 0, 2, 3),
    (0, 2, 2, 3, 3, 3),
    (0, 1, 2, 2),
    (0, 0, 1),
]


def check_ts_wor_exact() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    for times in TS_WOR_PATTERNS:
        for t0 in (1, 2, 3):
            for k in (1, 2, 3):
                for q in (times[-1], times[-1] + 1):
                    live = active_indexes(times, t0, q)
                    if not live:
                        continue
                    d = enumerate_distribution(ts_script(TsSamplerWOR, k, t0, times, q))
                    ok &= d.is_uniform_over(itertools.combinations(live, min(k, len(live))))
                    cases += 1
    return _result("exact", "timestamp_wor_uniform", ok, t, cases=cases)


def _head(alpha: int, q_offset: int, times) -> BucketStructure:
    """Head bucket ``[0, alpha)`` whose Q sample sits at ``q_offset``."""
    q = Element(q_offset, times[q_offset])
    return BucketStructure(0, alpha, times[0], q, q)


def gen_y_formula(alpha: int, beta: int) -> dict[int, Fraction]:
    """Offsets from the head end (``i`` means ``p_{y-i}``); ``alpha`` is the boundary."""
    out = {i: Fraction(beta, (beta + i) * (beta + i - 1)) for i in range(1, alpha)}
    out[alpha] = Fraction(beta, beta + alpha - 1)
    return out


def check_gen_y() -> dict:
    t = time.perf_counter()
    ok = True
    for beta in range(1, 7):
        for alpha in range(1, beta + 1):
            times = [0] * alpha

            def run(src, alpha=alpha, beta=beta, times=times):
                head = _head(alpha, src.uniform_index(alpha), times)
                return alpha - gen_y(head, beta, src).index

            d = enumerate_distribution(run)
            ok &= dict(d.items()) == gen_y_formula(alpha, beta)
    return _result("exact", "gen_y_distribution", ok, t, max_beta=6)


def check_gen_x() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    for beta in range(1, 5):
        for alpha in range(1, beta + 1):
            # the head's first element is expired, so gamma < alpha
            for gamma in range(alpha):
                times = [0] * (alpha - gamma) + [1] * gamma

                def run(src, alpha=alpha, beta=beta, times=times):
                    head = _head(alpha, src.uniform_index(alpha), times)
                    return gen_x(head, beta, 1, 1, src)

                d = enumerate_distribution(run)
                ok &= d[True] == Fraction(alpha, beta + gamma)
                cases += 1
    return _result("exact", "gen_x_probability", ok, t, cases=cases)


def check_compose() -> dict:
    t = time.perf_counter()
    ok = True
    for b in range(1, 6):
        for a in range(1, min(3, b) + 1):
            subsets = list(itertools.combinations(range(1, b + 1), a))

            def run(src, subsets=subsets, b=b):
                base = subsets[src.uniform_index(len(subsets))]
                single = 1 + src.uniform_index(b + 1)
                return tuple(sorted(compose(base, single, b + 1)))

            d = enumerate_distribution(run)
            ok &= d.is_uniform_over(itertools.combinations(range(1, b + 2), a + 1))
    return _result("exact", "compose_uniform", ok, t, max_a=3, max_b=5)


def check_incr_identity() -> dict:
    t = time.perf_counter()
    ok = True
    src = SeededSource(7)
    for a in range(0, 65):
        z = singleton(Element(a, 0))
        for b in range(a, 65):
            incr(z, Element(b + 1, 0), src)
            ok &= [bs.bounds for bs in z] == boundaries(a, b + 1)
    return _result("exact", "incr_identity", ok, t, max_a=64, max_b=64)


def check_width_bound() -> dict:
    t = time.perf_counter()
    ok = True
    for span in range(1, (1 << 16) + 1):
        ok &= len(boundaries(0, span - 1)) <= width_bound(span)
    return _result("exact", "zeta_width_bound", ok, t, max_span=1 << 16)


def fk_oracle_cases(max_window: int = 5, alphabet: int = 3):
    for n in range(1, max_window + 1):
        prefix = tuple(j % alphabet for j in range((n + 1) // 2))
        for window in itertools.product(range(alphabet), repeat=n):
            yield n, prefix + window, window


def fk_expectation(n: int, stream, k_moment: int) -> Fraction:
    def run(src):
        est = FkEstimator(n, k_moment, 1)
        for i, v in enumerate(stream):
            est.observe(Element(i, i, v), src)
        return est.query()

    return enumerate_distribution(run).expectation()


def check_fk_unbiased() -> dict:
    t = time.perf_counter()
    ok = True
    cases = 0
    for n, stream, window in fk_oracle_cases():
        for k_moment in (2, 3):
            ok &= fk_expectation(n, stream, k_moment) == frequency_moment(window, k_moment)
            cases += 1
    return _result("exact", "fk_unbiased", ok, t, cases=cases)


def fk_relative_error(n: int = 256, r: int = 1000, k_moment: int = 2, seed: int = 11) -> dict:
    src = SeededSource(seed)
    vals = SeededSource(seed + 1)
    est = FkEstimator(n, k_moment, r)
    stream = []
    for i in range(2 * n + 100):
        # skewed alphabet: small values are much more frequent
        v = vals.uniform_index(1 + vals.uniform_index(40))
        stream.append(v)
        est.observe(Element(i, i, v), src)
    truth = frequency_moment(stream[-n:], k_moment)
    value = est.query()
    return {"n": n, "r": r, "k_moment": k_moment, "true": truth, "estimate": float(value),
            "relative_error": abs(float(value) - truth) / truth}


def check_fk_report() -> dict:
    t = time.perf_counter()
    rep = fk_relative_error()
    return _result("exact", "fk_relative_error_report", np.isfinite(rep["relative_error"]), t, **rep)


# -- independence suite --------------------------------------------------


def _seq_two_windows(cls, n: int, k: int):
    def run(src):
        s = cls(n, k)
        for i in range(n):
            s.observe(Element(i, i), src)
        first = tuple(e.index for e in s.query(src))
        for i in range(n, 2 * n):
            s.observe(Element(i, i), src)
        return first, tuple(e.index for e in s.query(src))

    return run


def _ts_two_windows(cls, k: int, t0: int, times, split: int, q1: int, q2: int):
    def run(src):
        s = cls(k, t0)
        for i in range(split):
            s.observe(Element(i, times[i]), src)
        first = tuple(e.index for e in s.query(src, q1))
        for i in range(split, len(times)):
            s.observe(Element(i, times[i]), src)
        return first, tuple(e.index for e in s.query(src, q2))

    return run


def _factorizes(script, outcomes: int) -> bool:
    joint = enumerate_distribution(script)
    return independence_check(joint) and len(joint) == outcomes


def check_seq_independence() -> dict:
    """Queries at N=n and N=2n see disjoint windows."""
    t = time.perf_counter()
    results = {
        "n2_wr": _factorizes(_seq_two_windows(SeqSamplerWR, 2, 1), 4),
        "n2_wor": _factorizes(_seq_two_windows(SeqSamplerWOR, 2, 1), 4),
        "n3_wr_k2": _factorizes(_seq_two_windows(SeqSamplerWR, 3, 2), 81),
        "n3_wor_k2": _factorizes(_seq_two_windows(SeqSamplerWOR, 3, 2), 9),
    }
    return _result("independence", "sequence_disjoint_windows", all(results.values()), t, **results)


def check_ts_independence() -> dict:
    t = time.perf_counter()
    four = (0, 1, 2, 3)
    six = (0, 0, 1, 3, 4, 4)
    results = {
        "four_wr": _factorizes(_ts_two_windows(TsSamplerWR, 1, 2, four, 2, 1, 3), 4),
        "four_wor": _factorizes(_ts_two_windows(TsSamplerWOR, 1, 2, four, 2, 1, 3), 4),
        "six_wr": _factorizes(_ts_two_windows(TsSamplerWR, 1, 2, six, 3, 1, 4), 9),
        "six_wor_k2": _factorizes(_ts_two_windows(TsSamplerWOR, 2, 2, six, 3, 1, 4), 9),
    }
    return _result("independence", "timestamp_disjoint_windows", all(results.values()), t, **results)


def check_reservoir_prefix_independence() -> dict:
    t = time.perf_counter()
    ok = True
    for m in range(2, 7):
        for i in range(1, m):
            def run(src, m=m, i=i):
                r = Reservoir(1)
                early = None
                for j in range(m):
                    r.observe(Element(j, j), src)
                    if j == i - 1:
                        early = r.slots[0].index
                return early, r.slots[0].index >= i

            ok &= independence_check(enumerate_distribution(run))
    return _result("independence", "reservoir_prefix", ok, t, max_m=6)


# -- statistical suite ---------------------------------------------------

STAT_N = 64
STAT_TRIALS = 100_000
SEQ_STAT_LENGTH = 2 * STAT_N + 23
TS_STAT_TIMES = np.arange(8, dtype=np.int64)
TS_STAT_COUNTS = np.array([5, 9, 3, 12, 30, 2, 7, 25], dtype=np.int64)
TS_STAT_T0 = 4
STAT_CONFIGS = [(mode, wor, k) for mode in ("sequence", "timestamp") for wor in (False, True) for k in (1, 4)]


STAT_MASTER_SEED = 20261015


def stat_seed(mode: str, wor: bool, k: int) -> int:
    """Independent seed per configuration, derived from one master seed."""
    return trial_seeds(STAT_MASTER_SEED, len(STAT_CONFIGS))[STAT_CONFIGS.index((mode, wor, k))]


def stat_samples(mode: str, wor: bool, k: int, trials: int = STAT_TRIALS, seed: int | None = None) -> np.ndarray:
    """Window offsets ``0..63`` of every sampled element across seeded trials."""
    if seed is None:
        seed = stat_seed(mode, wor, k)
    if mode == "sequence":
        idx = kernels.seq_trials(STAT_N, k, wor, SEQ_STAT_LENGTH, trials, seed)
        start = SEQ_STAT_LENGTH - STAT_N
    else:
        q = int(TS_STAT_TIMES[-1])
        idx = kernels.ts_trials(TS_STAT_TIMES, TS_STAT_COUNTS, TS_STAT_T0, k, wor, trials, seed, q)
        start = int(TS_STAT_COUNTS[TS_STAT_TIMES <= q - TS_STAT_T0].sum())
    return (idx - start).ravel()


def check_chi_square(mode: str, wor: bool, k: int, alpha: float | None = None) -> dict:
    t = time.perf_counter()
    alpha = alpha if alpha is not None else bonferroni(DEFAULT_ALPHA, len(STAT_CONFIGS))
    offsets = stat_samples(mode, wor, k)
    in_window = bool(((offsets >= 0) & (offsets < STAT_N)).all())
    rep = chi_square_uniform(counts=np.bincount(offsets.clip(0, STAT_N - 1), minlength=STAT_N).tolist(),
                             m=STAT_N, alpha=alpha)
    name = f"chi_square_{mode}_{'wor' if wor else 'wr'}_k{k}"
    return _result("statistical", name, rep.passed and in_window, t, backend=kernels.BACKEND, **rep.as_dict())


def check_bernoulli_frequency() -> dict:
    from .stats import binomial_within

    t = time.perf_counter()
    src = SeededSource(99)
    trials = 100_000
    hits = sum(src.bernoulli(2, 5) for _ in range(trials))
    return _result("statistical", "bernoulli_2_5_frequency", binomial_within(hits, trials, 0.4), t,
                   frequency=hits / trials)


# -- memory suite --------------------------------------------------------

SEQ_MEMORY_LENGTH = 1_000_000


def check_seq_memory() -> dict:
    t = time.perf_counter()
    rows = []
    ok = True
    for n in (1, 7, 64, 1000):
        for k in (1, 4):
            for wor in (False, True):
                peak, _ = kernels.seq_memory(n, k, wor, SEQ_MEMORY_LENGTH, 31 * n + k)
                ok &= peak <= 2 * k
                rows.append([n, k, "wor" if wor else "wr", peak])
    return _result("memory", "sequence_2k_bound", ok, t, length=SEQ_MEMORY_LENGTH,
                   backend=kernels.BACKEND, rows=rows)


def check_ts_memory(max_t0: int = 12) -> dict:
    t = time.perf_counter()
    rows = []
    ok = True
    workloads = [(f"lower_bound_t0={t0}", t0, *lower_bound_runs(t0)) for t0 in range(1, max_t0 + 1)]
    for seed, (burst, idle) in enumerate([(3, 0), (40, 0), (200, 7)]):
        times, counts = burst_runs(seed, 2000, burst, idle)
        workloads.append((f"bursts_max={burst}", 5 + seed * 20, times, counts))
    for name, t0, times, counts in workloads:
        for k, wor in ((1, False), (2, False), (2, True), (3, True)):
            if name.startswith("lower_bound") and k == 3 and t0 > 10:
                continue
            peak, violation = kernels.ts_memory(times, counts, t0, k, wor, 1000 + t0)
            arrivals = int(counts.sum())
            bound = k * (2 * floor_log2(arrivals) + 2) + (k if wor else 0)
            ok &= violation < 0
            rows.append([name, t0, k, "wor" if wor else "wr", arrivals, peak, bound])
    return _result("memory", "timestamp_log_bound", ok, t, backend=kernels.BACKEND, rows=rows)


# -- bias suite (chain sampling vs succinct) ------------------------------

BIAS_N = 32
BIAS_LENGTH = 1_000_000
BIAS_TRIALS = 100_000
BIAS_TRIAL_LENGTH = 3 * BIAS_N


def bias_experiment(n: int = BIAS_N, length: int = BIAS_LENGTH, trials: int = BIAS_TRIALS,
                    seeds: tuple[int, ...] = (1, 2, 3), alpha: float = DEFAULT_ALPHA) -> dict:
    s3_peaks = [kernels.seq_memory(n, 1, False, length, s)[0] for s in seeds]
    chain_stats = [kernels.chain_memory(n, length, s) for s in seeds]
    offsets, lengths = kernels.chain_trials(n, BIAS_TRIAL_LENGTH, trials, seeds[0])
    kept = offsets[lengths <= 2]
    counts = np.bincount(kept, minlength=n)
    chain_rep = chi_square_uniform(counts=counts.tolist(), m=n, alpha=alpha)
    s3_idx = kernels.seq_trials(n, 1, False, BIAS_TRIAL_LENGTH, trials, seeds[0])
    s3_counts = np.bincount((BIAS_TRIAL_LENGTH - 1 - s3_idx).ravel(), minlength=n)
    s3_rep = chi_square_uniform(counts=s3_counts.tolist(), m=n, alpha=alpha)
    ratio = float(counts[0]) / counts[n - 1] if counts[n - 1] else float("inf")
    return {
        "n": n,
        "length": length,
        "s3_max_slots": s3_peaks,
        "chain_max_length": [c[0] for c in chain_stats],
        "chain_mean_length": [round(c[1], 4) for c in chain_stats],
        "conditioned_trials": int(kept.size),
        "chain_conditioned_chi2": chain_rep.as_dict(),
        "s3_chi2": s3_rep.as_dict(),
        "p0_over_pn": ratio,
    }


def check_bias() -> dict:
    t = time.perf_counter()
    rep = bias_experiment()
    ok = (
        all(p == 2 for p in rep["s3_max_slots"])
        and any(c > 2 for c in rep["chain_max_length"])
        and not rep["chain_conditioned_chi2"]["pass"]
        and rep["s3_chi2"]["pass"]
    )
    return _result("bias", "chain_conditional_bias", ok, t, backend=kernels.BACKEND, **rep)


SUITES: dict[str, list[Callable[[], dict]]] = {
    "exact": [
        check_bernoulli_exact,
        check_reservoir_uniform,
        check_seq_wr_exact,
        check_seq_wor_exact,
        check_ts_wr_exact,
        check_ts_wor_exact,
        check_gen_y,
        check_gen_x,
        check_compose,
        check_incr_identity,
        check_width_bound,
        check_fk_unbiased,
        check_fk_report,
    ],
    "independence": [check_seq_independence, check_ts_independence, check_reservoir_prefix_independence],
    "statistical": [check_bernoulli_frequency]
    + [lambda m=m, w=w, k=k: check_chi_square(m, w, k) for m, w, k in STAT_CONFIGS],
    "memory": [check_seq_memory, check_ts_memory],
    "bias": [check_bias],
}


def run_suite(name: str):
    """Yield check results for one suite, or for every suite with ``"all"``."""
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        for check in SUITES[n]:
            yield check()
