"""Command-line interface: ``s3 sample | verify | bench | fk``.

Exit codes: 0 ok, 1 a verification check failed, 2 usage or data error.
Set ``S3_LOG`` (DEBUG, INFO, ...) for log output on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from collections import deque
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Iterator, TextIO

from .apps import FkEstimator, frequency_moment
from .baselines import ChainSampler, PeriodicSampler, PrioritySampler
from .core import Element, EmptyWindowError, S3Error, SeededSource, SequenceWindow, TimestampWindow
from .sequence import SeqSamplerWOR, SeqSamplerWR
from .timestamp import TsSamplerWOR, TsSamplerWR, memory_bound

log = logging.getLogger("s3stream")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITE_NAMES = ("exact", "statistical", "independence", "memory", "bias", "all")


class DataError(S3Error):
    """Malformed or out-of-order input."""


# -- input ---------------------------------------------------------------


def _parse_int(text: str, what: str) -> int:
    s = text.strip()
    body = s[1:] if s[:1] in "+-" else s
    if not body.isdigit():
        raise DataError(f"{what} must be an integer, got {text!r}")
    return int(s)


def _csv_records(lines: Iterator[str], mode: str) -> Iterator[tuple[int, int | None, object]]:
    width = None
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            fields = next(csv.reader([line]))
        except csv.Error as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if width is None:
            width = len(fields)
            if width not in (1, 2) or (width == 1 and mode == "timestamp"):
                expected = '"timestamp,value"' if mode == "timestamp" else '"value" or "timestamp,value"'
                raise DataError(f"line {lineno}: expected {expected}, got {len(fields)} field(s)")
        elif len(fields) != width:
            raise DataError(f"line {lineno}: expected {width} field(s), got {len(fields)}")
        try:
            if width == 1:
                yield lineno, None, fields[0]
            else:
                yield lineno, _parse_int(fields[0], "timestamp"), fields[1]
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from None


def _ndjson_records(lines: Iterator[str], mode: str) -> Iterator[tuple[int, int | None, object]]:
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DataError(f"line {lineno}: expected an object")
        extra = set(obj) - {"t", "v"}
        if extra:
            raise DataError(f"line {lineno}: unexpected keys {sorted(extra)}")
        if "v" not in obj:
            raise DataError(f'line {lineno}: missing "v"')
        t = obj.get("t")
        if t is None:
            if mode == "timestamp":
                raise DataError(f'line {lineno}: missing "t"')
        elif isinstance(t, bool) or not isinstance(t, int):
            raise DataError(f'line {lineno}: "t" must be an integer, got {t!r}')
        yield lineno, t, obj["v"]


def read_elements(stream: TextIO, fmt: str, mode: str) -> Iterator[Element]:
    """Parse ``stream`` strictly into indexed elements.

    Sequence input without timestamps gets ``timestamp = index``.
    """
    records = _csv_records(stream, mode) if fmt == "csv" else _ndjson_records(stream, mode)
    last = None
    for index, (lineno, t, v) in enumerate(records):
        if t is None:
            t = index
        if last is not None and t < last:
            raise DataError(f"line {lineno}: timestamp {t} decreases (previous {last})")
        last = t
        yield Element(index, t, v)


# -- output --------------------------------------------------------------


def _emit(out: TextIO, record: dict) -> None:
    out.write(json.dumps(record, separators=(",", ":")) + "\n")
    out.flush()


def _sample_dicts(samples) -> list[dict]:
    return [{"index": e.index, "timestamp": e.timestamp, "value": e.value} for e in samples]


@dataclass
class RunConfig:
    mode: str
    replacement: str
    k: int
    n: int | None
    t0: int | None
    seed: int
    emit_every: int
    input: str
    format: str
    audit: bool = False

    def validate(self) -> None:
        if self.k < 1:
            raise S3Error(f"k must be positive, got {self.k}")
        if self.emit_every < 1:
            raise S3Error(f"emit-every must be positive, got {self.emit_every}")
        if not 0 <= self.seed < 1 << 64:
            raise S3Error(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode == "sequence":
            if self.n is None or self.t0 is not None:
                raise S3Error("sequence mode needs --n and no --t0")
            SequenceWindow(self.n)
        else:
            if self.t0 is None or self.n is not None:
                raise S3Error("timestamp mode needs --t0 and no --n")
            TimestampWindow(self.t0)


def _open_input(path: str):
    if path == "-":
        return nullcontext(sys.stdin)
    return open(path, encoding="utf-8", newline="")


def run_sample(cfg: RunConfig, out: TextIO) -> int:
    cfg.validate()
    src = SeededSource(cfg.seed)
    wor = cfg.replacement == "without"
    if cfg.mode == "sequence":
        sampler = (SeqSamplerWOR if wor else SeqSamplerWR)(cfg.n, cfg.k)
    else:
        sampler = (TsSamplerWOR if wor else TsSamplerWR)(cfg.k, cfg.t0)
    audit = _Audit(sampler, wor) if cfg.audit else None
    with _open_input(cfg.input) as stream:
        elements = read_elements(stream, cfg.format, cfg.mode)
        if audit is not None:
            elements = audit.wrap(elements)
        if cfg.mode == "sequence":
            _sample_sequence(sampler, elements, cfg, src, out)
        else:
            _sample_timestamp(sampler, elements, cfg, src, out)
    if audit is None:
        return EXIT_OK
    report = audit.report()
    print(json.dumps(report, separators=(",", ":")), file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_FAIL


class _Audit:
    """Checks stored state against the worst-case bound after every arrival."""

    def __init__(self, sampler, wor: bool) -> None:
        self.sampler = sampler
        self.wor = wor
        self.peak = 0
        self.violation: int | None = None

    def _size_and_bound(self) -> tuple[int, int]:
        s = self.sampler
        if isinstance(s, (SeqSamplerWR, SeqSamplerWOR)):
            return s.stored_count(), 2 * s.k
        return s.memory_units(), memory_bound(s.k, s.N, self.wor)

    def wrap(self, elements):
        for e in elements:
            yield e
            # the consumer has observed e by the time it asks for the next one
            self._check(e.index)

    def _check(self, index: int) -> None:
        size, bound = self._size_and_bound()
        self.peak = max(self.peak, size)
        if self.violation is None and size > bound:
            self.violation = index

    def report(self) -> dict:
        _, bound = self._size_and_bound() if self.sampler.N else (0, 0)
        return {"arrivals": self.sampler.N, "max_memory_units": self.peak, "final_bound": bound,
                "violation_at": self.violation, "pass": self.violation is None}


def _sample_sequence(sampler, elements, cfg: RunConfig, src, out) -> None:
    for e in elements:
        sampler.observe(e, src)
        if sampler.N % cfg.emit_every == 0:
            _emit(out, {
                "t": e.timestamp,
                "N": sampler.N,
                "window": [sampler.window_start, sampler.N - 1],
                "samples": _sample_dicts(sampler.query(src)),
            })


def _sample_timestamp(sampler, elements, cfg: RunConfig, src, out) -> None:
    """Queries at ticks ``first + j * emit_every``, after all arrivals of that tick."""
    next_tick = None

    def flush(upto: int) -> None:
        nonlocal next_tick
        while next_tick <= upto:
            try:
                samples = sampler.query(src, next_tick)
            except EmptyWindowError:
                samples = []
            _emit(out, {
                "t": next_tick,
                "N": sampler.N,
                "window": [next_tick - cfg.t0 + 1, next_tick],
                "samples": _sample_dicts(samples),
            })
            next_tick += cfg.emit_every

    last = None
    for e in elements:
        if next_tick is None:
            next_tick = e.timestamp
        elif e.timestamp > last:
            flush(e.timestamp - 1)
        sampler.observe(e, src)
        last = e.timestamp
    if last is not None:
        flush(last)


# -- verify --------------------------------------------------------------


def _jsonable(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "numerator"):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def run_verify(suite: str, out: TextIO) -> int:
    from .verify.suites import run_suite

    ok = True
    for result in run_suite(suite):
        ok &= result["pass"]
        out.write(json.dumps(result, default=_jsonable, separators=(",", ":")) + "\n")
        out.flush()
    return EXIT_OK if ok else EXIT_FAIL


# -- bench ---------------------------------------------------------------


def _measure(name: str, sampler, elements, src, memory, query, advance=None) -> dict:
    peak = total = 0
    start = time.perf_counter()
    for e in elements:
        sampler.observe(e, src)
        query()
        m = memory()
        peak = max(peak, m)
        total += m
    elapsed = time.perf_counter() - start
    count = max(1, len(elements))
    return {"strategy": name, "max_memory": peak, "mean_memory": round(total / count, 4),
            "ns_per_element": round(1e9 * elapsed / count, 1)}


def bench_sequence(n: int, length: int, seed: int) -> list[dict]:
    elements = [Element(i, i, i) for i in range(length)]
    rows = []
    s3 = SeqSamplerWR(n, 1)
    src = SeededSource(seed)
    rows.append(_measure("s3_sequence", s3, elements, src, s3.stored_count, lambda: s3.query()))
    chain = ChainSampler(n)
    rows.append(_measure("chain", chain, elements, SeededSource(seed), chain.memory, chain.query))
    prio = PrioritySampler(SequenceWindow(n))
    rows.append(_measure("priority", prio, elements, SeededSource(seed), prio.memory, prio.query))
    src = SeededSource(seed)
    periodic = PeriodicSampler(n, src=src)

    def periodic_query():
        if periodic.sample is not None:
            periodic.query()

    rows.append(_measure("periodic", periodic, elements, src, periodic.memory, periodic_query))
    return rows


def bench_timestamp(t0: int, ticks: int, max_burst: int, seed: int) -> list[dict]:
    from .verify.workloads import burst_runs, runs_to_elements

    elements = list(runs_to_elements(*burst_runs(seed, ticks, max_burst)))
    s3 = TsSamplerWR(1, t0)
    src = SeededSource(seed)
    rows = [_measure("s3_timestamp", s3, elements, src, s3.memory_units, lambda: s3.query(src))]
    prio = PrioritySampler(TimestampWindow(t0))
    rows.append(_measure("priority", prio, elements, SeededSource(seed), prio.memory, prio.query))
    return rows


def format_table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def run_bench(args, out: TextIO) -> int:
    if not 0 <= args.seed < 1 << 64:
        raise S3Error(f"seed must be a 64-bit unsigned integer, got {args.seed}")
    report: dict = {"seed": args.seed, "mode": args.mode}
    if args.mode == "sequence":
        report["n"], report["length"] = args.n, args.length
        report["strategies"] = bench_sequence(args.n, args.length, args.seed)
    else:
        report["t0"], report["ticks"] = args.t0, args.ticks
        report["strategies"] = bench_timestamp(args.t0, args.ticks, args.max_burst, args.seed)
    if args.bias:
        from .verify.suites import bias_experiment

        seeds = tuple(args.seed + i for i in range(3))
        bias = bias_experiment(n=args.n, length=args.length, trials=args.bias_trials, seeds=seeds)
        report["bias"] = bias
    if args.kernels:
        from .kernels.compare import compare_backends

        report["kernels"] = compare_backends(args.kernel_trials)
    if args.json:
        text = json.dumps(report, default=_jsonable, indent=2) + "\n"
        if args.json == "-":
            out.write(text)
            return EXIT_OK
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(format_table(report["strategies"]) + "\n")
    if "bias" in report:
        b = report["bias"]
        out.write("\nconditional bias (chain length <= 2), n={}\n".format(b["n"]))
        out.write(format_table([
            {"strategy": "chain", "max_memory": max(b["chain_max_length"]),
             "chi2": round(b["chain_conditioned_chi2"]["statistic"], 2),
             "threshold": round(b["chain_conditioned_chi2"]["threshold"], 2),
             "uniform": b["chain_conditioned_chi2"]["pass"], "p0/pn": round(float(b["p0_over_pn"]), 3)},
            {"strategy": "s3_sequence", "max_memory": max(b["s3_max_slots"]),
             "chi2": round(b["s3_chi2"]["statistic"], 2), "threshold": round(b["s3_chi2"]["threshold"], 2),
             "uniform": b["s3_chi2"]["pass"], "p0/pn": ""},
        ]) + "\n")
    if "kernels" in report:
        out.write("\nkernel backends\n" + format_table(report["kernels"]) + "\n")
    return EXIT_OK


# -- fk ------------------------------------------------------------------


def run_fk(args, out: TextIO) -> int:
    if not 0 <= args.seed < 1 << 64:
        raise S3Error(f"seed must be a 64-bit unsigned integer, got {args.seed}")
    if args.emit_every < 1:
        raise S3Error(f"emit-every must be positive, got {args.emit_every}")
    est = FkEstimator(args.n, args.k_moment, args.r)
    src = SeededSource(args.seed)
    # reference window, only kept when the exact value is requested
    window: deque = deque(maxlen=args.n)
    with _open_input(args.input) as stream:
        for e in read_elements(stream, args.format, "sequence"):
            est.observe(e, src)
            if args.exact:
                window.append(e.value)
            if est.sampler.N % args.emit_every:
                continue
            record = {"t": e.timestamp, "N": est.sampler.N,
                      "window": [est.sampler.window_start, est.sampler.N - 1],
                      "estimate": float(est.query())}
            if args.exact:
                record["exact"] = frequency_moment(window, args.k_moment)
            _emit(out, record)
    return EXIT_OK


# -- entry point ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="s3", description="Uniform sampling over sliding windows.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample a stream, one NDJSON record per query")
    s.add_argument("--mode", choices=("sequence", "timestamp"), required=True)
    s.add_argument("--replacement", choices=("with", "without"), default="with")
    s.add_argument("-k", type=int, default=1, help="sample size")
    s.add_argument("--n", type=int, help="window length in arrivals (sequence mode)")
    s.add_argument("--t0", type=int, help="window length in ticks (timestamp mode)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--emit-every", type=int, default=1, help="query every this many arrivals (sequence) or ticks (timestamp)")
    s.add_argument("--format", choices=("csv", "ndjson"), default="csv")
    s.add_argument("--audit", action="store_true", help="check memory against the worst-case bound; report on stderr")
    s.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")

    v = sub.add_parser("verify", help="run verification suites, one JSON line per check")
    v.add_argument("suite", nargs="?", default="all", choices=SUITE_NAMES)

    b = sub.add_parser("bench", help="memory/time comparison against earlier samplers")
    b.add_argument("--mode", choices=("sequence", "timestamp"), default="sequence")
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--n", type=int, default=32)
    b.add_argument("--length", type=int, default=1_000_000)
    b.add_argument("--t0", type=int, default=64)
    b.add_argument("--ticks", type=int, default=5000)
    b.add_argument("--max-burst", type=int, default=50)
    b.add_argument("--bias", action="store_true", help="add the conditional-bias experiment")
    b.add_argument("--bias-trials", type=int, default=100_000)
    b.add_argument("--kernels", action="store_true", help="time compiled vs pure-Python kernels")
    b.add_argument("--kernel-trials", type=int, default=2000)
    b.add_argument("--json", metavar="PATH", help="also write the JSON report ('-' for stdout only)")

    f = sub.add_parser("fk", help="sliding-window frequency moment estimate")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--k-moment", type=int, default=2)
    f.add_argument("--r", type=int, default=100, help="independent estimators")
    f.add_argument("--seed", type=int, required=True)
    f.add_argument("--emit-every", type=int, default=1)
    f.add_argument("--exact", action="store_true", help="also report the exact value (buffers the window)")
    f.add_argument("--format", choices=("csv", "ndjson"), default="csv")
    f.add_argument("input", nargs="?", default="-")
    return p


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("S3_LOG")
    if level:
        try:
            logging.basicConfig(level=level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        except ValueError:
            print(f"s3: error: unknown S3_LOG level {level!r}", file=sys.stderr)
            return EXIT_USAGE
    args = build_parser().parse_args(argv)
    out = sys.stdout
    log.debug("command %s", args.command)
    try:
        if args.command == "sample":
            cfg = RunConfig(args.mode, args.replacement, args.k, args.n, args.t0, args.seed,
                            args.emit_every, args.input, args.format, args.audit)
            return run_sample(cfg, out)
        if args.command == "verify":
            return run_verify(args.suite, out)
        if args.command == "bench":
            return run_bench(args, out)
        return run_fk(args, out)
    except (S3Error, ValueError, OSError) as exc:
        print(f"s3: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
