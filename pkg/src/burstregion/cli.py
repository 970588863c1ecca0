"""Command line entry point.

Replays an object stream (file, stdin, or a generated workload) through
one detector and prints a JSON line per result, or benchmarks several
detectors on the same stream.

Exit codes: 0 success, 2 bad input or arguments, 3 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Iterator, Optional, Sequence

from .bench import run_bench
from .engine import ALGOS, as_topk, make_detector
from .generate import GenConfig, default_workload, generate
from .model import Box, Query, SpatialObject
from .oracle import OracleGuardError
from .stream import ResultEmitter, StreamParseError, parse_stream, write_stream
from .window import EventScheduler, StreamOrderError

log = logging.getLogger("burstregion")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3


class InputError(Exception):
    pass


def parse_area(text: str) -> Box:
    try:
        x0, y0, x1, y1 = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--area expects x0,y0,x1,y1, got {text!r}") from None
    if not (x1 > x0 and y1 > y0):
        raise InputError(f"--area is empty: {text!r}")
    return Box(x0, y0, x1, y1)


def parse_emit(text: str) -> Optional[float]:
    """None for per-event output, else the interval in seconds."""
    if text == "per-event":
        return None
    if text.startswith("interval:"):
        try:
            v = float(text.split(":", 1)[1])
        except ValueError:
            v = -1.0
        if v > 0:
            return v
    raise InputError(f"--emit expects per-event or interval:<seconds>, got {text!r}")


def load_gen_config(text: str, seed: Optional[int]) -> GenConfig:
    if text == "default":
        gc = default_workload()
    elif os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            gc = GenConfig.from_json(fh.read())
    else:
        try:
            gc = GenConfig.from_json(text)
        except json.JSONDecodeError:
            raise InputError(f"--gen: {text!r} is neither a file nor JSON") from None
    if seed is not None:
        gc.seed = seed
    return gc


def follow_lines(path: str, poll: float = 0.2, idle_timeout: Optional[float] = None) -> Iterator[str]:
    """Lines of a growing file; stops after ``idle_timeout`` seconds without growth."""
    with open(path, encoding="utf-8") as fh:
        buf = ""
        idle = 0.0
        while True:
            chunk = fh.readline()
            if chunk:
                idle = 0.0
                buf += chunk
                if buf.endswith("\n"):
                    yield buf
                    buf = ""
                continue
            if idle_timeout is not None and idle >= idle_timeout:
                if buf:
                    yield buf
                return
            time.sleep(poll)
            idle += poll


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="burstregion", description=__doc__.split("\n\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("input", nargs="?", default="-", help="stream file (t,x,y,w or JSON lines); '-' for stdin")
    p.add_argument("--algo", default="ccs", help=f"one of {','.join(ALGOS)}; with --bench a comma list")
    p.add_argument("--width", type=float, help="region width b")
    p.add_argument("--height", type=float, help="region height a")
    p.add_argument("--window", type=float, help="window length in seconds")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--area", help="preferred area x0,y0,x1,y1")
    p.add_argument("--emit", default="per-event", help="per-event or interval:<seconds>")
    p.add_argument("--bound-mode", default="both", choices=["both", "static", "none"])
    p.add_argument("--gen", metavar="CONFIG", help="generate the input: JSON file, inline JSON, or 'default'")
    p.add_argument("--gen-only", action="store_true", help="write the generated stream and exit")
    p.add_argument("--bench", action="store_true", help="time the algorithms instead of printing results")
    p.add_argument("--warmup", type=int, default=0, help="untimed events at the start of a bench run")
    p.add_argument("--report", help="write the JSON bench report here")
    p.add_argument("--seed", type=int, help="seed for --gen (overrides the config)")
    p.add_argument("--follow", action="store_true", help="tail a growing input file")
    p.add_argument("--idle-timeout", type=float, help="with --follow: stop after this many idle seconds")
    p.add_argument("-o", "--output", help="write results here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _query(args) -> Query:
    missing = [f"--{n}" for n in ("width", "height", "window") if getattr(args, n) is None]
    if missing:
        raise InputError(f"missing {', '.join(missing)}")
    area = parse_area(args.area) if args.area else None
    try:
        return Query(width=args.width, height=args.height, window_len=args.window,
                     alpha=args.alpha, k=args.k, area=area)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _objects(args) -> Iterator[SpatialObject]:
    if args.gen:
        return iter(generate(load_gen_config(args.gen, args.seed)))
    if args.follow:
        if args.input == "-":
            raise InputError("--follow needs a file path")
        return parse_stream(follow_lines(args.input, idle_timeout=args.idle_timeout))
    if args.input == "-":
        return parse_stream(sys.stdin)
    if not os.path.exists(args.input):
        raise InputError(f"no such file: {args.input}")
    return parse_stream(args.input)


def _replay(args, q: Query, out) -> None:
    algo = args.algo
    if algo not in ALGOS:
        raise InputError(f"unknown --algo {algo!r}; choose from {', '.join(ALGOS)}")
    det = make_detector(algo, q, args.bound_mode)
    emitter = ResultEmitter(out, algo, parse_emit(args.emit))
    sched = EventScheduler(q)
    n = 0
    for o in _objects(args):
        for e in sched.feed(o):
            emitter.push(as_topk(det.update(e)))
            n += 1
    emitter.close()
    log.info("processed %d events, wrote %d lines", n, emitter.lines)


def _bench(args, q: Query, out) -> None:
    algos = args.algo.split(",")
    bad = [a for a in algos if a not in ALGOS]
    if bad:
        raise InputError(f"unknown algorithm(s): {', '.join(bad)}")
    rep = run_bench(list(_objects(args)), q, algos, args.bound_mode, args.warmup)
    out.write(rep.table() + "\n")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json())


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.gen_only:
            if not args.gen:
                raise InputError("--gen-only needs --gen")
            write_stream(_objects(args), out)
            return EXIT_OK
        q = _query(args)
        parse_emit(args.emit)  # reject a bad --emit before reading any input
        if args.bench:
            _bench(args, q, out)
        else:
            _replay(args, q, out)
        return EXIT_OK
    except (InputError, StreamParseError, StreamOrderError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    finally:
        if out is not sys.stdout:
            out.close()
        else:
            out.flush()


if __name__ == "__main__":
    sys.exit(main())
