"""Reading object streams and writing result lines.

Input lines are either ``t,x,y,w`` or a JSON object with keys t/x/y/w.
Blank lines, ``#`` comments and a literal ``t,x,y,w`` header are skipped.
Output is one JSON object per line with the region in original
coordinates and scores rounded to 12 significant digits.
"""

from __future__ import annotations

import io
import json
import math
import os
from typing import IO, Iterable, Iterator, Optional, Union

from .model import BurstResult, SpatialObject, TopKResult
from .window import StreamOrderError

Source = Union[str, os.PathLike, IO[str], Iterable[str]]


class StreamParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def parse_record(line: str, lineno: int) -> tuple[float, float, float, float]:
    """``(t, x, y, w)`` from one line; raises :class:`StreamParseError`."""
    s = line.strip()
    try:
        if s.startswith("{"):
            d = json.loads(s)
            if not isinstance(d, dict):
                raise ValueError("expected a JSON object")
            missing = [key for key in "txyw" if key not in d]
            if missing:
                raise ValueError(f"missing key(s) {','.join(missing)}")
            vals = [d["t"], d["x"], d["y"], d["w"]]
            if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in vals):
                raise ValueError("t, x, y, w must be numbers")
            t, x, y, w = (float(v) for v in vals)
        else:
            parts = s.split(",")
            if len(parts) != 4:
                raise ValueError(f"expected 4 comma-separated fields, got {len(parts)}")
            t, x, y, w = (float(p) for p in parts)
    except (ValueError, json.JSONDecodeError) as exc:
        raise StreamParseError(lineno, str(exc)) from None
    if not all(math.isfinite(v) for v in (t, x, y, w)):
        raise StreamParseError(lineno, "non-finite value")
    if w < 0:
        raise StreamParseError(lineno, f"negative weight {w}")
    return t, x, y, w


def parse_stream(source: Source, start_id: int = 0) -> Iterator[SpatialObject]:
    """Objects in file order with sequential ids.

    Raises :class:`StreamParseError` on a malformed line and
    :class:`StreamOrderError` when a timestamp goes backwards.
    """
    last = -math.inf
    oid = start_id
    for lineno, line in enumerate(_lines(source), 1):
        s = line.strip()
        if not s or s.startswith("#") or s.replace(" ", "") == "t,x,y,w":
            continue
        t, x, y, w = parse_record(s, lineno)
        if t < last:
            raise StreamOrderError(f"line {lineno}: timestamp {t} is earlier than {last}")
        last = t
        yield SpatialObject(oid, w, x, y, t)
        oid += 1


def format_record(o: SpatialObject) -> str:
    # repr gives the shortest string that reads back to the same float
    return f"{o.t_c!r},{o.x!r},{o.y!r},{o.w!r}"


def write_stream(objects: Iterable[SpatialObject], sink: Union[str, os.PathLike, IO[str]]) -> int:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            return write_stream(objects, fh)
    n = 0
    for o in objects:
        sink.write(format_record(o) + "\n")
        n += 1
    return n


def r12(v: float) -> float:
    return float(f"{v:.12g}")


def result_dict(r: Union[TopKResult, BurstResult], algo: str = "") -> dict:
    if isinstance(r, BurstResult):
        r = TopKResult(r.t, [r])
    regions = []
    for b in r.regions:
        ent = {
            "x_min": r12(b.region.x_min),
            "y_min": r12(b.region.y_min),
            "x_max": r12(b.region.x_max),
            "y_max": r12(b.region.y_max),
            "score": r12(b.score),
            "rank": b.rank,
        }
        if not b.placed:
            ent["placed"] = False
        regions.append(ent)
    return {"t": r12(r.t), "algo": algo, "regions": regions}


def format_result(r: Union[TopKResult, BurstResult], algo: str = "") -> str:
    return json.dumps(result_dict(r, algo), separators=(",", ":"))


def emit_result(r: Union[TopKResult, BurstResult], sink: IO[str], algo: str = "") -> None:
    sink.write(format_result(r, algo) + "\n")


def parse_result(line: str) -> dict:
    return json.loads(line)


class ResultEmitter:
    """Writes results per event, or once per tick of ``interval`` seconds.

    In interval mode the line for tick ``T`` carries ``"t": T`` and the state
    after every event due at or before ``T``.
    """

    def __init__(self, sink: IO[str], algo: str = "", interval: Optional[float] = None):
        if interval is not None and not interval > 0:
            raise ValueError("emit interval must be positive")
        self.sink = sink
        self.algo = algo
        self.interval = interval
        self.lines = 0
        self._held: Optional[TopKResult] = None
        self._tick: Optional[float] = None

    def _write(self, r, t: Optional[float] = None) -> None:
        d = result_dict(r, self.algo)
        if t is not None:
            d["t"] = r12(t)
        self.sink.write(json.dumps(d, separators=(",", ":")) + "\n")
        self.lines += 1

    def push(self, r: Union[TopKResult, BurstResult]) -> None:
        if self.interval is None:
            self._write(r)
            return
        if self._tick is None:
            self._tick = math.ceil(r.t / self.interval) * self.interval
        while r.t > self._tick:
            if self._held is not None:
                self._write(self._held, self._tick)
            self._tick += self.interval
        self._held = r

    def close(self) -> None:
        if self.interval is not None and self._held is not None:
            self._write(self._held, self._tick)
            self._held = None
        self.sink.flush()


def read_results(text: Union[str, IO[str]]) -> list[dict]:
    fh = io.StringIO(text) if isinstance(text, str) else text
    return [parse_result(line) for line in fh if line.strip()]
