"""Sharded, resumable execution of a census.

A census domain is an integer interval (discriminants for the quadratic
census, indices of (a, b) work units for the cubic one).  Shards are closed
sub-intervals that must tile the domain exactly.  Shards run on a thread pool;
results are merged in shard order so the outcome never depends on the worker
count or completion order.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np


class ConfigError(ValueError):
    """Bad shard layout or mismatched checkpoint."""


@dataclass(frozen=True)
class Shard:
    kind: str
    lo: int
    hi: int


@dataclass
class ShardRecord:
    shard: Shard
    count: int
    rows: np.ndarray | None = None
    resumed: bool = False

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.shard.lo, self.shard.hi, self.count)


@dataclass
class CensusResult:
    count: int
    disc_limit: int
    kind: str
    shards: list = field(default_factory=list)
    convention: str = "disc <= limit"
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "disc_limit": self.disc_limit,
            "count": self.count,
            "convention": self.convention,
            "shards": [list(s) for s in self.shards],
        }


def split_even(lo: int, hi: int, n: int) -> list[tuple[int, int]]:
    """Split [lo, hi] into at most n nonempty contiguous ranges of near-equal size."""
    size = hi - lo + 1
    if size <= 0:
        return []
    n = max(1, min(n, size))
    edges = [lo + (size * i) // n for i in range(n + 1)]
    return [(edges[i], edges[i + 1] - 1) for i in range(n)]


def plan_shards(kind: str, lo: int, hi: int, spec) -> list[Shard]:
    """Turn an int (shard count) or explicit ranges into validated shards."""
    if isinstance(spec, int):
        if spec < 1:
            raise ConfigError("shard count must be >= 1")
        ranges = split_even(lo, hi, spec)
    else:
        ranges = [(int(a), int(b)) for a, b in spec]
    ranges_sorted = sorted(ranges)
    for a, b in ranges_sorted:
        if a > b:
            raise ConfigError(f"empty shard [{a}, {b}]")
    for (a0, b0), (a1, b1) in zip(ranges_sorted, ranges_sorted[1:]):
        if a1 <= b0:
            raise ConfigError(f"overlapping shards [{a0}, {b0}] and [{a1}, {b1}]")
        if a1 != b0 + 1:
            raise ConfigError(f"gap between shards [{a0}, {b0}] and [{a1}, {b1}]")
    if hi >= lo and ranges_sorted and (ranges_sorted[0][0] != lo or ranges_sorted[-1][1] != hi):
        raise ConfigError(f"shards do not cover [{lo}, {hi}]")
    return [Shard(kind, a, b) for a, b in ranges_sorted]


class Checkpoint:
    """Append-only log of finished shards: `kind,range_lo,range_hi,count` per line."""

    def __init__(self, path, kind: str, limit: int):
        self.path = Path(path)
        self.kind = kind
        self.limit = limit
        self.done: dict[tuple[int, int], int] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            self._read()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(f"# limit {limit}\n")

    def _read(self) -> None:
        for line in self.path.read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "limit" and int(parts[1]) != self.limit:
                    raise ConfigError(f"checkpoint {self.path} was written for limit {parts[1]}")
                continue
            kind, lo, hi, count = line.split(",")
            if kind != self.kind:
                raise ConfigError(f"checkpoint {self.path} holds {kind} shards")
            self.done[(int(lo), int(hi))] = int(count)

    def check_plan(self, shards: Sequence[Shard]) -> None:
        planned = {(s.lo, s.hi) for s in shards}
        stray = set(self.done) - planned
        if stray:
            raise ConfigError(f"checkpoint shards {sorted(stray)[:3]} do not match the shard plan")

    def record(self, shard: Shard, count: int) -> None:
        with self._lock, open(self.path, "a") as fh:
            fh.write(f"{shard.kind},{shard.lo},{shard.hi},{count}\n")
            fh.flush()
            os.fsync(fh.fileno())


def write_rows(path, rows: np.ndarray) -> None:
    """CSV without header, sorted by the first column then the rest."""
    if rows.ndim == 1:
        rows = np.sort(rows)
        text = "".join(f"{int(v)}\n" for v in rows)
    else:
        order = np.lexsort(rows.T[::-1])
        rows = rows[order]
        text = "".join(",".join(str(int(v)) for v in r) + "\n" for r in rows)
    Path(path).write_text(text)


def run_shards(
    shards: Sequence[Shard],
    worker: Callable[[Shard, bool], tuple[int, np.ndarray | None]],
    threads: int = 1,
    checkpoint: Checkpoint | None = None,
    emit: bool = False,
) -> Iterator[ShardRecord]:
    """Yield one record per shard, in shard order."""
    if checkpoint is not None:
        checkpoint.check_plan(shards)

    def job(shard: Shard) -> ShardRecord:
        key = (shard.lo, shard.hi)
        if checkpoint is not None and key in checkpoint.done and not emit:
            return ShardRecord(shard, checkpoint.done[key], None, True)
        count, rows = worker(shard, emit)
        if checkpoint is not None and key not in checkpoint.done:
            checkpoint.record(shard, count)
        return ShardRecord(shard, count, rows)

    if threads <= 1:
        for s in shards:
            yield job(s)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(job, shards)
