"""Totally real cubic fields counted through reduced binary cubic forms.

Cubic fields of discriminant D correspond bijectively to GL2(Z)-classes of
irreducible binary cubic forms of discriminant D satisfying the local
maximality conditions.  Each class with D > 0 has a representative with
a > 0 whose Hessian lies in the closed fundamental domain 0 <= Q <= P <= R;
boundary ties are broken by taking the lexicographically smallest
representative.

The domain is cut into work units (a, b); shards are index ranges over the
ordered unit list.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels as K
from .sieve import square_tables
from .stream import Checkpoint, CensusResult, Shard, plan_shards, run_shards, write_rows

KIND = "cubic"
EMIT_CAPACITY = 1 << 16


@dataclass(frozen=True)
class BinaryCubicForm:
    a: int
    b: int
    c: int
    d: int

    @property
    def disc(self) -> int:
        return cubic_form_disc((self.a, self.b, self.c, self.d))

    @property
    def hessian(self) -> tuple[int, int, int]:
        a, b, c, d = self.a, self.b, self.c, self.d
        return b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d


def cubic_form_disc(form) -> int:
    """18abcd + b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2, in exact integers."""
    a, b, c, d = (int(v) for v in form)
    return 18 * a * b * c * d + b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d


def work_units(disc_limit: int) -> np.ndarray:
    """Rows (a, b) in scan order covering every reduced form up to disc_limit."""
    rows = []
    for a in range(1, K.leading_max(disc_limit) + 1):
        bb = K.b_bound(a, disc_limit)
        for b in range(-bb, bb + 1):
            rows.append((a, b))
    return np.array(rows, dtype=np.int64).reshape(-1, 2)


def cubic_shards(disc_limit: int, spec=1) -> list[Shard]:
    units = work_units(disc_limit)
    return plan_shards(KIND, 0, len(units) - 1, spec)


class _Scanner:
    def __init__(self, disc_limit: int, emit_dir=None):
        self.limit = disc_limit
        self.units = work_units(disc_limit)
        self.tables = square_tables(disc_limit)
        self.gammas = K.small_gammas()
        self.emit_dir = emit_dir

    def runs(self, shard: Shard):
        """Group the shard's units into (a, b_lo, b_hi) runs."""
        sel = self.units[shard.lo : shard.hi + 1]
        out = []
        for a, b in sel:
            a, b = int(a), int(b)
            if out and out[-1][0] == a and out[-1][2] == b - 1:
                out[-1][2] = b
            else:
                out.append([a, b, b])
        return out

    def scan(self, a: int, b_lo: int, b_hi: int, emit: bool):
        bits, small, sq_n, sq_p = self.tables
        cap = EMIT_CAPACITY if emit else 0
        while True:
            out = np.zeros((cap, 5), dtype=np.int64)
            count, written = K.scan_forms(a, b_lo, b_hi, self.limit, bits, small, sq_n, sq_p,
                                          self.gammas, out, emit)
            if written <= cap:
                return int(count), out[:written] if emit else None
            cap = int(written)

    def __call__(self, shard: Shard, emit: bool):
        total = 0
        parts = []
        for a, b_lo, b_hi in self.runs(shard):
            count, rows = self.scan(a, b_lo, b_hi, emit)
            total += count
            if emit:
                parts.append(rows)
        if not emit:
            return total, None
        rows = np.concatenate(parts) if parts else np.zeros((0, 5), dtype=np.int64)
        if self.emit_dir is not None:
            write_rows(Path(self.emit_dir) / f"{KIND}_{shard.lo}_{shard.hi}.csv", rows)
        return total, rows


def census_cubic(disc_limit: int, shards=1, threads: int = 1, checkpoint=None, emit_dir=None, emit=False):
    scanner = _Scanner(disc_limit, emit_dir)
    plan = plan_shards(KIND, 0, len(scanner.units) - 1, shards)
    ck = Checkpoint(checkpoint, KIND, disc_limit) if checkpoint else None
    if emit_dir is not None:
        Path(emit_dir).mkdir(parents=True, exist_ok=True)
    return run_shards(plan, scanner, threads, ck, emit=emit or emit_dir is not None)


def default_shard_count(threads: int) -> int:
    return max(1, 16 * threads)


def count_totally_real_cubic(disc_limit: int, shards=None, threads: int = 1, checkpoint=None,
                             emit_dir=None) -> CensusResult:
    """Number of totally real cubic fields with discriminant <= disc_limit."""
    if disc_limit < 1:
        raise ValueError("disc_limit must be >= 1")
    t0 = time.perf_counter()
    if shards is None:
        shards = default_shard_count(threads)
    records = list(census_cubic(disc_limit, shards, threads, checkpoint, emit_dir))
    total = sum(r.count for r in records)
    return CensusResult(total, disc_limit, KIND, [r.as_tuple() for r in records],
                        seconds=time.perf_counter() - t0)


def cubic_forms(disc_limit: int) -> np.ndarray:
    """All emitted rows (disc, a, b, c, d) up to disc_limit, sorted by disc."""
    recs = list(census_cubic(disc_limit, 1, 1, emit=True))
    rows = np.concatenate([r.rows for r in recs]) if recs else np.zeros((0, 5), dtype=np.int64)
    return rows[np.lexsort(rows.T[::-1])]
