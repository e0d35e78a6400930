"""Real quadratic fields counted through their fundamental discriminants."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from . import kernels as K
from .sieve import BLOCK, sieving_primes
from .stream import Checkpoint, CensusResult, Shard, plan_shards, run_shards, write_rows

KIND = "quadratic"
FIRST_DISC = 2


def is_fundamental(d: int) -> bool:
    """Direct test of the definition, used by the slow reference path."""
    if d <= 1:
        return False

    def squarefree(k):
        p = 2
        while p * p <= k:
            if k % (p * p) == 0:
                return False
            p += 1
        return True

    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        k = d // 4
        return k % 4 in (2, 3) and squarefree(k)
    return False


def quadratic_shards(disc_limit: int, spec=1) -> list[Shard]:
    return plan_shards(KIND, FIRST_DISC, max(disc_limit, FIRST_DISC - 1), spec)


def _worker(disc_limit: int, emit_dir):
    primes = sieving_primes(disc_limit)

    def work(shard: Shard, emit: bool):
        if emit:
            rows = K.list_fundamental(shard.lo, shard.hi, primes)
            if emit_dir is not None:
                write_rows(Path(emit_dir) / f"{KIND}_{shard.lo}_{shard.hi}.csv", rows)
            return int(rows.shape[0]), rows
        return int(K.count_fundamental(shard.lo, shard.hi, primes, BLOCK)), None

    return work


def census_quadratic(disc_limit: int, shards=1, threads: int = 1, checkpoint=None, emit_dir=None):
    """Stream per-shard records for the quadratic census."""
    plan = quadratic_shards(disc_limit, shards)
    ck = Checkpoint(checkpoint, KIND, disc_limit) if checkpoint else None
    if emit_dir is not None:
        Path(emit_dir).mkdir(parents=True, exist_ok=True)
    return run_shards(plan, _worker(disc_limit, emit_dir), threads, ck, emit=emit_dir is not None)


def count_real_quadratic(disc_limit: int, shards=1, threads: int = 1, checkpoint=None,
                         emit_dir=None) -> CensusResult:
    """Number of real quadratic fields with discriminant <= disc_limit."""
    if disc_limit < 1:
        raise ValueError("disc_limit must be >= 1")
    t0 = time.perf_counter()
    records = list(census_quadratic(disc_limit, shards, threads, checkpoint, emit_dir))
    total = sum(r.count for r in records)
    return CensusResult(total, disc_limit, KIND, [r.as_tuple() for r in records],
                        seconds=time.perf_counter() - t0)


def fundamental_discriminants(disc_limit: int) -> np.ndarray:
    if disc_limit < FIRST_DISC:
        return np.zeros(0, dtype=np.int64)
    return K.list_fundamental(FIRST_DISC, disc_limit, sieving_primes(disc_limit))
