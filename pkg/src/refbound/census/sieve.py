"""Prime lists and square-divisor lookup tables shared by both census kinds."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import kernels as K

BLOCK = 1 << 20


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def sieving_primes(limit: int) -> np.ndarray:
    return primes_upto(math.isqrt(max(limit, 1)) + 1)


@lru_cache(maxsize=4)
def square_tables(limit: int):
    """Everything the cubic scan needs to locate primes p with p^2 | disc <= limit.

    Returns (squarefree bitmap, small primes, sorted n, matching p) where the
    last two list every n <= limit divisible by p^2 for a prime
    p >= SMALL_PRIME_LIMIT.
    """
    primes = sieving_primes(limit)
    bits = K.pack_squarefree(limit, primes, BLOCK)
    small = primes[primes < K.SMALL_PRIME_LIMIT]
    big = primes[primes >= K.SMALL_PRIME_LIMIT]
    ns, ps = [], []
    for p in big:
        p2 = int(p) * int(p)
        if p2 > limit:
            break
        mult = np.arange(p2, limit + 1, p2, dtype=np.int64)
        ns.append(mult)
        ps.append(np.full(mult.shape, p, dtype=np.int64))
    if ns:
        n_arr = np.concatenate(ns)
        p_arr = np.concatenate(ps)
        order = np.argsort(n_arr, kind="stable")
        n_arr, p_arr = n_arr[order], p_arr[order]
    else:
        n_arr = np.zeros(0, dtype=np.int64)
        p_arr = np.zeros(0, dtype=np.int64)
    return bits, small, n_arr, p_arr
