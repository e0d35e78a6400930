"""Root-discriminant lower bounds by signature.

Two backends:

* an explicit-formula backend (Weil explicit formula for the Dedekind zeta
  function with Tartar's positive-definite kernel), which also accepts known
  small-norm primes and turns them into a sharper bound;
* a table backend reading a versioned text asset, generated offline by the
  first backend and carrying three frozen published anchors.

Plus the class-field-tower asymptotics and the Hilbert class field trick.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import DomainError, LocalData
from .reference import DISC_ANCHORS, DISC_TABLE_UNCONDITIONAL, TOWER_GRH, TOWER_UNCONDITIONAL

TABLE_VERSION = 1
TABLE_ENV = "REFBOUND_TABLE_PATH"

# integral of Tartar's function over [0, inf)
TARTAR_MASS = 3.0 * math.pi / 5.0

Y_GRID = (0.1, 20.0, 64)
Y_GRID_TABLE = (0.1, 60.0, 96)
GOLDEN_TOL = 1e-6
PRIME_TERM_FLOOR = 1e-15

QUAD_UPPER = 45.0
QUAD_PANEL = 0.25
QUAD_ORDER = 16


@dataclass(frozen=True)
class SignatureQuery:
    degree: int
    real_places: int
    complex_places: int

    def __post_init__(self):
        if self.degree < 1 or self.real_places < 0 or self.complex_places < 0:
            raise DomainError(f"invalid signature {self}")
        if self.degree != self.real_places + 2 * self.complex_places:
            raise DomainError(f"degree {self.degree} != r1 + 2 r2 for {self}")

    @classmethod
    def of(cls, q) -> "SignatureQuery":
        if isinstance(q, cls):
            return q
        if isinstance(q, tuple):
            return cls(*q)
        return cls(q.degree, q.real_places, q.complex_places)

    def scaled(self, k: int) -> "SignatureQuery":
        return SignatureQuery(self.degree * k, self.real_places * k, self.complex_places * k)


@dataclass(frozen=True)
class BoundResult:
    delta_min: float
    method: str  # table | poitou | asymptotic
    conditional: str = "unconditional"  # or GRH

    def __post_init__(self):
        if not self.delta_min >= 1.0:
            raise ValueError(f"root-discriminant bound below 1: {self.delta_min}")

    def __float__(self):
        return float(self.delta_min)


# explicit formula


def tartar(u):
    """(3 (sin u - u cos u) / u^3)^2, even, equal to 1 at the origin."""
    u = np.abs(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    small = u < 1e-2
    us = u[small] ** 2
    out[small] = (1.0 - us / 10.0 + us * us / 280.0) ** 2
    ub = u[~small]
    out[~small] = (3.0 * (np.sin(ub) - ub * np.cos(ub)) / ub**3) ** 2
    return out


def kernel(x, y: float):
    """F_y(x) = f(x/y) / cosh(x/2), written without overflow for large x."""
    x = np.asarray(x, dtype=float)
    return tartar(x / y) * 2.0 * np.exp(-0.5 * x) / (1.0 + np.exp(-x))


def _gauss_nodes():
    g, w = np.polynomial.legendre.leggauss(QUAD_ORDER)
    edges = np.arange(0.0, QUAD_UPPER + QUAD_PANEL / 2, QUAD_PANEL)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = (0.5 * (hi - lo) * g + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w).ravel()
    return x, wt


_X, _W = _gauss_nodes()
_EXP_HALF = np.exp(-0.5 * _X)
_EXP_2 = np.exp(-2.0 * _X)
_EXP_1 = np.exp(-_X)
_DEN_REAL = -np.expm1(-2.0 * _X)
_DEN_COMPLEX = -np.expm1(-_X)


def archimedean_terms(y: float) -> tuple[float, float, float]:
    """Pole term and per-place archimedean constants at kernel scale y.

    Returns (pole, real, complex) such that
    log d >= -pole - 2 r1 real - 2 r2 complex + 2 * (prime sum).
    """
    fx = kernel(_X, y)
    i_real = float(np.dot(_W, (_EXP_2 - _EXP_HALF * fx) / _DEN_REAL))
    i_complex = float(np.dot(_W, (_EXP_1 - _EXP_HALF * fx) / _DEN_COMPLEX))
    a_real = -0.5 * math.log(math.pi) + 0.5 * (-np.euler_gamma + 2.0 * i_real)
    a_complex = -math.log(2.0 * math.pi) + (-np.euler_gamma + i_complex)
    pole = 4.0 * y * TARTAR_MASS
    return pole, a_real, a_complex


def prime_sum(local: LocalData, y: float) -> float:
    total = 0.0
    for norm, count in local:
        ln = math.log(norm)
        # kernel <= 2 N^(-m/2), so each term is at most 2 ln N / N^m
        m_max = max(1, math.ceil((math.log(2.0 * ln) - math.log(PRIME_TERM_FLOOR)) / ln))
        m = np.arange(1, m_max + 1)
        terms = ln * kernel(m * ln, y) * np.exp(-0.5 * m * ln)
        total += count * float(terms.sum())
    return total


def explicit_log_bound(q: SignatureQuery, local: LocalData, y: float) -> float:
    """Lower bound for log of the root discriminant at a fixed kernel scale."""
    pole, a_real, a_complex = archimedean_terms(y)
    log_d = -pole - 2 * q.real_places * a_real - 2 * q.complex_places * a_complex
    if local.primes:
        log_d += 2.0 * prime_sum(local, y)
    return log_d / q.degree


def optimize_scale(q: SignatureQuery, local: LocalData, grid=Y_GRID) -> tuple[float, float]:
    """Maximize the explicit-formula bound over y: log grid then golden section."""
    ys = np.geomspace(grid[0], grid[1], grid[2])
    vals = np.array([explicit_log_bound(q, local, y) for y in ys])
    i = int(np.argmax(vals))
    best, best_y = float(vals[i]), float(ys[i])
    if 0 < i < len(ys) - 1:
        res = minimize_scalar(
            lambda t: -explicit_log_bound(q, local, math.exp(t)),
            bracket=(math.log(ys[i - 1]), math.log(ys[i]), math.log(ys[i + 1])),
            method="golden",
            tol=GOLDEN_TOL,
        )
        if -res.fun > best:
            best, best_y = float(-res.fun), float(math.exp(res.x))
    return best, best_y


@lru_cache(maxsize=8192)
def _poitou_cached(q: SignatureQuery, local: LocalData, grid) -> float:
    return optimize_scale(q, local, grid)[0]


def poitou_local_bound(q, local: LocalData | None = None, grid=Y_GRID) -> BoundResult:
    q = SignatureQuery.of(q)
    local = local if local is not None else LocalData()
    if local.omega2 > q.degree:
        raise DomainError("more norm-2 primes than the degree allows")
    log_delta = _poitou_cached(q, local, tuple(grid))
    if log_delta <= 0:
        return BoundResult(max(1.0, table_lookup(q).delta_min), "poitou")
    return BoundResult(math.exp(log_delta), "poitou")


# table backend


class DiscriminantTable:
    """Rows (degree, r1, r2, delta_min, source) with a dominated-row fallback.

    For every kernel scale the explicit-formula bound at a fixed real-place
    ratio is nondecreasing in the degree, and at fixed degree it is
    nondecreasing in the number of real places.  So a row (n, r1) bounds every
    signature (N, R1) with n <= N and r1 / n <= R1 / N.
    """

    def __init__(self, rows, version: int = TABLE_VERSION):
        rows = sorted(rows)
        self.version = version
        self.rows = rows
        self.exact = {(n, r1): (val, src) for n, r1, _, val, src in rows}
        self._deg = np.array([r[0] for r in rows], dtype=np.int64)
        self._r1 = np.array([r[1] for r in rows], dtype=np.int64)
        self._val = np.array([r[3] for r in rows], dtype=float)

    @classmethod
    def parse(cls, text: str) -> "DiscriminantTable":
        version = None
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# version"):
                    version = int(line.split()[-1])
                continue
            n, r1, r2, val, src = line.split(",")
            rows.append((int(n), int(r1), int(r2), float(val), src.strip()))
        if version != TABLE_VERSION:
            raise ValueError(f"unsupported discriminant table version {version}")
        return cls(rows, version)

    @classmethod
    def load(cls, path=None) -> "DiscriminantTable":
        path = path or os.environ.get(TABLE_ENV)
        if path:
            return cls.parse(Path(path).read_text())
        return cls.parse(resources.files("refbound.data").joinpath("odlyzko_table.txt").read_text())

    def dump(self) -> str:
        out = [f"# version {self.version}", "# degree,real_places,complex_places,delta_min,source"]
        out += [f"{n},{r1},{r2},{val:.6f},{src}" for n, r1, r2, val, src in self.rows]
        return "\n".join(out) + "\n"

    def lookup(self, q: SignatureQuery) -> float:
        hit = self.exact.get((q.degree, q.real_places))
        if hit is not None:
            return hit[0]
        mask = (self._deg <= q.degree) & (self._r1 * q.degree <= q.real_places * self._deg)
        if not mask.any():
            return 1.0
        return max(1.0, float(self._val[mask].max()))


_TABLE: DiscriminantTable | None = None


def default_table() -> DiscriminantTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = DiscriminantTable.load()
    return _TABLE


def set_table(table: DiscriminantTable | None) -> None:
    global _TABLE
    _TABLE = table
    _lookup_cached.cache_clear()


@lru_cache(maxsize=65536)
def _lookup_cached(q: SignatureQuery) -> float:
    return default_table().lookup(q)


def table_lookup(q) -> BoundResult:
    return BoundResult(_lookup_cached(SignatureQuery.of(q)), "table")


def hilbert_amplification(q, class_number: int) -> BoundResult:
    """Bound at the signature of an unramified extension of degree class_number.

    Unramified means the root discriminant is unchanged, so any lower bound at
    the scaled signature constrains the base field as well.
    """
    if class_number < 1:
        raise DomainError("class number must be >= 1")
    return table_lookup(SignatureQuery.of(q).scaled(class_number))


def asymptotic_tower_bound(degree: int, grh: bool = False) -> BoundResult:
    """Lower bound for one-complex-place fields with an infinite 2-class field tower."""
    if degree < 3:
        raise DomainError("degree must be >= 3")
    big, small = TOWER_GRH if grh else TOWER_UNCONDITIONAL
    val = big ** ((degree - 2) / degree) * small ** (2.0 / degree)
    return BoundResult(val, "asymptotic", "GRH" if grh else "unconditional")


def tower_window(degree: int, grh: bool = False):
    """(lower, upper) interval for the root discriminant when the tower is infinite.

    Lower end from the tower asymptotics, upper end from the unconditional
    degree table.  Returns None when the interval is empty.
    """
    if degree not in DISC_TABLE_UNCONDITIONAL:
        raise DomainError(f"tower window needs an even degree in [4, 18], got {degree}")
    lo = asymptotic_tower_bound(degree, grh).delta_min
    hi = float(DISC_TABLE_UNCONDITIONAL[degree])
    if lo > hi:
        return None
    return lo, hi


# offline generation of the table asset


def table_signatures(max_dense: int = 100) -> list[SignatureQuery]:
    sigs = set()
    for n in range(1, max_dense + 1):
        for r1 in range(n % 2, n + 1, 2):
            sigs.add((n, r1))
    pow2 = [1 << k for k in range(0, 25)]
    for n0 in range(4, 42, 2):
        for h in pow2 + [3 * p for p in pow2[:20]]:
            sigs.add((n0 * h, (n0 - 2) * h))
            sigs.add((n0 * h, 0))
    for k in range(0, 21):
        for n in [20 * (1 << j) for j in range(3, 22)]:
            sigs.add((n, 2 * (n * k // 40)))
    return [SignatureQuery(n, r1, (n - r1) // 2) for n, r1 in sorted(sigs)]


def build_table(max_dense: int = 100, progress=None) -> DiscriminantTable:
    rows = []
    sigs = table_signatures(max_dense)
    empty = LocalData()
    for i, q in enumerate(sigs):
        key = (q.degree, q.real_places, q.complex_places)
        if key in DISC_ANCHORS:
            rows.append((*key, DISC_ANCHORS[key], "published"))
            continue
        log_delta, _ = optimize_scale(q, empty, Y_GRID_TABLE)
        # floor at 6 decimals so the text asset never overstates a bound
        val = max(1.0, math.floor(math.exp(log_delta) * 1e6) / 1e6)
        rows.append((*key, val, "explicit"))
        if progress and i % 200 == 0:
            progress(i, len(sigs))
    return DiscriminantTable(rows)
