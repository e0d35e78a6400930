"""Closed-form covolume, class-number and regulator inequalities.

Everything here is a pure function of degree-level data: no field arithmetic
happens in this module, only bounds valid for every field of a given shape.
Volumes are plain reals internally; the CLI converts from multiples of pi^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

PI2 = math.pi**2
EIGHT_PI2 = 8.0 * PI2

#: relative slack applied before comparisons so rounding can never flip a verdict
OUTWARD = 1e-12

# Published rounded values, kept for cross-checks; verdicts recompute them.
REFERENCE_VOLUME_CAP = 108.0 * PI2
REFERENCE_GRC_VOLUME_CAP = 84.0 * PI2
REFERENCE_H_CAP_RAW = 333
REFERENCE_H_CAP = 256
REFERENCE_GENERIC_COEFF = 24.117
REFERENCE_GENERIC_BASE = 229.0

LRS_LAMBDA1 = 21.0 / 25.0

# Chinburg-Friedman volume lower bound, 0.69 exp(0.37 n - 19.08 / h)
CF_SCALE = 0.69
CF_SLOPE = 0.37
CF_H_COEFF = 19.08

# Friedman regulator bound and its small-degree improvements
REG_SCALE = 0.0062
REG_LINEAR = 0.241
REG_SHIFTED = 0.497
REG_SPECIAL = {4: 0.36, 6: 1.23}

QUARTIC_DELTA_GATE = 17.0


class DomainError(ValueError):
    """An argument lies outside the region where a bound is defined."""


def inflate(x: float) -> float:
    """Round an upper bound outward."""
    return x * (1.0 + OUTWARD)


def deflate(x: float) -> float:
    """Round a lower bound outward."""
    return x * (1.0 - OUTWARD)


@dataclass(frozen=True)
class FieldShape:
    degree: int
    real_places: int
    complex_places: int

    def __post_init__(self):
        if self.degree < 1 or self.real_places < 0 or self.complex_places < 0:
            raise DomainError(f"invalid signature {self}")
        if self.degree != self.real_places + 2 * self.complex_places:
            raise DomainError(f"degree {self.degree} != r1 + 2 r2 for {self}")

    @classmethod
    def reflection(cls, degree: int) -> "FieldShape":
        """Even degree >= 4 with exactly one complex place."""
        if degree < 4 or degree % 2:
            raise DomainError(f"reflection-group fields have even degree >= 4, got {degree}")
        return cls(degree, degree - 2, 1)


@dataclass(frozen=True)
class LocalData:
    """Multiset of prime norms, stored as (norm, count) pairs."""

    primes: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: dict[int, int] = {}
        for norm, count in self.primes:
            if norm < 2 or count < 1:
                raise DomainError(f"bad prime entry ({norm}, {count})")
            merged[int(norm)] = merged.get(int(norm), 0) + int(count)
        object.__setattr__(self, "primes", tuple(sorted(merged.items())))

    @classmethod
    def norm2(cls, count: int) -> "LocalData":
        return cls(((2, count),)) if count else cls()

    @property
    def omega2(self) -> int:
        return sum(c for n, c in self.primes if n == 2)

    def check_shape(self, shape: FieldShape) -> None:
        if self.omega2 > shape.degree:
            raise DomainError("more norm-2 primes than the degree allows")

    def __iter__(self) -> Iterable[tuple[int, int]]:
        return iter(self.primes)


@dataclass(frozen=True)
class BoundInputs:
    omega2: int
    unit_rank_m: int
    h_cap: int
    volume_cap: float = REFERENCE_VOLUME_CAP

    def validate(self, degree: int) -> None:
        if self.h_cap < 1 or self.h_cap & (self.h_cap - 1):
            raise DomainError(f"h_cap must be a power of 2, got {self.h_cap}")
        if not 0 <= self.unit_rank_m <= degree - 1:
            raise DomainError(f"unit rank m={self.unit_rank_m} outside [0, {degree - 1}]")
        if not 0 <= self.omega2 <= degree:
            raise DomainError(f"omega2={self.omega2} outside [0, {degree}]")
        if not self.volume_cap > 0:
            raise DomainError("volume cap must be positive")


def floor_pow2(x: float) -> int:
    """Largest power of two <= x, or 0 when x < 1."""
    if x < 1:
        return 0
    p = 1 << (int(x).bit_length() - 1)
    return p


def agol_volume_cap(lambda1: float) -> float:
    """Largest covolume allowed by Agol's eigenvalue inequality.

    lambda1 * (V/2)^(2/3) <= 3 (8 pi^2)^(2/3) solved for V.
    """
    if not lambda1 > 0:
        raise DomainError(f"lambda1 must be positive, got {lambda1}")
    return 2.0 * (3.0 / lambda1) ** 1.5 * EIGHT_PI2


def cf_volume_lower(degree: int, h_cap: float) -> float:
    if degree < 4 or h_cap < 1:
        raise DomainError("need degree >= 4 and h >= 1")
    return CF_SCALE * math.exp(CF_SLOPE * degree - CF_H_COEFF / h_cap)


def h_cap_raw(degree: int, volume_cap: float) -> float | None:
    """Real-valued cap on h(K,2,B) from inverting the Chinburg-Friedman bound.

    ``None`` when the inequality holds for every h (no information).
    """
    if degree < 4:
        raise DomainError("degree must be >= 4")
    slack = CF_SLOPE * degree - math.log(volume_cap / CF_SCALE)
    if slack <= 0:
        return None
    return CF_H_COEFF / slack


def h_cap_from_volume(degree: int, volume_cap: float) -> int | None:
    """Power-of-two cap on h(K,2,B), ``None`` if unbounded.

    A return of 0 means not even h = 1 is compatible with the volume cap.
    """
    raw = h_cap_raw(degree, volume_cap)
    if raw is None:
        return None
    return floor_pow2(inflate(raw))


def zeta2_lower(local: LocalData) -> float:
    out = 1.0
    for norm, count in local:
        out *= (1.0 / (1.0 - norm**-2.0)) ** count
    return out


def ramified_product_lower(local: LocalData) -> float:
    out = 1.0
    for norm, count in local:
        out *= ((norm - 1) / 2.0) ** count
    return out


def log_d_upper_from_volume(degree: int, inputs: BoundInputs) -> float:
    """Upper bound on log d_K from the covolume inequality with trivial local bounds."""
    n = degree
    log_rhs = (
        math.log(inputs.volume_cap / EIGHT_PI2)
        + n * math.log(EIGHT_PI2)
        + math.log(inputs.h_cap)
        + inputs.omega2 * math.log(1.5)
        + (1 + inputs.unit_rank_m - n) * math.log(2.0)
    )
    return 2.0 * log_rhs / 3.0


def delta_upper_from_volume(shape: FieldShape, inputs: BoundInputs) -> float:
    """Root-discriminant ceiling implied by the covolume cap.

    Solves 8 pi^2 (2/3)^w 2^(n-1-m) d^(3/2) / ((8 pi^2)^n h) <= V for d and
    returns d^(1/n).
    """
    inputs.validate(shape.degree)
    return math.exp(log_d_upper_from_volume(shape.degree, inputs) / shape.degree)


def generic_delta_upper(degree: int, h_cap: int = REFERENCE_H_CAP, volume_cap: float = REFERENCE_VOLUME_CAP) -> float:
    """Ceiling with the trivial caps omega2 = n and m = n - 1."""
    return delta_upper_from_volume(
        FieldShape.reflection(degree),
        BoundInputs(omega2=degree, unit_rank_m=degree - 1, h_cap=h_cap, volume_cap=volume_cap),
    )


def kappa_upper(degree: int, log_d: float) -> float:
    """Upper bound for the residue of the Dedekind zeta function at s = 1."""
    if degree < 4:
        raise DomainError("degree must be >= 4")
    n = degree
    if n == 4 and log_d / n >= math.log(QUARTIC_DELTA_GATE):
        return log_d ** (n - 1) / (2 ** (n - 1) * math.factorial(n - 1))
    return (math.e * log_d / (2.0 * (n - 1))) ** (n - 1)


def regulator_lower_generic(degree: int) -> float:
    return REG_SCALE * math.exp(REG_LINEAR * degree + REG_SHIFTED * (degree - 2))


def regulator_lower(degree: int) -> float:
    if degree < 4:
        raise DomainError("degree must be >= 4")
    return max(regulator_lower_generic(degree), REG_SPECIAL.get(degree, 0.0))


def h_upper_analytic(degree: int, log_d: float) -> float:
    """Cap on h(K,2,B) <= h_K from the analytic class number formula.

    h_K = kappa w sqrt(d) / (2 pi Reg 2^(n-2)) with w = 2, kappa and Reg replaced
    by their extreme admissible values.
    """
    n = degree
    w = 2.0
    return kappa_upper(n, log_d) * w * math.exp(log_d / 2.0) / (
        2.0 * math.pi * regulator_lower(n) * 2.0 ** (n - 2)
    )


def log_h_upper_analytic(degree: int, log_d: float) -> float:
    n = degree
    return (
        math.log(kappa_upper(n, log_d))
        + math.log(2.0)
        + log_d / 2.0
        - math.log(2.0 * math.pi * regulator_lower(n))
        - (n - 2) * math.log(2.0)
    )


def h_upper_closed_form(degree: int, log_d: float) -> float:
    """The same cap written out as separate generic, quartic and sextic closed forms."""
    n = degree
    sqrt_d = math.exp(log_d / 2.0)
    if n == 4 and log_d / n >= math.log(QUARTIC_DELTA_GATE):
        return sqrt_d * log_d ** (n - 1) / (0.36 * math.pi * 2 ** (2 * n - 3) * math.factorial(n - 1))
    if n == 6:
        return sqrt_d * (math.e * log_d) ** (n - 1) / (1.23 * math.pi * 2 ** (2 * n - 3) * (n - 1) ** (n - 1))
    reg = regulator_lower(n)
    return sqrt_d * (math.e * log_d) ** (n - 1) / (reg * math.pi * 2 ** (2 * n - 3) * (n - 1) ** (n - 1))


def armitage_frohlich_m_cap(degree: int, rank2: int = 0) -> int:
    """Cap on the rank of totally positive units modulo squares.

    With one complex place the narrow-to-wide class group index is 2^(m-1), so
    Armitage-Frohlich (narrow 2-rank minus 2-rank <= floor(r1/2)) gives
    m <= floor(n/2) + rank2, where rank2 is the 2-rank of the class group.
    """
    if degree < 4:
        raise DomainError("degree must be >= 4")
    return min(degree // 2 + max(rank2, 0), degree - 1)
