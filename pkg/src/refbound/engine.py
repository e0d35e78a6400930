"""Constraint propagation that squeezes the root discriminant of a candidate field.

A run keeps caps on the norm-2 prime count, the totally-positive unit rank m,
h(K,2,B), the class number and the 2-rank of the class group.  Each step uses
a discriminant lower bound to shrink one cap, which lowers the volume-derived
upper bound; a degree is excluded once the upper bound falls below the table
lower bound for its signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import bounds as B
from .bounds import BoundInputs, DomainError, FieldShape, LocalData
from .oracle import SignatureQuery, poitou_local_bound, table_lookup
from .reference import DIM2_TOTALLY_REAL_DEGREE, TRANSITION_DIMENSION_BOUND

MARGIN = 1e-6
MAX_ROUNDS = 50
MAX_AMPLIFICATION = 1 << 20
RANK12_H_CAP = 1 << 12

FIXED_POINT_SEED = 200.0
FIXED_POINT_TOL = 1e-9
FIXED_POINT_MAX_ITER = 200


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TraceStep:
    name: str
    values: dict

    def as_dict(self) -> dict:
        return {"step": self.name, **self.values}


@dataclass
class ConstraintState:
    degree: int
    h_cap: int | None
    hK_cap: int | None
    omega2_cap: int
    m_cap: int
    delta_upper: float
    volume_cap: float = B.REFERENCE_VOLUME_CAP
    rank2_cap: int | None = None
    trace: list = field(default_factory=list)

    @property
    def shape(self) -> FieldShape:
        return FieldShape.reflection(self.degree)

    def upper_for(self, omega2=None, m=None, h=None) -> float:
        inputs = BoundInputs(
            omega2=self.omega2_cap if omega2 is None else omega2,
            unit_rank_m=self.m_cap if m is None else m,
            h_cap=self.h_cap if h is None else h,
            volume_cap=self.volume_cap,
        )
        return B.inflate(B.delta_upper_from_volume(self.shape, inputs))

    def refresh(self) -> float:
        self.delta_upper = min(self.delta_upper, self.upper_for())
        return self.delta_upper

    def record(self, name: str, **values) -> None:
        self.trace.append(TraceStep(name, {**values, "delta_upper": self.delta_upper}))

    def key(self):
        return (self.h_cap, self.hK_cap, self.omega2_cap, self.m_cap, self.rank2_cap)

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "h_cap": self.h_cap,
            "hK_cap": self.hK_cap,
            "omega2_cap": self.omega2_cap,
            "m_cap": self.m_cap,
            "rank2_cap": self.rank2_cap,
            "delta_upper": self.delta_upper,
            "volume_cap": self.volume_cap,
            "trace": [t.as_dict() for t in self.trace],
        }


@dataclass
class Verdict:
    outcome: str  # Excluded | Inconclusive
    final_state: ConstraintState
    witness: tuple[float, float] | None = None

    @property
    def excluded(self) -> bool:
        return self.outcome == "Excluded"

    def as_dict(self) -> dict:
        return {"outcome": self.outcome, "witness": self.witness, "state": self.final_state.as_dict()}


def separated(upper: float, lower: float) -> bool:
    return upper * (1.0 + MARGIN) < lower


def signature_lower(degree: int) -> float:
    return B.deflate(table_lookup((degree, degree - 2, 1)).delta_min)


# propagation steps; each returns True when it changed a cap


def omega2_descent(st: ConstraintState) -> bool:
    """Drop the norm-2 cap below the first count whose local bound beats the ceiling."""
    changed = False
    q = SignatureQuery(st.degree, st.degree - 2, 1)
    while st.omega2_cap > 0:
        upper = st.delta_upper
        cut = None
        for t in range(1, st.omega2_cap + 1):
            lower = B.deflate(poitou_local_bound(q, LocalData.norm2(t)).delta_min)
            if lower > upper:
                cut = (t, lower)
                break
        if cut is None:
            break
        st.omega2_cap = cut[0] - 1
        st.refresh()
        st.record("omega2-descent", cut_at=cut[0], local_bound=cut[1], upper_before=upper,
                  omega2_cap=st.omega2_cap)
        changed = True
    return changed


def _first_exceeding(f, upper: float, lim: int) -> int | None:
    """Some k >= 2 with f(k) > upper, as small as bisection finds, or None."""
    if f(lim) <= upper:
        return None
    k = 2
    while f(k) <= upper:
        k *= 2
    lo, hi = k // 2, k
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f(mid) > upper:
            hi = mid
        else:
            lo = mid
    return hi if hi >= 2 else 2


def class_number_step(st: ConstraintState) -> bool:
    """Cap h_K through the Hilbert class field, then the 2-rank and h(K,2,B).

    If the table bound at degree n*k already exceeds the ceiling, so does the
    bound at every larger multiple (the dominated-row envelope grows with k),
    hence h_K < k.
    """
    q = SignatureQuery(st.degree, st.degree - 2, 1)
    upper = st.delta_upper
    f = lambda k: B.deflate(table_lookup(q.scaled(k)).delta_min)
    k = _first_exceeding(f, upper, MAX_AMPLIFICATION)
    if k is None:
        return False
    hk = k - 1
    if st.hK_cap is not None and hk >= st.hK_cap:
        return False
    st.hK_cap = hk
    rank = hk.bit_length() - 1
    if st.rank2_cap is None or rank < st.rank2_cap:
        st.rank2_cap = rank
    if st.h_cap is None or (1 << st.rank2_cap) < st.h_cap:
        st.h_cap = 1 << st.rank2_cap
    st.refresh()
    st.record("class-number", amplified_degree=st.degree * k, amplified_bound=f(k),
              upper_before=upper, hK_cap=hk, rank2_cap=st.rank2_cap, h_cap=st.h_cap)
    return True


def armitage_frohlich_step(st: ConstraintState) -> bool:
    if st.rank2_cap is None:
        return False
    cap = B.armitage_frohlich_m_cap(st.degree, st.rank2_cap)
    if cap >= st.m_cap:
        return False
    upper = st.delta_upper
    st.m_cap = cap
    st.refresh()
    st.record("armitage-frohlich", upper_before=upper, rank2_cap=st.rank2_cap, m_cap=cap)
    return True


def narrow_class_step(st: ConstraintState) -> bool:
    """Cap m through the narrow Hilbert class field.

    The narrow class number is h_K 2^(m-1), and the narrow class field is
    unramified at finite primes, so it has the same root discriminant and
    degree at least n 2^(m-1); the totally complex bound at that degree
    (weakest signature) applies.
    """
    changed = False
    while st.m_cap > 1:
        big = st.degree << (st.m_cap - 1)
        lower = B.deflate(table_lookup((big, 0, big // 2)).delta_min)
        upper = st.delta_upper
        if lower <= upper:
            break
        st.m_cap -= 1
        st.refresh()
        st.record("narrow-class-field", amplified_degree=big, amplified_bound=lower,
                  upper_before=upper, m_cap=st.m_cap)
        changed = True
    return changed


STEPS = (omega2_descent, class_number_step, armitage_frohlich_step, narrow_class_step)


def propagate(st: ConstraintState, stop_when_excluded: bool = True) -> ConstraintState:
    lower = signature_lower(st.degree)
    for _ in range(MAX_ROUNDS):
        before = st.key()
        for step in STEPS:
            step(st)
            if stop_when_excluded and separated(st.delta_upper, lower):
                return st
        if st.key() == before:
            break
    return st


def analytic_fixed_point(degree: int, volume_cap: float = B.REFERENCE_VOLUME_CAP, omega2=None, m=None,
                         seed: float = FIXED_POINT_SEED):
    """Largest log d consistent with the volume bound and the analytic class-number cap.

    Iterates log d <- (2/3)[log(V/8pi^2) + n log 8pi^2 + w log 3/2
    + (1+m-n) log 2 + log h_max(log d)].  Returns (log_d, history).
    """
    n = degree
    w = n if omega2 is None else omega2
    m = n - 1 if m is None else m
    const = (
        math.log(volume_cap / B.EIGHT_PI2)
        + n * math.log(B.EIGHT_PI2)
        + w * math.log(1.5)
        + (1 + m - n) * math.log(2.0)
    )
    x = seed
    history = [x]
    for _ in range(FIXED_POINT_MAX_ITER):
        nxt = 2.0 * (const + B.log_h_upper_analytic(n, x)) / 3.0
        history.append(nxt)
        if abs(nxt - x) < FIXED_POINT_TOL:
            return nxt, history
        x = nxt
    raise ConvergenceError(f"fixed point for degree {n} did not converge")


def initial_state(degree: int, volume_cap: float, h_cap=None, rank2_cap=None) -> ConstraintState:
    st = ConstraintState(degree=degree, h_cap=h_cap, hK_cap=None, omega2_cap=degree, m_cap=degree - 1,
                         delta_upper=math.inf, volume_cap=volume_cap, rank2_cap=rank2_cap)
    return st


def exclude_degree(degree: int, volume_cap: float = B.REFERENCE_VOLUME_CAP) -> Verdict:
    if degree % 2 or degree < 20:
        raise DomainError(f"exclusion runs need an even degree >= 20, got {degree}")
    if not volume_cap > 0:
        raise DomainError("volume cap must be positive")
    raw = B.h_cap_raw(degree, volume_cap)
    h_cap = B.h_cap_from_volume(degree, volume_cap)
    st = initial_state(degree, volume_cap, h_cap)
    lower = signature_lower(degree)
    if h_cap == 0:
        # even h(K,2,B) = 1 violates the volume lower bound
        st.delta_upper = B.delta_upper_from_volume(st.shape, BoundInputs(degree, degree - 1, 1, volume_cap))
        st.record("volume-h-cap", h_cap_raw=raw, h_cap=0)
        return Verdict("Excluded", st, (B.cf_volume_lower(degree, 1), volume_cap))
    if h_cap is None:
        log_d, _ = analytic_fixed_point(degree, volume_cap)
        st.h_cap = max(1, B.floor_pow2(B.h_upper_analytic(degree, log_d)))
        st.record("analytic-h-cap", log_d=log_d, h_cap=st.h_cap)
    else:
        st.record("volume-h-cap", h_cap_raw=raw, h_cap=h_cap)
    st.refresh()
    st.record("volume-bound", omega2_cap=st.omega2_cap, m_cap=st.m_cap, h_cap=st.h_cap)
    if not separated(st.delta_upper, lower):
        propagate(st)
    if separated(st.delta_upper, lower):
        return Verdict("Excluded", st, (st.delta_upper, lower))
    return Verdict("Inconclusive", st)


@dataclass
class MaxDegreeResult:
    degree: int | None
    volume_cap: float
    verdicts: dict
    generic: dict
    warnings: list

    @property
    def totally_real_degree(self) -> int | None:
        return None if self.degree is None else self.degree // 2

    def __int__(self):
        if self.degree is None:
            raise ValueError("no degree bound")
        return self.degree


GENERIC_DEGREE = 38


def generic_argument(volume_cap: float = B.REFERENCE_VOLUME_CAP) -> dict:
    """One comparison that rules out every degree >= 38 at once.

    The cap on h(K,2,B) only shrinks as the degree grows, and with trivial
    caps the ceiling is C * K^(1/n) with C = (12 pi^2)^(2/3), so its supremum
    over n >= 38 is max(ceiling(38), C).  The lower bound along the
    one-complex-place family only grows.
    """
    n = GENERIC_DEGREE
    h = B.h_cap_from_volume(n, volume_cap)
    out = {"degree": n, "h_cap": h, "volume_cap": volume_cap}
    lower = signature_lower(n)
    out["delta_lower"] = lower
    if h is None:
        out.update(delta_upper=math.inf, holds=False)
        return out
    h = max(h, 1)
    upper = B.inflate(max(B.generic_delta_upper(n, h, volume_cap), (12 * B.PI2) ** (2.0 / 3.0)))
    out.update(delta_upper=upper, holds=separated(upper, lower))
    return out


def max_degree(volume_cap: float = B.REFERENCE_VOLUME_CAP) -> MaxDegreeResult:
    if not volume_cap > 0:
        raise DomainError("volume cap must be positive")
    verdicts = {n: exclude_degree(n, volume_cap) for n in range(20, GENERIC_DEGREE, 2)}
    generic = generic_argument(volume_cap)
    warnings = []
    if not generic["holds"]:
        warnings.append(f"generic argument fails at degree {GENERIC_DEGREE}; no degree bound")
        return MaxDegreeResult(None, volume_cap, verdicts, generic, warnings)
    open_degrees = [n for n, v in verdicts.items() if not v.excluded]
    if open_degrees:
        warnings.append(f"degrees {open_degrees} not excluded")
        return MaxDegreeResult(max(open_degrees), volume_cap, verdicts, generic, warnings)
    return MaxDegreeResult(18, volume_cap, verdicts, generic, warnings)


@dataclass
class TableRow:
    degree: int
    mode: str
    delta_upper: float
    iterations: int = 0
    state: ConstraintState | None = None

    @property
    def rounded(self) -> int:
        return math.ceil(self.delta_upper - 1e-9)


DISC_TABLE_DEGREES = tuple(range(4, 20, 2))
RANK12_TABLE_DEGREES = tuple(range(4, 14, 2))


def disc_table_row(degree: int, mode: str = "unconditional", volume_cap: float = B.REFERENCE_VOLUME_CAP) -> TableRow:
    if mode == "unconditional":
        if degree not in DISC_TABLE_DEGREES:
            raise DomainError(f"unconditional table covers even degrees 4..18, got {degree}")
        log_d, hist = analytic_fixed_point(degree, volume_cap)
        return TableRow(degree, mode, B.inflate(math.exp(log_d / degree)), len(hist) - 1)
    if mode == "rank12":
        if degree % 2 or not 4 <= degree <= 18:
            raise DomainError(f"rank-12 runs cover even degrees 4..18, got {degree}")
        st = initial_state(degree, volume_cap, RANK12_H_CAP, rank2_cap=12)
        st.refresh()
        st.record("rank12-start", h_cap=RANK12_H_CAP, rank2_cap=12)
        propagate(st, stop_when_excluded=False)
        return TableRow(degree, mode, st.delta_upper, len(st.trace), st)
    raise DomainError(f"unknown mode {mode!r}")


def disc_table(degree: int, mode: str = "unconditional", volume_cap: float = B.REFERENCE_VOLUME_CAP) -> float:
    if mode == "rank12" and degree not in RANK12_TABLE_DEGREES:
        raise DomainError(f"rank-12 table covers even degrees 4..12, got {degree}")
    return disc_table_row(degree, mode, volume_cap).delta_upper


def rank12_verdict(degree: int) -> Verdict:
    row = disc_table_row(degree, "rank12")
    lower = signature_lower(degree)
    if separated(row.delta_upper, lower):
        return Verdict("Excluded", row.state, (row.delta_upper, lower))
    return Verdict("Inconclusive", row.state)


def rank12_max_degree() -> int:
    """Largest even degree <= 18 that survives when the class group has 2-rank <= 12."""
    survivors = [n for n in DISC_TABLE_DEGREES if not rank12_verdict(n).excluded]
    return max(survivors) if survivors else 2


def combined_dimension_bound(dim3_bound: int | None = None) -> dict:
    """Bound on the totally real field degree over all dimensions."""
    if dim3_bound is None:
        dim3_bound = max_degree().totally_real_degree
    inputs = {
        "dimension_2": DIM2_TOTALLY_REAL_DEGREE,
        "dimension_3": dim3_bound,
        "transition": TRANSITION_DIMENSION_BOUND,
    }
    return {"bound": max(inputs.values()), "inputs": inputs}
