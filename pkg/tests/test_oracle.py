import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import archimedean_quad
from refbound import oracle as O
from refbound.bounds import DomainError, LocalData
from refbound.oracle import BoundResult, DiscriminantTable, SignatureQuery


def test_tartar_is_smooth_at_origin():
    u = np.array([0.0, 1e-4, 9.9e-3, 1.01e-2, 0.5])
    vals = O.tartar(u)
    assert vals[0] == 1.0
    assert np.all(np.diff(vals) < 0)
    assert abs(vals[2] - vals[3]) < 1e-4


def test_tartar_mass_matches_quadrature():
    from scipy.integrate import quad

    mass = quad(lambda u: float(O.tartar(u)), 0, np.inf, limit=2000)[0]
    assert mass == pytest.approx(O.TARTAR_MASS, rel=1e-6)


@pytest.mark.parametrize("y", [0.2, 1.0, 4.0, 15.0])
def test_archimedean_terms_match_adaptive_quadrature(y):
    fast = O.archimedean_terms(y)
    slow = archimedean_quad(y)
    assert fast == pytest.approx(slow, abs=1e-7)


def test_prime_sum_single_prime_by_hand():
    y, ln = 3.0, math.log(2.0)
    expect = sum(ln * float(O.kernel(m * ln, y)) * 2.0 ** (-m / 2) for m in range(1, 200))
    assert O.prime_sum(LocalData.norm2(1), y) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize(
    "sig, omega2, expected",
    [((20, 18, 1), 0, 20.010), ((20, 18, 1), 6, 33.885), ((20, 18, 1), 5, 30.996),
     ((20, 18, 1), 3, 25.975), ((38, 36, 1), 0, 29.023), ((40, 36, 2), 0, 28.437)],
)
def test_poitou_frozen_values(sig, omega2, expected):
    assert O.poitou_local_bound(sig, LocalData.norm2(omega2)).delta_min == pytest.approx(expected, abs=2e-3)


def test_poitou_is_a_valid_lower_bound_for_known_field():
    # the smallest totally real cubic field has discriminant 49
    assert O.poitou_local_bound((3, 3, 0)).delta_min < 49 ** (1 / 3)


def test_poitou_rejects_too_many_norm2_primes():
    with pytest.raises(DomainError):
        O.poitou_local_bound((4, 2, 1), LocalData.norm2(5))


def test_bound_result_never_below_one():
    with pytest.raises(ValueError):
        BoundResult(0.9, "table")


sig_strategy = st.integers(1, 30).flatmap(
    lambda r2: st.integers(0, 40).map(lambda r1: SignatureQuery(r1 + 2 * r2, r1, r2))
)
prime_norm = st.sampled_from([2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27])


@settings(max_examples=60, deadline=None)
@given(q=sig_strategy, base=st.lists(st.tuples(prime_norm, st.integers(1, 3)), max_size=3),
       extra=st.tuples(prime_norm, st.integers(1, 3)))
def test_poitou_monotone_under_added_primes(q, base, extra):
    a = LocalData(tuple(base))
    b = LocalData(tuple(base) + (extra,))
    if b.omega2 > q.degree:
        return
    assert O.poitou_local_bound(q, b).delta_min >= O.poitou_local_bound(q, a).delta_min * (1 - 1e-9)


# table


def test_anchor_rows_are_embedded_exactly():
    t = O.default_table()
    assert t.exact[(20, 18)] == (19.365, "published")
    assert t.exact[(38, 36)] == (28.730, "published")
    assert t.exact[(40, 36)] == (27.950, "published")


def test_lookup_prefers_exact_row_then_dominated_rows():
    rows = [(10, 0, 5, 5.0, "explicit"), (20, 0, 10, 7.0, "explicit"), (20, 20, 0, 9.0, "explicit")]
    t = DiscriminantTable(rows)
    assert t.lookup(SignatureQuery(20, 0, 10)) == 7.0
    assert t.lookup(SignatureQuery(30, 0, 15)) == 7.0
    assert t.lookup(SignatureQuery(30, 30, 0)) == 9.0
    assert t.lookup(SignatureQuery(4, 0, 2)) == 1.0


def test_table_round_trips_through_text():
    t = O.default_table()
    again = DiscriminantTable.parse(t.dump())
    assert again.rows == t.rows


def test_table_rejects_unknown_version():
    with pytest.raises(ValueError):
        DiscriminantTable.parse("# version 9\n4,0,2,3.0,explicit\n")


def test_table_values_stay_below_explicit_formula():
    t = O.default_table()
    rng = np.random.default_rng(7)
    dense = [r for r in t.rows if r[0] <= 100 and r[4] == "explicit"]
    for i in rng.choice(len(dense), 40, replace=False):
        n, r1, r2, val, _ = dense[i]
        assert O.poitou_local_bound((n, r1, r2)).delta_min >= val * 0.999


@settings(max_examples=200, deadline=None)
@given(q=sig_strategy, k=st.integers(1, 6))
def test_lookup_monotone_in_degree_at_fixed_ratio(q, k):
    assert O.table_lookup(q.scaled(k)).delta_min >= O.table_lookup(q).delta_min - 1e-9


def test_hilbert_amplification_uses_scaled_signature():
    assert O.hilbert_amplification((20, 18, 1), 2).delta_min == pytest.approx(27.950)
    with pytest.raises(DomainError):
        O.hilbert_amplification((20, 18, 1), 0)


def test_table_path_override(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("# version 1\n20,18,1,1.5,explicit\n")
    code = "from refbound.oracle import table_lookup; print(table_lookup((20, 18, 1)).delta_min)"
    env = {**os.environ, "REFBOUND_TABLE_PATH": str(path)}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert float(out.stdout) == 1.5


def test_set_table_swaps_backend():
    try:
        O.set_table(DiscriminantTable([(20, 18, 1, 2.5, "explicit")]))
        assert O.table_lookup((20, 18, 1)).delta_min == 2.5
    finally:
        O.set_table(None)
    assert O.table_lookup((20, 18, 1)).delta_min == 19.365


# tower window


def test_tower_window_degree18():
    lo, hi = O.tower_window(18)
    assert lo == pytest.approx(54.4416, abs=1e-3)
    assert hi == 346
    lo_grh, _ = O.tower_window(18, grh=True)
    assert lo_grh == pytest.approx(180.8468, abs=1e-3)


def test_tower_window_nonempty_for_every_table_degree():
    for n in range(4, 20, 2):
        lo, hi = O.tower_window(n, grh=True)
        assert lo < hi


def test_tower_window_out_of_range():
    with pytest.raises(DomainError):
        O.tower_window(20)
    with pytest.raises(DomainError):
        O.tower_window(5)


def test_tower_bound_formula():
    b = O.asymptotic_tower_bound(10).delta_min
    assert b == pytest.approx(60.8395 ** 0.8 * 22.3816 ** 0.2, rel=1e-12)
