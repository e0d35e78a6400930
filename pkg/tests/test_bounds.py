import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refbound import bounds as B
from refbound.bounds import BoundInputs, DomainError, FieldShape, LocalData

V = B.REFERENCE_VOLUME_CAP


def upper(n, omega2, m, h, v=V):
    return B.delta_upper_from_volume(FieldShape.reflection(n), BoundInputs(omega2, m, h, v))


def test_volume_cap_from_spectral_gap():
    v = B.agol_volume_cap(B.LRS_LAMBDA1)
    assert v / B.PI2 == pytest.approx(107.99, abs=0.01)
    assert math.ceil(v / B.PI2) == 108


def test_volume_cap_rejects_nonpositive_gap():
    with pytest.raises(DomainError):
        B.agol_volume_cap(0.0)


def test_h_cap_at_degree_20():
    assert B.h_cap_raw(20, V) == pytest.approx(332.72, abs=0.01)
    assert B.h_cap_from_volume(20, V) == 256


def test_h_cap_none_when_volume_too_large_for_degree():
    assert B.h_cap_raw(4, V) is None
    assert B.h_cap_from_volume(4, V) is None


def test_floor_pow2():
    assert [B.floor_pow2(x) for x in (0.5, 1, 1.9, 2, 255.9, 256, 332.7)] == [0, 1, 1, 2, 128, 256, 256]


@pytest.mark.parametrize(
    "omega2, m, h, expected",
    [(20, 19, 256, 31.6427), (2, 19, 256, 24.8095), (2, 10, 1, 16.7508)],
)
def test_degree20_upper_bounds(omega2, m, h, expected):
    assert upper(20, omega2, m, h) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("n", [20, 24, 30, 38])
def test_generic_formula_matches_direct(n):
    direct = upper(n, n, n - 1, 256)
    assert direct == pytest.approx(B.generic_delta_upper(n), rel=1e-12)
    assert direct == pytest.approx(B.REFERENCE_GENERIC_COEFF * B.REFERENCE_GENERIC_BASE ** (1 / n), rel=1e-3)


def test_reflection_shape_validation():
    assert FieldShape.reflection(20) == FieldShape(20, 18, 1)
    for bad in (3, 2, 21):
        with pytest.raises(DomainError):
            FieldShape.reflection(bad)
    with pytest.raises(DomainError):
        FieldShape(5, 2, 1)


def test_bound_inputs_validation():
    with pytest.raises(DomainError):
        BoundInputs(0, 0, 3).validate(20)
    with pytest.raises(DomainError):
        BoundInputs(0, 20, 1).validate(20)
    with pytest.raises(DomainError):
        BoundInputs(21, 0, 1).validate(20)


def test_local_data_merges_and_counts():
    loc = LocalData(((3, 1), (2, 2), (2, 1)))
    assert loc.primes == ((2, 3), (3, 1))
    assert loc.omega2 == 3
    with pytest.raises(DomainError):
        LocalData(((1, 1),))


def test_zeta2_and_ramified_product():
    assert B.zeta2_lower(LocalData()) == pytest.approx(1.0)
    assert B.ramified_product_lower(LocalData.norm2(2)) == pytest.approx(0.25)
    assert B.zeta2_lower(LocalData.norm2(1)) == pytest.approx(4 / 3)


def test_armitage_frohlich_cap():
    assert B.armitage_frohlich_m_cap(20) == 10
    assert B.armitage_frohlich_m_cap(20, 3) == 13
    assert B.armitage_frohlich_m_cap(4, 12) == 3


def test_regulator_special_degrees():
    assert B.regulator_lower(4) == pytest.approx(0.36)
    assert B.regulator_lower(6) == pytest.approx(1.23)
    assert B.regulator_lower(20) == pytest.approx(B.regulator_lower_generic(20))


def test_quartic_kappa_refinement_applies_above_gate():
    generic = lambda log_d: (math.e * log_d / 6.0) ** 3
    below, above = 4 * math.log(16.0), 4 * math.log(18.0)
    assert B.kappa_upper(4, below) == pytest.approx(generic(below))
    assert B.kappa_upper(4, above) < generic(above)


@settings(max_examples=200, deadline=None)
@given(log_d=st.floats(4 * math.log(17.0), 60.0))
def test_quartic_kappa_refinement_never_weaker(log_d):
    assert B.kappa_upper(4, log_d) <= (math.e * log_d / 6.0) ** 3


even_deg = st.integers(10, 30).map(lambda k: 2 * k)
log2_h = st.integers(0, 12)


@settings(max_examples=200, deadline=None)
@given(n=even_deg, w=st.integers(0, 60), m=st.integers(0, 59), k=log2_h,
       dw=st.integers(0, 5), dm=st.integers(0, 5), dk=st.integers(0, 4))
def test_delta_upper_monotone_in_every_input(n, w, m, k, dw, dm, dk):
    w, m = min(w, n - 5), min(m, n - 6)
    base = upper(n, w, m, 1 << k)
    assert upper(n, w + dw, m, 1 << k) >= base * (1 - 1e-12)
    assert upper(n, w, m + dm, 1 << k) >= base * (1 - 1e-12)
    assert upper(n, w, m, 1 << (k + dk)) >= base * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(n=even_deg, k=log2_h, t=st.floats(0.1, 10.0))
def test_delta_upper_scales_with_volume(n, k, t):
    # the volume bound is multiplicative: delta^(3n/2) is linear in V
    a = upper(n, n, n - 1, 1 << k, V)
    b = upper(n, n, n - 1, 1 << k, V * t)
    assert (b / a) ** (1.5 * n) == pytest.approx(t, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(lam1=st.floats(0.05, 1.0), extra=st.floats(0.0, 0.5))
def test_volume_cap_decreases_with_gap(lam1, extra):
    assert B.agol_volume_cap(lam1 + extra) <= B.agol_volume_cap(lam1)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 40).map(lambda k: 2 * k), a=st.floats(0.5, 12.0), b=st.floats(0.0, 4.0))
def test_class_number_cap_monotone_in_log_d(n, a, b):
    lo, hi = n * a, n * (a + b)
    assert B.log_h_upper_analytic(n, hi) >= B.log_h_upper_analytic(n, lo) - 1e-9
    assert B.kappa_upper(n, hi) >= B.kappa_upper(n, lo) * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 30).map(lambda k: 2 * k), a=st.floats(0.5, 8.0))
def test_closed_form_agrees_with_log_form(n, a):
    log_d = n * a
    assert math.log(B.h_upper_closed_form(n, log_d)) == pytest.approx(B.log_h_upper_analytic(n, log_d), rel=1e-9, abs=1e-9)
