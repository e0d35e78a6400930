import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refbound import bounds as B
from refbound import engine as E
from refbound.bounds import DomainError

V = B.REFERENCE_VOLUME_CAP


@pytest.fixture(scope="module")
def deg20():
    return E.exclude_degree(20)


def steps(verdict, name):
    return [t for t in verdict.final_state.trace if t.name == name]


def test_degree20_is_excluded(deg20):
    assert deg20.excluded
    upper, lower = deg20.witness
    assert upper == pytest.approx(16.7508, abs=1e-3)
    assert lower == pytest.approx(19.365, rel=1e-9)


def test_degree20_trace_order(deg20):
    names = [t.name for t in deg20.final_state.trace]
    assert names[:2] == ["volume-h-cap", "volume-bound"]
    assert names.index("omega2-descent") < names.index("class-number")
    assert names.index("class-number") < names.index("armitage-frohlich")


def test_degree20_intermediate_values(deg20):
    st = deg20.final_state
    assert st.trace[1].values["delta_upper"] == pytest.approx(31.6427, abs=1e-3)
    cuts = steps(deg20, "omega2-descent")
    assert cuts[0].values["cut_at"] == 6
    assert cuts[0].values["local_bound"] == pytest.approx(33.885, abs=2e-3)
    assert st.omega2_cap == 2
    cn = steps(deg20, "class-number")[0]
    assert cn.values["amplified_degree"] == 40
    assert cn.values["amplified_bound"] == pytest.approx(27.950)
    assert st.hK_cap == 1 and st.h_cap == 1
    assert st.m_cap == 10


def test_every_degree_20_to_36_excluded():
    for n in range(20, 38, 2):
        assert E.exclude_degree(n).excluded, n


def test_max_degree():
    res = E.max_degree()
    assert res.degree == 18
    assert res.totally_real_degree == 9
    assert res.generic["holds"]
    assert res.warnings == []


def test_generic_argument_values():
    g = E.generic_argument()
    assert g["h_cap"] == 2
    assert g["delta_upper"] == pytest.approx(25.5524, abs=1e-3)
    assert g["delta_lower"] == pytest.approx(28.73, rel=1e-9)


def test_exclude_rejects_bad_degrees():
    for n in (19, 18, 4, 0):
        with pytest.raises(DomainError):
            E.exclude_degree(n)
    with pytest.raises(DomainError):
        E.exclude_degree(20, 0.0)


def test_tiny_volume_excludes_outright():
    v = E.exclude_degree(20, 1e-6)
    assert v.excluded
    assert v.final_state.h_cap == 0


def test_huge_volume_is_inconclusive():
    v = E.exclude_degree(20, 1e9 * B.PI2)
    assert not v.excluded
    assert v.witness is None


def test_huge_volume_breaks_max_degree():
    res = E.max_degree(1e6 * B.PI2)
    assert res.warnings


def test_signature_lower_reads_table():
    assert E.signature_lower(20) == pytest.approx(19.365, rel=1e-9)
    assert E.signature_lower(20) < 19.365


def test_separated_uses_margin():
    assert E.separated(1.0, 1.0 + 1e-3)
    assert not E.separated(1.0, 1.0 + 1e-7)


# fixed point and tables


@pytest.mark.parametrize("n", E.DISC_TABLE_DEGREES)
def test_fixed_point_converges(n):
    log_d, hist = E.analytic_fixed_point(n)
    assert len(hist) - 1 <= 100
    again, _ = E.analytic_fixed_point(n, seed=log_d * 1.5)
    assert again == pytest.approx(log_d, rel=1e-8)


def test_fixed_point_history_decreases_from_high_seed():
    _, hist = E.analytic_fixed_point(12)
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_disc_table_rows_and_errors():
    assert E.disc_table(18) == pytest.approx(347.63, abs=0.05)
    assert E.disc_table_row(12).rounded == 449
    with pytest.raises(DomainError):
        E.disc_table(20)
    with pytest.raises(DomainError):
        E.disc_table(14, "rank12")
    with pytest.raises(DomainError):
        E.disc_table_row(8, "nonsense")


def test_rank12_survivors():
    assert E.rank12_max_degree() == 12
    for n in (14, 16, 18):
        assert E.rank12_verdict(n).excluded


def test_combined_dimension_bound():
    out = E.combined_dimension_bound(9)
    assert out["bound"] == 25
    assert out["inputs"] == {"dimension_2": 11, "dimension_3": 9, "transition": 25}


# properties


@settings(max_examples=15, deadline=None)
@given(n=st.integers(10, 18).map(lambda k: 2 * k), v=st.floats(20.0, 400.0))
def test_trace_upper_never_increases(n, v):
    verdict = E.exclude_degree(n, v * B.PI2)
    uppers = [t.values["delta_upper"] for t in verdict.final_state.trace]
    finite = [u for u in uppers if math.isfinite(u)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(finite, finite[1:]))


@settings(max_examples=15, deadline=None)
@given(n=st.integers(10, 18).map(lambda k: 2 * k), v=st.floats(5.0, 400.0), t=st.floats(0.1, 1.0))
def test_exclusion_monotone_in_volume_cap(n, v, t):
    # a smaller cap admits fewer fields, so exclusion can only persist
    big = E.exclude_degree(n, v * B.PI2)
    small = E.exclude_degree(n, v * t * B.PI2)
    if big.excluded:
        assert small.excluded
    start = lambda v: next(t for t in v.final_state.trace if t.name == "volume-bound").values["delta_upper"]
    if small.final_state.h_cap:
        assert start(small) <= start(big) * (1 + 1e-9)


@settings(max_examples=20, deadline=None)
@given(n=st.sampled_from(E.DISC_TABLE_DEGREES), t=st.floats(0.2, 1.0))
def test_table_bound_monotone_in_volume_cap(n, t):
    assert E.disc_table(n, volume_cap=V * t) <= E.disc_table(n) * (1 + 1e-9)


def test_rank12_never_weaker_than_unconditional():
    for n in E.RANK12_TABLE_DEGREES:
        assert E.disc_table(n, "rank12") <= E.disc_table(n)
