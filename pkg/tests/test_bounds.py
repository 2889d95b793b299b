import pytest
from hypothesis import given, strategies as st

from bushy.bounds import (
    HUGE,
    AffineSeq,
    Const,
    DiagIterate,
    FiniteTable,
    Iterate,
    Linear,
    PiecewiseIterate,
    Pow2,
    Scaled,
    SquaredIndexSeq,
    SumBound,
    TableSeq,
    bound_sum,
    bounded_product_bound,
    density_construct,
    eval_iterate,
    gg_verify,
    is_huge,
    is_quick,
    pointwise_geq,
    sat_leq,
    scaled,
)


# every bound evaluates to at least 2, even when the rule says less
def test_eval_clamps_below_at_two():
    assert Const(0).eval(5) == 2
    assert Const(1).eval(0) == 2
    assert Linear(0, 1).eval(7) == 2


def test_const_and_linear():
    assert Const(3).eval(0) == 3
    assert Linear(2, 1).eval(4) == 9


def test_pow2_saturates_at_cap():
    p = Pow2()
    assert p.eval(3) == 8
    assert is_huge(p.eval(1000))


def test_scaled_multiplies_after_clamp():
    assert scaled(3, Const(2)).eval(0) == 6
    assert Scaled(2, Pow2()).eval(2) == 8


def test_sum_bound():
    s = bound_sum(Const(2), Const(2))
    assert isinstance(s, SumBound)
    assert s.eval(0) == 4


def test_iterate_tower():
    # two iterations of doubling from the argument
    it = Iterate(Pow2(), 2)
    assert it.eval(1) == 4
    assert it.eval(2) == 16
    assert eval_iterate(Pow2(), 3, 1) == 16


def test_diag_iterate():
    d = DiagIterate(Pow2())
    assert d.eval(1) == Pow2().eval(1)
    assert d.eval(2) == eval_iterate(Pow2(), 2, 2)


def test_finite_table_and_tail():
    t = FiniteTable((5, 6), Const(9))
    assert t.eval(0) == 5
    assert t.eval(1) == 6
    assert t.eval(7) == 9


def test_piecewise_iterate_runs_out():
    f = PiecewiseIterate(Const(2), (4, 8))
    f.eval(3)
    with pytest.raises(ValueError):
        f.eval(9)


@given(st.integers(0, 60), st.integers(0, 60))
def test_saturating_order(a, b):
    assert sat_leq(a, b) == (a <= b)
    assert sat_leq(a, HUGE)


def test_seq_eval():
    assert AffineSeq(1, 0).eval(3) == 3
    assert TableSeq((10, 20)).eval(1) == 10
    assert TableSeq((10, 20)).eval(2) == 20
    w = SquaredIndexSeq(AffineSeq(1, 0))
    assert w.eval(2) == 4


def test_is_quick():
    assert is_quick(Pow2(), 10)
    assert not is_quick(Const(2), 3)
    # decreasing tables are not quick
    assert not is_quick(FiniteTable((16, 8, 4), Const(4)), 3)


def test_pointwise_geq_reports_first_failure():
    ok, n = pointwise_geq(Const(3), Const(4), 0, 5)
    assert not ok and n == 0
    ok, n = pointwise_geq(Pow2(), Const(4), 2, 6)
    assert ok and n is None


def test_gg_verify_accepts_diag_over_pow2():
    rep = gg_verify(DiagIterate(Pow2()), Pow2(), AffineSeq(1, 0), 3, 6)
    assert rep.passed, rep


def test_gg_verify_rejects_slow_pair():
    rep = gg_verify(Const(2), Pow2(), AffineSeq(1, 0), 2, 6)
    assert not rep.passed
    assert rep.failure is not None


def test_density_construct_witnesses():
    h, g, w = DiagIterate(Pow2()), Pow2(), AffineSeq(1, 0)
    res = density_construct(h, g, w, levels=3, horizon=6)
    assert gg_verify(res.f, g, res.wf, 3, 6).passed
    assert gg_verify(h, res.f, res.wh, 3, 6).passed


def test_density_construct_needs_domination():
    with pytest.raises(ValueError):
        density_construct(Const(2), Pow2(), AffineSeq(1, 0), 2, 6)


def test_bounded_product_bound():
    rep = bounded_product_bound(Pow2(), 8)
    assert rep.quick and rep.holds
    slow = bounded_product_bound(Const(2), 8)
    assert not slow.quick
