"""Forcing conditions: diagonal sets, validation, extension builders."""

import pytest

from bushy.bounds import Const, Pow2
from bushy.errors import HypothesisError, NoSplittingError
from bushy.forcing import (
    Condition,
    DivergenceExtension,
    MockJump,
    b_dnc_set,
    build_splitting_system,
    build_totality_system,
    check_extension,
    compose_restrictions,
    derive_gg_witness,
    extend_to_rectangle,
    extends,
    is_valid_condition,
    lift,
    nu_homogenize,
    qn_member,
    restrict_i,
    sigma1_decide,
    validate_condition,
)
from bushy.functionals import FunctionalTable
from bushy.systems import SystemWitness, full_system
from bushy.words import EMPTY

ROOT2 = (EMPTY, EMPTY)


@pytest.fixture(scope="module")
def wit22():
    return derive_gg_witness(Const(2), Const(2), 2, 8)


@pytest.fixture(scope="module")
def depth4(wit22):
    # length-2 condition over the depth-4 chained square, half the universe bad
    U = full_system((2, 2), 4)
    J = MockJump({((), 0): 1})
    bad = b_dnc_set(J, 2, U)
    return Condition(ROOT2, U, bad, Const(2), Const(2), wit22), J


@pytest.fixture(scope="module")
def line4(wit22):
    return Condition((EMPTY,), full_system((2,), 4), frozenset(),
                     Const(2), Const(2), wit22)


class TestMockJump:
    def test_validate_and_converges(self):
        J = MockJump({((), 0): 1, (((1,),), 1): 0})
        J.validate()
        assert J.converges((), 0) == 1
        assert J.converges((), 1) is None

    def test_diagonal_set_plain_entries(self):
        # failing to diagonalize against entry ((), 0) -> 1 means w[0] == 1,
        # against ((), 2) -> 0 means w[2] == 0
        J = MockJump({((), 0): 1, ((), 2): 0})
        B = b_dnc_set(J, 1, full_system((2,), 3))
        assert ((1,),) in B
        assert ((0,),) not in B
        assert ((0, 1, 0),) in B
        assert ((0, 0, 1),) not in B
        assert len(B) == 9

    def test_diagonal_set_oracle_entries(self):
        J = MockJump({((), 0): 1, (((1,),), 1): 0})
        B = b_dnc_set(J, 2, full_system((2, 2), 2))
        # fiber word hits the value the oracle entry converges to
        assert ((1, 0), (1, 0)) in B
        # first coordinate already fails against the plain entry
        assert ((1, 1), (0, 0)) in B
        assert ((0, 0), (1, 1)) not in B
        assert len(B) == 17


class TestGrowthWitness:
    def test_derive_and_verify(self):
        w = derive_gg_witness(Pow2(), Const(2), 2, 8)
        assert [w.seq.eval(k) for k in (1, 2)] == [-1, -1]
        assert w.verify(Pow2(), Const(2)).passed

    def test_underivable(self):
        with pytest.raises(HypothesisError):
            derive_gg_witness(Const(2), Const(3), 1, 6)


class TestCondition:
    def test_baseline_valid(self, depth4):
        p, J = depth4
        assert validate_condition(p, J) == []
        assert len(p.bad) == 325
        assert len(p.system.nodes) == 651

    def test_bad_set_must_be_open(self, depth4, wit22):
        p, J = depth4
        # a bad node whose extensions escape the set is rejected
        leak = frozenset({((1,), ())})
        q = Condition(ROOT2, p.system, leak, Const(2), Const(2), wit22)
        diags = validate_condition(q)
        assert any("open" in d.message for d in diags)

    def test_stem_must_sit_in_universe(self, depth4, wit22):
        p, _ = depth4
        q = Condition((((7,), ())), p.system, p.bad, Const(2), Const(2), wit22)
        assert not is_valid_condition(q)

    def test_extend_to_rectangle(self, depth4):
        p, _ = depth4
        q = extend_to_rectangle(p, 1)
        assert q.stem == ((0,), (0,))
        assert check_extension(q, p) == []
        assert extends(q, p)
        assert not extends(p, q)


class TestSigma1:
    def test_positive(self, depth4):
        p, _ = depth4
        deep = frozenset(v for v in p.system.nodes
                         if all(len(c) >= 2 for c in v))
        dec = sigma1_decide(p, deep, ROOT2, Const(2))
        assert isinstance(dec, SystemWitness)
        assert len(dec.leaves()) == 9

    def test_negative_gives_refuting_extension(self, depth4):
        p, _ = depth4
        dec = sigma1_decide(p, frozenset(), ROOT2, Const(2))
        assert isinstance(dec, DivergenceExtension)
        assert check_extension(dec.condition, p) == []


class TestBuilders:
    def test_totality(self, depth4):
        p, _ = depth4
        U = p.system
        C0 = frozenset(v for v in U.nodes if all(len(c) >= 1 for c in v))
        C1 = frozenset(v for v in U.nodes if all(len(c) >= 3 for c in v))
        trace = []
        t = build_totality_system(p, [C0, C1], Const(2), trace=trace)
        assert is_valid_condition(t)
        assert check_extension(t, p) == []
        assert t.depth == 4
        assert len(t.system.nodes) == 617
        assert [(r.stage, r.leaves) for r in trace] == [
            ("init", 1), ("extend", 3), ("pad", 16),
            ("extend", 40), ("pad", 256)]
        # every full-depth nonbad node passed through both target sets
        for v in t.system.nodes:
            if v in t.bad or any(len(c) < t.depth for c in v):
                continue
            assert any(all(len(c) >= 1 for c in u) for u in (v,))
            assert all(len(c) >= 3 for c in v)

    def test_splitting_one_dimensional(self, line4):
        G = FunctionalTable.from_function(line4.system, lambda v: v[0])
        trace = []
        s = build_splitting_system(line4, G, Const(2), "1D",
                                   rounds=2, trace=trace)
        assert is_valid_condition(s)
        assert s.depth == 3
        assert len(s.system.nodes) == 15
        assert [r.level for r in trace] == [1, 2, 2, 3, 3]

    def test_splitting_needs_rich_values(self, line4):
        G = FunctionalTable.from_function(line4.system,
                                          lambda v: (0, 0, 0, 0))
        with pytest.raises(NoSplittingError):
            build_splitting_system(line4, G, Const(2), "1D", rounds=1)


@pytest.fixture(scope="module")
def lifted_pair(wit22):
    U1d = full_system((2,), 4)
    J = MockJump({((), 0): 1, (((0,),), 0): 0})
    bad = b_dnc_set(J, 1, U1d)
    p = Condition((EMPTY,), U1d, bad, Const(2), Const(2), wit22)
    assert is_valid_condition(p, J)
    return p, lift(p, J), J


class TestLiftRestrict:
    def test_round_trip_exact(self, lifted_pair):
        p, lifted, _ = lifted_pair
        assert lifted.length == 2
        assert len(lifted.system.nodes) == 651
        assert restrict_i(lifted) == p

    def test_lift_rejects_incompatible_jump(self, lifted_pair, wit22):
        p, _, _ = lifted_pair
        hostile = MockJump({((), 0): 0})
        with pytest.raises(HypothesisError):
            lift(p, hostile)

    def test_lifted_homogenization_commutes(self, lifted_pair):
        _, lifted, _ = lifted_pair
        nul = nu_homogenize(lifted)
        assert qn_member(nul)
        assert restrict_i(nul).bad == nu_homogenize(restrict_i(lifted)).bad


class TestHomogenization:
    def test_idempotent_member(self, depth4):
        p, _ = depth4
        nu = nu_homogenize(p)
        assert check_extension(nu, p) == []
        assert nu_homogenize(nu) == nu
        assert qn_member(nu)

    def test_commutes_with_restriction(self, depth4):
        p, _ = depth4
        left = restrict_i(nu_homogenize(p))
        right = restrict_i(p)
        assert left.bad == right.bad
        assert left.stem == right.stem

    def test_compose_restrictions(self, depth4):
        p, _ = depth4
        nu = nu_homogenize(p)
        r1 = compose_restrictions(nu, 1)
        assert r1.length == 1
        assert compose_restrictions(nu, 2) == nu
