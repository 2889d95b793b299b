import pytest
from hypothesis import given, settings, strategies as st

from bushy.bounds import Const, bound_sum
from bushy.errors import HypothesisError, InvariantError
from bushy.forests import full_tree
from bushy.largeness import (
    NotBig,
    Witness,
    big_subset_split,
    check_witness,
    closure,
    concat_extend,
    decide_big,
    is_small,
)
from bushy.oracle import brute_big_words
from bushy.words import sorted_words

BIN2 = full_tree((), 2, 2)
TRI2 = full_tree((), 3, 2)


def nodes_of(forest, mask):
    pool = sorted_words(forest.nodes)
    return frozenset(n for i, n in enumerate(pool) if mask >> i & 1)


def test_trivial_decisions():
    g = Const(2)
    # anchor inside the target: big with a one-node witness
    dec = decide_big({()}, [()], g, BIN2)
    assert isinstance(dec, Witness)
    assert dec.leaves() == {()}
    # empty target is small
    dec = decide_big(frozenset(), [()], g, BIN2)
    assert isinstance(dec, NotBig)
    assert is_small(frozenset(), [()], g, BIN2)


def test_full_level_is_big():
    g = Const(2)
    level2 = {w for w in BIN2.nodes if len(w) == 2}
    dec = decide_big(level2, [()], g, BIN2)
    assert isinstance(dec, Witness)
    check_witness(dec, level2, BIN2)
    assert dec.leaves() <= level2


def test_single_branch_is_small():
    g = Const(2)
    dec = decide_big({(0,), (0, 0), (0, 1)}, [()], g, BIN2)
    assert isinstance(dec, NotBig)
    assert () in dec.small_above


def test_witness_trees_are_exactly_bushy_and_lex_least():
    g = Const(2)
    level1 = {w for w in TRI2.nodes if len(w) == 1}
    dec = decide_big(level1, [()], g, TRI2)
    assert isinstance(dec, Witness)
    # lex-least pair of the three children
    assert dec.leaves() == {(0,), (1,)}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 7 - 1))
def test_decide_matches_brute_on_binary_depth2(mask):
    g = Const(2)
    target = nodes_of(BIN2, mask)
    calc = isinstance(decide_big(target, [()], g, BIN2), Witness)
    assert calc == brute_big_words(target, [()], g, BIN2)


def test_closure_collects_good_nodes():
    g = Const(2)
    target = {w for w in BIN2.nodes if len(w) == 1}
    cl = closure(target, g, BIN2)
    assert target <= cl
    # the target is big above the root and above its own members, nowhere else
    assert cl == {(), (0,), (1,)}
    # idempotent
    assert closure(cl, g, BIN2) == cl


def test_closure_of_small_set_misses_root():
    g = Const(2)
    cl = closure({(0,)}, g, BIN2)
    assert () not in cl


def test_big_subset_split_returns_valid_side():
    g, h = Const(2), Const(2)
    u4 = full_tree((), 4, 1)
    left = frozenset({(0,), (1,)})
    right = frozenset({(2,), (3,)})
    res = big_subset_split(left, right, (), g, h, u4)
    side = left if res.side == "left" else right
    check_witness(res.witness, side, u4)


def test_big_subset_split_requires_big_union():
    g, h = Const(2), Const(2)
    with pytest.raises(HypothesisError):
        big_subset_split(frozenset({(0,)}), frozenset({(1,)}), (), g, h,
                         full_tree((), 4, 1))


def test_big_subset_split_sum_bound_hypothesis():
    g, h = Const(2), Const(2)
    u4 = full_tree((), 4, 2)
    level2 = frozenset(w for w in u4.nodes if len(w) == 2)
    left = frozenset(w for w in level2 if w[1] < 2)
    right = level2 - left
    assert isinstance(decide_big(level2, [()], bound_sum(g, h), u4), Witness)
    res = big_subset_split(left, right, (), g, h, u4)
    side = left if res.side == "left" else right
    check_witness(res.witness, side, u4)


def test_concat_extend_glues_levels():
    g = Const(2)
    u = full_tree((), 2, 3)
    level1 = {w for w in u.nodes if len(w) == 1}
    level3 = {w for w in u.nodes if len(w) == 3}
    stem = decide_big(level1, [()], g, u)
    assert isinstance(stem, Witness)
    out = concat_extend(stem, level3, g, u)
    check_witness(out, level3, u)
    assert stem.forest.nodes <= out.forest.nodes


def test_concat_extend_needs_big_target_above_each_leaf():
    g = Const(2)
    u = full_tree((), 2, 3)
    level1 = {w for w in u.nodes if len(w) == 1}
    stem = decide_big(level1, [()], g, u)
    lopsided = {w for w in u.nodes if len(w) == 3 and w[0] == 0}
    with pytest.raises(HypothesisError):
        concat_extend(stem, lopsided, g, u)


def test_check_witness_rejects_wrong_target():
    g = Const(2)
    level2 = {w for w in BIN2.nodes if len(w) == 2}
    dec = decide_big(level2, [()], g, BIN2)
    with pytest.raises(InvariantError):
        check_witness(dec, {(0, 0)}, BIN2)
