import pytest

from bushy.bounds import Const
from bushy.errors import ValidationError
from bushy.forests import Forest, forest_of, full_subforest, full_tree, is_bushy, is_end_extension


def test_full_tree_counts():
    t = full_tree((), 2, 3)
    assert len(t.nodes) == 1 + 2 + 4 + 8
    assert t.leaves() == {w for w in t.nodes if len(w) == 3}


def test_full_tree_with_width_function():
    t = full_tree((), lambda n: 3 if n == 0 else 1, 2)
    assert len([w for w in t.nodes if len(w) == 1]) == 3
    assert len([w for w in t.nodes if len(w) == 2]) == 3


def test_forest_validation():
    with pytest.raises(ValidationError):
        Forest(frozenset(), frozenset({()}))
    with pytest.raises(ValidationError):
        Forest(frozenset({()}), frozenset({(), (0, 1)}))  # missing parent
    with pytest.raises(ValidationError):
        Forest(frozenset({(), (0,)}), frozenset({(), (0,)}))  # base not prefix-free


def test_forest_of_unions_disjoint_trees():
    t = full_tree((), 2, 2)
    f = forest_of([full_subforest(t, (0,)), full_subforest(t, (1,))])
    assert f.base == {(0,), (1,)}
    assert f.nodes == t.nodes - {()}


def test_children_and_cone():
    t = full_tree((), 2, 2)
    assert t.children(()) == [(0,), (1,)]
    assert t.cone((0,)) == {(0,), (0, 0), (0, 1)}


def test_is_bushy():
    t = full_tree((), 3, 2)
    assert is_bushy(t, Const(2))
    assert is_bushy(t, Const(3))
    assert not is_bushy(t, Const(4))
    assert is_bushy(t, Const(3), exact=True)
    assert not is_bushy(t, Const(2), exact=True)
    pruned = Forest(frozenset({()}),
                    frozenset(w for w in t.nodes if len(w) < 2 or w[1] < 2))
    assert is_bushy(pruned, Const(2))
    assert not is_bushy(pruned, Const(3))


def test_exactly_bushy():
    t2 = full_tree((), 2, 2)
    assert is_bushy(t2, Const(2), exact=True)


def test_is_end_extension():
    t = full_tree((), 2, 2)
    stem = full_tree((), 2, 1)
    assert is_end_extension(stem, t)
    assert not is_end_extension(t, stem)


def test_full_subforest():
    t = full_tree((), 2, 2)
    sub = full_subforest(t, (1,))
    assert sub.base == {(1,)}
    assert sub.nodes == {(1,), (1, 0), (1, 1)}
