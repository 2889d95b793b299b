"""Largeness over finite forests.

A set of words B is big above a word t at bound h, inside a universe
forest U, when some h-bushy finite subforest of U above t has all its
leaves in B.  Everything here is decided exactly by backward induction
over U, and positive answers come with an extracted witness forest while
negative answers carry the refuting marking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .bounds import Bound, SumBound, is_huge
from .errors import HypothesisError, InvariantError, ValidationError
from .forests import Forest, is_bushy, is_end_extension
from .words import Word, VecSet, minimal_vecs, sorted_words, word_leq, wrap1, unwrap1


@dataclass(frozen=True)
class Witness:
    """An extracted largeness witness: a bound-bushy forest above the
    queried words whose leaves all lie in the target set."""

    forest: Forest
    above: frozenset[Word]
    bound: Bound

    def leaves(self) -> frozenset[Word]:
        return self.forest.leaves()


@dataclass(frozen=True)
class NotBig:
    """Refutation: the queried words above which the target is small,
    plus the full backward-induction marking that proves it."""

    small_above: tuple[Word, ...]
    good: frozenset[Word]

    def __bool__(self) -> bool:
        return False


Decision = Union[Witness, NotBig]

WordSetLike = Union[VecSet, Iterable[Word]]


def materialize(target: WordSetLike, universe: Forest) -> frozenset[Word]:
    """Resolve a target set to the universe nodes it contains."""
    if isinstance(target, VecSet):
        if target.arity != 1:
            raise ValidationError("expected an arity-1 set")
        return frozenset(t for t in universe.nodes if target.member(wrap1(t)))
    return frozenset(target) & universe.nodes


def good_set(target: frozenset[Word], bound: Bound, universe: Forest) -> frozenset[Word]:
    """Backward induction: a node is good when it is in the target or has
    at least bound(len) good children.  The good set is exactly the set of
    nodes above which the target is big, so this is also the closure
    operator for the bound."""
    kids = universe.child_map()
    good: set[Word] = set()
    for t in sorted(universe.nodes, key=len, reverse=True):
        if t in target:
            good.add(t)
            continue
        need = bound.eval(len(t))
        if is_huge(need):
            continue
        if sum(1 for c in kids[t] if c in good) >= need:
            good.add(t)
    return frozenset(good)


def _extract(target: frozenset[Word], bound: Bound, universe: Forest,
             good: frozenset[Word], tops: Iterable[Word]) -> frozenset[Word]:
    """Deterministic witness extraction: below each good node outside the
    target, keep the lexicographically least good children, exactly as
    many as the bound requires."""
    kids = universe.child_map()
    nodes: set[Word] = set()
    stack = list(tops)
    while stack:
        t = stack.pop()
        nodes.add(t)
        if t in target:
            continue
        need = bound.eval(len(t))
        chosen = [c for c in kids[t] if c in good][: int(need)]
        if len(chosen) < need:
            raise InvariantError("marking promised %r children at %r" % (need, t))
        stack.extend(chosen)
    return frozenset(nodes)


def decide_big(target: WordSetLike, above: Iterable[Word], bound: Bound,
               universe: Forest) -> Decision:
    """Decide whether target is bound-big above every one of the given
    words inside the universe.

    The queried words are reduced to their minimal elements first; they
    must be universe nodes.  Positive: a Witness whose forest is
    exactly-bushy by construction.  Negative: NotBig naming the words
    that fail, with the refuting marking.
    """
    tops = {unwrap1(v) for v in minimal_vecs({wrap1(a) for a in above})}
    if not tops:
        raise ValidationError("nothing to decide above")
    missing = tops - universe.nodes
    if missing:
        raise ValidationError("queried words %r are not universe nodes" % (sorted_words(missing),))
    tgt = materialize(target, universe)
    good = good_set(tgt, bound, universe)
    bad_tops = tuple(sorted_words(t for t in tops if t not in good))
    if bad_tops:
        return NotBig(small_above=bad_tops, good=good)
    nodes = _extract(tgt, bound, universe, good, tops)
    forest = Forest(base=frozenset(tops), nodes=nodes)
    return Witness(forest=forest, above=frozenset(tops), bound=bound)


def is_small(target: WordSetLike, above: Iterable[Word], bound: Bound,
             universe: Forest) -> bool:
    return isinstance(decide_big(target, above, bound, universe), NotBig)


def closure(target: WordSetLike, bound: Bound, universe: Forest) -> frozenset[Word]:
    """All universe nodes above which the target is bound-big.  Contains
    the target, is closed (big above it implies membership), idempotent."""
    return good_set(materialize(target, universe), bound, universe)


@dataclass(frozen=True)
class SplitResult:
    side: str  # "left" | "right"
    witness: Witness
    labels: dict[Word, str]


def big_subset_split(left: WordSetLike, right: WordSetLike, above: Word,
                     left_bound: Bound, right_bound: Bound,
                     universe: Forest) -> SplitResult:
    """Split a big union above a single word.

    Requires left | right to be (left_bound + right_bound)-big above the
    word.  Labels a witness for the union bottom-up: a leaf gets "left"
    iff it is in the left set, an inner node gets the label held by
    enough of its children.  The word's own label names the big side and
    the like-labelled subtree is returned as its witness.  Works above a
    single word only; the count argument at each node is what makes the
    pigeonhole go through.
    """
    lset = materialize(left, universe)
    rset = materialize(right, universe)
    combined = SumBound((left_bound, right_bound))
    dec = decide_big(lset | rset, [above], combined, universe)
    if isinstance(dec, NotBig):
        raise HypothesisError("union is not (left+right)-big above %r" % (above,))
    tree = dec.forest
    kids = tree.child_map()
    labels: dict[Word, str] = {}
    for t in sorted(tree.nodes, key=len, reverse=True):
        if not kids[t]:
            labels[t] = "left" if t in lset else "right"
            continue
        n_left = sum(1 for c in kids[t] if labels[c] == "left")
        n_right = len(kids[t]) - n_left
        if n_left >= left_bound.eval(len(t)):
            labels[t] = "left"
        elif n_right >= right_bound.eval(len(t)):
            labels[t] = "right"
        else:
            raise InvariantError("pigeonhole failed at %r" % (t,))
    side = labels[above]
    bound, tgt = (left_bound, lset) if side == "left" else (right_bound, rset)
    nodes: set[Word] = set()
    stack = [above]
    while stack:
        t = stack.pop()
        nodes.add(t)
        if not kids[t]:
            continue
        same = [c for c in kids[t] if labels[c] == side][: int(bound.eval(len(t)))]
        stack.extend(same)
    witness = Witness(forest=Forest(base=frozenset({above}), nodes=frozenset(nodes)),
                      above=frozenset({above}), bound=bound)
    _check_witness(witness, tgt, universe)
    return SplitResult(side=side, witness=witness, labels=labels)


def concat_extend(stem: Witness | Forest, target: WordSetLike, bound: Bound,
                  universe: Forest) -> Witness:
    """End-extend a witness forest so its leaves land in a new target.

    Needs the target big above every current leaf; the failing leaf is
    named otherwise.  The result witnesses the target above the original
    base, leaves of the old forest extended in place."""
    forest = stem.forest if isinstance(stem, Witness) else stem
    if not forest.nodes <= universe.nodes:
        raise ValidationError("stem forest is not inside the universe")
    tgt = materialize(target, universe)
    pieces: list[frozenset[Word]] = []
    for leaf in sorted_words(forest.leaves()):
        dec = decide_big(tgt, [leaf], bound, universe)
        if isinstance(dec, NotBig):
            raise HypothesisError("target is not big above leaf %r" % (leaf,))
        pieces.append(dec.forest.nodes)
    nodes = forest.nodes.union(*pieces) if pieces else forest.nodes
    out = Forest(base=forest.base, nodes=nodes)
    if not is_end_extension(forest, out):
        raise InvariantError("concatenation did not end-extend")
    return Witness(forest=out, above=forest.base, bound=bound)


def _check_witness(w: Witness, target: frozenset[Word], universe: Forest) -> None:
    if not w.forest.nodes <= universe.nodes:
        raise InvariantError("witness leaves the universe")
    if not is_bushy(w.forest, w.bound):
        raise InvariantError("witness is not bushy at its bound")
    stray = w.forest.leaves() - target
    if stray:
        raise InvariantError("witness leaves %r miss the target" % (sorted_words(stray),))


def check_witness(w: Witness, target: WordSetLike, universe: Forest) -> None:
    """Re-verify a witness against a target, raising on any defect."""
    _check_witness(w, materialize(target, universe), universe)
