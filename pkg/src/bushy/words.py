"""Finite words over the naturals and tuples of such words.

A word is a finite sequence of naturals, modelled as a tuple of ints.
A vec is a nonempty tuple of words; all machinery in this package walks
vecs componentwise under the prefix order.  The canonical order used for
deterministic iteration everywhere is length-lexicographic per component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

Word = tuple[int, ...]
Vec = tuple[Word, ...]

EMPTY: Word = ()


def word_leq(a: Word, b: Word) -> bool:
    """True iff a is an initial segment of b (a may equal b)."""
    return len(a) <= len(b) and b[: len(a)] == a


def word_incomparable(a: Word, b: Word) -> bool:
    """True iff neither word is an initial segment of the other."""
    return not word_leq(a, b) and not word_leq(b, a)


def word_key(w: Word) -> tuple:
    return (len(w), w)


def vec_leq(a: Vec, b: Vec) -> bool:
    """True iff b extends a in every component."""
    if len(a) != len(b):
        raise ValueError("arity mismatch: %d vs %d" % (len(a), len(b)))
    return all(word_leq(x, y) for x, y in zip(a, b))


def vec_lt(a: Vec, b: Vec) -> bool:
    return a != b and vec_leq(a, b)


def vec_key(v: Vec) -> tuple:
    return tuple(word_key(c) for c in v)


def vec_norm(v: Vec) -> int:
    """The norm of a vec: the least component length."""
    return min(len(c) for c in v)


def sorted_vecs(vs: Iterable[Vec]) -> list[Vec]:
    return sorted(vs, key=vec_key)


def sorted_words(ws: Iterable[Word]) -> list[Word]:
    return sorted(ws, key=word_key)


def chop(v: Vec) -> Vec:
    """Drop the last component.  Arity must be at least 2."""
    if len(v) < 2:
        raise ValueError("cannot chop an arity-1 vec")
    return v[:-1]


def last(v: Vec) -> Word:
    return v[-1]


def restrict_lower(v: Vec, k: int) -> Vec:
    """The first k components.  Requires 1 <= k < arity."""
    if not 1 <= k < len(v):
        raise ValueError("lower restriction needs 1 <= k < arity, got k=%d arity=%d" % (k, len(v)))
    return v[:k]


def restrict_upper(v: Vec, k: int) -> Vec:
    """Components k+1 .. arity.  Requires 0 <= k < arity."""
    if not 0 <= k < len(v):
        raise ValueError("upper restriction needs 0 <= k < arity, got k=%d arity=%d" % (k, len(v)))
    return v[k:]


def dom_k(vs: Iterable[Vec], k: int) -> frozenset[Vec]:
    """The set of k-component prefixes."""
    return frozenset(v[:k] for v in vs)


def suffix_fiber(vs: Iterable[Vec], prefix: Vec) -> frozenset[Vec]:
    """Suffixes of the members whose leading components equal prefix."""
    k = len(prefix)
    return frozenset(v[k:] for v in vs if v[:k] == prefix)


def is_prefix_free(vs: Iterable[Vec]) -> bool:
    """Recursive prefix-freeness.

    Arity 1: an antichain under the prefix order.  Arity n: the chopped
    set is prefix-free and every last-coordinate fiber is prefix-free.
    """
    items = list(vs)
    if not items:
        return True
    arity = len(items[0])
    if any(len(v) != arity for v in items):
        raise ValueError("mixed arities in vec set")
    if arity == 1:
        words = [v[0] for v in items]
        for i, a in enumerate(words):
            for b in words[i + 1 :]:
                if a != b and (word_leq(a, b) or word_leq(b, a)):
                    return False
        return True
    chopped = {v[:-1] for v in items}
    if not is_prefix_free(chopped):
        return False
    for c in chopped:
        fiber = [(v[-1],) for v in items if v[:-1] == c]
        if not is_prefix_free(fiber):
            return False
    return True


def is_prefix_free_at(vs: Iterable[Vec], k: int) -> bool:
    """Prefix-freeness tested at breaking point k: the k-prefix set is
    prefix-free and so is every suffix fiber over it."""
    items = list(vs)
    if not items:
        return True
    arity = len(items[0])
    if not 1 <= k < arity:
        raise ValueError("breaking point needs 1 <= k < arity")
    prefixes = dom_k(items, k)
    if not is_prefix_free(prefixes):
        return False
    return all(is_prefix_free(suffix_fiber(items, p)) for p in prefixes)


def predecessor_in(vs: Iterable[Vec], t: Vec) -> Vec:
    """The unique member lying below t componentwise.

    Raises if no member is below t, or if several are (the set was not
    prefix-free on the relevant cone).
    """
    below = [v for v in vs if vec_leq(v, t)]
    if not below:
        raise KeyError("no element below %r" % (t,))
    if len(below) > 1:
        raise ValueError("multiple elements below %r; set not prefix-free" % (t,))
    return below[0]


def minimal_vecs(vs: Iterable[Vec]) -> frozenset[Vec]:
    items = set(vs)
    return frozenset(v for v in items if not any(vec_lt(u, v) for u in items))


@dataclass(frozen=True)
class VecSet:
    """A finite set of equal-arity vecs, optionally marked upward closed.

    An open VecSet stores only its minimal elements; membership then means
    extending one of them.  A closed VecSet is literal.
    """

    arity: int
    elements: frozenset[Vec] = field(default_factory=frozenset)
    is_open: bool = False

    def __post_init__(self) -> None:
        for v in self.elements:
            if len(v) != self.arity:
                raise ValueError("element %r has arity %d, expected %d" % (v, len(v), self.arity))
        if self.is_open:
            object.__setattr__(self, "elements", minimal_vecs(self.elements))

    @staticmethod
    def of(elements: Iterable[Vec], is_open: bool = False, arity: int | None = None) -> "VecSet":
        elems = frozenset(elements)
        if arity is None:
            if not elems:
                raise ValueError("arity needed for an empty VecSet")
            arity = len(next(iter(elems)))
        return VecSet(arity, elems, is_open)

    def member(self, v: Vec) -> bool:
        if len(v) != self.arity:
            return False
        if v in self.elements:
            return True
        if self.is_open:
            return any(vec_leq(e, v) for e in self.elements)
        return False

    def materialize(self, universe: Iterable[Vec]) -> frozenset[Vec]:
        """All universe vecs that are members."""
        return frozenset(v for v in universe if self.member(v))

    def union(self, other: "VecSet") -> "VecSet":
        if self.arity != other.arity:
            raise ValueError("arity mismatch in union")
        if self.is_open != other.is_open:
            raise ValueError("cannot union open with closed VecSet; materialize first")
        return VecSet(self.arity, self.elements | other.elements, self.is_open)

    def __iter__(self) -> Iterator[Vec]:
        return iter(sorted_vecs(self.elements))

    def __len__(self) -> int:
        return len(self.elements)


def wrap1(w: Word) -> Vec:
    return (w,)


def unwrap1(v: Vec) -> Word:
    if len(v) != 1:
        raise ValueError("expected arity-1 vec")
    return v[0]
