"""Finite forests of words.

A forest above a prefix-free base is a finite set of words containing the
base, each word extending exactly one base element, closed under initial
segments down to the base.  A tree is the single-base case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .bounds import Bound, is_huge
from .errors import ValidationError
from .words import Word, is_prefix_free, sorted_words, word_leq, wrap1


@dataclass(frozen=True)
class Forest:
    base: frozenset[Word]
    nodes: frozenset[Word]

    def __post_init__(self) -> None:
        if not self.base:
            raise ValidationError("forest needs a nonempty base")
        if not is_prefix_free({wrap1(b) for b in self.base}):
            raise ValidationError("forest base must be prefix-free")
        if not self.base <= self.nodes:
            raise ValidationError("base must be contained in the node set")
        for t in self.nodes:
            anchors = [b for b in self.base if word_leq(b, t)]
            if len(anchors) != 1:
                raise ValidationError("node %r lies above %d base elements" % (t, len(anchors)))
            if t not in self.base and len(t) > len(anchors[0]) and t[:-1] not in self.nodes:
                raise ValidationError("node %r missing its parent" % (t,))

    def children(self, t: Word) -> list[Word]:
        n = len(t) + 1
        return sorted_words(u for u in self.nodes if len(u) == n and u[:n - 1] == t)

    def child_map(self) -> dict[Word, list[Word]]:
        out: dict[Word, list[Word]] = {t: [] for t in self.nodes}
        for u in self.nodes:
            p = u[:-1]
            if u not in self.base and p in out:
                out[p].append(u)
        for t in out:
            out[t].sort()
        return out

    def leaves(self) -> frozenset[Word]:
        kids = self.child_map()
        return frozenset(t for t in self.nodes if not kids[t])

    def cone(self, t: Word) -> frozenset[Word]:
        return frozenset(u for u in self.nodes if word_leq(t, u))


def full_subforest(forest: Forest, t: Word) -> Forest:
    """The nodes above t, as a tree with base {t}."""
    if t not in forest.nodes:
        raise ValidationError("%r is not a node of the forest" % (t,))
    return Forest(base=frozenset({t}), nodes=forest.cone(t))


def is_bushy(forest: Forest, bound: Bound, exact: bool = False) -> bool:
    """Every node with a successor has at least bound(len) immediate
    successors; exact demands equality."""
    kids = forest.child_map()
    for t, cs in kids.items():
        if not cs:
            continue
        need = bound.eval(len(t))
        if is_huge(need):
            return False
        if exact:
            if len(cs) != need:
                return False
        elif len(cs) < need:
            return False
    return True


def is_end_extension(small: Forest, big: Forest) -> bool:
    """True iff big contains small, has the same base, and all new nodes
    extend leaves of small."""
    if small.base != big.base or not small.nodes <= big.nodes:
        return False
    lvs = small.leaves()
    return all(any(word_leq(l, t) for l in lvs) for t in big.nodes - small.nodes)


def full_tree(base: Word, width: int | Callable[[int], int], depth: int) -> Forest:
    """The tree of all words extending base with entries below a width,
    out to the given absolute length."""
    widths = (lambda n: width) if isinstance(width, int) else width
    nodes: set[Word] = {base}
    frontier = [base]
    while frontier:
        t = frontier.pop()
        if len(t) >= depth:
            continue
        for i in range(widths(len(t))):
            u = t + (i,)
            nodes.add(u)
            frontier.append(u)
    return Forest(base=frozenset({base}), nodes=frozenset(nodes))


def forest_of(trees: Iterable[Forest]) -> Forest:
    """Disjoint union of trees/forests with pairwise incomparable bases."""
    base: set[Word] = set()
    nodes: set[Word] = set()
    for f in trees:
        base |= f.base
        nodes |= f.nodes
    return Forest(base=frozenset(base), nodes=frozenset(nodes))
