"""Forest systems: forests fibred over forests, to any finite length.

A length-n system is a finite set of arity-n vecs such that the chopped
set is a length-(n-1) system, every last-coordinate fiber is a finite
forest above the matching base fiber, and fibers grow only by
end-extension along the domain order.  Largeness of a set of vecs above a
prefix-free set is decided coordinatewise from the last coordinate
inward, mirroring the projection identity that defines it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Union

from .bounds import Bound, SumBound, bound_sum
from .errors import HypothesisError, InvariantError, TruncationError, ValidationError
from .forests import Forest, is_bushy, is_end_extension
from .largeness import NotBig, Witness, decide_big
from .words import (
    Vec,
    VecSet,
    Word,
    chop,
    is_prefix_free,
    minimal_vecs,
    predecessor_in,
    sorted_vecs,
    sorted_words,
    vec_leq,
    wrap1,
)

BoundVector = tuple[Bound, ...]


@dataclass(frozen=True)
class System:
    arity: int
    base: frozenset[Vec]
    nodes: frozenset[Vec]
    depth_bound: int | None = None

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValidationError("system arity must be >= 1")
        for v in self.base | self.nodes:
            if len(v) != self.arity:
                raise ValidationError("vec %r does not have arity %d" % (v, self.arity))

    @property
    def depth(self) -> int:
        if self.depth_bound is not None:
            return self.depth_bound
        return max((max(len(c) for c in v) for v in self.nodes), default=0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "info"
    code: str
    subject: tuple
    message: str


def system_of(base: Iterable[Vec], nodes: Iterable[Vec], depth_bound: int | None = None) -> System:
    b = frozenset(base)
    if not b:
        raise ValidationError("system needs a nonempty base")
    arity = len(next(iter(b)))
    return System(arity=arity, base=b, nodes=frozenset(nodes) | b, depth_bound=depth_bound)


def of_forest(f: Forest, depth_bound: int | None = None) -> System:
    return System(1, frozenset(wrap1(b) for b in f.base), frozenset(wrap1(t) for t in f.nodes), depth_bound)


def as_forest(s: System) -> Forest:
    if s.arity != 1:
        raise ValidationError("only arity-1 systems unwrap to forests")
    return Forest(base=frozenset(v[0] for v in s.base), nodes=frozenset(v[0] for v in s.nodes))


@lru_cache(maxsize=None)
def chop_system(s: System) -> System:
    if s.arity < 2:
        raise ValidationError("cannot chop an arity-1 system")
    return System(s.arity - 1, frozenset(chop(v) for v in s.base),
                  frozenset(chop(v) for v in s.nodes), s.depth_bound)


@lru_cache(maxsize=None)
def fibers_map(s: System) -> dict[Vec, frozenset[Word]]:
    """Last-coordinate fiber of the node set, per domain node."""
    out: dict[Vec, set[Word]] = {}
    for v in s.nodes:
        out.setdefault(chop(v), set()).add(v[-1])
    return {d: frozenset(ws) for d, ws in out.items()}


@lru_cache(maxsize=None)
def base_fiber(s: System, pred: Vec) -> frozenset[Word]:
    return frozenset(v[-1] for v in s.base if chop(v) == pred)


@lru_cache(maxsize=None)
def fiber_forest(s: System, d: Vec) -> Forest:
    """The fiber at domain node d as a forest above the base fiber of the
    unique base-domain predecessor of d."""
    fm = fibers_map(s)
    if d not in fm:
        raise ValidationError("%r is not a domain node" % (d,))
    pred = predecessor_in(frozenset(chop(v) for v in s.base), d)
    return Forest(base=base_fiber(s, pred), nodes=fm[d])


def suffix_system(s: System, prefix: Vec) -> System:
    """The fiber of the system over a k-prefix, a length-(n-k) system."""
    k = len(prefix)
    if not 1 <= k < s.arity:
        raise ValidationError("prefix length must be between 1 and arity-1")
    nodes = frozenset(v[k:] for v in s.nodes if v[:k] == prefix)
    if not nodes:
        raise ValidationError("%r is not a domain prefix" % (prefix,))
    pred = predecessor_in(frozenset(v[:k] for v in s.base), prefix)
    base = frozenset(v[k:] for v in s.base if v[:k] == pred)
    return System(s.arity - k, base, nodes, s.depth_bound)


def cone_system(s: System, v: Vec) -> System:
    if v not in s.nodes:
        raise ValidationError("%r is not a node" % (v,))
    return System(s.arity, frozenset({v}), frozenset(u for u in s.nodes if vec_leq(v, u)), s.depth_bound)


@lru_cache(maxsize=None)
def leaves_of(s: System) -> frozenset[Vec]:
    """Maximal nodes.  For valid systems a node is maximal exactly when
    its chopped part is maximal in the chopped system and its last
    component is a fiber leaf there."""
    if s.arity == 1:
        parents = {v[0][:-1] for v in s.nodes if v[0]}
        return frozenset(v for v in s.nodes if v[0] not in parents)
    out: set[Vec] = set()
    fm = fibers_map(s)
    for d in leaves_of(chop_system(s)):
        words = fm[d]
        parents = {w[:-1] for w in words if w}
        out.update(d + (w,) for w in words if w not in parents)
    return frozenset(out)


def validate_system(s: System) -> list[Diagnostic]:
    """Structural validation.  Error diagnostics make the system invalid;
    coherence at intermediate breaking points is reported as info only,
    the defining recursion being the last-coordinate one."""
    out: list[Diagnostic] = []
    if not s.base:
        return [Diagnostic("error", "empty-base", (), "system base is empty")]
    if not is_prefix_free(s.base):
        out.append(Diagnostic("error", "base-not-prefix-free", (), "base is not prefix-free"))
        return out
    if not s.base <= s.nodes:
        out.append(Diagnostic("error", "base-missing", (), "base not contained in nodes"))
    if s.arity == 1:
        try:
            as_forest(s)
        except ValidationError as e:
            out.append(Diagnostic("error", "bad-forest", (), str(e)))
        return out
    chopped = chop_system(s)
    out.extend(Diagnostic(d.severity, "chop:" + d.code, d.subject, d.message)
               for d in validate_system(chopped))
    if any(d.severity == "error" for d in out):
        return out
    fm = fibers_map(s)
    for d in sorted_vecs(fm):
        try:
            fiber_forest(s, d)
        except ValidationError as e:
            out.append(Diagnostic("error", "bad-fiber", d, str(e)))
    if any(d.severity == "error" for d in out):
        return out
    doms = sorted_vecs(fm)
    for i, d1 in enumerate(doms):
        f1 = fiber_forest(s, d1)
        for d2 in doms[i + 1:]:
            lo, hi = None, None
            if vec_leq(d1, d2):
                lo, hi = f1, fiber_forest(s, d2)
            elif vec_leq(d2, d1):
                lo, hi = fiber_forest(s, d2), f1
            if lo is not None and not is_end_extension(lo, hi):
                out.append(Diagnostic("error", "fiber-not-end-extension",
                                      (d1, d2), "fiber does not end-extend along the domain chain"))
    for k in range(1, s.arity - 1):
        prefixes = sorted_vecs({v[:k] for v in s.nodes})
        for i, p1 in enumerate(prefixes):
            for p2 in prefixes[i + 1:]:
                pair = (p1, p2) if vec_leq(p1, p2) else ((p2, p1) if vec_leq(p2, p1) else None)
                if pair is None:
                    continue
                lo = frozenset(v[k:] for v in s.nodes if v[:k] == pair[0])
                hi = frozenset(v[k:] for v in s.nodes if v[:k] == pair[1])
                if not lo <= hi:
                    out.append(Diagnostic("info", "intermediate-fiber-shrinks", (k, pair[0], pair[1]),
                                          "breaking-point %d fiber not contained along a chain" % k))
    return out


def is_valid_system(s: System) -> bool:
    return not any(d.severity == "error" for d in validate_system(s))


def full_system(widths: tuple[int, ...], depth: int) -> System:
    """The balanced full product system: first coordinate any word below
    the first width out to the depth, each later coordinate a word below
    its width no longer than the previous coordinate.  Every level up to
    the depth is balanced."""
    if not widths:
        raise ValidationError("need at least one width")

    def words_upto(width: int, maxlen: int) -> list[Word]:
        out: list[Word] = [()]
        cur: list[Word] = [()]
        for _ in range(maxlen):
            cur = [w + (i,) for w in cur for i in range(width)]
            out.extend(cur)
        return out

    vecs: list[tuple[Word, ...]] = [(w,) for w in words_upto(widths[0], depth)]
    for width in widths[1:]:
        nxt = []
        for v in vecs:
            for w in words_upto(width, len(v[-1])):
                nxt.append(v + (w,))
        vecs = nxt
    empty = tuple(() for _ in widths)
    return System(len(widths), frozenset({empty}), frozenset(vecs), depth)


# === largeness ===

TargetLike = Union[VecSet, Iterable[Vec], Callable[[Vec], bool]]


def materialize_vecs(target: TargetLike, nodes: Iterable[Vec]) -> frozenset[Vec]:
    if isinstance(target, VecSet):
        return frozenset(v for v in nodes if target.member(v))
    if callable(target):
        return frozenset(v for v in nodes if target(v))
    return frozenset(target) & frozenset(nodes)


@dataclass(frozen=True)
class SystemWitness:
    system: System
    above: frozenset[Vec]
    bounds: BoundVector

    def leaves(self) -> frozenset[Vec]:
        return leaves_of(self.system)


@dataclass(frozen=True)
class NotBigND:
    small_above: tuple[Vec, ...]
    arity: int
    projected: frozenset[Vec] = field(default_factory=frozenset)
    inner: object = None

    def __bool__(self) -> bool:
        return False

    def sample_failure(self) -> Vec:
        return self.small_above[0]


DecisionND = Union[SystemWitness, NotBigND]


def decide_big_nd(target: TargetLike, above: Iterable[Vec], bounds: BoundVector,
                  universe: System) -> DecisionND:
    """Decide vector-bound largeness of a target above a prefix-free set.

    Recursion on arity: project the target over the last coordinate (the
    domain nodes whose fiber slice is last-bound-big above the matching
    base fiber), then decide the projection one coordinate down.  The
    assembled witness carries fiber witnesses at domain-witness leaves and
    frozen base fibers elsewhere."""
    ab = frozenset(above)
    if not ab:
        raise ValidationError("nothing to decide above")
    if not is_prefix_free(ab):
        raise ValidationError("the queried set must be prefix-free")
    if not ab <= universe.nodes:
        raise ValidationError("queried vecs %r are not universe nodes"
                              % (sorted_vecs(ab - universe.nodes)[:3],))
    if len(bounds) != universe.arity:
        raise ValidationError("bound vector length %d does not match arity %d"
                              % (len(bounds), universe.arity))
    return _decide_nd(target, ab, bounds, universe)


def _member_fn(target: TargetLike) -> Callable[[Vec], bool]:
    if isinstance(target, VecSet):
        return target.member
    if callable(target):
        return target
    tset = frozenset(target)
    return lambda v: v in tset


def _decide_nd(target: TargetLike, above: frozenset[Vec], bounds: BoundVector,
               universe: System) -> DecisionND:
    member = _member_fn(target)
    if universe.arity == 1:
        forest = as_forest(universe)
        tgt = frozenset(w for w in forest.nodes if member((w,)))
        dec = decide_big(tgt, [v[0] for v in above], bounds[0], forest)
        if isinstance(dec, NotBig):
            return NotBigND(tuple((w,) for w in dec.small_above), 1,
                            frozenset(wrap1(w) for w in dec.good), dec)
        return SystemWitness(of_forest(dec.forest), above, bounds)

    chop_univ = chop_system(universe)
    chop_above = frozenset(chop(v) for v in above)
    fm = fibers_map(universe)
    cone = [d for d in fm if any(vec_leq(c, d) for c in chop_above)]
    projected: set[Vec] = set()
    fiber_wit: dict[Vec, Witness] = {}
    for d in sorted_vecs(cone):
        pred = predecessor_in(chop_above, d)
        fbase = frozenset(v[-1] for v in above if chop(v) == pred)
        ff = fiber_forest(universe, d)
        if not fbase <= ff.nodes:
            continue
        tgt_d = frozenset(w for w in ff.nodes if member(d + (w,)))
        dec = decide_big(tgt_d, fbase, bounds[-1], ff)
        if isinstance(dec, Witness):
            projected.add(d)
            fiber_wit[d] = dec
    rec = _decide_nd(frozenset(projected), chop_above, bounds[:-1], chop_univ)
    if isinstance(rec, NotBigND):
        failing = tuple(sorted_vecs(v for v in above if chop(v) in set(rec.small_above)))
        return NotBigND(failing, universe.arity, frozenset(projected), rec)
    wsys = rec.system
    wleaves = leaves_of(wsys)
    nodes: set[Vec] = set()
    for d in wsys.nodes:
        if d in wleaves:
            fib: Iterable[Word] = fiber_wit[d].forest.nodes
        else:
            pred = predecessor_in(chop_above, d)
            fib = frozenset(v[-1] for v in above if chop(v) == pred)
        nodes.update(d + (w,) for w in fib)
    out = System(universe.arity, above, frozenset(nodes), None)
    return SystemWitness(out, above, bounds)


def nd_is_small(target: TargetLike, above: Iterable[Vec], bounds: BoundVector,
                universe: System) -> bool:
    return isinstance(decide_big_nd(target, above, bounds, universe), NotBigND)


def check_system_witness(w: SystemWitness, target: TargetLike, universe: System) -> None:
    """Re-verify an assembled witness independently of how it was built."""
    s = w.system
    if not s.nodes <= universe.nodes:
        raise InvariantError("witness leaves the universe")
    diags = [d for d in validate_system(s) if d.severity == "error"]
    if diags:
        raise InvariantError("witness is not a valid system: %s" % diags[0].message)
    if not is_bushy_system(s, w.bounds):
        raise InvariantError("witness is not bushy at its bounds")
    tgt = materialize_vecs(target, s.nodes)
    stray = leaves_of(s) - tgt
    if stray:
        raise InvariantError("witness leaves %r miss the target" % (sorted_vecs(stray)[:3],))


def is_bushy_system(s: System, bounds: BoundVector, exact: bool = False) -> bool:
    """Bushiness coordinatewise: the chopped system at the leading bounds
    and every fiber forest at the last bound."""
    if len(bounds) != s.arity:
        raise ValidationError("bound vector length mismatch")
    if s.arity == 1:
        return is_bushy(as_forest(s), bounds[0], exact)
    if not is_bushy_system(chop_system(s), bounds[:-1], exact):
        return False
    return all(is_bushy(fiber_forest(s, d), bounds[-1], exact) for d in fibers_map(s))


def project(target: TargetLike, suffix_base: Iterable[Vec] | Vec, suffix_bounds: BoundVector,
            universe: System) -> frozenset[Vec]:
    """The k-prefixes of the universe whose suffix slice of the target is
    suffix-bound-big above the given suffix base."""
    if isinstance(suffix_base, tuple) and suffix_base and isinstance(suffix_base[0], tuple) \
            and (not suffix_base[0] or isinstance(suffix_base[0][0], int)):
        sb: frozenset[Vec] = frozenset({suffix_base})  # a single vec
    else:
        sb = frozenset(suffix_base)
    m = len(suffix_bounds)
    if not 1 <= m < universe.arity:
        raise ValidationError("suffix length must be between 1 and arity-1")
    if any(len(v) != m for v in sb):
        raise ValidationError("suffix base arity mismatch")
    k = universe.arity - m
    member = _member_fn(target)
    out: set[Vec] = set()
    for p in sorted_vecs({v[:k] for v in universe.nodes}):
        try:
            sub = suffix_system(universe, p)
        except ValidationError:
            continue
        if not sb <= sub.nodes:
            continue
        dec = _decide_nd(lambda suf: member(p + suf), sb, suffix_bounds, sub)
        if isinstance(dec, SystemWitness):
            out.add(p)
    return frozenset(out)


def project_rel(target: TargetLike, above: Iterable[Vec], last_bound: Bound,
                universe: System) -> frozenset[Vec]:
    """Base-relative projection over the last coordinate: the domain nodes
    in the cone of the chopped base whose target fiber is big above the
    base fiber of their unique base predecessor."""
    ab = frozenset(above)
    if not is_prefix_free(ab):
        raise ValidationError("projection base must be prefix-free")
    member = _member_fn(target)
    chop_above = frozenset(chop(v) for v in ab)
    out: set[Vec] = set()
    for d in fibers_map(universe):
        if not any(vec_leq(c, d) for c in chop_above):
            continue
        pred = predecessor_in(chop_above, d)
        fbase = frozenset(v[-1] for v in ab if chop(v) == pred)
        ff = fiber_forest(universe, d)
        if not fbase <= ff.nodes:
            continue
        tgt = frozenset(w for w in ff.nodes if member(d + (w,)))
        if isinstance(decide_big(tgt, fbase, last_bound, ff), Witness):
            out.add(d)
    return frozenset(out)


def uniformly_big(collection: Iterable[TargetLike], above: Iterable[Vec],
                  bounds: BoundVector, universe: System) -> bool:
    """Uniform largeness of a collection above a prefix-free set: the
    intersection of the base-relative projections must be big at the
    leading bounds above the chopped base."""
    if universe.arity < 2:
        raise ValidationError("uniform largeness needs arity at least 2")
    ab = frozenset(above)
    inter: frozenset[Vec] | None = None
    for tgt in collection:
        p = project_rel(tgt, ab, bounds[-1], universe)
        inter = p if inter is None else inter & p
    if inter is None:
        raise ValidationError("empty collection")
    chop_above = frozenset(chop(v) for v in ab)
    dec = decide_big_nd(inter, chop_above, bounds[:-1], chop_system(universe))
    return isinstance(dec, SystemWitness)


def scale_vec(factor: int, bounds: BoundVector) -> BoundVector:
    from .bounds import scaled
    return tuple(scaled(factor, b) for b in bounds)


@dataclass(frozen=True)
class SplitResultND:
    side: str
    witness: SystemWitness


def big_subset_split_nd(left: TargetLike, right: TargetLike, above: Vec,
                        left_bounds: BoundVector, right_bounds: BoundVector,
                        universe: System) -> SplitResultND:
    """Vector big-subset splitting above a single vec.

    The union must be big at the coordinatewise bound sums; the split is
    the scalar one applied coordinatewise from the last coordinate in.
    A multi-element base is rejected: the pigeonhole needs one root."""
    if not (isinstance(above, tuple) and above and isinstance(above[0], tuple)
            and all(isinstance(c, tuple) for c in above)):
        raise ValidationError("the split base must be a single vec")
    if len(above) != universe.arity:
        raise ValidationError("split base arity mismatch")
    summed = tuple(bound_sum(a, b) for a, b in zip(left_bounds, right_bounds))
    union_member = _union_fn(left, right)
    hyp = decide_big_nd(union_member, [above], summed, universe)
    if isinstance(hyp, NotBigND):
        raise HypothesisError("union is not big at the summed bounds above %r" % (above,))
    try:
        return _split_nd(left, right, above, left_bounds, right_bounds, universe)
    except HypothesisError as e:
        raise InvariantError("inner split hypothesis failed: %s" % e) from e


def _union_fn(left: TargetLike, right: TargetLike) -> Callable[[Vec], bool]:
    lf, rf = _member_fn(left), _member_fn(right)
    return lambda v: lf(v) or rf(v)


def _split_nd(left: TargetLike, right: TargetLike, above: Vec,
              lb: BoundVector, rb: BoundVector, universe: System) -> SplitResultND:
    from .largeness import big_subset_split  # local to avoid cycle at import time

    lf, rf = _member_fn(left), _member_fn(right)
    if universe.arity == 1:
        forest = as_forest(universe)
        lset = frozenset(w for w in forest.nodes if lf((w,)))
        rset = frozenset(w for w in forest.nodes if rf((w,)))
        res = big_subset_split(lset, rset, above[0], lb[0], rb[0], forest)
        return SplitResultND(res.side, SystemWitness(of_forest(res.witness.forest),
                                                     frozenset({above}), (res.witness.bound,)))

    chop_univ = chop_system(universe)
    fm = fibers_map(universe)
    s_last = above[-1]
    s_chop = chop(above)
    lw: dict[Vec, Witness] = {}
    rw: dict[Vec, Witness] = {}
    for d in sorted_vecs(d for d in fm if vec_leq(s_chop, d)):
        ff = fiber_forest(universe, d)
        if s_last not in ff.nodes:
            continue
        ltgt = frozenset(w for w in ff.nodes if lf(d + (w,)))
        rtgt = frozenset(w for w in ff.nodes if rf(d + (w,)))
        dl = decide_big(ltgt, [s_last], lb[-1], ff)
        if isinstance(dl, Witness):
            lw[d] = dl
        dr = decide_big(rtgt, [s_last], rb[-1], ff)
        if isinstance(dr, Witness):
            rw[d] = dr
    rec = _split_nd(frozenset(lw), frozenset(rw), s_chop, lb[:-1], rb[:-1], chop_univ)
    side = rec.side
    fiber_wit = lw if side == "left" else rw
    wsys = rec.witness.system
    wleaves = leaves_of(wsys)
    nodes: set[Vec] = set()
    for d in wsys.nodes:
        if d in wleaves:
            nodes.update(d + (w,) for w in fiber_wit[d].forest.nodes)
        else:
            nodes.add(d + (s_last,))
    bounds = lb if side == "left" else rb
    out = System(universe.arity, frozenset({above}), frozenset(nodes), None)
    return SplitResultND(side, SystemWitness(out, frozenset({above}), bounds))


def concat_systems(lower: System, upper: System, check: bool = True) -> System:
    """Concatenate: the upper system's base must be the lower's leaf set.

    Domain nodes interior to the lower system keep their lower fiber;
    over the upper domain the lower leaf fiber is merged with the upper
    fiber.  From length 3 on the recursively concatenated domain can hold
    nodes in neither region (new domain words paired with interior lower
    words); those freeze the fiber of the deepest lower domain node below
    them, and the assembled result is re-validated."""
    if lower.arity != upper.arity:
        raise ValidationError("arity mismatch in concatenation")
    lower_leaves = leaves_of(lower)
    if upper.base != lower_leaves:
        raise ValidationError("upper base must equal the lower leaf set")
    depth = max(lower.depth, upper.depth)
    if lower.arity == 1:
        return System(1, lower.base, lower.nodes | upper.nodes, depth)

    chop_low = chop_system(lower)
    chop_up = chop_system(upper)
    chop_cat = concat_systems(chop_low, chop_up, check=False)
    low_fm = fibers_map(lower)
    up_fm = fibers_map(upper)
    low_leaf_doms = frozenset(chop(v) for v in lower_leaves)
    nodes: set[Vec] = set()
    for d in chop_cat.nodes:
        if d in up_fm:
            pred = predecessor_in(low_leaf_doms, d)
            nodes.update(d + (w,) for w in low_fm[pred] | up_fm[d])
        elif d in low_fm:
            nodes.update(d + (w,) for w in low_fm[d])
        else:
            below = [c for c in low_fm if vec_leq(c, d)]
            if not below:
                raise InvariantError("domain node %r has no lower anchor" % (d,))
            deepest = max(below, key=lambda c: (sum(len(x) for x in c), c))
            nodes.update(d + (w,) for w in low_fm[deepest])
    out = System(lower.arity, lower.base, frozenset(nodes), depth)
    if check:
        bad = [d for d in validate_system(out) if d.severity == "error"]
        if bad:
            raise InvariantError("concatenation incoherent: %s" % bad[0].message)
    return out


def weak_concat_extend(stem: SystemWitness | System, target: TargetLike,
                       bounds: BoundVector, universe: System) -> SystemWitness:
    """End-extend a witness system so its leaves land in the target.

    Plain elementwise largeness of the target above the leaves is not
    enough for this to exist; the decision is made for the leaf set as a
    whole, fiber hypotheses evaluated lazily on the domain cone actually
    visited, and a failure names the leaf vec whose extension is blocked."""
    s = stem.system if isinstance(stem, SystemWitness) else stem
    if not s.nodes <= universe.nodes:
        raise ValidationError("stem system is not inside the universe")
    lvs = leaves_of(s)
    dec = _decide_nd(target, lvs, bounds, universe) if is_prefix_free(lvs) else None
    if dec is None:
        raise ValidationError("leaf set of the stem is not prefix-free")
    if isinstance(dec, NotBigND):
        raise HypothesisError("target is not big above leaf %r" % (dec.sample_failure(),))
    merged = concat_systems(s, dec.system)
    return SystemWitness(merged, s.base, bounds)


def balanced_levels(s: System) -> list[int]:
    """Levels m where every length-m first coordinate has all its fiber
    system leaves with every component of length m.  Arity 1: every level
    up to the depth, the fiber condition being vacuous."""
    top = s.depth
    if s.arity == 1:
        return list(range(top + 1))
    out: list[int] = []
    firsts = {v[:1] for v in s.nodes}
    for m in range(top + 1):
        ok = True
        for f in firsts:
            if len(f[0]) != m:
                continue
            sub = suffix_system(s, f)
            for leaf in leaves_of(sub):
                if any(len(c) != m for c in leaf):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(m)
    return out


def level_slice(s: System, level: int) -> list[Vec]:
    return sorted_vecs(v for v in s.nodes if all(len(c) == level for c in v))


def find_small_rectangle(bad: TargetLike, bounds: BoundVector, min_level: int,
                         universe: System) -> Vec:
    """A node at a balanced level at or past min_level above which the bad
    set stays small.  Requires the bad set small above the universe base;
    exhausting the truncation without finding one raises."""
    dec = decide_big_nd(bad, universe.base, bounds, universe)
    if isinstance(dec, SystemWitness):
        raise HypothesisError("bad set is big above the universe base")
    levels = [m for m in balanced_levels(universe) if m >= min_level]
    if not levels:
        raise TruncationError("no balanced level at or past %d" % min_level)
    for m in levels:
        for v in level_slice(universe, m):
            sub = cone_system(universe, v)
            if isinstance(decide_big_nd(bad, [v], bounds, sub), NotBigND):
                return v
    raise TruncationError("no small rectangle up to depth %d" % universe.depth)
