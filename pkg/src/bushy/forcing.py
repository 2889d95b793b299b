"""Finite-depth forcing conditions over truncated balanced systems.

A condition packages a stem, a truncated tree system, an open bad set,
and a pair of growth bounds with an iterate-domination witness.  The
five validity clauses are checked relative to the truncation horizon:
the infinite objects' computability clauses are vacuous here, "no
leaves" becomes "every leaf sits at the final balanced level", and the
asymptotic growth facts are checked pointwise on the visible window.
Diagonal-avoidance bad sets come from mock jumps, which make the
recursion decidable without changing any of the combinatorics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .bounds import (
    Bound,
    GGReport,
    Seq,
    TableSeq,
    eval_iterate,
    gg_verify,
    is_huge,
    pointwise_geq,
    sat_geq,
)
from .errors import (
    HypothesisError,
    InvariantError,
    NoSplittingError,
    NotBigError,
    TruncationError,
    ValidationError,
)
from .forests import full_tree
from .functionals import FunctionalTable, is_split
from .systems import (
    BoundVector,
    Diagnostic,
    NotBigND,
    System,
    SystemWitness,
    balanced_levels,
    chop_system,
    cone_system,
    decide_big_nd,
    find_small_rectangle,
    is_bushy_system,
    leaves_of,
    level_slice,
    project_rel,
    validate_system,
    weak_concat_extend,
)
from .words import Vec, Word, chop, sorted_vecs, vec_leq

OraclePrefix = tuple  # a vec of any arity; () for the oracle-free jump


# === mock jumps and diagonal-avoidance sets ===


@dataclass
class MockJump:
    """A finite stand-in for the universal jump.

    Entries map (oracle-prefix, index) to a value; convergence is
    membership.  Use is oracle-monotone: once an entry converges at a
    prefix it stays convergent with the same value at every extension,
    which validate() enforces by requiring compatible prefixes sharing
    an index to agree.
    """

    entries: dict[tuple[OraclePrefix, int], int]

    def validate(self) -> None:
        keys = sorted(self.entries, key=lambda k: (len(k[0]), k[1], k[0]))
        for i, (p1, e1) in enumerate(keys):
            for p2, e2 in keys[i + 1:]:
                if e1 != e2 or len(p1) != len(p2):
                    continue
                comparable = all(
                    _word_comparable(a, b) for a, b in zip(p1, p2)
                )
                if comparable and self.entries[(p1, e1)] != self.entries[(p2, e2)]:
                    raise ValidationError(
                        "jump entries at %r and %r disagree at index %d"
                        % (p1, p2, e1))

    def converges(self, prefix: OraclePrefix, e: int):
        """The value at the prefix, or None.  Monotone lookup: any entry
        at a shorter compatible prefix counts."""
        for (p, i), val in self.entries.items():
            if i != e or len(p) != len(prefix):
                continue
            if all(len(a) <= len(b) and b[: len(a)] == a for a, b in zip(p, prefix)):
                return val
        return None


def _word_comparable(a: Word, b: Word) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def b_dnc_set(J: MockJump, n: int, U: System) -> frozenset[Vec]:
    """The diagonal-hitting tuples of U under the mock jump.

    Recursion on arity: a tuple is in when its chopped part already is,
    or its last word agrees with the jump relative to the chopped part
    at some index below its length.  Membership depends on the tuple
    alone, so the result is automatically open in U.
    """
    if U.arity != n:
        raise ValidationError("universe arity %d does not match n=%d" % (U.arity, n))
    memo: dict[Vec, bool] = {}

    def member(v: Vec) -> bool:
        got = memo.get(v)
        if got is not None:
            return got
        w = v[-1]
        hit = any(J.converges(v[:-1], e) == w[e] for e in range(len(w)))
        out = hit or (len(v) >= 2 and member(v[:-1]))
        memo[v] = out
        return out

    return frozenset(v for v in U.nodes if member(v))


# === growth witnesses ===


@dataclass(frozen=True)
class GrowthWitness:
    """Thresholds certifying one bound dominates another's iterates,
    together with the horizon the claim was checked to."""

    seq: Seq
    levels: int
    horizon: int

    def verify(self, h: Bound, b: Bound) -> GGReport:
        return gg_verify(h, b, self.seq, self.levels, self.horizon)


def derive_gg_witness(h: Bound, g: Bound, levels: int, horizon: int) -> GrowthWitness:
    """Scan for the least nondecreasing thresholds making the check pass.

    The k-th threshold is the last point at or before the horizon where
    h drops below the k-th iterate of g.  A level whose comparison fails
    at the horizon itself has no honest threshold and raises.
    """
    vals: list[int] = []
    prev = -1
    for k in range(1, levels + 1):
        worst = prev
        for n in range(prev + 1, horizon + 1):
            if not sat_geq(h.eval(n), eval_iterate(g, k, n)):
                worst = n
        if worst >= horizon:
            raise HypothesisError(
                "iterate domination fails at level %d by horizon %d" % (k, horizon))
        vals.append(worst)
        prev = worst
    w = GrowthWitness(TableSeq(tuple(vals)), levels, horizon)
    report = w.verify(h, g)
    if not report.passed:
        raise InvariantError("derived witness fails its own check at %r" % (report.failure,))
    return w


# === conditions ===


@dataclass(frozen=True)
class Condition:
    stem: Vec
    system: System
    bad: frozenset[Vec]
    h_fun: Bound
    b_fun: Bound
    gg_witness: GrowthWitness

    @property
    def length(self) -> int:
        return self.system.arity

    @property
    def depth(self) -> int:
        return self.system.depth


def stem_norm(stem: Vec) -> int:
    return min(len(c) for c in stem)


def _nondecreasing(b: Bound, lo: int, hi: int) -> bool:
    prev = b.eval(lo)
    for n in range(lo + 1, hi + 1):
        cur = b.eval(n)
        if not sat_geq(cur, prev):
            return False
        prev = cur
    return True


def _open_violation(xs: frozenset[Vec], nodes: frozenset[Vec]) -> tuple[Vec, Vec] | None:
    # everything below u is a coordinatewise-prefix grid, so openness
    # reduces to hash lookups instead of an all-pairs comparison scan
    if not xs:
        return None
    for u in sorted_vecs(nodes):
        if u in xs:
            continue
        axes = [[c[:i] for i in range(len(c) + 1)] for c in u]
        for below in itertools.product(*axes):
            if below in xs:
                return (below, u)
    return None


def validate_condition(p: Condition, J: MockJump | None = None) -> list[Diagnostic]:
    """Check the five clauses at the truncation; empty result iff valid.

    Clause 1 wants a valid single-stem system balanced out to its depth.
    Clause 2 checks the upper bound is nondecreasing on the window and
    the system is bushy for it; the exponential-growth part of the
    quickness requirement is asymptotic and is not imposed pointwise on
    a finite window.  Clause 3 needs the bad set open and, when a jump
    is supplied, containing the diagonal set.  Clause 4 is smallness of
    the bad set above the stem, clause 5 the bound comparisons.
    """
    out: list[Diagnostic] = []
    s = p.system
    n = s.arity
    if len(p.stem) != n:
        return [Diagnostic("error", "stem-arity", p.stem, "stem arity does not match the system")]
    for d in validate_system(s):
        out.append(Diagnostic(d.severity, "clause-1:" + d.code, d.subject, d.message))
    if any(d.severity == "error" for d in out):
        return out
    if s.base != frozenset({p.stem}):
        out.append(Diagnostic("error", "clause-1:not-a-tree-system", p.stem,
                              "system base must be exactly the stem"))
        return out
    depth = s.depth
    for leaf in leaves_of(s):
        if any(len(c) != depth for c in leaf):
            out.append(Diagnostic("error", "clause-1:unbalanced-leaf", leaf,
                                  "leaf not at the truncation level %d" % depth))
            break
    hv = tuple(p.h_fun for _ in range(n))
    if not _nondecreasing(p.h_fun, 0, depth):
        out.append(Diagnostic("error", "clause-2:h-not-monotone", (),
                              "upper bound decreases on the window"))
    if not is_bushy_system(s, hv):
        out.append(Diagnostic("error", "clause-2:not-bushy", (),
                              "system is not bushy at the upper bound"))
    if not p.bad <= s.nodes:
        out.append(Diagnostic("error", "clause-3:bad-outside", (),
                              "bad set has members outside the system"))
    else:
        viol = _open_violation(p.bad, s.nodes)
        if viol is not None:
            out.append(Diagnostic("error", "clause-3:not-open", viol,
                                  "bad set is not open: %r escapes at %r" % viol))
        if J is not None:
            missing = b_dnc_set(J, n, s) - p.bad
            if missing:
                out.append(Diagnostic("error", "clause-3:dnc-escape",
                                      sorted_vecs(missing)[0],
                                      "diagonal set not contained in the bad set"))
    if not _nondecreasing(p.b_fun, 0, depth):
        out.append(Diagnostic("error", "clause-4:b-not-monotone", (),
                              "lower bound decreases on the window"))
    if p.bad <= s.nodes:
        bv = tuple(p.b_fun for _ in range(n))
        if not isinstance(decide_big_nd(p.bad, [p.stem], bv, s), NotBigND):
            out.append(Diagnostic("error", "clause-4:bad-big", p.stem,
                                  "bad set is big above the stem at the lower bound"))
    report = p.gg_witness.verify(p.h_fun, p.b_fun)
    if not report.passed:
        out.append(Diagnostic("error", "clause-5:gg-fails", report.failure,
                              "iterate-domination witness fails"))
    ok, at = pointwise_geq(p.h_fun, p.b_fun, stem_norm(p.stem), depth)
    if not ok:
        out.append(Diagnostic("error", "clause-5:h-below-b", at,
                              "upper bound drops below the lower bound at %r" % at))
    return out


def is_valid_condition(p: Condition, J: MockJump | None = None) -> bool:
    return not any(d.severity == "error" for d in validate_condition(p, J))


def _require_valid(p: Condition, J: MockJump | None, context: str) -> None:
    bad = [d for d in validate_condition(p, J) if d.severity == "error"]
    if bad:
        raise InvariantError("%s produced an invalid condition: %s: %s"
                             % (context, bad[0].code, bad[0].message))


def check_extension(q: Condition, p: Condition) -> list[str]:
    """Why q fails to extend p; empty iff it does.  Bound comparisons are
    pointwise from the new stem's norm out to the shallower depth."""
    out: list[str] = []
    if q.length != p.length:
        return ["length mismatch"]
    if not vec_leq(p.stem, q.stem):
        out.append("stem does not extend")
    if not q.system.nodes <= p.system.nodes:
        out.append("system is not a subsystem")
    leaked = {v for v in p.bad if v in q.system.nodes} - q.bad
    if leaked:
        out.append("old bad nodes escape: %r" % (sorted_vecs(leaked)[0],))
    lo = stem_norm(q.stem)
    hi = min(q.depth, p.depth)
    ok, at = pointwise_geq(p.h_fun, q.h_fun, lo, hi)
    if not ok:
        out.append("upper bound grows at %r" % at)
    ok, at = pointwise_geq(q.b_fun, p.b_fun, lo, hi)
    if not ok:
        out.append("lower bound shrinks at %r" % at)
    return out


def extends(q: Condition, p: Condition) -> bool:
    return not check_extension(q, p)


# === one-step extensions ===


def _bvec(p: Condition) -> BoundVector:
    return tuple(p.b_fun for _ in range(p.length))


def extend_to_rectangle(p: Condition, m: int) -> Condition:
    """Move the stem to a balanced level at or past m, keeping the bad
    set small above it.  The rectangle search raises when the truncation
    has no such level."""
    v = find_small_rectangle(p.bad, _bvec(p), m, p.system)
    sub = cone_system(p.system, v)
    q = Condition(v, sub, frozenset(u for u in p.bad if u in sub.nodes),
                  p.h_fun, p.b_fun, p.gg_witness)
    _require_valid(q, None, "extendToRectangle")
    probs = check_extension(q, p)
    if probs:
        raise InvariantError("rectangle move is not an extension: %s" % probs[0])
    return q


@dataclass(frozen=True)
class DivergenceExtension:
    """The negative branch of a one-step decision: the condition that
    commits the queried set to the bad side, plus the refutation."""

    condition: Condition
    refutation: NotBigND


def _check_open_in(xs: frozenset[Vec], s: System, what: str) -> None:
    if not xs <= s.nodes:
        raise ValidationError("%s has members outside the system" % what)
    viol = _open_violation(xs, s.nodes)
    if viol is not None:
        raise ValidationError("%s is not open: %r escapes at %r" % (what, viol[0], viol[1]))


def sigma1_decide(p: Condition, C: Iterable[Vec], tau: Vec, g: Bound,
                  ) -> Union[SystemWitness, DivergenceExtension]:
    """Decide one existential step above tau.

    Either the bad set joined with C is g-big above tau, witnessed, or
    the extension rooted at tau that adds C to the bad set and lowers
    the small-side bound to g is returned, validated.  Needs the bound
    sandwich h >= g >= b pointwise from tau's norm out to the depth.
    """
    cset = frozenset(C)
    _check_open_in(cset, p.system, "the queried set")
    if tau not in p.system.nodes:
        raise ValidationError("%r is not a node" % (tau,))
    lo = stem_norm(tau)
    ok, at = pointwise_geq(p.h_fun, g, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: h < g at %r" % at)
    ok, at = pointwise_geq(g, p.b_fun, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: g < b at %r" % at)
    target = p.bad | cset
    gv = tuple(g for _ in range(p.length))
    dec = decide_big_nd(target, [tau], gv, p.system)
    if isinstance(dec, SystemWitness):
        return dec
    sub = cone_system(p.system, tau)
    q = Condition(tau, sub, frozenset(v for v in target if v in sub.nodes),
                  p.h_fun, g,
                  derive_gg_witness(p.h_fun, g, p.gg_witness.levels, p.gg_witness.horizon))
    _require_valid(q, None, "sigma1Decide")
    probs = check_extension(q, p)
    if probs:
        raise InvariantError("divergence branch is not an extension: %s" % probs[0])
    return DivergenceExtension(condition=q, refutation=dec)


# === builders ===


@dataclass(frozen=True)
class BuildRecord:
    stage: str  # "init" | "extend" | "split" | "pad"
    round: int
    level: int | None
    leaves: int
    note: str = ""


def _height(s: System) -> int:
    return max(len(c) for v in s.nodes for c in v)


def _emit(trace: list | None, rec: BuildRecord) -> None:
    if trace is not None:
        trace.append(rec)


def _pad_to_level(S: System, level: int, gv: BoundVector, universe: System) -> System:
    lvs = leaves_of(S)
    if all(all(len(c) == level for c in v) for v in lvs):
        return S
    w = weak_concat_extend(S, lambda v: all(len(c) == level for c in v), gv, universe)
    return w.system


def _least_balanced_above(universe: System, height: int) -> int:
    for m in balanced_levels(universe):
        if m > height:
            return m
    raise TruncationError("no balanced level above %d within depth %d"
                          % (height, universe.depth))


def build_totality_system(p: Condition, Cs: Sequence[Iterable[Vec]], g: Bound,
                          trace: list | None = None) -> Condition:
    """Grow a subsystem whose every nonbad full-depth node passes through
    all the supplied open sets, one per round.

    Each round end-extends the current leaves into the bad set joined
    with that round's set, then pads out to the next balanced level of
    the ambient system, so the result is balanced at its own truncation
    depth.  Rounds discover missing largeness lazily and report the
    failing round.  The result keeps the stem and trades the upper bound
    down to g.
    """
    n = p.length
    gv = tuple(g for _ in range(n))
    sets = [frozenset(C) for C in Cs]
    for k, cset in enumerate(sets):
        _check_open_in(cset, p.system, "round %d set" % k)
    lo = stem_norm(p.stem)
    ok, at = pointwise_geq(p.h_fun, g, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: h < g at %r" % at)
    ok, at = pointwise_geq(g, p.b_fun, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: g < b at %r" % at)

    S = System(n, frozenset({p.stem}), frozenset({p.stem}), None)
    _emit(trace, BuildRecord("init", 0, None, 1))
    level = None
    for k, cset in enumerate(sets):
        target = p.bad | cset
        try:
            S = weak_concat_extend(S, lambda v: v in target, gv, p.system).system
        except HypothesisError as e:
            raise NotBigError("round %d: %s" % (k, e)) from e
        _emit(trace, BuildRecord("extend", k, None, len(leaves_of(S))))
        level = _least_balanced_above(p.system, _height(S))
        S = _pad_to_level(S, level, gv, p.system)
        _emit(trace, BuildRecord("pad", k, level, len(leaves_of(S))))
    if level is None:
        level = _least_balanced_above(p.system, _height(S))
        S = _pad_to_level(S, level, gv, p.system)
        _emit(trace, BuildRecord("pad", 0, level, len(leaves_of(S))))
    out_sys = System(n, frozenset({p.stem}), S.nodes, level)
    q = Condition(p.stem, out_sys,
                  frozenset(v for v in p.bad if v in out_sys.nodes),
                  g, p.b_fun,
                  derive_gg_witness(g, p.b_fun, p.gg_witness.levels, p.gg_witness.horizon))
    _require_valid(q, None, "buildTotalitySystem")
    probs = check_extension(q, p)
    if probs:
        raise InvariantError("totality build is not an extension: %s" % probs[0])
    _totality_scan(q, sets)
    return q


def _totality_scan(q: Condition, sets: list[frozenset[Vec]]) -> None:
    # every nonbad full-depth leaf must have a marker prefix per round
    nodes = q.system.nodes
    for leaf in leaves_of(q.system):
        if any(vec_leq(b, leaf) for b in q.bad):
            continue
        for k, cset in enumerate(sets):
            if not any(vec_leq(u, leaf) and u in cset for u in nodes):
                raise InvariantError(
                    "leaf %r misses the round-%d set" % (leaf, k))


def build_splitting_system(p: Condition, G: FunctionalTable, g: Bound, mode: str,
                           rounds: int = 1, trace: list | None = None) -> Condition:
    """Grow an exactly-bushy subsystem whose leaf cones at successive
    balanced levels pairwise split under the functional, in the requested
    sense.

    Each round searches the level slices strictly above the current
    leaves for one full-slice family per leaf that passes the pairwise
    splitting check, grafts it, and pads to the next balanced level.
    The search is over whole slices rather than the budgeted peeling
    recursion, which a truncated universe cannot afford; a round that
    exhausts the truncation without a splitting family raises, naming
    the level searched from.  The output drops the upper bound to g and
    is re-scanned: same-level distinct nonbad nodes in the relevant
    sense get incomparable values by the next recorded level.
    """
    n = p.length
    if mode not in ("1D", "local", "global"):
        raise ValidationError("mode must be 1D, local or global")
    if mode == "1D" and n != 1:
        raise ValidationError("1D mode needs a length-1 condition")
    if mode != "1D" and n < 2:
        raise ValidationError("%s mode needs length at least 2" % mode)
    if rounds < 1:
        raise ValidationError("need at least one round")
    if G.universe.nodes != p.system.nodes:
        raise ValidationError("functional universe differs from the condition's system")
    lo = stem_norm(p.stem)
    ok, at = pointwise_geq(p.h_fun, g, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: h < g at %r" % at)
    ok, at = pointwise_geq(g, p.b_fun, lo, p.depth)
    if not ok:
        raise HypothesisError("bound sandwich fails: g < b at %r" % at)
    for leaf in leaves_of(p.system):
        if leaf not in p.bad and len(G.value(leaf)) < rounds:
            raise HypothesisError(
                "functional value at %r shorter than the round count" % (leaf,))

    gv = tuple(g for _ in range(n))
    S = System(n, frozenset({p.stem}), frozenset({p.stem}), None)
    levels: list[int] = [_least_balanced_above(p.system, _height(S))]
    S = _pad_to_level(S, levels[0], gv, p.system)
    _emit(trace, BuildRecord("init", 0, levels[0], len(leaves_of(S))))
    for k in range(1, rounds + 1):
        lvs = sorted_vecs(leaves_of(S))
        sets, found = _slice_split_family(lvs, p.bad, G, mode, levels[-1] + 1, p.system)
        union = frozenset().union(*sets)
        dec = decide_big_nd(union, lvs, gv, p.system)
        if isinstance(dec, NotBigND):
            raise InvariantError("slice family not big above %r" % (dec.sample_failure(),))
        _emit(trace, BuildRecord("split", k, found, len(leaves_of(dec.system))))
        S = _merge_stage(S, dec.system)
        nxt = found if found in balanced_levels(p.system) else \
            _least_balanced_above(p.system, found)
        S = _pad_to_level(S, nxt, gv, p.system)
        levels.append(nxt)
        _emit(trace, BuildRecord("pad", k, nxt, len(leaves_of(S))))
    out_sys = System(n, frozenset({p.stem}), S.nodes, levels[-1])
    q = Condition(p.stem, out_sys,
                  frozenset(v for v in p.bad if v in out_sys.nodes),
                  g, p.b_fun,
                  derive_gg_witness(g, p.b_fun, p.gg_witness.levels, p.gg_witness.horizon))
    _require_valid(q, None, "buildSplittingSystem")
    if not is_bushy_system(out_sys, gv, exact=True):
        raise InvariantError("built system is not exactly bushy")
    probs = check_extension(q, p)
    if probs:
        raise InvariantError("splitting build is not an extension: %s" % probs[0])
    verify_splitting_levels(q, G, levels, mode)
    return q


def _merge_stage(S: System, upper: System) -> System:
    from .systems import concat_systems
    return concat_systems(S, upper)


def _slice_split_family(lvs: list[Vec], bad: frozenset[Vec], G: FunctionalTable,
                        mode: str, from_level: int, universe: System,
                        ) -> tuple[list[frozenset[Vec]], int]:
    depth = universe.depth
    kind = "local" if mode == "local" else "global"
    for L in range(from_level, depth + 1):
        sets = []
        for t in lvs:
            s = frozenset(v for v in universe.nodes
                          if vec_leq(t, v) and all(len(c) == L for c in v))
            sets.append(s)
        if any(not s for s in sets):
            continue
        ok = True
        for i in range(len(lvs)):
            for j in range(i + 1, len(lvs)):
                if mode == "global" and lvs[i][0] == lvs[j][0]:
                    continue
                if mode == "local" and chop(lvs[i]) != chop(lvs[j]):
                    continue
                if is_split(sets[i], sets[j], bad, G, kind) is not None:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return sets, L
    raise NoSplittingError(
        "no splitting slice family above level %d by depth %d" % (from_level - 1, depth))


def verify_splitting_levels(q: Condition, G: FunctionalTable, levels: Sequence[int],
                            mode: str) -> None:
    """Scan the built system: nodes at one recorded level that differ in
    the mode's sense have incomparable values at the next, bad nodes
    excepted.  1D compares all pairs, local only pairs sharing every
    earlier coordinate, global pairs with distinct first coordinates."""
    from .words import word_incomparable

    for a, b in zip(levels, levels[1:]):
        uppers = level_slice(q.system, b)
        for i, u in enumerate(uppers):
            if u in q.bad:
                continue
            for v in uppers[i + 1:]:
                if v in q.bad:
                    continue
                if mode == "1D":
                    differ = u[0][:a] != v[0][:a]
                elif mode == "local":
                    differ = chop(u) == chop(v) and u[-1][:a] != v[-1][:a]
                else:
                    differ = u[0][:a] != v[0][:a]
                if not differ:
                    continue
                if not word_incomparable(G.value(u), G.value(v)):
                    raise InvariantError(
                        "values at %r and %r stay comparable past level %d" % (u, v, a))


# === restriction and homogenization ===


def restrict_i(q: Condition) -> Condition:
    """One step down: chop the stem and system, project the bad set over
    the last coordinate against the stem's last word."""
    if q.length < 2:
        raise ValidationError("restriction needs length at least 2")
    sub = chop_system(q.system)
    bad = project_rel(q.bad, [q.stem], q.b_fun, q.system)
    out = Condition(chop(q.stem), sub, frozenset(bad), q.h_fun, q.b_fun, q.gg_witness)
    _require_valid(out, None, "restrictI")
    return out


def compose_restrictions(q: Condition, m: int) -> Condition:
    if not 1 <= m <= q.length:
        raise ValidationError("target length %d out of range" % m)
    out = q
    while out.length > m:
        out = restrict_i(out)
    return out


def _level_systems(q: Condition) -> list[System]:
    """Chopped systems indexed so that entry k has arity k+1."""
    out = [q.system]
    while out[-1].arity > 1:
        out.append(chop_system(out[-1]))
    out.reverse()
    return out


def homogenization_layers(q: Condition) -> dict[int, frozenset[Vec]]:
    """The projection chain of the bad set: layer n is the bad set, layer
    k the relative projection of layer k+1 against the stem."""
    n = q.length
    systems = _level_systems(q)
    layers: dict[int, frozenset[Vec]] = {n: q.bad}
    for k in range(n - 1, 0, -1):
        layers[k] = frozenset(project_rel(layers[k + 1], [q.stem[: k + 1]],
                                          q.b_fun, systems[k]))
    return layers


def nu_homogenize(q: Condition) -> Condition:
    """Close the bad set under the projection chain: a tuple is bad when
    any of its prefixes lands in the matching projection layer.  The
    result extends the input, is idempotent, and passes the membership
    equality that defines the homogenized class."""
    n = q.length
    if n == 1:
        return q
    layers = homogenization_layers(q)
    bad = frozenset(v for v in q.system.nodes
                    if any(v[:k] in layers[k] for k in range(1, n + 1)))
    out = Condition(q.stem, q.system, bad, q.h_fun, q.b_fun, q.gg_witness)
    _require_valid(out, None, "nuHomogenize")
    probs = check_extension(out, q)
    if probs:
        raise InvariantError("homogenization is not an extension: %s" % probs[0])
    if not qn_member(out):
        raise InvariantError("homogenized condition fails the membership equality")
    return out


def qn_member(q: Condition) -> bool:
    """The homogenized-class test: at every length, projecting the bad
    set against the stem's last word agrees with slicing it there."""
    if q.length == 1:
        return True
    proj = project_rel(q.bad, [q.stem], q.b_fun, q.system)
    dom = chop_system(q.system)
    direct = frozenset(d for d in dom.nodes if d + (q.stem[-1],) in q.bad)
    if frozenset(proj) != direct:
        return False
    return qn_member(restrict_i(q))


def lift(p: Condition, J: MockJump) -> Condition:
    """The canonical one-up preimage: over each node hang the full tree
    bounded by the upper bound out to the node's norm; the new fiber is
    all bad over old bad nodes and diagonal-hitting elsewhere.  Restricting
    the result gives back p on the nose."""
    ok, at = pointwise_geq(p.h_fun, p.b_fun, 0, p.depth)
    if not ok:
        raise HypothesisError("lift needs h >= b from level 0, fails at %r" % at)
    if not b_dnc_set(J, p.length, p.system) <= p.bad:
        raise HypothesisError(
            "the input's bad set misses part of the jump's diagonal set")
    fibers: dict[int, frozenset[Word]] = {}

    def fiber(height: int) -> frozenset[Word]:
        got = fibers.get(height)
        if got is None:
            for m in range(height + 1):
                if is_huge(p.h_fun.eval(m)):
                    raise ValidationError("upper bound saturates inside the lift")
            got = full_tree((), lambda m: int(p.h_fun.eval(m)), height).nodes
            fibers[height] = got
        return got

    nodes: set[Vec] = set()
    bad: set[Vec] = set()
    for v in p.system.nodes:
        ws = fiber(min(len(c) for c in v))
        nodes.update(v + (w,) for w in ws)
        if v in p.bad:
            bad.update(v + (w,) for w in ws)
        else:
            bad.update(v + (w,) for w in ws
                       if any(J.converges(v, e) == w[e] for e in range(len(w))))
    stem = p.stem + ((),)
    sys2 = System(p.length + 1, frozenset({stem}), frozenset(nodes),
                  p.system.depth_bound)
    q = Condition(stem, sys2, frozenset(bad), p.h_fun, p.b_fun, p.gg_witness)
    _require_valid(q, J, "lift")
    return q
