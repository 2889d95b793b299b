"""Monotone functionals on forest systems and the splitting calculus.

A functional table assigns a binary word to every node of a universe,
monotone along the node order.  On top of that sit the splitting
predicates (global and local), exact search for a single big splitting
pair, the longest-comparable-trace computation used when no splitting
exists, the combinatorial extraction of a splitting pair from prepared
families, and the reverse recursion producing pairwise-splitting
families.

Searches are exact and exponential in the number of distinct values in a
cone; universes are expected to be desk-sized.  All enumeration orders
are canonical so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

from .bounds import Bound, scaled
from .errors import (
    ExistsSplitError,
    HypothesisError,
    InvariantError,
    NoSplittingError,
    NotBigError,
    ValidationError,
)
from .forests import Forest, full_subforest
from .largeness import NotBig, Witness, decide_big
from .systems import (
    BoundVector,
    NotBigND,
    System,
    SystemWitness,
    TargetLike,
    _member_fn,
    as_forest,
    chop_system,
    decide_big_nd,
    fiber_forest,
    leaves_of,
    of_forest,
    project_rel,
    scale_vec,
)
from .words import (
    Vec,
    Word,
    chop,
    is_prefix_free,
    sorted_vecs,
    sorted_words,
    vec_leq,
    word_incomparable,
    word_key,
    word_leq,
    wrap1,
)


@dataclass
class FunctionalTable:
    universe: System
    table: dict[Vec, Word]

    def value(self, v: Vec) -> Word:
        try:
            return self.table[v]
        except KeyError:
            raise ValidationError("functional has no value at %r" % (v,)) from None

    def validate(self) -> None:
        missing = self.universe.nodes - set(self.table)
        if missing:
            raise ValidationError("functional undefined on %r"
                                  % (sorted_vecs(missing)[:3],))
        for v, w in self.table.items():
            if any(bit not in (0, 1) for bit in w):
                raise ValidationError("value at %r is not binary" % (v,))
        nodes = sorted_vecs(self.universe.nodes)
        for i, u in enumerate(nodes):
            wu = self.table[u]
            for v in nodes[i + 1:]:
                if vec_leq(u, v) and not word_leq(wu, self.table[v]):
                    raise ValidationError(
                        "monotonicity fails between %r and %r" % (u, v))
                if vec_leq(v, u) and not word_leq(self.table[v], wu):
                    raise ValidationError(
                        "monotonicity fails between %r and %r" % (v, u))

    @classmethod
    def from_function(cls, universe: System, fn: Callable[[Vec], Word],
                      check: bool = True) -> "FunctionalTable":
        out = cls(universe, {v: tuple(fn(v)) for v in universe.nodes})
        if check:
            out.validate()
        return out


def is_split(a0: Iterable[Vec], a1: Iterable[Vec], mod_b: TargetLike,
             table: FunctionalTable, kind: str = "global") -> tuple[Vec, Vec] | None:
    """First violating cross pair, or None when the sets split.

    Global: every pair outside the mod set must get incomparable values.
    Local: only pairs sharing all but the last coordinate are compared;
    at arity 1 the two notions coincide."""
    if kind not in ("global", "local"):
        raise ValidationError("kind must be global or local")
    bmem = _member_fn(mod_b)
    arity = table.universe.arity
    left = sorted_vecs(v for v in a0 if not bmem(v))
    right = sorted_vecs(v for v in a1 if not bmem(v))
    for v in left:
        if v not in table.universe.nodes:
            raise ValidationError("%r is outside the universe" % (v,))
    for v in right:
        if v not in table.universe.nodes:
            raise ValidationError("%r is outside the universe" % (v,))
    local = kind == "local" and arity >= 2
    for v0 in left:
        for v1 in right:
            if local and chop(v0) != chop(v1):
                continue
            if not word_incomparable(table.value(v0), table.value(v1)):
                return (v0, v1)
    return None


# === views: a functional restricted to one fiber ===

def _view(table: FunctionalTable, mod_b: TargetLike, at: Vec | None
          ) -> tuple[Forest, Callable[[Word], Word], Callable[[Word], bool]]:
    bmem = _member_fn(mod_b)
    if table.universe.arity == 1:
        if at is not None:
            raise ValidationError("no domain prefix in an arity-1 universe")
        forest = as_forest(table.universe)
        return forest, lambda w: table.value((w,)), lambda w: bmem((w,))
    if at is None:
        raise ValidationError("a domain prefix is required from arity 2 on")
    if len(at) != table.universe.arity - 1:
        raise ValidationError("domain prefix arity mismatch")
    forest = fiber_forest(table.universe, at)
    return forest, lambda w: table.value(at + (w,)), lambda w: bmem(at + (w,))


@dataclass(frozen=True)
class SplitPair:
    left: frozenset[Word]
    right: frozenset[Word]
    left_values: tuple[Word, ...]
    right_values: tuple[Word, ...]
    left_witness: Witness
    right_witness: Witness
    at: Vec | None
    above: Word


def _pair_dfs(values: list[Word], side_ok: Callable[[frozenset[Word]], bool]
              ) -> tuple[frozenset[Word], frozenset[Word]] | None:
    """Search for a value antichain whose upward closure and whose
    incomparable complement both pass the largeness test.

    Any splitting pair normalizes to such an antichain (the minimal
    values of one side), so a miss is a proof of absence.  Growing the
    antichain can only grow the closure side and shrink the complement
    side; a complement that already fails prunes the whole branch."""
    if side_ok(frozenset()) and side_ok(frozenset(values)):
        return frozenset(values), frozenset()

    def up(m: tuple[Word, ...]) -> frozenset[Word]:
        return frozenset(v for v in values if any(word_leq(x, v) for x in m))

    def perp(m: tuple[Word, ...]) -> frozenset[Word]:
        return frozenset(v for v in values
                         if all(word_incomparable(x, v) for x in m))

    result: tuple[frozenset[Word], frozenset[Word]] | None = None

    def dfs(start: int, m: tuple[Word, ...]) -> None:
        nonlocal result
        if result is not None:
            return
        p = perp(m)
        if not side_ok(p):
            return
        u = up(m)
        if side_ok(u):
            result = (p, u)
            return
        for i in range(start, len(values)):
            if all(word_incomparable(values[i], x) for x in m):
                dfs(i + 1, m + (values[i],))
                if result is not None:
                    return

    for i in range(len(values)):
        dfs(i + 1, (values[i],))
        if result is not None:
            break
    return result


def search_splitting(table: FunctionalTable, mod_b: TargetLike, mu: Word,
                     bound: Bound, at: Vec | None = None) -> SplitPair | None:
    """Exact search for two sets big above mu in the cone that split mod
    the given set, working inside one fiber (or the whole arity-1
    universe).  A miss is a proof of absence within the truncation."""
    forest, val, bmem = _view(table, mod_b, at)
    if mu not in forest.nodes:
        raise ValidationError("%r is not in the searched fiber" % (mu,))
    cone = full_subforest(forest, mu)
    in_b = frozenset(w for w in cone.nodes if bmem(w))
    outside = [w for w in sorted_words(cone.nodes) if w not in in_b]
    values = sorted({val(w) for w in outside}, key=word_key)
    memo: dict[frozenset[Word], object] = {}

    def decide_vals(vs: frozenset[Word]):
        if vs not in memo:
            target = in_b | frozenset(w for w in outside if val(w) in vs)
            memo[vs] = decide_big(target, [mu], bound, cone)
        return memo[vs]

    hit = _pair_dfs(values, lambda vs: isinstance(decide_vals(vs), Witness))
    if hit is None:
        return None
    v0, v1 = hit
    w0, w1 = decide_vals(v0), decide_vals(v1)
    # keep only the witness leaves: bigness is certified by the same
    # witness and the values stay as short as the decision allows
    return SplitPair(w0.leaves(), w1.leaves(),
                     tuple(sorted(v0, key=word_key)),
                     tuple(sorted(v1, key=word_key)),
                     w0, w1, at, mu)


def _search_multi(table: FunctionalTable, mod_b: TargetLike, mus: tuple[Word, ...],
                  bound: Bound, at: Vec | None
                  ) -> tuple[frozenset[Word], frozenset[Word]] | None:
    """Joint splitting pair big above every listed fiber node at once.

    One value antichain serves all anchors, so cross pairs between cones
    of different anchors split as well; this is what keeps a fiberwise
    union of pairs locally splitting when anchors pile up in one fiber."""
    forest, val, bmem = _view(table, mod_b, at)
    cones = {}
    region: set[Word] = set()
    for mu in mus:
        if mu not in forest.nodes:
            return None
        cones[mu] = full_subforest(forest, mu)
        region |= cones[mu].nodes
    in_b = frozenset(w for w in region if bmem(w))
    outside = [w for w in sorted_words(region) if w not in in_b]
    values = sorted({val(w) for w in outside}, key=word_key)
    memo: dict[frozenset[Word], frozenset[Word] | None] = {}

    def side(vs: frozenset[Word]) -> frozenset[Word] | None:
        # union of witness leaves above each anchor, None if any anchor fails
        if vs not in memo:
            pre = in_b | frozenset(w for w in outside if val(w) in vs)
            leaves: set[Word] = set()
            for mu in mus:
                cone = cones[mu]
                tgt = frozenset(w for w in cone.nodes if w in pre)
                dec = decide_big(tgt, [mu], bound, cone)
                if isinstance(dec, NotBig):
                    leaves = None
                    break
                leaves |= dec.leaves()
            memo[vs] = None if leaves is None else frozenset(leaves)
        return memo[vs]

    hit = _pair_dfs(values, lambda vs: side(vs) is not None)
    if hit is None:
        return None
    v0, v1 = hit
    return side(v0), side(v1)


@dataclass(frozen=True)
class ThetaResult:
    theta: Word
    chain: tuple[Word, ...]


def compute_theta(table: FunctionalTable, mod_b: TargetLike, mu: Word,
                  bound: Bound, at: Vec | None = None) -> ThetaResult:
    """The longest value prefix whose upward preimage (joined with the mod
    set) stays big above mu.  Requires that no big splitting pair exists
    in the fiber; the resulting trace is then a chain."""
    pair = search_splitting(table, mod_b, mu, bound, at)
    if pair is not None:
        raise ExistsSplitError("a big splitting pair exists above %r" % (mu,),
                               pair=pair)
    forest, val, bmem = _view(table, mod_b, at)
    cone = full_subforest(forest, mu)
    in_b = frozenset(w for w in cone.nodes if bmem(w))
    candidates = {(): None}
    for w in cone.nodes:
        v = val(w)
        for k in range(len(v) + 1):
            candidates[v[:k]] = None
    chain = []
    for alpha in sorted(candidates, key=word_key):
        target = in_b | frozenset(w for w in cone.nodes
                                  if w not in in_b and word_leq(alpha, val(w)))
        if isinstance(decide_big(target, [mu], bound, cone), Witness):
            chain.append(alpha)
    if not chain:
        raise NotBigError("the whole cone above %r is not big" % (mu,))
    for i, a in enumerate(chain):
        for b in chain[i + 1:]:
            if word_incomparable(a, b):
                raise InvariantError(
                    "trace contains incomparable %r and %r" % (a, b))
    return ThetaResult(max(chain, key=word_key), tuple(chain))


def splits_above(table: FunctionalTable, mod_b: TargetLike, mu: Word,
                 bound: Bound, at: Vec | None = None) -> bool:
    return search_splitting(table, mod_b, mu, bound, at) is not None


# === the combinatorial extraction ===

EFamily = Union[Mapping, tuple]


@dataclass(frozen=True)
class SplittingCertificate:
    case: str  # "f-in-b" | "e-in-b" | "perp-geq" | "geq-perp"
    alpha: Word | None
    e_prime: frozenset[Vec]
    f_prime: frozenset[Vec]
    e_witness: SystemWitness
    f_witness: SystemWitness
    kind: str = "global"


def _as_vecset(xs: Iterable, arity: int) -> frozenset[Vec]:
    out = set()
    for x in xs:
        if arity == 1 and x and isinstance(x[0], int):
            out.add((x,))
        elif arity == 1 and x == ():
            out.add(((),))
        else:
            out.add(tuple(x))
    return frozenset(out)


def extract_splitting(a_set: Iterable[Vec], e_side: EFamily, f_set: Iterable[Vec],
                      mod_b: TargetLike, g_bounds: BoundVector, h_bounds: BoundVector,
                      table: FunctionalTable, s: Vec, s_star: Vec,
                      ) -> SplittingCertificate:
    """Extract one splitting pair from prepared families.

    Hypotheses, each checked and named on failure: the anchor set is big
    at triple bounds above s; each anchor carries a pair of big splitting
    sets (arity 1: one pair per anchor; otherwise two sets uniformly big
    above the anchor set, locally splitting at each anchor, with an open
    mod set); the target set above s_star is big at triple bounds and all
    its values outside the mod set are longer than any value on the union
    family outside the mod set.

    The output pair is found by the maximal-prefix case analysis, every
    designated set's largeness decided outright, and the certificate is
    re-verified before it is returned."""
    universe = table.universe
    n = universe.arity
    A = _as_vecset(a_set, n)
    F = _as_vecset(f_set, n)
    bmem = _member_fn(mod_b)
    if s not in universe.nodes or s_star not in universe.nodes:
        raise HypothesisError("anchors: s and s_star must be universe nodes")
    g3 = scale_vec(3, g_bounds)
    h3 = scale_vec(3, h_bounds)
    if isinstance(decide_big_nd(A, [s], g3, universe), NotBigND):
        raise HypothesisError("anchor set: not big at triple bounds above %r" % (s,))

    if n == 1:
        if not isinstance(e_side, Mapping):
            raise ValidationError("arity 1 takes a per-anchor family")
        fam: dict[tuple[Vec, int], frozenset[Vec]] = {}
        for (rho, i), xs in e_side.items():
            key = rho if isinstance(rho, tuple) and rho and isinstance(rho[0], tuple) else wrap1(tuple(rho))
            fam[(key, int(i))] = _as_vecset(xs, 1)
        for rho in sorted_vecs(A):
            for i in (0, 1):
                if (rho, i) not in fam:
                    raise HypothesisError(
                        "splitting family: missing set %d at %r" % (i, rho))
                if isinstance(decide_big_nd(fam[(rho, i)], [rho], g3, universe), NotBigND):
                    raise HypothesisError(
                        "splitting family: set %d at %r not big at triple bounds" % (i, rho))
            bad = is_split(fam[(rho, 0)], fam[(rho, 1)], mod_b, table, "global")
            if bad is not None:
                raise HypothesisError(
                    "splitting family: pair at %r does not split, e.g. %r" % (rho, bad))
        E = frozenset().union(*fam.values()) if fam else frozenset()
    else:
        if not (isinstance(e_side, tuple) and len(e_side) == 2):
            raise ValidationError("arity >= 2 takes a pair of sets")
        e0 = _as_vecset(e_side[0], n)
        e1 = _as_vecset(e_side[1], n)
        for v in sorted_vecs(universe.nodes):
            if bmem(v):
                for w in sorted_vecs(universe.nodes):
                    if vec_leq(v, w) and not bmem(w):
                        raise HypothesisError("mod set: not open in the universe")
        chop_univ = chop_system(universe)
        for a in sorted_vecs(A):
            inter: frozenset[Vec] | None = None
            for part_set in (e0, e1):
                p = project_rel(part_set, [a], g3[-1], universe)
                inter = p if inter is None else inter & p
            dec0 = decide_big_nd(inter, [chop(a)], g3[:-1], chop_univ)
            if isinstance(dec0, NotBigND):
                raise HypothesisError(
                    "splitting family: not uniformly big at triple bounds above %r" % (a,))
        for a in sorted_vecs(A):
            part0 = frozenset(v for v in e0 if vec_leq(a, v))
            part1 = frozenset(v for v in e1 if vec_leq(a, v))
            bad = is_split(part0, part1, mod_b, table, "local")
            if bad is not None:
                raise HypothesisError(
                    "splitting family: parts at %r do not locally split, e.g. %r" % (a, bad))
        E = e0 | e1

    if isinstance(decide_big_nd(F, [s_star], h3, universe), NotBigND):
        raise HypothesisError("target set: not big at triple bounds above %r" % (s_star,))
    e_out = sorted_vecs(v for v in E if not bmem(v))
    f_out = sorted_vecs(v for v in F if not bmem(v))
    if e_out and f_out:
        longest_e = max(len(table.value(v)) for v in e_out)
        for v in f_out:
            if len(table.value(v)) <= longest_e:
                raise HypothesisError(
                    "value lengths: %r does not exceed the family values" % (v,))

    cert = _case_analysis(E, F, mod_b, g_bounds, h_bounds, table, s, s_star)
    bad = is_split(cert.e_prime, cert.f_prime, mod_b, table, "global")
    if bad is not None:
        raise InvariantError("certificate fails to split at %r" % (bad,))
    return cert


def _case_analysis(E: frozenset[Vec], F: frozenset[Vec], mod_b: TargetLike,
                   gv: BoundVector, hv: BoundVector, table: FunctionalTable,
                   s: Vec, s_star: Vec) -> SplittingCertificate:
    universe = table.universe
    bmem = _member_fn(mod_b)
    f_in_b = frozenset(v for v in F if bmem(v))
    e_in_b = frozenset(v for v in E if bmem(v))

    dec = decide_big_nd(f_in_b, [s_star], hv, universe)
    if isinstance(dec, SystemWitness):
        ew = decide_big_nd(E, [s], gv, universe)
        if isinstance(ew, NotBigND):
            raise InvariantError("family union lost its largeness above %r" % (s,))
        return SplittingCertificate("f-in-b", None, E, f_in_b, ew, dec)
    dec = decide_big_nd(e_in_b, [s], gv, universe)
    if isinstance(dec, SystemWitness):
        fw = decide_big_nd(F, [s_star], hv, universe)
        if isinstance(fw, NotBigND):
            raise InvariantError("target set lost its largeness above %r" % (s_star,))
        return SplittingCertificate("e-in-b", None, e_in_b, F, dec, fw)

    def part(xs: frozenset[Vec], in_b: frozenset[Vec], rel: str, alpha: Word) -> frozenset[Vec]:
        out = set(in_b)
        for v in xs:
            if v in in_b:
                continue
            w = table.value(v)
            if rel == "geq" and word_leq(alpha, w):
                out.add(v)
            elif rel == "leq" and word_leq(w, alpha):
                out.add(v)
            elif rel == "perp" and word_incomparable(w, alpha):
                out.add(v)
        return frozenset(out)

    candidates = {()}
    for v in F:
        if not bmem(v):
            w = table.value(v)
            for k in range(len(w) + 1):
                candidates.add(w[:k])
    alpha = None
    f_geq_witness = None
    for cand in sorted(candidates, key=lambda a: (-len(a), a)):
        dec = decide_big_nd(part(F, f_in_b, "geq", cand), [s_star], hv, universe)
        if isinstance(dec, SystemWitness):
            alpha = cand
            f_geq_witness = dec
            break
    if alpha is None:
        raise NotBigError("target set is not big above %r even in full" % (s_star,))

    e_perp = part(E, e_in_b, "perp", alpha)
    e_leq = part(E, e_in_b, "leq", alpha)
    d_perp = decide_big_nd(e_perp, [s], gv, universe)
    if isinstance(d_perp, SystemWitness):
        return SplittingCertificate(
            "perp-geq", alpha, e_perp, part(F, f_in_b, "geq", alpha),
            d_perp, f_geq_witness)
    if isinstance(decide_big_nd(e_leq, [s], gv, universe), SystemWitness):
        raise InvariantError(
            "below-or-equal part big but incomparable part small at %r" % (alpha,))
    e_geq = part(E, e_in_b, "geq", alpha)
    d_geq = decide_big_nd(e_geq, [s], gv, universe)
    if isinstance(d_geq, NotBigND):
        raise InvariantError("no third of the family is big at %r" % (alpha,))
    f_perp = part(F, f_in_b, "perp", alpha)
    d_fperp = decide_big_nd(f_perp, [s_star], hv, universe)
    if isinstance(d_fperp, NotBigND):
        raise InvariantError(
            "maximality of %r did not leave an incomparable big part" % (alpha,))
    return SplittingCertificate("geq-perp", alpha, e_geq, f_perp, d_geq, d_fperp)


# === pairwise splitting families ===

@dataclass(frozen=True)
class SplitFamily:
    mode: str
    taus: tuple[Vec, ...]
    sets: tuple[frozenset[Vec], ...]
    witnesses: tuple[SystemWitness, ...]


def _require_open(mod_b: TargetLike, universe: System) -> None:
    bmem = _member_fn(mod_b)
    inside = sorted_vecs(v for v in universe.nodes if bmem(v))
    for v in inside:
        for u in universe.nodes:
            if vec_leq(v, u) and not bmem(u):
                raise ValidationError(
                    "mod set must be open in the universe; %r leaves it at %r" % (v, u))


def find_pairwise_splittings(taus: Iterable[Vec], mod_b: TargetLike,
                             table: FunctionalTable, bound, mode: str,
                             ) -> SplitFamily:
    """Produce one big set per input node, pairwise splitting mod the
    given open set in the requested sense.

    1D: the reverse recursion over the last input; each earlier node gets
    per-anchor splitting pairs by exact search, the last node a set of
    long values, and the extraction lemma peels the budget one factor of
    three at a time.  local: run the 1D machinery inside every fiber of a
    bushily chosen domain set.  global: the surgery recursion over the
    input set, splitting across distinct first coordinates."""
    universe = table.universe
    if mode not in ("1D", "local", "global"):
        raise ValidationError("mode must be 1D, local or global")
    _require_open(mod_b, universe)
    tt = tuple(taus)
    if not tt:
        raise ValidationError("need at least one input node")
    if mode == "1D":
        if universe.arity != 1:
            raise ValidationError("1D mode needs an arity-1 universe")
        words = tuple(t[0] if (t and isinstance(t[0], tuple)) else tuple(t)
                      for t in tt)
        if not isinstance(bound, Bound):
            raise ValidationError("1D mode takes a single bound")
        sets = _find_1d(words, mod_b, table, bound)
        vec_taus = tuple(wrap1(w) for w in words)
        out_sets = tuple(frozenset(wrap1(w) for w in s) for s in sets)
    elif mode == "local":
        vec_taus = tt
        out_sets = _find_local(tt, mod_b, table, tuple(bound))
    else:
        vec_taus = tt
        out_sets = _find_global(tt, mod_b, table, tuple(bound))
    witnesses = []
    gv = (bound,) if mode == "1D" else tuple(bound)
    for t, s in zip(vec_taus, out_sets):
        if mode == "local":
            proj = project_rel(s, [t], gv[-1], universe)
            dec = decide_big_nd(proj, [chop(t)], gv[:-1], chop_system(universe))
            if isinstance(dec, NotBigND):
                raise InvariantError("output set not uniformly big above %r" % (t,))
            witnesses.append(dec)
        else:
            dec = decide_big_nd(s, [t], gv, universe)
            if isinstance(dec, NotBigND):
                raise InvariantError("output set not big above %r" % (t,))
            witnesses.append(dec)
    kind = "local" if mode == "local" else "global"
    for i in range(len(out_sets)):
        for j in range(i + 1, len(out_sets)):
            if mode == "global" and vec_taus[i][0] == vec_taus[j][0]:
                continue
            bad = is_split(out_sets[i], out_sets[j], mod_b, table, kind)
            if bad is not None:
                raise InvariantError("outputs %d and %d fail to split at %r" % (i, j, bad))
    return SplitFamily(mode, vec_taus, out_sets, tuple(witnesses))


class TruncationLike(NoSplittingError):
    """Raised when the universe runs out of depth for a required set."""


def _find_1d(words: tuple[Word, ...], mod_b: TargetLike, table: FunctionalTable,
             bound: Bound) -> list[frozenset[Word]]:
    universe = table.universe
    forest = as_forest(universe)
    for w in words:
        if w not in forest.nodes:
            raise ValidationError("%r is not a universe node" % (w,))
    k = len(words)
    if k == 1:
        return [frozenset({words[0]})]
    prev = _find_1d(words[:-1], mod_b, table, scaled(3, bound))
    tau_star = words[-1]
    bmem = _member_fn(mod_b)
    fam_by_j: list[dict[tuple[Vec, int], frozenset[Vec]]] = []
    all_values: list[Word] = []
    for j, a_j in enumerate(prev):
        fam: dict[tuple[Vec, int], frozenset[Vec]] = {}
        for rho in sorted_words(a_j):
            pair = search_splitting(table, mod_b, rho, scaled(3, bound))
            if pair is None:
                raise NoSplittingError(
                    "no splitting pair at the tripled bound above %r" % (rho,),
                    node=rho)
            fam[(wrap1(rho), 0)] = frozenset(wrap1(w) for w in pair.left)
            fam[(wrap1(rho), 1)] = frozenset(wrap1(w) for w in pair.right)
            for side in (pair.left, pair.right):
                all_values.extend(table.value((w,)) for w in side if not bmem((w,)))
        fam_by_j.append(fam)
    m_star = 1 + max((len(v) for v in all_values), default=0)
    f_target = frozenset(
        (w,) for w in forest.nodes
        if bmem((w,)) or len(table.value((w,))) >= m_star)
    dec = decide_big_nd(f_target, [wrap1(tau_star)], (scaled(3 ** (k - 1), bound),), universe)
    if isinstance(dec, NotBigND):
        raise TruncationLike(
            "no set of long enough values above %r at the budget" % (tau_star,),
            node=tau_star)
    f_cur = frozenset(v[0] for v in leaves_of(dec.system))
    outputs: list[frozenset[Word]] = [frozenset()] * (k - 1)
    for j in range(k - 1, 0, -1):
        cert = extract_splitting(
            [wrap1(w) for w in prev[j - 1]], fam_by_j[j - 1],
            [wrap1(w) for w in f_cur], mod_b,
            (bound,), (scaled(3 ** (j - 1), bound),),
            table, wrap1(words[j - 1]), wrap1(tau_star))
        outputs[j - 1] = frozenset(v[0] for v in cert.e_prime)
        f_cur = frozenset(v[0] for v in cert.f_prime)
    return outputs + [f_cur]


def _find_local(taus: tuple[Vec, ...], mod_b: TargetLike, table: FunctionalTable,
                gv: BoundVector) -> tuple[frozenset[Vec], ...]:
    universe = table.universe
    if universe.arity < 2:
        raise ValidationError("local mode needs arity at least 2")
    chops = {chop(t) for t in taus}
    if len(chops) != 1:
        raise ValidationError("local mode inputs must share all but the last coordinate")
    sigma = next(iter(chops))
    mus = tuple(t[-1] for t in taus)
    if len(set(mus)) != len(mus):
        raise ValidationError("duplicate input nodes")
    chop_univ = chop_system(universe)
    if sigma not in chop_univ.nodes:
        raise ValidationError("%r is not a domain node" % (sigma,))
    bmem = _member_fn(mod_b)
    per_domain: dict[Vec, list[frozenset[Word]]] = {}

    def fiber_success(d: Vec) -> bool:
        if d in per_domain:
            return per_domain[d] is not None
        ff = fiber_forest(universe, d)
        if any(mu not in ff.nodes for mu in mus):
            per_domain[d] = None
            return False
        sub = FunctionalTable(of_forest(ff), {(w,): table.value(d + (w,)) for w in ff.nodes})
        try:
            sets = _find_1d(mus, lambda v: bmem(d + (v[0],)), sub, gv[-1])
        except (NoSplittingError, HypothesisError):
            per_domain[d] = None
            return False
        per_domain[d] = sets
        return True

    dec = decide_big_nd(fiber_success, [sigma], gv[:-1], chop_univ)
    if isinstance(dec, NotBigND):
        raise NoSplittingError(
            "domain nodes carrying all fiber splittings are not big above %r" % (sigma,),
            node=sigma)
    out = [set() for _ in taus]
    for d in leaves_of(dec.system):
        sets = per_domain[d]
        for j, s in enumerate(sets):
            out[j].update(d + (w,) for w in s)
    return tuple(frozenset(s) for s in out)


def _find_global(cset: tuple[Vec, ...], mod_b: TargetLike, table: FunctionalTable,
                 gv: BoundVector) -> tuple[frozenset[Vec], ...]:
    universe = table.universe
    if universe.arity < 2:
        raise ValidationError("global mode needs arity at least 2")
    if len(universe.base) != 1:
        raise ValidationError("global mode needs a tree system universe")
    cs = frozenset(cset)
    if not is_prefix_free(cs):
        raise ValidationError("input set must be prefix-free")
    if cs - universe.nodes:
        raise ValidationError("inputs must be universe nodes")
    a0 = _global_rec(sorted_vecs(cs), mod_b, table, gv)
    return tuple(frozenset(v for v in a0 if vec_leq(c, v)) for c in cset)


def _global_rec(cs: list[Vec], mod_b: TargetLike, table: FunctionalTable,
                gv: BoundVector) -> frozenset[Vec]:
    """One induction step of the global recursion: peel off the canonically
    last input, solve the rest at a tripled budget, then walk the listed
    inputs with a different first coordinate in reverse, each round
    extracting one splitting pair against the peeled input and grafting it
    back in by first-coordinate surgery."""
    universe = table.universe
    if len(cs) == 1:
        return frozenset(cs)
    c_star = cs[-1]
    rest = cs[:-1]
    a_prev = _global_rec(rest, mod_b, table, scale_vec(3 ** len(rest), gv))
    listed = [c for c in rest if c[0] != c_star[0]]
    a_j = a_prev | {c_star}
    bmem = _member_fn(mod_b)
    chop_univ = chop_system(universe)
    for j in range(len(listed), 0, -1):
        c_j = listed[j - 1]
        bound_j = scale_vec(3 ** j, gv)
        anchors = frozenset(v for v in a_j if vec_leq(c_j, v))
        if not anchors:
            raise InvariantError("working set lost the cone of %r" % (c_j,))
        joint: dict[Vec, tuple | None] = {}

        def fiber_pair(d: Vec) -> bool:
            if d not in joint:
                ff = fiber_forest(universe, d)
                mus = tuple(sorted_words(
                    {v[-1] for v in anchors
                     if vec_leq(chop(v), d) and v[-1] in ff.nodes}))
                joint[d] = _search_multi(table, mod_b, mus, bound_j[-1], d) if mus else None
            return joint[d] is not None

        e_j0: set[Vec] = set()
        e_j1: set[Vec] = set()
        for d0 in sorted_vecs({chop(v) for v in anchors}):
            dec = decide_big_nd(fiber_pair, [d0], bound_j[:-1], chop_univ)
            if isinstance(dec, NotBigND):
                raise NoSplittingError(
                    "no uniformly splitting extension above %r" % (c_j,), node=c_j)
            for d in leaves_of(dec.system):
                pre0, pre1 = joint[d]
                e_j0.update(d + (w,) for w in pre0)
                e_j1.update(d + (w,) for w in pre1)
        e_union = e_j0 | e_j1
        m_star = 1 + max((len(table.value(v)) for v in e_union if not bmem(v)),
                         default=0)
        f_j: set[Vec] = set()
        for a in sorted_vecs(v for v in a_j if vec_leq(c_star, v)):
            decf = decide_big_nd(
                lambda v: bmem(v) or len(table.value(v)) >= m_star,
                [a], bound_j, universe)
            if isinstance(decf, NotBigND):
                raise TruncationLike(
                    "no long-value extension above %r at the budget" % (a,),
                    node=a)
            f_j.update(leaves_of(decf.system))
        cert = extract_splitting(
            anchors, (frozenset(e_j0), frozenset(e_j1)), f_j, mod_b,
            scale_vec(3 ** (j - 1), gv), scale_vec(3 ** (j - 1), gv),
            table, c_j, c_star)
        a_j = _surgery(a_j, cs, c_star, cert.f_prime, c_j, cert.e_prime)
        for c in cs:
            slice_c = frozenset(v for v in a_j if vec_leq(c, v))
            again = decide_big_nd(slice_c, [c], scale_vec(3 ** (j - 1), gv), universe)
            if isinstance(again, NotBigND):
                raise InvariantError("surgery lost largeness above %r" % (c,))
    return frozenset(a_j)


def _surgery(a_j: frozenset[Vec], cs: list[Vec], c_star: Vec,
             f_new: frozenset[Vec], c_j: Vec, e_new: frozenset[Vec]) -> frozenset[Vec]:
    """Rebuild the working set: cones over untouched first coordinates are
    kept, the two active elements take their extracted sets, and other
    input elements sharing a first coordinate with an active one get their
    old fibers relabelled over the new domains."""
    out: set[Vec] = set()
    for c in cs:
        if c[0] == c_star[0]:
            special, new_set = c_star, f_new
        elif c[0] == c_j[0]:
            special, new_set = c_j, e_new
        else:
            out.update(v for v in a_j if vec_leq(c, v))
            continue
        if c == special:
            out.update(new_set)
            continue
        k = 0
        while k < len(c) and c[k] == special[k]:
            k += 1
        dom_new = {v[:k] for v in new_set}
        dom_old = {v[:k] for v in a_j}
        for z in sorted_vecs(dom_new):
            below = [t for t in dom_old if vec_leq(t, z)]
            if not below:
                continue
            t = max(below, key=lambda u: (sum(len(x) for x in u), u))
            out.update(z + v[k:] for v in a_j
                       if v[:k] == t and vec_leq(c[k:], v[k:]))
    return frozenset(out)
