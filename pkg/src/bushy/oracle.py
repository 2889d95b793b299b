"""Brute-force oracles and seeded lemma fuzzers.

The oracle decides largeness by enumerating candidate witnesses rather
than by the calculus recursion, so tests can cross-check the two on
every exhaustively enumerable configuration.  The fuzzers generate
hypothesis-satisfying instances for the constructive lemmas, run the
construction, and validate the conclusion; a counterexample is greedily
minimized (canonical deletion order, hypothesis preserved) and persisted
as a regression fixture in the instance format.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

from .bounds import Bound, Const, bound_sum, is_huge
from .errors import (
    BushyError,
    HypothesisError,
    InvariantError,
    NotBigError,
    OracleLimitError,
    ValidationError,
)
from .forests import Forest, full_tree
from .largeness import NotBig, Witness, big_subset_split, check_witness, concat_extend, decide_big
from .functionals import FunctionalTable, extract_splitting, is_split
from .forcing import (
    Condition,
    GrowthWitness,
    MockJump,
    b_dnc_set,
    derive_gg_witness,
    validate_condition,
)
from .instances import (
    VERSION,
    bound_json,
    canonical_dumps,
    functional_json,
    set_json,
    system_json,
    vec_json,
    vecs_json,
)
from .systems import (
    NotBigND,
    System,
    SystemWitness,
    as_forest,
    big_subset_split_nd,
    check_system_witness,
    chop_system,
    decide_big_nd,
    full_system,
    is_bushy_system,
    is_valid_system,
    leaves_of,
    of_forest,
    project,
    weak_concat_extend,
)
from .words import (
    Vec,
    Word,
    minimal_vecs,
    sorted_vecs,
    sorted_words,
    vec_leq,
    word_key,
    wrap1,
)

DEFAULT_LIMIT = 500_000


@dataclass(frozen=True)
class FuzzCase:
    """Reproducible case coordinates: the derived seed plus the universe
    and bound shapes the case was drawn from."""

    seed: int
    universe_spec: tuple[int, int, int]  # (length, branching, depth)
    bounds_spec: tuple[int, ...]


# === brute-force bigness ===


def brute_big_words(target: Iterable[Word], above: Iterable[Word], bound: Bound,
                    universe: Forest, limit: int = DEFAULT_LIMIT) -> bool:
    """Decide 1-D bigness by top-down enumeration of bushy witness trees.

    Expands lexicographically least unfinished frontier nodes, trying
    every child subset of exactly the required width; existence of any
    witness with more children restricts to one of these.  Counts
    expansion steps against the limit.
    """
    tgt = frozenset(target)
    children = universe.child_map()
    steps = [0]

    def expand(frontier: tuple[Word, ...]) -> bool:
        steps[0] += 1
        if steps[0] > limit:
            raise OracleLimitError("enumeration exceeded %d steps" % limit)
        if not frontier:
            return True
        t, rest = frontier[0], frontier[1:]
        need = bound.eval(len(t))
        kids = sorted(children.get(t, ()), key=word_key)
        if is_huge(need) or need > len(kids):
            return False
        for combo in combinations(kids, int(need)):
            nxt = rest + tuple(c for c in combo if c not in tgt)
            if expand(tuple(sorted(nxt, key=word_key))):
                return True
        return False

    roots = [a for a in above if a not in tgt]
    for a in roots:
        if a not in universe.nodes:
            raise ValidationError("%r is not a universe node" % (a,))
    return expand(tuple(sorted(roots, key=word_key)))


_ND_CACHE: dict = {}


def _nd_leaf_sets(above: frozenset[Vec], bounds: tuple[Bound, ...],
                  universe: System, limit: int) -> tuple[frozenset[Vec], ...]:
    key = (universe, above, bounds)
    got = _ND_CACHE.get(key)
    if got is not None:
        return got
    cone = frozenset(v for v in universe.nodes
                     if any(vec_leq(a, v) for a in above))
    rest = sorted_vecs(cone - above)
    if len(rest) > 30 or 2 ** len(rest) > limit:
        raise OracleLimitError("universe too large for subset enumeration")
    out = []
    for mask in range(2 ** len(rest)):
        nodes = set(above)
        for i, v in enumerate(rest):
            if mask >> i & 1:
                nodes.add(v)
        try:
            s = System(universe.arity, above, frozenset(nodes), None)
            if not is_valid_system(s):
                continue
            if not is_bushy_system(s, bounds):
                continue
            out.append(leaves_of(s))
        except (ValidationError, KeyError, ValueError):
            continue
    result = tuple(out)
    _ND_CACHE[key] = result
    return result


def brute_big(target: Iterable[Vec], above: Iterable[Vec], bounds: tuple[Bound, ...],
              universe: System, limit: int = DEFAULT_LIMIT) -> bool:
    """Decide bigness of a target by enumerating bushy subsystems.

    Arity 1 delegates to the frontier enumeration; otherwise all node
    subsets of the cone are enumerated once per (universe, base, bounds)
    and the leaf sets are replayed against the target.
    """
    tgt = frozenset(target)
    ab = frozenset(above)
    if len(bounds) != universe.arity:
        raise ValidationError("bound vector length mismatch")
    if not ab:
        raise ValidationError("need at least one anchor")
    if not ab <= universe.nodes:
        raise ValidationError("anchors must be universe nodes")
    if universe.arity == 1:
        return brute_big_words({v[0] for v in tgt}, {a[0] for a in ab},
                               bounds[0], as_forest(universe), limit)
    for leafset in _nd_leaf_sets(ab, tuple(bounds), universe, limit):
        if leafset <= tgt:
            return True
    return False


# === generators ===


def _words_upto(width: int, depth: int) -> list[Word]:
    out: list[Word] = [()]
    cur: list[Word] = [()]
    for _ in range(depth):
        cur = [w + (i,) for w in cur for i in range(width)]
        out.extend(cur)
    return out


def product_universe(dom_width: int, dom_depth: int,
                     fib_width: int, fib_depth: int) -> System:
    """Arity-2 universe with every fiber the full tree: unlike the chained
    full system, fiber words may outrun their domain word."""
    doms = _words_upto(dom_width, dom_depth)
    fibs = _words_upto(fib_width, fib_depth)
    nodes = frozenset((d, f) for d in doms for f in fibs)
    return System(2, frozenset({((), ())}), nodes, None)


def random_antichain(rng: random.Random, words: Iterable[Word]) -> frozenset[Word]:
    picked = sorted((w for w in words if rng.random() < 0.45), key=word_key)
    out: list[Word] = []
    for w in picked:
        if not any(w[: len(u)] == u for u in out):
            out.append(w)
    return frozenset(out)


def covering_antichain(rng: random.Random, forest: Forest) -> frozenset[Word]:
    """Antichain meeting every maximal branch, so its cone holds the whole
    forest and the antichain is big at any bound within the branching."""
    out: set[Word] = set()
    stack = [c for b in sorted_words(forest.base) for c in forest.children(b)]
    while stack:
        t = stack.pop()
        kids = forest.children(t)
        if not kids or rng.random() < 0.5:
            out.add(t)
        else:
            stack.extend(kids)
    return frozenset(out)


def covering_grid_antichain(rng: random.Random, dom_width: int,
                            fib_width: int) -> frozenset[Vec]:
    """Covering antichain in a depth-1 product grid: per domain child,
    either the whole column or each of its cells."""
    out: set[Vec] = set()
    for x in range(dom_width):
        if rng.random() < 0.4:
            out.add(((x,), ()))
        else:
            out.update(((x,), (y,)) for y in range(fib_width))
    return frozenset(out)


def random_jump(rng: random.Random, n: int, width: int, depth: int) -> MockJump:
    """Entries at every oracle arity below n, at most one prefix per
    (arity, index) so the consistency requirement holds by construction."""
    entries: dict[tuple[tuple, int], int] = {}
    for arity in range(n):
        for e in range(depth):
            if rng.random() < 0.5:
                continue
            if arity == 0:
                prefix: tuple = ()
            else:
                prefix = tuple(
                    tuple(rng.randrange(width) for _ in range(rng.randrange(depth + 1)))
                    for _ in range(arity))
            entries[(prefix, e)] = rng.randrange(width)
    j = MockJump(entries)
    j.validate()
    return j


def random_condition(rng: random.Random, length: int, depth: int,
                     width: int = 2) -> tuple[Condition, MockJump]:
    """A valid condition over the full chained universe, with the bad set
    a mock jump's diagonal set plus open noise kept small above the stem."""
    universe = full_system((width,) * length, depth)
    root = tuple(() for _ in range(length))
    b = Const(2)
    bv = tuple(b for _ in range(length))
    jump = random_jump(rng, length, width, depth)
    base_bad = b_dnc_set(jump, length, universe)
    bad = base_bad
    seeds = [v for v in sorted_vecs(universe.nodes)
             if v != root and rng.random() < 0.08]
    while seeds:
        noisy = bad | frozenset(u for u in universe.nodes
                                if any(vec_leq(s, u) for s in seeds))
        if isinstance(decide_big_nd(noisy, [root], bv, universe), NotBigND):
            bad = noisy
            break
        seeds.pop()
    gg = derive_gg_witness(Const(2), b, 2, max(8, depth))
    p = Condition(root, universe, bad, Const(2), b, gg)
    diags = [d for d in validate_condition(p, jump) if d.severity == "error"]
    if diags:
        raise InvariantError("generator made an invalid condition: %s" % diags[0].message)
    return p, jump


# === splitting-extraction instances ===


@dataclass
class ExtractInstance:
    universe: System
    table: FunctionalTable
    a_set: frozenset[Vec]
    e_side: object  # per-anchor mapping (arity 1) or a pair of sets
    f_set: frozenset[Vec]
    mod_b: frozenset[Vec]
    g_bounds: tuple[Bound, ...]
    h_bounds: tuple[Bound, ...]
    s: Vec
    s_star: Vec
    degenerate: str | None = None

    def run(self):
        return extract_splitting(self.a_set, self.e_side, self.f_set, self.mod_b,
                                 self.g_bounds, self.h_bounds, self.table,
                                 self.s, self.s_star)


def generate_extract_instance(rng: random.Random, arity: int = 1,
                              width: int = 9, g: int = 2,
                              degenerate: str | None = None,
                              overlap: int | None = None) -> ExtractInstance:
    """Build families satisfying the extraction hypotheses outright.

    The two per-anchor sets take three extra anchor children each beyond
    the shared block, the shared block is padded into the mod set (over
    narrow universes the sets must overlap, and overlaps outside the mod
    set would compare equal), and the target family lives above a child
    reserved away from the anchors with strictly longer values.
    degenerate="f" sinks the target family into the mod set, "e" sinks
    the splitting family.
    """
    if arity == 1:
        return _extract_1d(rng, width, g, degenerate)
    if arity == 2:
        return _extract_nd(rng, g, degenerate, overlap)
    raise ValidationError("extraction instances come in arity 1 or 2")


def _extract_1d(rng: random.Random, width: int, g: int,
                degenerate: str | None) -> ExtractInstance:
    s3 = 3 * max(g, 2)
    if width < s3:
        raise ValidationError("width %d cannot carry triple budgets %d" % (width, s3))
    forest = full_tree((), width, 2)
    universe = of_forest(forest, 2)
    disjoint = width >= 2 * s3 and rng.random() < 0.5
    perm = list(range(width))
    rng.shuffle(perm)
    na = rng.randint(s3, width - 1)
    a_children = perm[:na]
    star = perm[-1] if perm[-1] not in a_children else perm[na]
    a_set = frozenset(((c,),) for c in a_children)
    s: Vec = ((),)
    s_star: Vec = ((star,),)

    values: dict[Vec, Word] = {v: () for v in universe.nodes}
    mod_b: set[Vec] = set()
    fam: dict[tuple[Vec, int], frozenset[Vec]] = {}
    for c in a_children:
        kperm = list(range(width))
        rng.shuffle(kperm)
        shared = 0 if disjoint else rng.randint(max(0, 2 * s3 - width), s3)
        e0 = kperm[: s3]
        e1 = kperm[s3 - shared: 2 * s3 - shared]
        for j in e0:
            if j not in e1:
                values[((c, j),)] = (0,)
        for j in e1:
            if j not in e0:
                values[((c, j),)] = (1,)
        for j in set(e0) & set(e1):
            mod_b.add(((c, j),))
        fam[(((c,),), 0)] = frozenset(((c, j),) for j in e0)
        fam[(((c,),), 1)] = frozenset(((c, j),) for j in e1)
    if degenerate == "e":
        for xs in fam.values():
            mod_b.update(xs)

    nf = rng.randint(s3, width)
    f_children = rng.sample(range(width), nf)
    f_set = frozenset(((star, j),) for j in f_children)
    for j in f_children:
        values[((star, j),)] = (rng.randrange(2), rng.randrange(2))
    if degenerate == "f":
        mod_b.update(f_set)

    table = FunctionalTable(universe, values)
    table.validate()
    gb = (Const(g),)
    return ExtractInstance(universe, table, a_set, fam, f_set, frozenset(mod_b),
                           gb, gb, s, s_star, degenerate)


def _extract_nd(rng: random.Random, g: int, degenerate: str | None,
                overlap: int | None = None) -> ExtractInstance:
    s3 = 3 * max(g, 2)
    if overlap is None:
        overlap = rng.choice((0, 3))
    wd, wf = s3 + 1, 2 * s3 - overlap  # one reserved domain child
    universe = product_universe(wd, 2, wf, 1)
    root: Vec = ((), ())
    star = wd - 1
    perm = list(range(wf))
    rng.shuffle(perm)
    y0 = perm[: s3]
    y1 = perm[s3 - overlap: 2 * s3 - overlap]
    shared = set(y0) & set(y1)

    values: dict[Vec, Word] = {}
    for v in universe.nodes:
        tau, nu = v
        if not nu or not tau or nu[0] in shared:
            values[v] = ()
        elif tau[0] == star:
            c = 0 if nu[0] in y0 else 1
            values[v] = (c,) if len(tau) == 1 else (c, 0)
        elif nu[0] in y0:
            values[v] = (0,)
        else:
            values[v] = (1,)
    table = FunctionalTable(universe, values)
    table.validate()

    e0 = frozenset(((x,), (y,)) for x in range(wd - 1) for y in y0)
    e1 = frozenset(((x,), (y,)) for x in range(wd - 1) for y in y1)
    mod_b = set(v for v in universe.nodes
                if len(v[0]) >= 1 and v[1] and v[1][0] in shared)
    if degenerate == "e":
        for v in e0 | e1:
            mod_b.update(u for u in universe.nodes if vec_leq(v, u))
    f_ys = [y for y in range(wf) if y not in shared]
    f_set = frozenset(((star, z), (y,)) for z in range(wd) for y in f_ys)
    if degenerate == "f":
        for v in f_set:
            mod_b.update(u for u in universe.nodes if vec_leq(v, u))

    gb = (Const(g), Const(g))
    s_star: Vec = ((star,), ())
    return ExtractInstance(universe, table, frozenset({root}), (e0, e1), f_set,
                           frozenset(mod_b), gb, gb, root, s_star, degenerate)


def validate_certificate(inst: ExtractInstance, cert) -> list[str]:
    """Independent re-checks: the pair splits, both witnesses verify
    against the designated sets, and the claimed bigness re-decides."""
    out: list[str] = []
    bad = is_split(cert.e_prime, cert.f_prime, inst.mod_b, inst.table, "global")
    if bad is not None:
        out.append("pair does not split at %r" % (bad,))
    for label, w, designated, anchor, bounds in (
            ("e", cert.e_witness, cert.e_prime, inst.s, inst.g_bounds),
            ("f", cert.f_witness, cert.f_prime, inst.s_star, inst.h_bounds)):
        try:
            check_system_witness(w, designated, inst.universe)
        except InvariantError as e:
            out.append("%s witness: %s" % (label, e))
            continue
        if w.above != frozenset({anchor}):
            out.append("%s witness anchored at %r" % (label, sorted_vecs(w.above)))
        if isinstance(decide_big_nd(designated, [anchor], bounds, inst.universe),
                      NotBigND):
            out.append("%s set fails its bigness re-check" % label)
    return out


def extract_instance_document(inst: ExtractInstance) -> dict:
    n = inst.universe.arity
    if isinstance(inst.e_side, Mapping):
        e_json: object = [{"at": vec_json(a), "i": i, "set": vecs_json(xs)}
                          for (a, i), xs in sorted(inst.e_side.items(),
                                                   key=lambda kv: (kv[0][0], kv[0][1]))]
    else:
        e_json = [vecs_json(inst.e_side[0]), vecs_json(inst.e_side[1])]
    return {
        "version": VERSION,
        "universes": {"U": system_json(inst.universe)},
        "functionals": {"G": functional_json(inst.table, "U")},
        "sets": {"A": set_json(inst.a_set, n), "F": set_json(inst.f_set, n),
                 "B": set_json(inst.mod_b, n, True)},
        "bounds": {"g": bound_json(inst.g_bounds[0]), "h": bound_json(inst.h_bounds[0])},
        "jobs": {"main": {"op": "extract-splitting", "universe": "U", "table": "G",
                          "a_set": "A", "f_set": "F", "mod_b": "B",
                          "e_side": e_json,
                          "g_bounds": ["g"] * n, "h_bounds": ["h"] * n,
                          "s": vec_json(inst.s), "s_star": vec_json(inst.s_star)}},
    }


# === counterexample minimization ===


def minimize_sets(sets: dict[str, frozenset[Vec]],
                  still_fails: Callable[[dict[str, frozenset[Vec]]], bool],
                  ) -> dict[str, frozenset[Vec]]:
    """Greedy deletion in canonical order; a deletion sticks when the
    predicate (hypothesis still valid, failure still observed) holds."""
    current = dict(sets)
    changed = True
    while changed:
        changed = False
        for name in sorted(current):
            for v in sorted_vecs(current[name]):
                trial = dict(current)
                trial[name] = current[name] - {v}
                if still_fails(trial):
                    current = trial
                    changed = True
    return current


# === fuzz harness ===


@dataclass
class FuzzFailure:
    case: FuzzCase
    note: str
    instance: dict
    expected: bool = False
    fixture: str | None = None

    def to_json(self) -> dict:
        return {"seed": self.case.seed, "universe_spec": list(self.case.universe_spec),
                "bounds_spec": list(self.case.bounds_spec), "note": self.note,
                "expected": self.expected, "fixture": self.fixture}


@dataclass
class FuzzReport:
    name: str
    budget: int
    seed: int
    cases: int = 0
    skipped: int = 0
    failures: list[FuzzFailure] = field(default_factory=list)
    counterexamples: list[FuzzFailure] = field(default_factory=list)

    def summary(self) -> str:
        return ("%s: %d cases (%d skipped), %d failures, %d expected counterexamples"
                % (self.name, self.cases, self.skipped, len(self.failures),
                   len(self.counterexamples)))

    def to_json(self) -> dict:
        return {"version": VERSION,
                "fuzz": {"name": self.name, "budget": self.budget, "seed": self.seed,
                         "cases": self.cases, "skipped": self.skipped,
                         "failures": [f.to_json() for f in self.failures],
                         "counterexamples": [f.to_json() for f in self.counterexamples],
                         "summary": self.summary()}}


FUZZ_NAMES = ("bigSubset", "concat", "weakConcat", "bigSubsetND",
              "extract1D", "extractND", "projectComm")


def fuzz_lemma(name: str, budget: int, seed: int = 0,
               fixture_dir: str | None = None, jobs: int = 1) -> FuzzReport:
    """Run seeded cases of the named lemma and report.

    Identical seed and budget give identical reports regardless of the
    job count: cases are independent and merged in index order.
    """
    if name not in FUZZ_NAMES:
        raise ValidationError("unknown lemma %r; known: %s" % (name, ", ".join(FUZZ_NAMES)))
    runner = _RUNNERS[name]
    report = FuzzReport(name, budget, seed)

    def run_case(i: int):
        case_seed = (seed * 1_000_003 + i) & 0x7FFFFFFF
        return runner(i, random.Random(case_seed), case_seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_case, range(budget)))
    else:
        results = [run_case(i) for i in range(budget)]

    for i, (status, failure) in enumerate(results):
        report.cases += 1
        if status == "skip":
            report.skipped += 1
        elif status in ("fail", "counterexample"):
            assert failure is not None
            if fixture_dir is not None:
                os.makedirs(fixture_dir, exist_ok=True)
                fname = "%s-%03d.json" % (name, i)
                with open(os.path.join(fixture_dir, fname), "w", encoding="utf-8") as fh:
                    fh.write(canonical_dumps(failure.instance))
                failure.fixture = fname
            if status == "counterexample":
                failure.expected = True
                report.counterexamples.append(failure)
            else:
                report.failures.append(failure)
    return report


# --- per-lemma runners; each returns (status, failure-or-None) ---


def _run_big_subset(i: int, rng: random.Random, case_seed: int):
    w = rng.choice((4, 5))
    d = rng.choice((1, 2))
    gc, hc = 2, 2
    case = FuzzCase(case_seed, (1, w, d), (gc, hc))
    forest = full_tree((), w, d)
    g, h = Const(gc), Const(hc)
    if rng.random() < 0.6:
        ac = covering_antichain(rng, forest)
        if w == 5 and rng.random() < 0.4 and len(ac) > 1:
            ac -= {sorted_words(ac)[rng.randrange(len(ac))]}
    else:
        ac = random_antichain(rng, sorted_words(forest.nodes - {()}))
    left = frozenset(x for x in ac if rng.random() < 0.5)
    right = ac - left
    union = left | right
    if isinstance(decide_big(union, [()], bound_sum(g, h), forest), NotBig):
        return "skip", None

    def doc(ls, rs):
        return _one_d_doc(forest, {"B": ls, "C": rs},
                          {"g": g, "h": h},
                          {"op": "split", "universe": "U", "left": "B", "right": "C",
                           "above": [[]], "left_bounds": ["g"], "right_bounds": ["h"]})

    try:
        res = big_subset_split(left, right, (), g, h, forest)
        side_set = left if res.side == "left" else right
        side_bound = g if res.side == "left" else h
        check_witness(res.witness, side_set, forest)
        if res.witness.bound != side_bound:
            raise InvariantError("witness bound does not match the side")
        return "ok", None
    except BushyError as e:
        def still(trial):
            u = trial["B"] | trial["C"]
            if isinstance(decide_big(u, [()], bound_sum(g, h), forest), NotBig):
                return False
            try:
                r = big_subset_split(trial["B"], trial["C"], (), g, h, forest)
                check_witness(r.witness, trial["B"] if r.side == "left" else trial["C"],
                              forest)
                return False
            except BushyError:
                return True
        small = minimize_sets({"B": left, "C": right}, still)
        return "fail", FuzzFailure(case, "split failed: %s" % e,
                                   doc(small["B"], small["C"]))


def _run_concat(i: int, rng: random.Random, case_seed: int):
    w = rng.choice((2, 3))
    d = rng.choice((2, 3))
    gc = 2
    case = FuzzCase(case_seed, (1, w, d), (gc,))
    forest = full_tree((), w, d)
    g = Const(gc)
    k = rng.randint(1, d - 1)
    stem_dec = decide_big(frozenset(t for t in forest.nodes if len(t) == k),
                          [()], g, forest)
    assert isinstance(stem_dec, Witness)
    target = frozenset(t for t in forest.nodes if len(t) == d) \
        | frozenset(t for t in forest.nodes if len(t) > k and rng.random() < 0.3)
    for leaf in sorted_words(stem_dec.leaves()):
        if isinstance(decide_big(target, [leaf], g, forest), NotBig):
            return "skip", None
    try:
        out = concat_extend(stem_dec, target, g, forest)
        check_witness(out, target, forest)
        for t in stem_dec.forest.nodes:
            if t not in out.forest.nodes:
                raise InvariantError("concatenation dropped %r" % (t,))
        return "ok", None
    except BushyError as e:
        doc = _one_d_doc(forest, {"C": target}, {"g": g},
                         {"op": "concat", "universe": "U", "target": "C",
                          "bound": "g", "note": "stem witness at level %d" % k})
        return "fail", FuzzFailure(case, "concatenation failed: %s" % e, doc)


def _run_weak_concat(i: int, rng: random.Random, case_seed: int):
    wd, wf, gc, hc = 3, 2, 2, 2
    case = FuzzCase(case_seed, (2, wd, 2), (gc, hc))
    U = product_universe(wd, 1, wf, 2)
    root: Vec = ((), ())
    bounds = (Const(gc), Const(hc))
    A = frozenset(((), (y,)) for y in range(wf))
    if i % 4 == 3:
        one = frozenset(rng.sample(range(wd), gc))
        picks = {y: one for y in range(wf)}
    else:
        picks = {y: frozenset(rng.sample(range(wd), gc)) for y in range(wf)}
    B = frozenset(((x,), (y, z)) for y in range(wf) for x in picks[y]
                  for z in range(wf))

    def plain_holds(bset):
        return all(isinstance(decide_big_nd(bset, [a], bounds, U), SystemWitness)
                   for a in sorted_vecs(A))

    if not plain_holds(B):
        return "skip", None
    a_dec = decide_big_nd(A, [root], bounds, U)
    if isinstance(a_dec, NotBigND):
        return "skip", None
    joint = decide_big_nd(B, sorted_vecs(A), bounds, U)
    conclusion = decide_big_nd(B, [root], bounds, U)
    doc = _weak_doc(U, A, B, bounds)
    if isinstance(conclusion, SystemWitness):
        if isinstance(joint, SystemWitness):
            try:
                merged = weak_concat_extend(a_dec.system, B, bounds, U)
                check_system_witness(merged, B, U)
            except BushyError as e:
                return "fail", FuzzFailure(case, "weak concatenation failed: %s" % e, doc)
        return "ok", None
    if isinstance(joint, SystemWitness):
        return "fail", FuzzFailure(
            case, "big above the leaf set yet small above the root", doc)

    def still(trial):
        b = trial["B"]
        return plain_holds(b) and \
            isinstance(decide_big_nd(b, [root], bounds, U), NotBigND)

    small = minimize_sets({"B": B}, still)["B"]
    return "counterexample", FuzzFailure(
        case,
        "target big above every element of the leaf set, small above the root",
        _weak_doc(U, A, small, bounds))


def _run_big_subset_nd(i: int, rng: random.Random, case_seed: int):
    w = 4
    case = FuzzCase(case_seed, (2, w, 1), (2, 2))
    U = product_universe(w, 1, w, 1)
    root: Vec = ((), ())
    g = (Const(2), Const(2))
    h = (Const(2), Const(2))
    if rng.random() < 0.7:
        ac: frozenset[Vec] = covering_grid_antichain(rng, w, w)
    else:
        pool = sorted_vecs(v for v in U.nodes if v != root)
        ac = minimal_vecs(frozenset(v for v in pool if rng.random() < 0.4))
    left = frozenset(x for x in ac if rng.random() < 0.5)
    right = frozenset(ac) - left
    try:
        res = big_subset_split_nd(left, right, root, g, h, U)
    except HypothesisError:
        return "skip", None
    except BushyError as e:
        doc = _nd_pair_doc(U, left, right, g, h)
        return "fail", FuzzFailure(case, "nd split failed: %s" % e, doc)
    side_set = left if res.side == "left" else right
    try:
        check_system_witness(res.witness, side_set, U)
        return "ok", None
    except BushyError as e:
        doc = _nd_pair_doc(U, left, right, g, h)
        return "fail", FuzzFailure(case, "nd split witness invalid: %s" % e, doc)


def _run_extract(arity: int):
    def run(i: int, rng: random.Random, case_seed: int):
        degenerate = "f" if i % 6 == 5 else ("e" if i % 6 == 2 else None)
        width = (12 if i % 3 == 1 else 9) if arity == 1 else 7
        case = FuzzCase(case_seed, (arity, width, 2), (2,) * arity)
        inst = generate_extract_instance(rng, arity=arity, width=width, g=2,
                                         degenerate=degenerate)
        try:
            cert = inst.run()
        except BushyError as e:
            return "fail", FuzzFailure(case, "extraction raised: %s" % e,
                                       extract_instance_document(inst))
        problems = validate_certificate(inst, cert)
        if problems:
            return "fail", FuzzFailure(case, "; ".join(problems),
                                       extract_instance_document(inst))
        return "ok", None
    return run


def _run_project_comm(i: int, rng: random.Random, case_seed: int):
    case = FuzzCase(case_seed, (3, 2, 1), (2,))
    U = full_system((2, 2, 2), 1)
    b = Const(2)
    target = frozenset(v for v in U.nodes if rng.random() < 0.5)
    joint = project(target, ((), ()), (b, b), U)
    step1 = project(target, ((),), (b,), U)
    nested = project(step1, ((),), (b,), chop_system(U))
    if joint == nested:
        return "ok", None

    def still(trial):
        t = trial["B"]
        j = project(t, ((), ()), (b, b), U)
        n1 = project(project(t, ((),), (b,), U), ((),), (b,), chop_system(U))
        return j != n1

    small = minimize_sets({"B": target}, still)["B"]
    doc = {"version": VERSION,
           "universes": {"U": system_json(U)},
           "sets": {"B": set_json(small, 3)},
           "bounds": {"b": bound_json(b)},
           "jobs": {"main": {"op": "project", "universe": "U", "target": "B",
                             "suffix_base": vec_json(((), ())),
                             "bounds": ["b", "b"]}}}
    return "fail", FuzzFailure(case, "nested and joint projections differ", doc)


def _one_d_doc(forest: Forest, sets: dict[str, frozenset[Word]],
               bounds: dict[str, Bound], job: dict) -> dict:
    return {"version": VERSION,
            "universes": {"U": system_json(of_forest(forest))},
            "sets": {k: set_json(frozenset(wrap1(w) for w in v), 1)
                     for k, v in sets.items()},
            "bounds": {k: bound_json(b) for k, b in bounds.items()},
            "jobs": {"main": job}}


def _weak_doc(U: System, A: frozenset[Vec], B: frozenset[Vec],
              bounds: tuple[Bound, ...]) -> dict:
    return {"version": VERSION,
            "universes": {"U": system_json(U)},
            "sets": {"A": set_json(A, 2), "B": set_json(B, 2)},
            "bounds": {"g": bound_json(bounds[0]), "h": bound_json(bounds[1])},
            "jobs": {"main": {
                "op": "check-big", "universe": "U", "target": "B",
                "above": [vec_json(v) for v in sorted_vecs(A)],
                "bounds": ["g", "h"],
                "note": "plain hypothesis holds above each element; "
                        "joint decision above the set and above the root fail"}}}


def _nd_pair_doc(U: System, left: frozenset[Vec], right: frozenset[Vec],
                 g: tuple[Bound, ...], h: tuple[Bound, ...]) -> dict:
    return {"version": VERSION,
            "universes": {"U": system_json(U)},
            "sets": {"B": set_json(left, U.arity), "C": set_json(right, U.arity)},
            "bounds": {"g": bound_json(g[0]), "h": bound_json(h[0])},
            "jobs": {"main": {"op": "split", "universe": "U", "left": "B",
                              "right": "C", "above": [vec_json(tuple(() for _ in range(U.arity)))],
                              "left_bounds": ["g"] * U.arity,
                              "right_bounds": ["h"] * U.arity}}}


_RUNNERS = {
    "bigSubset": _run_big_subset,
    "concat": _run_concat,
    "weakConcat": _run_weak_concat,
    "bigSubsetND": _run_big_subset_nd,
    "extract1D": _run_extract(1),
    "extractND": _run_extract(2),
    "projectComm": _run_project_comm,
}
