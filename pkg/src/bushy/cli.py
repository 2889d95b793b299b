"""Batch command-line frontend.

One command per process.  Instances are JSON documents with named
sections; a job inside the document names the operation and its inputs,
and the subcommand must match the job's op.  Results are emitted as
canonical JSON carrying the instance hash, so identical inputs and flags
give byte-identical output.

Exit codes: 0 for a positive result, 1 for a negative one (a set is
small, a splitting pair exists, a truncation runs out), 2 for usage,
parse or validation problems.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Sequence

from .bounds import DEFAULT_CAP
from .errors import (
    ExistsSplitError,
    HypothesisError,
    InvariantError,
    NoSplittingError,
    NotBigError,
    OracleLimitError,
    TruncationError,
    ValidationError,
)
from .forcing import (
    DivergenceExtension,
    b_dnc_set,
    build_splitting_system,
    build_totality_system,
    compose_restrictions,
    extend_to_rectangle,
    nu_homogenize,
    qn_member,
    sigma1_decide,
    validate_condition,
)
from .functionals import compute_theta, extract_splitting, find_pairwise_splittings
from .instances import (
    DocumentContext,
    ParseError,
    canonical_dumps,
    certificate_json,
    condition_json,
    decision_json,
    diagnostics_json,
    load_path,
    parse_vec,
    parse_word,
    result_document,
    set_json,
    vecs_json,
    witness_json,
    word_json,
)
from .largeness import closure
from .oracle import FUZZ_NAMES, fuzz_lemma
from .systems import (
    NotBigND,
    SystemWitness,
    as_forest,
    big_subset_split_nd,
    decide_big_nd,
    project,
    weak_concat_extend,
)
from .words import unwrap1, wrap1

EXHAUSTIVE_SMALL = {
    "bigSubset": 48, "concat": 24, "weakConcat": 32, "bigSubsetND": 24,
    "extract1D": 24, "extractND": 12, "projectComm": 64,
}


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise ValidationError("%s must be an integer, got %r" % (name, raw))


class _Trace:
    def __init__(self, path: str | None) -> None:
        self.path = path
        self.records: list = []

    def flush(self) -> None:
        if self.path is None:
            return
        with open(self.path, "w", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(canonical_dumps(
                    {"stage": r.stage, "round": r.round, "level": r.level,
                     "leaves": r.leaves, "note": r.note}))


def _vec_list(obj: Any) -> list:
    if not isinstance(obj, list):
        raise ValidationError("expected a list of vectors, got %r" % (obj,))
    return [parse_vec(v) for v in obj]


def _emit(args, payload: dict, instance: dict | None) -> None:
    text = canonical_dumps(result_document(payload, instance))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- handlers: return (exit status, payload) ---


def _h_check_big(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    target = ctx.vecset(job["target"])
    above = _vec_list(job["above"])
    bounds = ctx.bounds(job["bounds"])
    dec = decide_big_nd(target, above, bounds, U)
    return (0 if isinstance(dec, SystemWitness) else 1), decision_json(dec)


def _h_split(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    res = big_subset_split_nd(ctx.vecset(job["left"]), ctx.vecset(job["right"]),
                              _vec_list(job["above"])[0],
                              ctx.bounds(job["left_bounds"]),
                              ctx.bounds(job["right_bounds"]), U)
    return 0, {"kind": "split", "side": res.side,
               "witness": witness_json(res.witness)}


def _h_concat(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    bounds = ctx.bounds(job["bounds"])
    stem_dec = decide_big_nd(ctx.vecset(job["stem"]),
                             _vec_list(job["above"]), bounds, U)
    if isinstance(stem_dec, NotBigND):
        return 1, decision_json(stem_dec)
    out = weak_concat_extend(stem_dec.system, ctx.vecset(job["target"]), bounds, U)
    return 0, witness_json(out)


def _h_project(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    bounds = ctx.bounds(job["bounds"])
    res = project(ctx.vecset(job["target"]), parse_vec(job["suffix_base"]),
                  bounds, U)
    return 0, {"kind": "projection",
               "set": set_json(res, U.arity - len(bounds))}


def _h_closure(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    if U.arity != 1:
        raise ValidationError("closure works on arity-1 universes")
    words = {unwrap1(v) for v in ctx.vecset(job["target"])}
    out = closure(words, ctx.bound(job["bound"]), as_forest(U))
    return 0, {"kind": "closure",
               "set": set_json(frozenset(wrap1(w) for w in out), 1)}


def _h_theta(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    table = ctx.functional(job["table"])
    at = parse_vec(job["at"]) if "at" in job else None
    try:
        res = compute_theta(table, ctx.vecset(job["mod_b"]),
                            parse_word(job["mu"]), ctx.bound(job["bound"]), at)
    except ExistsSplitError as e:
        pair = e.pair
        return 1, {"kind": "exists-split",
                   "above": word_json(pair.above),
                   "left": [word_json(w) for w in sorted(pair.left)],
                   "right": [word_json(w) for w in sorted(pair.right)],
                   "left_values": [word_json(w) for w in pair.left_values],
                   "right_values": [word_json(w) for w in pair.right_values]}
    return 0, {"kind": "theta", "theta": word_json(res.theta),
               "chain": [word_json(w) for w in res.chain]}


def _h_extract(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    table = ctx.functional(job["table"])
    raw = job["e_side"]
    if isinstance(raw, list) and raw and isinstance(raw[0], dict) and "at" in raw[0]:
        e_side: Any = {(parse_vec(r["at"]), int(r["i"])): frozenset(_vec_list(r["set"]))
                       for r in raw}
    elif isinstance(raw, list) and len(raw) == 2:
        e_side = (ctx.vecset(raw[0]) if not isinstance(raw[0], str) else ctx.vecset(raw[0]),
                  ctx.vecset(raw[1]) if not isinstance(raw[1], str) else ctx.vecset(raw[1]))
    else:
        raise ValidationError("e_side must be two sets or per-anchor rows")
    cert = extract_splitting(ctx.vecset(job["a_set"]), e_side,
                             ctx.vecset(job["f_set"]), ctx.vecset(job["mod_b"]),
                             ctx.bounds(job["g_bounds"]), ctx.bounds(job["h_bounds"]),
                             table, parse_vec(job["s"]), parse_vec(job["s_star"]))
    return 0, certificate_json(cert)


def _h_find_splittings(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    table = ctx.functional(job["table"])
    bound = ctx.bounds(job["bounds"]) if "bounds" in job else ctx.bound(job["bound"])
    fam = find_pairwise_splittings(_vec_list(job["taus"]), ctx.vecset(job["mod_b"]),
                                   table, bound, job["mode"])
    return 0, {"kind": "split-family", "mode": fam.mode,
               "taus": vecs_json(fam.taus),
               "sets": [set_json(s, table.universe.arity) for s in fam.sets],
               "witnesses": [witness_json(w) for w in fam.witnesses]}


def _h_validate_condition(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    p = ctx.condition(job["condition"])
    jump = ctx.jump(job["jump"]) if "jump" in job else None
    diags = validate_condition(p, jump)
    bad = [d for d in diags if d.severity == "error"]
    return (0 if not bad else 1), {"kind": "diagnostics", "valid": not bad,
                                   "items": diagnostics_json(diags)}


def _h_extend(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    q = extend_to_rectangle(ctx.condition(job["condition"]), int(job["m"]))
    return 0, {"kind": "condition", "condition": condition_json(q)}


def _h_sigma1(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    res = sigma1_decide(ctx.condition(job["condition"]), ctx.vecset(job["target"]),
                        parse_vec(job["tau"]), ctx.bound(job["bound"]))
    if isinstance(res, DivergenceExtension):
        return 1, {"kind": "divergence",
                   "condition": condition_json(res.condition),
                   "refutation": decision_json(res.refutation)}
    return 0, witness_json(res)


def _h_build_totality(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    trace = _Trace(args.trace)
    q = build_totality_system(ctx.condition(job["condition"]),
                              [ctx.vecset(s) for s in job["targets"]],
                              ctx.bound(job["bound"]), trace=trace.records)
    trace.flush()
    return 0, {"kind": "condition", "condition": condition_json(q)}


def _h_build_splitting(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    trace = _Trace(args.trace)
    q = build_splitting_system(ctx.condition(job["condition"]),
                               ctx.functional(job["functional"]),
                               ctx.bound(job["bound"]), job["mode"],
                               rounds=int(job.get("rounds", 1)),
                               trace=trace.records)
    trace.flush()
    return 0, {"kind": "condition", "condition": condition_json(q)}


def _h_restrict(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    q = compose_restrictions(ctx.condition(job["condition"]), int(job["m"]))
    return 0, {"kind": "condition", "condition": condition_json(q)}


def _h_homogenize(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    q = nu_homogenize(ctx.condition(job["condition"]))
    return 0, {"kind": "condition", "condition": condition_json(q),
               "homogenized": qn_member(q)}


def _h_bdnc(ctx: DocumentContext, job: dict, args) -> tuple[int, dict]:
    U = ctx.universe(job["universe"])
    out = b_dnc_set(ctx.jump(job["jump"]), int(job["n"]), U)
    return 0, {"kind": "bdnc", "set": set_json(out, U.arity, True)}


_HANDLERS = {
    "check-big": _h_check_big,
    "split": _h_split,
    "concat": _h_concat,
    "project": _h_project,
    "closure": _h_closure,
    "theta": _h_theta,
    "extract-splitting": _h_extract,
    "find-splittings": _h_find_splittings,
    "validate-condition": _h_validate_condition,
    "extend": _h_extend,
    "sigma1": _h_sigma1,
    "build-totality": _h_build_totality,
    "build-splitting": _h_build_splitting,
    "restrict": _h_restrict,
    "homogenize": _h_homogenize,
    "bdnc": _h_bdnc,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bushy",
        description="Exact bushy-tree largeness calculus: decisions, "
                    "certificates, forcing-step builders and lemma fuzzers.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", required=True, help="instance document path")
    common.add_argument("--job", default="main", help="job name inside the instance")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--cap", type=int, default=None,
                        help="arithmetic cap (default: BUSHY_CAP or built-in)")
    common.add_argument("--trace", default=None,
                        help="write line-delimited build records here")
    for name in _HANDLERS:
        sub.add_parser(name, parents=[common])

    fz = sub.add_parser("fuzz")
    fz.add_argument("lemma", choices=FUZZ_NAMES)
    fz.add_argument("--budget", default="exhaustive-small",
                    help="case count, or exhaustive-small")
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--jobs", type=int, default=None,
                    help="worker count (default: BUSHY_JOBS or 1)")
    fz.add_argument("--fixture-dir", default="fuzz-fixtures")
    fz.add_argument("--out", default=None)
    return parser


def _run_fuzz(args) -> int:
    if args.budget == "exhaustive-small":
        budget = EXHAUSTIVE_SMALL[args.lemma]
    else:
        try:
            budget = int(args.budget)
        except ValueError:
            raise ValidationError("budget must be an integer or exhaustive-small")
    jobs = args.jobs if args.jobs is not None else _env_int("BUSHY_JOBS", 1)
    report = fuzz_lemma(args.lemma, budget, seed=args.seed,
                        fixture_dir=args.fixture_dir, jobs=max(1, jobs))
    text = canonical_dumps(report.to_json())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(report.summary() + "\n")
    return 1 if report.failures else 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        if args.command == "fuzz":
            return _run_fuzz(args)
        doc = load_path(args.instance)
        cap = args.cap if args.cap is not None else _env_int("BUSHY_CAP", DEFAULT_CAP)
        ctx = DocumentContext(doc, cap)
        job = ctx.job(args.job)
        if job["op"] != args.command:
            raise ValidationError("job %r runs op %r, not %r"
                                  % (args.job, job["op"], args.command))
        status, payload = _HANDLERS[args.command](ctx, job, args)
        _emit(args, payload, doc)
        return status
    except ParseError as e:
        sys.stderr.write("parse error: %s\n" % e)
        return 2
    except (NotBigError, NoSplittingError, TruncationError) as e:
        sys.stderr.write("negative: %s\n" % e)
        return 1
    except (ValidationError, HypothesisError, OracleLimitError, InvariantError,
            KeyError, OSError) as e:
        kind = type(e).__name__
        sys.stderr.write("error (%s): %s\n" % (kind, e))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
