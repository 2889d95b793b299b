"""Canonical JSON instance documents.

One fixed schema covers universes, sets, bounds, functionals, jumps,
conditions and job descriptions.  Serialization is canonical (sorted
keys, compact separators, ASCII, trailing newline) so equal documents
are equal bytes, and result documents embed the sha256 of the instance
they answer.  Parsing reports line and column on malformed input.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Iterable, Mapping

from .bounds import (
    HUGE,
    AffineSeq,
    Bound,
    Const,
    DEFAULT_CAP,
    DiagIterate,
    FiniteTable,
    Iterate,
    Linear,
    Pow2,
    PiecewiseIterate,
    Scaled,
    Seq,
    SquaredIndexSeq,
    SumBound,
    TableSeq,
    is_huge,
)
from .errors import BushyError, ValidationError
from .forcing import Condition, GrowthWitness, MockJump
from .functionals import FunctionalTable, SplittingCertificate
from .systems import Diagnostic, NotBigND, System, SystemWitness
from .words import Vec, Word, sorted_vecs, sorted_words, vec_key

VERSION = "bushy-1"

SECTIONS = ("universes", "sets", "bounds", "functionals", "jumps",
            "conditions", "jobs")


class ParseError(BushyError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__("%s (line %d, column %d)" % (message, line, column))
        self.line = line
        self.column = column


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True) + "\n"


def document_hash(doc: Mapping) -> str:
    return hashlib.sha256(canonical_dumps(doc).encode("utf-8")).hexdigest()


def loads_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from e
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be an object")
    if doc.get("version") != VERSION:
        raise ValidationError("unsupported document version %r" % (doc.get("version"),))
    for key in doc:
        if key != "version" and key not in SECTIONS:
            raise ValidationError("unknown section %r" % (key,))
    return doc


def load_path(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads_document(fh.read())


# === encoders ===


def word_json(w: Word) -> list:
    return list(w)


def vec_json(v: Vec) -> list:
    return [list(c) for c in v]


def vecs_json(vs: Iterable[Vec]) -> list:
    return [vec_json(v) for v in sorted_vecs(vs)]


def set_json(xs: Iterable[Vec], arity: int, is_open: bool = False) -> dict:
    return {"arity": arity, "elements": vecs_json(xs), "open": is_open}


def system_json(s: System) -> dict:
    return {"arity": s.arity, "base": vecs_json(s.base),
            "nodes": vecs_json(s.nodes), "depth": s.depth_bound}


def bound_json(b: Bound) -> dict:
    if isinstance(b, Const):
        return {"rule": "const", "c": b.c}
    if isinstance(b, Pow2):
        return {"rule": "pow2"}
    if isinstance(b, Linear):
        return {"rule": "linear", "a": b.a, "b": b.b}
    if isinstance(b, Iterate):
        return {"rule": "iterate", "base": bound_json(b.base), "k": b.k}
    if isinstance(b, DiagIterate):
        return {"rule": "diag-iterate", "base": bound_json(b.base)}
    if isinstance(b, PiecewiseIterate):
        return {"rule": "piecewise-iterate", "base": bound_json(b.base),
                "thresholds": ["huge" if is_huge(t) else t for t in b.thresholds]}
    if isinstance(b, FiniteTable):
        return {"rule": "finite-table", "values": list(b.values),
                "tail": bound_json(b.tail)}
    if isinstance(b, SumBound):
        return {"rule": "sum", "parts": [bound_json(p) for p in b.parts]}
    if isinstance(b, Scaled):
        return {"rule": "scaled", "factor": b.factor, "base": bound_json(b.base)}
    raise ValidationError("unknown bound rule %r" % (type(b).__name__,))


def seq_json(s: Seq) -> dict:
    if isinstance(s, AffineSeq):
        return {"rule": "affine", "a": s.a, "b": s.b}
    if isinstance(s, TableSeq):
        return {"rule": "table",
                "values": ["huge" if is_huge(v) else v for v in s.values]}
    if isinstance(s, SquaredIndexSeq):
        return {"rule": "squared", "base": seq_json(s.base)}
    raise ValidationError("unknown sequence rule %r" % (type(s).__name__,))


def gg_json(w: GrowthWitness) -> dict:
    return {"seq": seq_json(w.seq), "levels": w.levels, "horizon": w.horizon}


def jump_json(j: MockJump) -> dict:
    rows = []
    for (prefix, e), val in j.entries.items():
        rows.append({"prefix": vec_json(prefix), "e": e, "value": val})
    rows.sort(key=lambda r: (len(r["prefix"]), r["prefix"], r["e"]))
    return {"entries": rows}


def functional_json(t: FunctionalTable, universe_ref: str | None = None) -> dict:
    rows = [{"at": vec_json(v), "value": word_json(w)}
            for v, w in sorted(t.table.items(), key=lambda kv: vec_key(kv[0]))]
    uni: Any = universe_ref if universe_ref is not None else system_json(t.universe)
    return {"universe": uni, "table": rows}


def condition_json(p: Condition) -> dict:
    return {"stem": vec_json(p.stem), "system": system_json(p.system),
            "bad": set_json(p.bad, p.length, True),
            "h": bound_json(p.h_fun), "b": bound_json(p.b_fun),
            "gg": gg_json(p.gg_witness)}


def witness_json(w: SystemWitness) -> dict:
    return {"kind": "witness", "above": vecs_json(w.above),
            "bounds": [bound_json(b) for b in w.bounds],
            "system": system_json(w.system)}


def notbig_json(nb: NotBigND) -> dict:
    return {"kind": "not-big", "small_above": vecs_json(nb.small_above),
            "arity": nb.arity, "sample": vec_json(nb.sample_failure())}


def decision_json(dec: SystemWitness | NotBigND) -> dict:
    if isinstance(dec, SystemWitness):
        return witness_json(dec)
    return notbig_json(dec)


def diagnostics_json(diags: Iterable[Diagnostic]) -> list:
    return [{"severity": d.severity, "code": d.code,
             "subject": repr(d.subject), "message": d.message}
            for d in diags]


def certificate_json(cert: SplittingCertificate) -> dict:
    return {"kind": "splitting-certificate", "case": cert.case,
            "alpha": None if cert.alpha is None else word_json(cert.alpha),
            "e_prime": vecs_json(cert.e_prime),
            "f_prime": vecs_json(cert.f_prime),
            "e_witness": witness_json(cert.e_witness),
            "f_witness": witness_json(cert.f_witness),
            "split_kind": cert.kind}


def result_document(payload: Mapping, instance: Mapping | None = None) -> dict:
    doc = {"version": VERSION, "result": dict(payload)}
    if instance is not None:
        doc["instance_sha256"] = document_hash(instance)
    return doc


# === decoders ===


def parse_word(obj: Any) -> Word:
    if not isinstance(obj, list) or not all(isinstance(x, int) for x in obj):
        raise ValidationError("a word must be a list of integers, got %r" % (obj,))
    return tuple(obj)


def parse_vec(obj: Any) -> Vec:
    if not isinstance(obj, list):
        raise ValidationError("a tuple must be a list of words, got %r" % (obj,))
    return tuple(parse_word(c) for c in obj)


def parse_vecs(obj: Any) -> frozenset[Vec]:
    if not isinstance(obj, list):
        raise ValidationError("expected a list of tuples, got %r" % (obj,))
    return frozenset(parse_vec(x) for x in obj)


def parse_set(obj: Any) -> frozenset[Vec]:
    if isinstance(obj, dict):
        return parse_vecs(obj.get("elements", []))
    return parse_vecs(obj)


def parse_system(obj: Any) -> System:
    if not isinstance(obj, dict):
        raise ValidationError("a universe must be an object, got %r" % (obj,))
    arity = obj.get("arity")
    if not isinstance(arity, int) or arity < 1:
        raise ValidationError("universe arity must be a positive integer")
    depth = obj.get("depth")
    if depth is not None and not isinstance(depth, int):
        raise ValidationError("universe depth must be an integer or null")
    return System(arity, parse_vecs(obj.get("base", [])),
                  parse_vecs(obj.get("nodes", [])), depth)


def _want(obj: dict, key: str, what: str) -> Any:
    if key not in obj:
        raise ValidationError("%s is missing %r" % (what, key))
    return obj[key]


def parse_bound(obj: Any, cap: int = DEFAULT_CAP) -> Bound:
    if not isinstance(obj, dict) or "rule" not in obj:
        raise ValidationError("a bound must be an object with a rule, got %r" % (obj,))
    rule = obj["rule"]
    if rule == "const":
        return Const(int(_want(obj, "c", "const rule")), _cap=cap)
    if rule == "pow2":
        return Pow2(_cap=cap)
    if rule == "linear":
        return Linear(int(_want(obj, "a", "linear rule")),
                      int(_want(obj, "b", "linear rule")), _cap=cap)
    if rule == "iterate":
        return Iterate(parse_bound(_want(obj, "base", "iterate rule"), cap),
                       int(_want(obj, "k", "iterate rule")), _cap=cap)
    if rule == "diag-iterate":
        return DiagIterate(parse_bound(_want(obj, "base", "diag rule"), cap), _cap=cap)
    if rule == "piecewise-iterate":
        ts = tuple(HUGE if t == "huge" else int(t)
                   for t in _want(obj, "thresholds", "piecewise rule"))
        return PiecewiseIterate(parse_bound(_want(obj, "base", "piecewise rule"), cap),
                                ts, _cap=cap)
    if rule == "finite-table":
        return FiniteTable(tuple(int(v) for v in _want(obj, "values", "table rule")),
                           parse_bound(_want(obj, "tail", "table rule"), cap), _cap=cap)
    if rule == "sum":
        return SumBound(tuple(parse_bound(p, cap)
                              for p in _want(obj, "parts", "sum rule")), _cap=cap)
    if rule == "scaled":
        return Scaled(int(_want(obj, "factor", "scaled rule")),
                      parse_bound(_want(obj, "base", "scaled rule"), cap), _cap=cap)
    raise ValidationError("unknown bound rule %r" % (rule,))


def parse_seq(obj: Any) -> Seq:
    if not isinstance(obj, dict) or "rule" not in obj:
        raise ValidationError("a sequence must be an object with a rule, got %r" % (obj,))
    rule = obj["rule"]
    if rule == "affine":
        return AffineSeq(int(_want(obj, "a", "affine seq")),
                         int(_want(obj, "b", "affine seq")))
    if rule == "table":
        return TableSeq(tuple(HUGE if v == "huge" else int(v)
                              for v in _want(obj, "values", "table seq")))
    if rule == "squared":
        return SquaredIndexSeq(parse_seq(_want(obj, "base", "squared seq")))
    raise ValidationError("unknown sequence rule %r" % (rule,))


def parse_gg(obj: Any) -> GrowthWitness:
    if not isinstance(obj, dict):
        raise ValidationError("a growth witness must be an object, got %r" % (obj,))
    return GrowthWitness(parse_seq(_want(obj, "seq", "growth witness")),
                         int(_want(obj, "levels", "growth witness")),
                         int(_want(obj, "horizon", "growth witness")))


def parse_jump(obj: Any) -> MockJump:
    if not isinstance(obj, dict):
        raise ValidationError("a jump must be an object, got %r" % (obj,))
    entries: dict[tuple[Vec, int], int] = {}
    for row in obj.get("entries", []):
        prefix = parse_vec(_want(row, "prefix", "jump entry"))
        entries[(prefix, int(_want(row, "e", "jump entry")))] = \
            int(_want(row, "value", "jump entry"))
    j = MockJump(entries)
    j.validate()
    return j


class DocumentContext:
    """Resolves inline objects and string references against a document."""

    def __init__(self, doc: Mapping, cap: int = DEFAULT_CAP) -> None:
        self.doc = doc
        self.cap = cap

    def _lookup(self, section: str, ref: str) -> Any:
        entries = self.doc.get(section, {})
        if ref not in entries:
            raise ValidationError("no %r named %r in the instance" % (section, ref))
        return entries[ref]

    def universe(self, spec: Any) -> System:
        if isinstance(spec, str):
            spec = self._lookup("universes", spec)
        return parse_system(spec)

    def vecset(self, spec: Any) -> frozenset[Vec]:
        if isinstance(spec, str):
            spec = self._lookup("sets", spec)
        return parse_set(spec)

    def bound(self, spec: Any) -> Bound:
        if isinstance(spec, str):
            spec = self._lookup("bounds", spec)
        return parse_bound(spec, self.cap)

    def bounds(self, spec: Any) -> tuple[Bound, ...]:
        if not isinstance(spec, list):
            raise ValidationError("expected a list of bounds, got %r" % (spec,))
        return tuple(self.bound(x) for x in spec)

    def functional(self, spec: Any) -> FunctionalTable:
        if isinstance(spec, str):
            spec = self._lookup("functionals", spec)
        if not isinstance(spec, dict):
            raise ValidationError("a functional must be an object, got %r" % (spec,))
        universe = self.universe(_want(spec, "universe", "functional"))
        table = {}
        for row in spec.get("table", []):
            table[parse_vec(_want(row, "at", "functional row"))] = \
                parse_word(_want(row, "value", "functional row"))
        out = FunctionalTable(universe, table)
        out.validate()
        return out

    def jump(self, spec: Any) -> MockJump:
        if isinstance(spec, str):
            spec = self._lookup("jumps", spec)
        return parse_jump(spec)

    def condition(self, spec: Any) -> Condition:
        if isinstance(spec, str):
            spec = self._lookup("conditions", spec)
        if not isinstance(spec, dict):
            raise ValidationError("a condition must be an object, got %r" % (spec,))
        return Condition(parse_vec(_want(spec, "stem", "condition")),
                         self.universe(_want(spec, "system", "condition")),
                         self.vecset(_want(spec, "bad", "condition")),
                         self.bound(_want(spec, "h", "condition")),
                         self.bound(_want(spec, "b", "condition")),
                         parse_gg(_want(spec, "gg", "condition")))

    def job(self, name: str) -> dict:
        jobs = self.doc.get("jobs", {})
        if name not in jobs:
            raise ValidationError("no job named %r in the instance" % (name,))
        job = jobs[name]
        if not isinstance(job, dict) or "op" not in job:
            raise ValidationError("job %r must be an object with an op" % (name,))
        return job
