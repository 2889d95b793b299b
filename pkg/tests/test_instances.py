"""Instance document encoding, parsing, and canonical form."""

import pytest
from hypothesis import given, strategies as st

from bushy.bounds import (
    AffineSeq,
    Const,
    DiagIterate,
    FiniteTable,
    Iterate,
    Linear,
    Pow2,
    Scaled,
    SquaredIndexSeq,
    SumBound,
    TableSeq,
)
from bushy.errors import ValidationError
from bushy.forcing import Condition, MockJump, derive_gg_witness
from bushy.functionals import FunctionalTable
from bushy.instances import (
    DocumentContext,
    ParseError,
    VERSION,
    bound_json,
    canonical_dumps,
    condition_json,
    document_hash,
    functional_json,
    gg_json,
    jump_json,
    loads_document,
    parse_bound,
    parse_gg,
    parse_jump,
    parse_system,
    parse_vec,
    parse_word,
    result_document,
    seq_json,
    set_json,
    system_json,
    vec_json,
    vecs_json,
    word_json,
)
from bushy.systems import full_system


def bound_trees(depth=3):
    leaf = st.one_of(
        st.builds(Const, st.integers(0, 9)),
        st.just(Pow2()),
        st.builds(Linear, st.integers(0, 4), st.integers(0, 4)))
    return st.recursive(
        leaf,
        lambda kids: st.one_of(
            st.builds(lambda b, k: Iterate(b, k), kids, st.integers(1, 3)),
            st.builds(DiagIterate, kids),
            st.builds(lambda f, b: Scaled(f, b), st.integers(1, 4), kids),
            st.builds(lambda parts: SumBound(tuple(parts)),
                      st.lists(kids, min_size=2, max_size=3)),
            st.builds(lambda vals, t: FiniteTable(tuple(vals), t),
                      st.lists(st.integers(0, 9), min_size=1, max_size=3),
                      kids)),
        max_leaves=depth)


class TestCanonicalForm:
    def test_sorted_compact_newline(self):
        text = canonical_dumps({"b": 1, "a": [2, 3]})
        assert text == '{"a":[2,3],"b":1}\n'

    def test_hash_is_stable_under_key_order(self):
        assert document_hash({"a": 1, "b": 2}) == document_hash({"b": 2, "a": 1})

    def test_result_document_embeds_hash(self):
        inst = {"version": VERSION, "jobs": {}}
        out = result_document({"ok": True}, inst)
        assert out["instance_sha256"] == document_hash(inst)
        assert out["version"] == VERSION


class TestLoadDocument:
    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            loads_document('{"version": "bushy-1",\n  "jobs": }')
        assert exc.value.line == 2
        assert exc.value.column == 11
        assert "(line 2, column 11)" in str(exc.value)

    def test_version_checked(self):
        with pytest.raises(ValidationError, match="version"):
            loads_document('{"version": "bushy-0"}')

    def test_unknown_section_rejected(self):
        with pytest.raises(ValidationError, match="unknown section"):
            loads_document('{"version": "bushy-1", "extras": {}}')

    def test_top_level_must_be_object(self):
        with pytest.raises(ValidationError):
            loads_document('[1, 2]')


class TestWordVecCodecs:
    def test_word_round_trip(self):
        assert parse_word(word_json((0, 1, 2))) == (0, 1, 2)
        with pytest.raises(ValidationError):
            parse_word([0, "x"])

    def test_vec_round_trip(self):
        v = ((0, 1), (), (2,))
        assert parse_vec(vec_json(v)) == v

    def test_set_json_sorted(self):
        enc = set_json({((1,),), ((0,),)}, 1)
        assert enc["elements"] == [[[0]], [[1]]]
        assert enc["open"] is False


class TestBoundCodec:
    @given(bound_trees())
    def test_round_trip_preserves_semantics(self, b):
        back = parse_bound(bound_json(b))
        for n in range(6):
            assert back.eval(n) == b.eval(n)

    def test_unknown_rule(self):
        with pytest.raises(ValidationError, match="rule"):
            parse_bound({"rule": "exp-tower"})

    def test_seq_round_trip(self):
        from bushy.instances import parse_seq
        for s in (AffineSeq(2, 1), TableSeq((3, 4, 5)),
                  SquaredIndexSeq(AffineSeq(1, 0))):
            back = parse_seq(seq_json(s))
            for k in range(1, 4):
                assert back.eval(k) == s.eval(k)


class TestStructCodecs:
    def test_system_round_trip(self):
        s = full_system((2, 2), 2)
        assert parse_system(system_json(s)) == s

    def test_jump_round_trip(self):
        j = MockJump({((), 0): 1, (((1,),), 1): 0})
        assert parse_jump(jump_json(j)) == j

    def test_gg_round_trip(self):
        w = derive_gg_witness(Pow2(), Const(2), 2, 8)
        back = parse_gg(gg_json(w))
        assert back.levels == w.levels and back.horizon == w.horizon
        assert back.verify(Pow2(), Const(2)).passed

    def test_condition_round_trip(self):
        U = full_system((2, 2), 2)
        w = derive_gg_witness(Const(2), Const(2), 2, 8)
        p = Condition(((), ()), U, frozenset(), Const(2), Const(2), w)
        ctx = DocumentContext({})
        assert ctx.condition(condition_json(p)) == p

    def test_functional_round_trip(self):
        U = full_system((2,), 2)
        t = FunctionalTable.from_function(U, lambda v: tuple(c % 2 for c in v[0]))
        ctx = DocumentContext({})
        back = ctx.functional(functional_json(t))
        assert back.universe == U
        assert back.table == t.table


class TestDocumentContext:
    DOC = {
        "version": VERSION,
        "universes": {"U": system_json(full_system((2,), 1))},
        "sets": {"B": set_json({((0,),)}, 1)},
        "bounds": {"g": {"rule": "const", "c": 2}},
        "jobs": {"main": {"op": "check-big", "universe": "U",
                          "target": "B", "bounds": ["g"]}},
    }

    def test_reference_resolution(self):
        ctx = DocumentContext(self.DOC)
        assert ctx.universe("U").arity == 1
        assert ctx.vecset("B") == frozenset({((0,),)})
        assert ctx.bound("g").eval(0) == 2
        assert ctx.bounds(["g", {"rule": "pow2"}])[1].eval(3) == 8

    def test_missing_reference(self):
        ctx = DocumentContext(self.DOC)
        with pytest.raises(ValidationError, match="no 'sets'"):
            ctx.vecset("C")

    def test_job_shape(self):
        ctx = DocumentContext(self.DOC)
        assert ctx.job("main")["op"] == "check-big"
        with pytest.raises(ValidationError, match="no job"):
            ctx.job("other")
        bad = DocumentContext({"jobs": {"main": {"universe": "U"}}})
        with pytest.raises(ValidationError, match="op"):
            bad.job("main")

    def test_inline_specs_allowed(self):
        ctx = DocumentContext({})
        assert ctx.vecset([[[1]]]) == frozenset({((1,),)})
        assert ctx.bound({"rule": "const", "c": 3}).eval(1) == 3

    def test_encoded_sets_sorted_deterministically(self):
        a = vecs_json({((0,), (1,)), ((0,), (0,))})
        b = vecs_json([((0,), (0,)), ((0,), (1,))])
        assert a == b
