"""Reference oracles, generators, and the fuzz driver."""

import json
import random

import pytest

from bushy.bounds import Const
from bushy.errors import OracleLimitError, ValidationError
from bushy.forests import full_tree
from bushy.instances import DocumentContext, canonical_dumps
from bushy.largeness import Witness, decide_big
from bushy.oracle import (
    FUZZ_NAMES,
    brute_big,
    brute_big_words,
    covering_antichain,
    fuzz_lemma,
    generate_extract_instance,
    minimize_sets,
    product_universe,
    random_condition,
    random_jump,
    validate_certificate,
)
from bushy.forcing import is_valid_condition, validate_condition
from bushy.systems import SystemWitness, decide_big_nd, full_system
from bushy.words import is_prefix_free, sorted_vecs, sorted_words


class TestBruteAgreement:
    def test_one_dimensional_exhaustive(self):
        forest = full_tree((), 2, 2)
        nodes = sorted_words(forest.nodes - {()})
        g = Const(2)
        for mask in range(2 ** len(nodes)):
            tgt = frozenset(n for i, n in enumerate(nodes) if mask >> i & 1)
            calc = isinstance(decide_big(tgt, [()], g, forest), Witness)
            assert brute_big_words(tgt, [()], g, forest) is calc

    def test_rectangular_exhaustive(self):
        U9 = product_universe(2, 1, 2, 1)
        root = ((), ())
        cells = sorted_vecs(v for v in U9.nodes if v != root)
        bv = (Const(2), Const(2))
        for mask in range(2 ** len(cells)):
            tgt = frozenset(v for i, v in enumerate(cells) if mask >> i & 1)
            calc = isinstance(decide_big_nd(tgt, [root], bv, U9),
                              SystemWitness)
            assert brute_big(tgt, [root], bv, U9) is calc

    def test_edge_contracts(self):
        forest = full_tree((), 2, 2)
        assert brute_big_words(frozenset({()}), [()], Const(2), forest)
        assert not brute_big_words(frozenset(), [()], Const(2), forest)

    def test_limit_enforced(self):
        big_uni = product_universe(4, 2, 4, 2)
        with pytest.raises(OracleLimitError):
            brute_big(frozenset(), [((), ())], (Const(2), Const(2)),
                      big_uni, limit=10)


class TestGenerators:
    def test_covering_antichain(self):
        forest = full_tree((), 3, 2)
        for seed in range(10):
            ac = covering_antichain(random.Random(seed), forest)
            assert ac
            assert is_prefix_free((w,) for w in ac)
            assert ac <= forest.nodes

    def test_random_jump_consistent(self):
        for seed in range(5):
            random_jump(random.Random(seed), 2, 4, 3).validate()

    def test_random_condition_valid(self):
        for seed in range(4):
            p, jump = random_condition(random.Random(seed), 2, 3)
            assert validate_condition(p, jump) == []
            assert is_valid_condition(p)

    def test_extract_instances_valid(self):
        for seed in range(4):
            inst = generate_extract_instance(random.Random(seed), 1, width=9)
            assert validate_certificate(inst, inst.run()) == []


class TestMinimize:
    def test_greedy_fixpoint(self):
        sets = {"A": frozenset({((0,),), ((1,),), ((2,),)}),
                "B": frozenset({((3,),), ((4,),)})}
        # failing as long as A holds at least two elements
        out = minimize_sets(sets, lambda s: len(s["A"]) >= 2)
        assert len(out["A"]) == 2
        assert out["B"] == frozenset()

    def test_keeps_failing_property(self):
        sets = {"A": frozenset(((i,),) for i in range(6))}

        def weight(s):
            return sum(v[0][0] for v in s["A"]) >= 6

        out = minimize_sets(sets, weight)
        assert weight(out)
        assert len(out["A"]) < 6


class TestFuzz:
    def test_names_closed(self):
        assert set(FUZZ_NAMES) == {
            "bigSubset", "concat", "weakConcat", "bigSubsetND",
            "extract1D", "extractND", "projectComm"}
        with pytest.raises(ValidationError):
            fuzz_lemma("noSuchLemma", 1)

    def test_weak_concat_counterexample(self, tmp_path):
        rep = fuzz_lemma("weakConcat", 12, seed=0, fixture_dir=str(tmp_path))
        assert rep.failures == []
        assert rep.counterexamples
        cx = rep.counterexamples[0]
        doc = json.loads((tmp_path / cx.fixture).read_text(encoding="utf-8"))
        ctx = DocumentContext(doc)
        assert ctx.universe("U").arity == 2
        # the persisted instance re-parses canonically
        assert canonical_dumps(doc) == (tmp_path / cx.fixture).read_text(
            encoding="utf-8")

    def test_deterministic_across_jobs(self, tmp_path):
        one = fuzz_lemma("weakConcat", 12, seed=0,
                         fixture_dir=str(tmp_path / "a"))
        four = fuzz_lemma("weakConcat", 12, seed=0, jobs=4,
                          fixture_dir=str(tmp_path / "b"))
        assert one.to_json() == four.to_json()
        for cx in one.counterexamples:
            left = (tmp_path / "a" / cx.fixture).read_text(encoding="utf-8")
            right = (tmp_path / "b" / cx.fixture).read_text(encoding="utf-8")
            assert left == right

    @pytest.mark.parametrize("name,budget", [
        ("bigSubset", 8), ("concat", 6), ("bigSubsetND", 4),
        ("extract1D", 6), ("projectComm", 8)])
    def test_lemmas_hold(self, name, budget):
        rep = fuzz_lemma(name, budget, seed=1)
        assert rep.failures == []
        assert rep.counterexamples == []
        assert rep.cases == budget
