"""Command line driver: exit codes, canonical output, determinism."""

import json

import pytest

from bushy.bounds import Const
from bushy.cli import EXHAUSTIVE_SMALL, main
from bushy.forcing import Condition, MockJump, derive_gg_witness
from bushy.functionals import FunctionalTable
from bushy.instances import (
    VERSION,
    canonical_dumps,
    condition_json,
    document_hash,
    functional_json,
    jump_json,
    loads_document,
    set_json,
    system_json,
)
from bushy.systems import full_system
from bushy.words import EMPTY

BUNDLED = "tests/data/instances/check-big-depth1.json"


def write_doc(tmp_path, doc, name="inst.json"):
    path = tmp_path / name
    path.write_text(canonical_dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def doc_4ary():
    U = full_system((4,), 1)
    return {
        "version": VERSION,
        "universes": {"U": system_json(U)},
        "sets": {
            "C": set_json({((0,),), ((1,),), ((2,),)}, 1),
            "thin": set_json({((0,),)}, 1),
            "L": set_json({((0,),), ((1,),)}, 1),
            "R": set_json({((2,),), ((3,),)}, 1),
        },
        "bounds": {"g": {"rule": "const", "c": 2}},
        "jobs": {
            "main": {"op": "check-big", "universe": "U", "target": "C",
                     "above": [[[]]], "bounds": ["g"]},
            "small": {"op": "check-big", "universe": "U", "target": "thin",
                      "above": [[[]]], "bounds": ["g"]},
            "cut": {"op": "split", "universe": "U", "left": "L", "right": "R",
                    "above": [[[]]], "left_bounds": ["g"],
                    "right_bounds": ["g"]},
            "close": {"op": "closure", "universe": "U", "target": "C",
                      "bound": "g"},
        },
    }


def doc_condition():
    U = full_system((2, 2), 2)
    w = derive_gg_witness(Const(2), Const(2), 2, 8)
    p = Condition((EMPTY, EMPTY), U, frozenset(), Const(2), Const(2), w)
    deep = {v for v in U.nodes if all(len(c) >= 2 for c in v)}
    shallow = {v for v in U.nodes if all(len(c) >= 1 for c in v)}
    broken = dict(condition_json(p))
    broken["bad"] = set_json({((1,), ())}, 2, True)
    return {
        "version": VERSION,
        "conditions": {"p": condition_json(p), "leaky": broken},
        "sets": {"deep": set_json(deep, 2), "shallow": set_json(shallow, 2)},
        "bounds": {"g": {"rule": "const", "c": 2}},
        "jumps": {"J": jump_json(MockJump({((), 0): 1}))},
        "jobs": {
            "main": {"op": "validate-condition", "condition": "p"},
            "broken": {"op": "validate-condition", "condition": "leaky"},
            "ext": {"op": "extend", "condition": "p", "m": 1},
            "hom": {"op": "homogenize", "condition": "p"},
            "res": {"op": "restrict", "condition": "p", "m": 1},
            "conv": {"op": "sigma1", "condition": "p", "target": "deep",
                     "tau": [[], []], "bound": "g"},
            "div": {"op": "sigma1", "condition": "p",
                    "target": {"arity": 2, "elements": []},
                    "tau": [[], []], "bound": "g"},
            "tot": {"op": "build-totality", "condition": "p",
                    "targets": ["shallow"], "bound": "g"},
            "dnc": {"op": "bdnc", "universe": system_json(U), "jump": "J",
                    "n": 2},
        },
    }


class TestExitCodes:
    def test_positive_decision(self, capsys):
        code, out, _ = run(capsys, ["check-big", "--instance", BUNDLED])
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["kind"] == "witness"
        with open(BUNDLED, encoding="utf-8") as fh:
            assert doc["instance_sha256"] == document_hash(json.load(fh))

    def test_negative_decision(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_4ary())
        code, out, _ = run(capsys, ["check-big", "--instance", path,
                                    "--job", "small"])
        assert code == 1
        assert json.loads(out)["result"]["kind"] == "not-big"

    def test_malformed_document(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"version": "bushy-1",\n  "jobs": }', encoding="utf-8")
        code, out, err = run(capsys, ["check-big", "--instance", str(bad)])
        assert code == 2
        assert out == ""
        assert "parse error" in err and "line 2" in err

    def test_wrong_op_for_job(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_4ary())
        code, _, err = run(capsys, ["split", "--instance", path])
        assert code == 2
        assert "op" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, ["check-big", "--instance",
                                    str(tmp_path / "nowhere.json")])
        assert code == 2

    def test_missing_job(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_4ary())
        code, _, err = run(capsys, ["check-big", "--instance", path,
                                    "--job", "ghost"])
        assert code == 2
        assert "no job" in err

    def test_usage_error(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()


class TestDecisionOps:
    def test_split(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_4ary())
        code, out, _ = run(capsys, ["split", "--instance", path,
                                    "--job", "cut"])
        assert code == 0
        res = json.loads(out)["result"]
        assert res["side"] in ("left", "right")
        assert res["witness"]["kind"] == "witness"

    def test_closure(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_4ary())
        code, out, _ = run(capsys, ["closure", "--instance", path,
                                    "--job", "close"])
        assert code == 0
        assert json.loads(out)["result"]["kind"] == "closure"

    def test_project(self, capsys, tmp_path):
        U = full_system((2, 2), 1)
        doc = {
            "version": VERSION,
            "universes": {"U": system_json(U)},
            "sets": {"B": set_json(
                {v for v in U.nodes if all(len(c) == 1 for c in v)}, 2)},
            "bounds": {"g": {"rule": "const", "c": 2}},
            "jobs": {"main": {"op": "project", "universe": "U", "target": "B",
                              "suffix_base": [[]], "bounds": ["g"]}},
        }
        path = write_doc(tmp_path, doc)
        code, out, _ = run(capsys, ["project", "--instance", path])
        assert code == 0
        res = json.loads(out)["result"]
        assert res["kind"] == "projection"
        assert res["set"]["elements"] == [[[0]], [[1]]]

    def test_theta_chain(self, capsys, tmp_path):
        U = full_system((2,), 2)
        chain_table = FunctionalTable.from_function(
            U, lambda v: (1,) * len(v[0]))
        doc = {
            "version": VERSION,
            "functionals": {"G": functional_json(chain_table)},
            "sets": {"empty": {"arity": 1, "elements": []}},
            "bounds": {"g": {"rule": "const", "c": 2}},
            "jobs": {"main": {"op": "theta", "table": "G", "mod_b": "empty",
                              "mu": [], "bound": "g"}},
        }
        path = write_doc(tmp_path, doc)
        code, out, _ = run(capsys, ["theta", "--instance", path])
        assert code == 0
        res = json.loads(out)["result"]
        assert res["theta"] == [1, 1]
        assert res["chain"] == [[], [1], [1, 1]]

    def test_theta_split_is_negative(self, capsys, tmp_path):
        U = full_system((4,), 2)
        rich = FunctionalTable.from_function(
            U, lambda v: tuple(c % 2 for c in v[0]))
        doc = {
            "version": VERSION,
            "functionals": {"G": functional_json(rich)},
            "sets": {"empty": {"arity": 1, "elements": []}},
            "bounds": {"g": {"rule": "const", "c": 2}},
            "jobs": {"main": {"op": "theta", "table": "G", "mod_b": "empty",
                              "mu": [], "bound": "g"}},
        }
        path = write_doc(tmp_path, doc)
        code, out, _ = run(capsys, ["theta", "--instance", path])
        assert code == 1
        res = json.loads(out)["result"]
        assert res["kind"] == "exists-split"
        assert res["left"] and res["right"]


class TestConditionOps:
    def test_validate_valid(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        code, out, _ = run(capsys, ["validate-condition", "--instance", path])
        assert code == 0
        assert json.loads(out)["result"]["valid"] is True

    def test_validate_invalid(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        code, out, _ = run(capsys, ["validate-condition", "--instance", path,
                                    "--job", "broken"])
        assert code == 1
        res = json.loads(out)["result"]
        assert res["valid"] is False
        assert any(i["severity"] == "error" for i in res["items"])

    def test_extend_restrict_homogenize(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        for jobname in ("ext", "res", "hom"):
            code, out, _ = run(capsys, [
                {"ext": "extend", "res": "restrict",
                 "hom": "homogenize"}[jobname],
                "--instance", path, "--job", jobname])
            assert code == 0
            res = json.loads(out)["result"]
            assert res["kind"] == "condition"
        assert json.loads(out)["result"]["condition"]["stem"] == [[], []]

    def test_sigma1_both_branches(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        code, out, _ = run(capsys, ["sigma1", "--instance", path,
                                    "--job", "conv"])
        assert code == 0
        assert json.loads(out)["result"]["kind"] == "witness"
        code, out, _ = run(capsys, ["sigma1", "--instance", path,
                                    "--job", "div"])
        assert code == 1
        res = json.loads(out)["result"]
        assert res["kind"] == "divergence"
        assert res["refutation"]["kind"] == "not-big"

    def test_totality_with_trace(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        trace_path = tmp_path / "trace.jsonl"
        code, out, _ = run(capsys, ["build-totality", "--instance", path,
                                    "--job", "tot", "--trace",
                                    str(trace_path)])
        assert code == 0
        lines = trace_path.read_text(encoding="utf-8").splitlines()
        records = [json.loads(ln) for ln in lines]
        assert records[0]["stage"] == "init"
        assert all({"stage", "round", "level", "leaves", "note"} ==
                   set(r) for r in records)

    def test_bdnc(self, capsys, tmp_path):
        path = write_doc(tmp_path, doc_condition())
        code, out, _ = run(capsys, ["bdnc", "--instance", path,
                                    "--job", "dnc"])
        assert code == 0
        res = json.loads(out)["result"]
        assert res["kind"] == "bdnc"
        assert res["set"]["open"] is True
        assert len(res["set"]["elements"]) == 17


class TestOutputDiscipline:
    def test_byte_identical_repeat(self, capsys):
        _, first, _ = run(capsys, ["check-big", "--instance", BUNDLED])
        _, second, _ = run(capsys, ["check-big", "--instance", BUNDLED])
        assert first == second

    def test_out_flag_writes_file(self, capsys, tmp_path):
        out_path = tmp_path / "result.json"
        code, out, _ = run(capsys, ["check-big", "--instance", BUNDLED,
                                    "--out", str(out_path)])
        assert code == 0
        assert out == ""
        doc = json.loads(out_path.read_text(encoding="utf-8"))
        assert doc["result"]["kind"] == "witness"

    def test_output_is_canonical(self, capsys):
        _, out, _ = run(capsys, ["check-big", "--instance", BUNDLED])
        assert out == canonical_dumps(json.loads(out))

    def test_cap_flag_accepted(self, capsys):
        code, _, _ = run(capsys, ["check-big", "--instance", BUNDLED,
                                  "--cap", "1000000"])
        assert code == 0


class TestFuzzCommand:
    def test_exhaustive_small_finds_weak_concat_counterexample(
            self, capsys, tmp_path):
        report_path = tmp_path / "report.json"
        code, _, err = run(capsys, [
            "fuzz", "weakConcat", "--budget", "exhaustive-small",
            "--seed", "0", "--fixture-dir", str(tmp_path / "fx"),
            "--out", str(report_path)])
        assert code == 0
        report = json.loads(report_path.read_text(encoding="utf-8"))
        fz = report["fuzz"]
        assert fz["cases"] == EXHAUSTIVE_SMALL["weakConcat"]
        assert fz["failures"] == []
        assert fz["counterexamples"]
        fixture = fz["counterexamples"][0]["fixture"]
        fixture_doc = loads_document(
            (tmp_path / "fx" / fixture).read_text(encoding="utf-8"))
        assert "jobs" in fixture_doc

    def test_jobs_do_not_change_report(self, capsys, tmp_path):
        argv = ["fuzz", "bigSubset", "--budget", "6", "--seed", "3"]
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(argv + ["--jobs", "1", "--out", str(out_a),
                            "--fixture-dir", str(tmp_path / "fa")]) == 0
        assert main(argv + ["--jobs", "3", "--out", str(out_b),
                            "--fixture-dir", str(tmp_path / "fb")]) == 0
        capsys.readouterr()
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_bad_budget(self, capsys):
        code = main(["fuzz", "bigSubset", "--budget", "tiny"])
        capsys.readouterr()
        assert code == 2

    def test_unknown_lemma_rejected_by_parser(self, capsys):
        code = main(["fuzz", "noSuchLemma", "--budget", "1"])
        capsys.readouterr()
        assert code == 2
