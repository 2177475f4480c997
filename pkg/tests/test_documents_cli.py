import csv
import io
import json
from fractions import Fraction

import pytest

from conftest import random_instances
from ainfty import cli
from ainfty.conditions import CONDITIONS, evaluate
from ainfty.documents import (
    DocumentError,
    format_value,
    lifted_document,
    parse_instance,
    parse_lifted,
    parse_value,
    profile_csv,
    profile_document,
    report_csv,
    report_document,
    serialize_instance,
)
from ainfty.errors import ValidationError
from ainfty.families import lift, make_family
from ainfty.relations import family_profile

LEMMA1_5 = """{
  "atoms": [{"id": "x_5_0", "measure": "2/1"}, {"id": "x_5_1", "measure": "1/1"}],
  "weight": {"x_5_0": "5/1", "x_5_1": "1/1"},
  "basis": [{"name": "B_5", "atoms": ["x_5_0", "x_5_1"]}]
}"""


class TestParse:
    def test_lemma1_document(self):
        inst = parse_instance(LEMMA1_5)
        assert evaluate(inst, "P5").overall == Fraction(11, 15)
        assert serialize_instance(inst) == serialize_instance(make_family("lemma1", 5))

    def test_zero_measure(self):
        with pytest.raises(ValidationError, match="measure"):
            parse_instance(LEMMA1_5.replace('"measure": "2/1"', '"measure": "0/1"'))

    def test_uncovered_atom(self):
        doc = json.loads(LEMMA1_5)
        doc["basis"][0]["atoms"] = ["x_5_0"]
        with pytest.raises(ValidationError, match="cover"):
            parse_instance(json.dumps(doc))

    def test_decimal_rejected(self):
        with pytest.raises(DocumentError, match="p/q"):
            parse_instance(LEMMA1_5.replace('"5/1"', "5.0"))
        with pytest.raises(DocumentError):
            parse_instance(LEMMA1_5.replace('"5/1"', '"0.5"'))

    def test_syntax_error_position(self):
        with pytest.raises(DocumentError) as err:
            parse_instance(LEMMA1_5.replace('"1/1"},', '"1/1"}'))
        assert err.value.line == 4 and err.value.column == 3

    @pytest.mark.parametrize("change,match", [
        (lambda d: d["atoms"].append({"id": "x_5_0", "measure": "1/1"}), "duplicate"),
        (lambda d: d["weight"].update({"x_5_1": "-1/1"}), "weight"),
        (lambda d: d["basis"].append({"name": "E", "atoms": []}), "empty"),
        (lambda d: d["basis"][0]["atoms"].append("zz"), "unknown"),
        (lambda d: d.pop("weight"), "weight"),
        (lambda d: d["weight"].pop("x_5_1"), "x_5_1"),
    ])
    def test_invariants(self, change, match):
        doc = json.loads(LEMMA1_5)
        change(doc)
        with pytest.raises(ValidationError, match=match):
            parse_instance(json.dumps(doc))

    def test_roundtrip_constants(self):
        for inst in random_instances(15, seed=31, max_atoms=8) + [make_family("lemma2", 2), make_family("lemma3", 2)]:
            back = parse_instance(serialize_instance(inst))
            assert list(back.ids) == list(inst.ids)
            for cond in CONDITIONS:
                assert evaluate(back, cond).values == evaluate(inst, cond).values

    def test_lifted_roundtrip(self):
        lifted = lift(make_family("lemma2", 1))
        assert parse_lifted(json.dumps(lifted_document(lifted))) == lifted


class TestRender:
    def test_values(self):
        assert format_value(Fraction(3, 6)) == "1/2"
        assert format_value(float("inf")) == "inf"
        x = 0.1 + 0.2
        assert parse_value(format_value(x)) == x
        assert parse_value("7/3") == Fraction(7, 3)

    def test_csv_matches_structured(self):
        inst = make_family("lemma1", 4, mode="cumulative")
        for cond in CONDITIONS:
            r = evaluate(inst, cond)
            doc = report_document(r)
            rows = list(csv.DictReader(io.StringIO(report_csv(r))))
            assert [row["constant"] for row in rows[:-1]] == [b["constant"] for b in doc["per_base"]]
            assert rows[-1]["base"] == "*" and rows[-1]["constant"] == doc["overall"]
            assert parse_value(doc["overall"]) == r.overall

    def test_profile_csv_matches(self):
        p = family_profile("P2", None, "lemma1", range(1, 9))
        doc = profile_document(p)
        rows = list(csv.DictReader(io.StringIO(profile_csv(p))))
        assert list(rows[0]) == ["family", "n", "condition", "params", "constant", "backend"]
        assert [r["constant"] for r in rows] == [r["constant"] for r in doc["rows"]]
        assert [int(r["n"]) for r in rows] == list(range(1, 9))


class TestCli:
    def run(self, capsys, *argv):
        status = cli.main(list(argv))
        out = capsys.readouterr()
        return status, out.out, out.err

    def test_eval_constant_weight(self, tmp_path, capsys):
        doc = json.loads(LEMMA1_5)
        doc["weight"] = {"x_5_0": "3/1", "x_5_1": "3/1"}
        path = tmp_path / "c.json"
        path.write_text(json.dumps(doc))
        status, out, _ = self.run(capsys, "eval", "--instance", str(path), "--condition", "P5")
        assert status == 0 and json.loads(out)["overall"] == "1/1"

    def test_eval_params_and_csv(self, tmp_path, capsys):
        path = tmp_path / "l.json"
        path.write_text(LEMMA1_5)
        status, out, _ = self.run(capsys, "eval", "--instance", str(path), "--condition", "P1", "--p", "2",
                                  "--output", "csv")
        assert status == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[-1]["constant"] == "77/45" and rows[-1]["params"] == "p=2/1"
        status, out, _ = self.run(capsys, "eval", "--instance", str(path), "--condition", "P2'",
                                  "--s-grid", "1/2,1/1000")
        assert status == 0 and json.loads(out)["witness"]["s"] == "1/1000"

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "l.json"
        path.write_text(LEMMA1_5)
        target = tmp_path / "r.json"
        status, out, _ = self.run(capsys, "eval", "--instance", str(path), "--condition", "P4", "--alpha", "1/2",
                                  "--strategy", "brute", "--out", str(target))
        assert status == 0 and out == ""
        assert json.loads(target.read_text())["overall"] == "1/11"

    def test_errors_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(LEMMA1_5.replace('"2/1"', '"0/1"'))
        assert self.run(capsys, "eval", "--instance", str(bad), "--condition", "P5")[0] == 2
        assert self.run(capsys, "eval", "--instance", str(tmp_path / "missing.json"), "--condition", "P5")[0] == 2
        good = tmp_path / "good.json"
        good.write_text(LEMMA1_5)
        assert self.run(capsys, "eval", "--instance", str(good), "--condition", "P5", "--p", "2")[0] == 2
        assert self.run(capsys, "eval", "--instance", str(good), "--condition", "P9")[0] == 2
        with pytest.raises(SystemExit) as err:
            cli.main(["eval", "--instance", str(good), "--condition", "P5", "--bogus"])
        assert err.value.code == 2

    def test_family(self, capsys):
        status, out, _ = self.run(capsys, "family", "--name", "lemma3", "--n-max", "6", "--condition", "P7")
        doc = json.loads(out)
        assert status == 0 and len(doc["rows"]) == 6 and doc["verdict"]["kind"] == "divergent"
        status, out, err = self.run(capsys, "family", "--name", "lemma1", "--n-max", "4", "--cumulative",
                                    "--condition", "P5", "--output", "csv")
        assert status == 0 and len(out.strip().splitlines()) == 5 and "verdict" in err

    def test_lift(self, tmp_path, capsys):
        path = tmp_path / "l.json"
        path.write_text(LEMMA1_5)
        status, out, _ = self.run(capsys, "lift", "--instance", str(path))
        doc = json.loads(out)
        assert status == 0
        assert doc["intervals"] == [{"left": "0/1", "right": "2/1", "weight": "5/1"},
                                    {"left": "2/1", "right": "3/1", "weight": "1/1"}]
        assert doc["basis"] == [{"name": "B_5", "intervals": [0, 1]}]
        status, out, _ = self.run(capsys, "lift", "--name", "lemma2", "--level", "1", "--output", "csv")
        assert status == 0 and out.count("interval,") == 5

    def test_check_table_failure_exit_1(self, capsys):
        status, out, err = self.run(capsys, "check-table", "--n-max", "3", "--output", "csv")
        assert status == 1 and "FAILED" in err
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 64
