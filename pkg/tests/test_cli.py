from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from annogen.cli import EXIT_INVALID, EXIT_OK, EXIT_REPORT, EXIT_USAGE, main
from conftest import FIXTURES, RULES_DIR, VALID_DIR

DISCOUNT = str(VALID_DIR / "discount.dsl")


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def on_values(doc, method=0, param="age"):
    vals = doc["methods"][method]["candidates"][param]["values"]
    return {v["value"]["value"] for v in vals if v["classification"] == "on"}


class TestValidate:
    def test_valid(self):
        code, out, _ = run("validate", DISCOUNT)
        assert code == EXIT_OK and "discount: valid" in out

    def test_conflict(self):
        code, out, _ = run("validate", str(RULES_DIR / "V2.trigger.dsl"))
        assert code == EXIT_INVALID and "V2 MinMaxConflict" in out

    def test_missing_file(self):
        code, _, err = run("validate", "no/such/file.dsl")
        assert code == EXIT_USAGE and "cannot read" in err

    def test_syntax_error_is_usage(self):
        code, _, err = run("validate", "-", stdin="void f(")
        assert code == EXIT_USAGE and "SyntaxError" in err

    def test_json_format(self):
        code, out, _ = run("validate", "--format", "json", str(RULES_DIR / "V2.trigger.dsl"))
        doc = json.loads(out)
        assert doc["methods"][0]["findings"][0]["rule"] == "V2"

    def test_json_spec_from_stdin(self):
        spec = '{"name": "f", "params": [{"name": "x", "type": "int", "chains": [[{"min": 0}]]}]}'
        assert run("validate", "-", stdin=spec)[0] == EXIT_OK


class TestGenerate:
    def test_golden(self):
        code, out, _ = run("generate", "--seed", "0", DISCOUNT)
        assert code == EXIT_OK
        assert out == (FIXTURES / "golden" / "discount.seed0.json").read_text(encoding="utf-8")
        assert {0, 150} <= on_values(json.loads(out))

    def test_only_valid(self):
        doc = json.loads(run("generate", "--only-valid", DISCOUNT)[1])
        classes = {v["classification"] for v in doc["methods"][0]["candidates"]["age"]["values"]}
        assert "out" not in classes

    def test_seeds_change_samples_only(self):
        a = json.loads(run("generate", "--seed", "1", DISCOUNT)[1])
        b = json.loads(run("generate", "--seed", "2", DISCOUNT)[1])
        assert on_values(a) == on_values(b) == {0, 12, 60, 150}
        va = [v["value"]["value"] for v in a["methods"][0]["candidates"]["age"]["values"]]
        vb = [v["value"]["value"] for v in b["methods"][0]["candidates"]["age"]["values"]]
        assert va != vb

    def test_invalid_spec(self):
        code, _, err = run("generate", str(RULES_DIR / "V1.trigger.dsl"))
        assert code == EXIT_INVALID and "PatternOnNonString" in err

    def test_max_cases(self):
        doc = json.loads(run("generate", "--max-cases", "3", str(VALID_DIR / "bases.dsl"))[1])
        assert len(doc["methods"][0]["cases"]) == 3

    def test_output_is_sorted_and_terminated(self):
        out = run("generate", DISCOUNT)[1]
        assert out.endswith("\n")
        assert out == json.dumps(json.loads(out), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def test_table(self):
        code, out, _ = run("generate", "--format", "table", DISCOUNT)
        assert code == EXIT_OK and "method discount" in out

    @pytest.mark.parametrize(
        "argv",
        [
            ["generate", "--per-bucket", "0", DISCOUNT],
            ["generate", "--seed", "-1", DISCOUNT],
            ["generate", "--seed", str(2**64), DISCOUNT],
            ["generate", "--bogus", DISCOUNT],
            ["frobnicate", DISCOUNT],
            [],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == EXIT_USAGE

    def test_alias_file(self, tmp_path):
        aliases = tmp_path / "aliases.cfg"
        aliases.write_text("Age = range:0:150\n", encoding="utf-8")
        spec = tmp_path / "s.dsl"
        spec.write_text("void f(@com.acme.Age int age);", encoding="utf-8")
        code, out, _ = run("generate", "--alias-file", str(aliases), str(spec))
        assert code == EXIT_OK and {0, 150} <= on_values(json.loads(out))

    def test_bad_alias_file(self, tmp_path):
        aliases = tmp_path / "aliases.cfg"
        aliases.write_text("nonsense\n", encoding="utf-8")
        assert run("validate", "--alias-file", str(aliases), DISCOUNT)[0] == EXIT_USAGE


class TestAssert:
    def test_foo2(self):
        code, out, _ = run("assert", str(VALID_DIR / "foo2.dsl"))
        assert code == EXIT_OK and out == "assert(0 <= r && r <= 22);\n"

    def test_void_no_fields(self):
        assert run("assert", str(VALID_DIR / "bases.dsl")) == (EXIT_OK, "", "")

    def test_pattern(self):
        out = run("assert", str(VALID_DIR / "phone.dsl"))[1]
        assert out == 'assert(Pattern.matches("[0-9]{8,13}",r));\n'

    def test_neutral_and_json(self):
        assert run("assert", "--style", "neutral", str(VALID_DIR / "foo2.dsl"))[1] == "(range r 0 22)\n"
        doc = json.loads(run("assert", "--format", "json", str(VALID_DIR / "foo2.dsl"))[1])
        assert doc["methods"][0]["assertions"][0]["java"] == "assert(0 <= r && r <= 22);"

    def test_invalid(self):
        assert run("assert", str(RULES_DIR / "V2.trigger.dsl"))[0] == EXIT_INVALID


class TestReport:
    def test_roundtrip(self, tmp_path):
        values = tmp_path / "v.json"
        values.write_text(run("generate", "--seed", "4", DISCOUNT)[1], encoding="utf-8")
        code, out, _ = run("report", DISCOUNT, str(values))
        assert code == EXIT_OK and "reasonablyDistributed" in out

    def test_always_in_exit(self, tmp_path):
        values = tmp_path / "v.json"
        values.write_text('{"age": [5]}', encoding="utf-8")
        code, out, _ = run("report", DISCOUNT, str(values))
        assert code == EXIT_REPORT and "alwaysIn" in out

    def test_values_from_stdin(self):
        code, out, _ = run("report", "--format", "json", DISCOUNT, "-", stdin='{"age": [-12, 0, 8, 150, 500]}')
        row = json.loads(out)["methods"][0]["rows"][0]
        assert code == EXIT_OK and (row["in"], row["on"], row["out"]) == (1, 2, 2)

    @pytest.mark.parametrize("text", ["{oops", '{"nobody": [1]}', '{"age": "x"}', '{"age": [true]}'])
    def test_malformed(self, text):
        assert run("report", DISCOUNT, "-", stdin=text)[0] == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "annogen", "assert", str(VALID_DIR / "foo2.dsl")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "assert(0 <= r && r <= 22);\n"
