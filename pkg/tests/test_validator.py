from __future__ import annotations

import pytest

from annogen import model as M
from annogen.diagnostics import Severity
from annogen.dsl import parse_signature_dsl
from annogen.validator import RULE_CODES, Verdict, effective_bound, validate
from conftest import RULES_DIR, all_valid_specs, load_specs

PERSON = "class Person { int age; }\nclass Student extends Person { String school; }\n"


def check(src):
    spec, diags = parse_signature_dsl(PERSON + src)
    assert spec is not None, diags
    return validate(spec)


def codes(report, severity=Severity.ERROR):
    return [f.code for f in report.findings if f.severity is severity]


def rule_fixture(rule, kind):
    (spec,) = load_specs(RULES_DIR / f"{rule}.{kind}.dsl")
    return validate(spec)


class TestRuleFixtures:
    @pytest.mark.parametrize("rule", sorted(RULE_CODES))
    def test_trigger_reports_exactly_that_rule(self, rule):
        report = rule_fixture(rule, "trigger")
        assert report.verdict is Verdict.INVALID
        assert [f.rule for f in report.errors()] == [rule]
        assert codes(report) == [RULE_CODES[rule]]

    @pytest.mark.parametrize("rule", sorted(RULE_CODES))
    def test_near_miss_passes(self, rule):
        report = rule_fixture(rule, "nearmiss")
        assert report.verdict is Verdict.VALID
        assert report.errors() == []

    @pytest.mark.parametrize("name,spec", all_valid_specs(), ids=lambda x: x if isinstance(x, str) else x.name)
    def test_valid_corpus(self, name, spec):
        assert validate(spec).valid


class TestElimination:
    def test_pattern_on_int_removed(self):
        report = check('void f(@Pattern("[0-9]*") @Min(0) int x);')
        assert report.effective_chains["x"] == (M.ConstraintChain((M.Min(0),)),)

    def test_conflict_drops_both_bounds(self):
        report = check("void f(@Min(10) @Max(5) int x);")
        assert report.effective_chains["x"] == ()

    def test_conflict_across_chains_of_same_target(self):
        report = check('void f(@Field("age") @Min(10) @Field("age") @Max(5) Person p);')
        assert codes(report) == ["MinMaxConflict"]

    def test_navigational_only_drops_chain(self):
        report = check('void f(@Field("age") Person p, @Min(1) int y);')
        assert report.effective_chains["p"] == ()
        assert report.effective_chains["y"] == (M.ConstraintChain((M.Min(1),)),)

    def test_subclass_terminated_chain_allowed(self):
        report = check("void f(@Element(2) @SubClass(Student.class) Person[] ps);")
        assert report.valid and len(report.effective_chains["ps"]) == 1

    def test_element_beyond_length_drops_chain(self):
        report = check("void f(@Max(2) @Element(3) @Min(1) int[] xs);")
        assert report.effective_chains["xs"] == (M.ConstraintChain((M.Max(2),)),)

    def test_findings_carry_origins(self):
        report = check("void f(\n   @Min(10) @Max(5) int x);")
        (f,) = report.errors()
        assert (f.origin.line, f.origin.column) == (4, 4)
        assert f.slot == "x"

    def test_min_max_on_string_is_v6(self):
        assert codes(check("void f(@Min(1) String s);")) == ["MinMaxOnRef"]

    def test_return_and_field_slots(self):
        report = check("class A { @Pattern(\"x\") int n; }\n@Min(0) @Pattern(\"y\") int A.f();")
        assert sorted(f.slot for f in report.errors()) == ["@field:A.n", "@return"]


class TestResolutionAndPatterns:
    @pytest.mark.parametrize(
        "src,code",
        [
            ('void f(@Field("height") @Min(1) Person p);', "UnknownField"),
            ('void f(@Field("age") @Min(1) int p);', "FieldOnNonRef"),
            ("void f(@SubClass(Robot.class) @Nullable Person p);", "UnknownSubclass"),
            ("void f(@Element(1) @Min(1) Person p);", "ElementOnNonArray"),
            ('void f(@Pattern("(?=x)y") String s);', "InvalidPattern"),
            ('void f(@Pattern("(abc") String s);', "InvalidPattern"),
        ],
    )
    def test_codes(self, src, code):
        assert codes(check(src)) == [code]


class TestWarnings:
    def test_redundant_bound(self):
        report = check("void f(@Min(1) @Min(3) int x);")
        assert report.valid
        assert codes(report, Severity.WARNING) == ["RedundantBound"]

    def test_non_integral_bound_on_int(self):
        report = check("void f(@DecimalMin(\"0.5\") int x);")
        assert codes(report, Severity.WARNING) == ["NonIntegralBound"]

    def test_redundant_not_null(self):
        assert codes(check("void f(@NotNull int x);"), Severity.WARNING) == ["RedundantNotNull"]


class TestEffectiveBound:
    def test_tightest(self):
        assert effective_bound([1, 3, 2], M.NumKind.INT, True) == 3
        assert effective_bound([5, 4], M.NumKind.INT, False) == 4

    def test_rounds_inward_for_integral(self):
        assert effective_bound([0.5], M.NumKind.INT, True) == 1
        assert effective_bound([9.5], M.NumKind.LONG, False) == 9
        assert effective_bound([9.5], M.NumKind.DOUBLE, False) == 9.5

    def test_empty(self):
        assert effective_bound([], M.NumKind.INT, True) is None
