from __future__ import annotations

import json

import pytest

from annogen import model as M
from annogen.dsl import parse_dsl_document, parse_signature_dsl
from annogen.jsonspec import dump_spec, parse_json_document, parse_json_spec, schema_errors, spec_to_json
from conftest import all_valid_specs, load_spec

INT = M.Numeric(M.NumKind.INT)
PERSON = "class Person { int age; String name; }\nclass Student extends Person { }\n"


def chain(*items):
    return M.ConstraintChain(items)


def parse_one(src):
    spec, diags = parse_signature_dsl(src)
    assert spec is not None, diags
    return spec, diags


class TestSignatureDsl:
    def test_range_with_returns(self):
        spec, _ = parse_one("int discount(@Range(min=0, max=150) int age) returns @Range(min=80, max=160)")
        assert spec.params[0].chains == (chain(M.Min(0), M.Max(150)),)
        assert spec.return_chains == (chain(M.Min(80), M.Max(160)),)

    def test_annotations_above_method_constrain_return(self):
        spec, _ = parse_one("@Range(min=80, max=160) int discount(@Range(min=0, max=150) int age);")
        assert spec.return_chains == (chain(M.Min(80), M.Max(160)),)

    def test_minimal(self):
        spec, diags = parse_one("void foo(@Min(5) int i)")
        assert spec.return_type is None and spec.return_chains == ()
        assert spec.params == (M.Param("i", INT, (chain(M.Min(5)),)),)
        assert diags == []

    def test_element_field_chain(self):
        spec, _ = parse_one(PERSON + 'void foo(@Element(2) @Field("age") @Min(5) @Max(20) Person[] ps)')
        assert spec.params[0].chains == (chain(M.Element(2), M.Field("age"), M.Min(5), M.Max(20)),)
        assert spec.params[0].type == M.Array(M.Ref("Person"))

    def test_class_literal_subclass(self):
        spec, _ = parse_one(PERSON + "void foo(@Element(2) @SubClass(Student.class) @Field(\"age\") @Min(5) Person[] ps)")
        assert spec.params[0].chains[0].items[1] == M.SubClass("Student")

    def test_nav_after_leaf_starts_new_chain(self):
        spec, _ = parse_one(PERSON + 'void foo(@Nullable @Field("age") @Min(1) Person p)')
        assert spec.params[0].chains == (chain(M.Nullable()), chain(M.Field("age"), M.Min(1)))

    def test_pattern_list(self):
        spec, _ = parse_one('void foo(@Pattern("[0-9]*") @Pattern("[a-z]*") @Pattern("[A-Z]*") String s)')
        assert spec.params[0].chains == (chain(M.Pattern("[0-9]*"), M.Pattern("[a-z]*"), M.Pattern("[A-Z]*")),)

    def test_java_string_escapes(self):
        spec, _ = parse_one('void f(@Pattern("^[\\\\s\\\\S]+$") String s)')
        assert spec.params[0].chains[0].items[0].regex == "^[\\s\\S]+$"

    def test_hints_and_owner(self):
        spec, _ = parse_one("class T { }\nint T.discount(int age hints(12, 60))")
        assert spec.owner == "T"
        assert spec.params[0].hints == (12, 60)

    def test_origins_carry_line_and_column(self):
        spec, _ = parse_one("void f(\n  @Min(5) int i)")
        origin = spec.params[0].chains[0].items[0].origin
        assert (origin.line, origin.column) == (2, 3)

    def test_raw_name_kept(self):
        spec, _ = parse_one("void f(@javax.validation.constraints.Min(5) int i)")
        assert spec.params[0].chains[0].items[0].raw_name == "javax.validation.constraints.Min"

    def test_unknown_annotation_warns(self):
        spec, diags = parse_one("void f(@Deprecated @Min(1) int i)")
        assert [d.code for d in diags] == ["UnknownAnnotationIgnored"]
        assert spec.params[0].chains == (chain(M.Min(1)),)

    def test_comments(self):
        parse_one("/* block */ void f(int i) // trailing\n")

    @pytest.mark.parametrize(
        "src,code",
        [
            ("void foo(@Min(5) int i", "SyntaxError"),
            ("void foo(@Min(5) int)", "SyntaxError"),
            ("void foo(boolean b)", "UnsupportedType"),
            ("void foo(int[][] xs)", "UnsupportedType"),
            ("void foo(int i) returns @Min(1)", "VoidReturnConstraints"),
            ("void foo(int i); void bar(int j);", "ExpectedSingleMethod"),
            ('void foo(@Element(0) @Min(1) int[] xs)', "InvalidAttribute"),
        ],
    )
    def test_errors(self, src, code):
        spec, diags = parse_signature_dsl(src)
        assert spec is None
        assert code in [d.code for d in diags if d.is_error]

    def test_syntax_error_position(self):
        _, diags = parse_signature_dsl("void foo(\n  int i,, int j)")
        (d,) = diags
        assert d.code == "SyntaxError" and (d.origin.line, d.origin.column) == (2, 9)

    def test_document_many_methods(self):
        specs, diags = parse_dsl_document(PERSON + "void a(int i); int b(@Min(0) long x);")
        assert [s.name for s in specs] == ["a", "b"]
        assert specs[1].params[0].type == M.Numeric(M.NumKind.LONG)


class TestJsonSpec:
    def test_discount_json_equals_dsl(self):
        dsl = load_spec("discount.dsl")
        doc = {
            "name": "discount",
            "owner": "Ticket",
            "params": [{"name": "age", "type": "int", "chains": [[{"min": 0}, {"max": 150}]], "hints": [12, 60]}],
            "returnType": "int",
            "returnChains": [[{"min": 80}, {"max": 160}]],
            "classModel": {"Ticket": []},
            "subclassModel": {},
        }
        spec, diags = parse_json_spec(json.dumps(doc))
        assert diags == [] and spec == dsl

    @pytest.mark.parametrize("name,spec", all_valid_specs(), ids=lambda x: x if isinstance(x, str) else x.name)
    def test_roundtrip_identity(self, name, spec):
        again, diags = parse_json_spec(dump_spec(spec))
        assert not diags
        assert again == spec
        assert dump_spec(again) == dump_spec(spec)

    def test_empty_void(self):
        spec, diags = parse_json_spec('{"name": "f", "params": [], "returnType": "void"}')
        assert spec is not None and spec.params == () and spec.return_type is None

    def test_element_zero_is_schema_error(self):
        doc = {"name": "f", "params": [{"name": "xs", "type": "int[]", "chains": [[{"element": 0}, {"min": 1}]]}]}
        spec, diags = parse_json_spec(json.dumps(doc))
        assert spec is None
        assert [(d.code, d.origin.path) for d in diags] == [("SchemaError", "$.params[0].chains[0][0].element")]

    def test_schema_errors_name_paths(self):
        errs = schema_errors({"name": "f", "params": [{"name": "x"}]})
        assert errs and errs[0].origin.path == "$.params[0]"

    def test_bad_json_is_syntax_error(self):
        spec, diags = parse_json_spec("{")
        assert spec is None and diags[0].code == "SyntaxError"

    def test_document_forms(self):
        one = {"name": "f", "params": []}
        for doc in (one, [one, {"name": "g"}], {"methods": [one]}):
            specs, diags = parse_json_document(json.dumps(doc))
            assert specs and not diags

    def test_chain_order_violation(self):
        doc = {"name": "f", "params": [{"name": "p", "type": "P", "chains": [[{"min": 1}, {"field": "a"}]]}]}
        spec, diags = parse_json_spec(json.dumps(doc))
        assert spec is None and diags[0].origin.path == "$.params[0].chains[0]"

    def test_encoding_is_canonical(self):
        spec = load_spec("combinations.dsl", "powerful")
        out = spec_to_json(spec)
        assert out["params"][0]["chains"] == [
            [{"element": 2}, {"subclass": "Student"}, {"field": "age"}, {"min": 5}, {"max": 22}]
        ]
