from __future__ import annotations

import re
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annogen import model as M
from annogen.datagen import (
    GenConfig,
    SpecInvalid,
    build_bucketing,
    combine_cases,
    generate_for_method,
    generate_numeric,
    generate_reference,
    generate_string,
)
from annogen.dsl import parse_signature_dsl
from annogen.report import classify_value
from annogen.rng import SeededRng
from annogen.values import ArrayNode, Classification, NullLeaf, NumLeaf, ObjectNode, StrLeaf, to_json
from conftest import all_valid_specs, load_spec

IN, ON, OUT, UNC = Classification.IN, Classification.ON, Classification.OUT, Classification.UNCONSTRAINED
INT = M.NumKind.INT
INT_LO, INT_HI = -(2**31), 2**31 - 1
PERSON = "class Person { int age; String name; }\nclass Student extends Person { String school; }\n"


def chains(*leaves):
    return (M.ConstraintChain(tuple(leaves)),)


def spec_of(src):
    spec, diags = parse_signature_dsl(PERSON + src)
    assert spec is not None, diags
    return spec


def by_class(leaves):
    out = {c: [] for c in Classification}
    for leaf in leaves:
        out[leaf.classification].append(leaf.value)
    return out


class TestBucketing:
    def test_discount_boundaries(self):
        b = build_bucketing(chains(M.Min(0), M.Max(150)), INT, [12, 60])
        assert b.boundaries == (INT_LO, 0, 12, 60, 150, INT_HI)
        assert len(b.buckets) == 5

    def test_unconstrained(self):
        b = build_bucketing((), INT)
        assert b.boundaries == (INT_LO, INT_HI) and len(b.buckets) == 1

    def test_degenerate_interval(self):
        assert build_bucketing(chains(M.Min(5), M.Max(5)), INT).boundaries == (INT_LO, 5, INT_HI)

    def test_hints_clamped(self):
        b = build_bucketing(chains(M.Min(0)), M.NumKind.BYTE, [1000, -1000])
        assert b.boundaries == (-128, 0, 127)

    def test_strictly_increasing(self):
        b = build_bucketing(chains(M.Min(0), M.Max(0.0)), M.NumKind.DOUBLE, [0, 0.0])
        assert list(b.boundaries) == sorted(set(b.boundaries))


class TestGenerateNumeric:
    def test_discount_shape(self):
        b = build_bucketing(chains(M.Min(0), M.Max(150)), INT, [12, 60])
        leaves = generate_numeric(b, SeededRng(0), 1)
        got = by_class(leaves)
        assert set(got[ON]) == {0, 12, 60, 150}
        assert got[IN] and all(0 < v < 150 for v in got[IN])
        assert got[OUT] and all(v < 0 or v > 150 for v in got[OUT])
        assert INT_LO in got[OUT] and INT_HI in got[OUT]

    def test_unconstrained_all_unconstrained(self):
        leaves = generate_numeric(build_bucketing((), INT), SeededRng(0), 2)
        assert {leaf.classification for leaf in leaves} == {UNC}

    def test_empty_integer_bucket(self):
        # Brute force: no integer lies strictly between 5 and 6.
        assert [v for v in range(5, 7) if 5 < v < 6] == []
        b = build_bucketing(chains(M.Min(5), M.Max(6)), INT)
        got = by_class(generate_numeric(b, SeededRng(3), 3))
        assert sorted(got[ON]) == [5, 6]
        assert got[IN] == []
        assert len([v for v in got[OUT] if INT_LO < v < 5]) == 3
        assert len([v for v in got[OUT] if 6 < v < INT_HI]) == 3

    def test_float_samples_open_interval(self):
        b = build_bucketing(chains(M.Min(-1.5), M.Max(2.5)), M.NumKind.FLOAT)
        for leaf in generate_numeric(b, SeededRng(1), 5):
            v = leaf.value
            assert struct.unpack("<f", struct.pack("<f", v))[0] == v
            if leaf.classification is IN:
                assert -1.5 < v < 2.5

    def test_non_integral_bound_rounded_inward(self):
        b = build_bucketing(chains(M.Min(0.5), M.Max(3.7)), INT)
        got = by_class(generate_numeric(b, SeededRng(0), 1))
        assert sorted(got[ON]) == [1, 3]

    def test_one_sided_extreme_is_inside(self):
        got = by_class(generate_numeric(build_bucketing(chains(M.Min(0)), INT), SeededRng(0), 1))
        assert INT_HI in got[IN] and INT_LO in got[OUT] and got[ON] == [0]


class TestGenerateString:
    def test_three_pattern_list(self):
        leaves = generate_string(["[0-9]*", "[a-z]*", "[A-Z]*"], SeededRng(0), per_pattern=1)
        ins = [leaf.value for leaf in leaves if leaf.classification is IN]
        outs = [leaf.value for leaf in leaves if leaf.classification is OUT]
        assert any(re.fullmatch("[0-9]*", s) for s in ins)
        assert outs
        for s in outs:
            assert not any(re.fullmatch(p, s) for p in ["[0-9]*", "[a-z]*", "[A-Z]*"])

    def test_empty_pattern(self):
        leaves = generate_string(["^$"], SeededRng(0))
        assert [leaf.value for leaf in leaves if leaf.classification is IN] == [""]
        assert all(leaf.value != "" for leaf in leaves if leaf.classification is OUT)

    def test_not_empty_pattern(self):
        leaves = generate_string(["^[\\s\\S]+$"], SeededRng(0))
        assert all(leaf.value for leaf in leaves if leaf.classification is IN)
        assert [leaf.value for leaf in leaves if leaf.classification is OUT] == [""]

    def test_no_on_for_strings(self):
        leaves = generate_string(["[a-z]{2}"], SeededRng(4), per_pattern=5)
        assert {leaf.classification for leaf in leaves} <= {IN, OUT}


class TestGenerateReference:
    def test_field_chain(self):
        spec = spec_of('void f(@Field("age") @Min(5) @Max(20) Person p);')
        trees = generate_reference(spec.params[0].chains, spec.params[0].type, spec, SeededRng(0))
        ages = {t.fields["age"].value for t in trees}
        assert {5, 20} <= ages
        assert all(isinstance(t, ObjectNode) and t.class_name == "Person" for t in trees)
        assert all(t.fields["name"] == StrLeaf("") for t in trees)

    def test_nullable_object(self):
        spec = spec_of("void f(@Nullable Object o);")
        trees = generate_reference(spec.params[0].chains, spec.params[0].type, spec, SeededRng(0))
        assert any(isinstance(t, NullLeaf) for t in trees)
        assert any(isinstance(t, ObjectNode) for t in trees)

    def test_powerful_combination(self):
        spec = load_spec("combinations.dsl", "powerful")
        p = spec.params[0]
        trees = generate_reference(p.chains, p.type, spec, SeededRng(0))
        ages = set()
        for t in trees:
            assert isinstance(t, ArrayNode) and t.length >= 2
            slot = t.element(2)
            assert isinstance(slot, ObjectNode) and slot.class_name == "Student"
            ages.add(slot.fields["age"].value)
        assert {5, 22} <= ages

    def test_length_candidates_keep_constrained_element(self):
        spec = spec_of("void f(@Min(2) @Max(4) @Element(2) @Min(0) int[] xs);")
        p = spec.params[0]
        trees = generate_reference(p.chains, p.type, spec, SeededRng(0))
        lengths = {t.length for t in trees}
        assert {2, 4} <= lengths and 0 in lengths
        for t in trees:
            assert all(1 <= i <= t.length for i in t.elements)

    def test_default_length_for_element(self):
        spec = spec_of("void f(@Element(1) @Min(0) int[] xs);")
        p = spec.params[0]
        trees = generate_reference(p.chains, p.type, spec, SeededRng(0), GenConfig(default_array_len=5))
        assert {t.length for t in trees} == {5}

    def test_rejects_scalar_root(self):
        with pytest.raises(TypeError):
            generate_reference((), M.Numeric(INT), spec_of("void f();"), SeededRng(0))


class TestGenerateForMethod:
    def test_discount(self, discount):
        values = generate_for_method(discount, 0)["age"].values
        classes = {c.classification for c in values}
        assert {IN, ON, OUT} <= classes

    def test_zero_params(self):
        assert generate_for_method(spec_of("void f();"), 0) == {}

    def test_unconstrained_param(self):
        (only,) = generate_for_method(spec_of("void f(int x);"), 0).values()
        assert [c.classification for c in only.values] == [UNC, UNC]
        assert only.values[0].value == NumLeaf(0, INT)

    def test_invalid_spec(self):
        with pytest.raises(SpecInvalid):
            generate_for_method(spec_of("void f(@Min(3) @Max(1) int x);"), 0)
        assert generate_for_method(spec_of("void f(@Min(3) @Max(1) int x);"), 0, allow_invalid=True)

    def test_only_valid(self, discount):
        values = generate_for_method(discount, 0, GenConfig(only_valid=True))["age"].values
        assert values and OUT not in {c.classification for c in values}

    def test_per_param_streams_independent(self):
        # Each parameter draws from seed ^ splitmix64(ordinal), so adding a
        # later parameter leaves earlier ones untouched.
        one = generate_for_method(spec_of("void f(@Min(0) int x);"), 9)
        two = generate_for_method(spec_of("void f(@Min(0) int x, @Min(0) int y);"), 9)
        assert [v.value for v in one["x"].values] == [v.value for v in two["x"].values]
        assert [v.value for v in two["x"].values] != [v.value for v in two["y"].values]

    def test_seed_changes_samples_not_boundaries(self, discount):
        def split(seed):
            vals = generate_for_method(discount, seed)["age"].values
            on = {c.value.value for c in vals if c.classification is ON}
            rest = {c.value.value for c in vals if c.classification is not ON}
            return on, rest

        on1, rest1 = split(1)
        on2, rest2 = split(2)
        assert on1 == on2 == {0, 12, 60, 150}
        assert rest1 != rest2

    @pytest.mark.parametrize("name,spec", all_valid_specs(), ids=lambda x: x if isinstance(x, str) else x.name)
    def test_tags_agree_with_report(self, name, spec):
        for pname, cs in generate_for_method(spec, 3).items():
            assert cs.values
            for cand in cs.values:
                assert classify_value(spec, pname, cand.value) == cand.classification.value, to_json(cand.value, pname)

    @pytest.mark.parametrize("name,spec", all_valid_specs(), ids=lambda x: x if isinstance(x, str) else x.name)
    def test_deterministic(self, name, spec):
        a = generate_for_method(spec, 42)
        b = generate_for_method(spec, 42)
        assert {k: v.to_json() for k, v in a.items()} == {k: v.to_json() for k, v in b.items()}

    @settings(max_examples=40, deadline=None)
    @given(
        st.sampled_from(list(M.NumKind)),
        st.integers(min_value=-100, max_value=100),
        st.integers(min_value=2, max_value=1000),
        st.integers(min_value=0, max_value=2**64 - 1),
    )
    def test_coverage_property(self, kind, lo, width, seed):
        bounds_lo, bounds_hi = M.NUMERIC_BOUNDS[kind]
        lo = max(lo, int(bounds_lo) + 1)
        hi = min(lo + width, int(bounds_hi) - 1)
        if hi - lo < 2:
            return
        spec = M.MethodSpec("f", (M.Param("x", M.Numeric(kind), chains(M.Min(lo), M.Max(hi))),))
        classes = {c.classification for c in generate_for_method(spec, seed)["x"].values}
        assert {IN, ON, OUT} <= classes


class TestCombineCases:
    def test_fixed_expected_order(self):
        # Lock-step rounds first, then lexicographic order, skipping repeats.
        assert combine_cases([3, 3], 5) == [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]

    def test_full_product_when_small(self):
        cases = combine_cases([2, 3], 64)
        assert sorted(cases) == [(i, j) for i in range(2) for j in range(3)]

    def test_every_candidate_used_first(self):
        cases = combine_cases([4, 2, 1], 4)
        assert [c[0] for c in cases] == [0, 1, 2, 3]
        assert {c[1] for c in cases} == {0, 1}

    def test_edges(self):
        assert combine_cases([], 5) == [()]
        assert combine_cases([3, 0], 5) == []
