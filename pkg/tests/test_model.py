from __future__ import annotations

import pytest

from annogen import model as M


def person_spec(**kw):
    return M.MethodSpec(
        "f",
        kw.pop("params", ()),
        class_model={
            "Person": (M.FieldDecl("age", M.Numeric(M.NumKind.INT)), M.FieldDecl("name", M.Str())),
            "Student": (M.FieldDecl("school", M.Str()),),
            "Grad": (),
        },
        subclass_model={"Person": ("Student",), "Student": ("Grad",)},
        **kw,
    )


class TestTypes:
    def test_numeric_bounds_table(self):
        assert M.NUMERIC_BOUNDS[M.NumKind.INT] == (-(2**31), 2**31 - 1)
        assert M.NUMERIC_BOUNDS[M.NumKind.LONG] == (-(2**63), 2**63 - 1)
        assert M.NUMERIC_BOUNDS[M.NumKind.BYTE] == (-128, 127)
        assert M.NUMERIC_BOUNDS[M.NumKind.SHORT] == (-32768, 32767)
        assert M.NUMERIC_BOUNDS[M.NumKind.CHAR] == (0, 65535)
        assert M.NUMERIC_BOUNDS[M.NumKind.FLOAT][1] == pytest.approx(3.4028234663852886e38)

    def test_array_of_array_rejected(self):
        with pytest.raises(ValueError):
            M.Array(M.Array(M.Str()))

    def test_type_names(self):
        assert str(M.Array(M.Ref("Person"))) == "Person[]"
        assert str(M.Numeric(M.NumKind.LONG)) == "long"


class TestAnnotations:
    def test_element_is_one_based(self):
        assert M.Element(1).index == 1
        with pytest.raises(ValueError):
            M.Element(0)

    def test_field_name_must_be_identifier(self):
        with pytest.raises(ValueError):
            M.Field("not a name")

    def test_origin_ignored_in_equality(self):
        assert M.Min(3, origin=M.Origin(1, 2)) == M.Min(3, origin=M.Origin(9, 9))


class TestChains:
    def test_navigation_must_precede_leaves(self):
        with pytest.raises(ValueError):
            M.ConstraintChain((M.Min(1), M.Field("age")))

    def test_nullable_at_most_once(self):
        with pytest.raises(ValueError):
            M.ConstraintChain((M.Nullable(), M.Nullable()))

    def test_repeated_patterns_allowed(self):
        chain = M.ConstraintChain((M.Pattern("a"), M.Pattern("b")))
        assert len(chain.leaves) == 2

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            M.ConstraintChain(())

    def test_prefix_and_leaves(self):
        chain = M.ConstraintChain((M.Element(2), M.Field("age"), M.Min(5)))
        assert chain.prefix == (M.Element(2), M.Field("age"))
        assert chain.leaves == (M.Min(5),)


class TestResolution:
    def test_powerful_chain_resolves_to_int(self):
        spec = person_spec()
        chain = M.ConstraintChain((M.Element(2), M.SubClass("Student"), M.Field("age"), M.Min(5)))
        assert M.resolve_chain_target(chain, M.Array(M.Ref("Person")), spec) == M.Numeric(M.NumKind.INT)

    def test_subclass_field_visible_after_cast(self):
        spec = person_spec()
        chain = M.ConstraintChain((M.SubClass("Student"), M.Field("school"), M.Pattern("x")))
        assert M.resolve_chain_target(chain, M.Ref("Person"), spec) == M.Str()
        with pytest.raises(M.UnknownField):
            M.resolve_chain_target(M.ConstraintChain((M.Field("school"), M.Pattern("x"))), M.Ref("Person"), spec)

    def test_transitive_and_qualified_subclass(self):
        spec = person_spec()
        assert spec.resolve_subclass("Person", "com.example.Grad") == "Grad"
        assert spec.is_subclass("Grad", "Person")
        assert spec.resolve_subclass("Student", "Person") is None

    @pytest.mark.parametrize(
        "items,root,error",
        [
            ((M.Field("age"), M.Min(1)), M.Numeric(M.NumKind.INT), M.FieldOnNonRef),
            ((M.Element(1), M.Min(1)), M.Ref("Person"), M.ElementOnNonArray),
            ((M.SubClass("Robot"), M.Nullable()), M.Ref("Person"), M.UnknownSubclass),
            ((M.Field("height"), M.Min(1)), M.Ref("Person"), M.UnknownField),
        ],
    )
    def test_resolution_errors(self, items, root, error):
        with pytest.raises(error):
            M.resolve_chain_target(M.ConstraintChain(items), root, person_spec())

    def test_inherited_fields(self):
        names = [f.name for f in person_spec().fields_of("Grad")]
        assert names == ["age", "name", "school"]


class TestMethodSpec:
    def test_void_with_return_chains_rejected(self):
        with pytest.raises(ValueError):
            M.MethodSpec("f", (), None, (M.ConstraintChain((M.Min(0),)),))

    def test_duplicate_params_rejected(self):
        p = M.Param("x", M.Str())
        with pytest.raises(ValueError):
            M.MethodSpec("f", (p, p))

    def test_all_chains_slots(self):
        spec = M.MethodSpec(
            "f",
            (M.Param("x", M.Numeric(M.NumKind.INT), (M.ConstraintChain((M.Min(0),)),)),),
            M.Numeric(M.NumKind.INT),
            (M.ConstraintChain((M.Max(3),)),),
            {"Acc": (M.FieldDecl("bal", M.Numeric(M.NumKind.LONG), (M.ConstraintChain((M.Min(0),)),)),)},
            owner="Acc",
        )
        slots = [slot for slot, _, _ in spec.all_chains()]
        assert slots == ["x", "@return", "@field:Acc.bal"]
