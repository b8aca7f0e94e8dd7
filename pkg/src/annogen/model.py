"""Reclassified types, annotation bases, constraint chains and method specs.

Everything here is immutable. Other modules only read these values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple, Union

Number = Union[int, float]


class NumKind(enum.Enum):
    BYTE = "byte"
    SHORT = "short"
    INT = "int"
    LONG = "long"
    CHAR = "char"
    FLOAT = "float"
    DOUBLE = "double"

    @property
    def integral(self) -> bool:
        return self not in (NumKind.FLOAT, NumKind.DOUBLE)


FLOAT32_MAX = 3.4028234663852886e38
FLOAT64_MAX = 1.7976931348623157e308

# (loRep, hiRep) per kind, matching JVM representable ranges.
NUMERIC_BOUNDS: Mapping[NumKind, Tuple[Number, Number]] = {
    NumKind.BYTE: (-(2**7), 2**7 - 1),
    NumKind.SHORT: (-(2**15), 2**15 - 1),
    NumKind.INT: (-(2**31), 2**31 - 1),
    NumKind.LONG: (-(2**63), 2**63 - 1),
    NumKind.CHAR: (0, 2**16 - 1),
    NumKind.FLOAT: (-FLOAT32_MAX, FLOAT32_MAX),
    NumKind.DOUBLE: (-FLOAT64_MAX, FLOAT64_MAX),
}

# Java array lengths are ints and never negative.
ARRAY_LENGTH_BOUNDS: Tuple[int, int] = (0, 2**31 - 1)


# -- semantic types ---------------------------------------------------------


@dataclass(frozen=True)
class Numeric:
    kind: NumKind

    def __str__(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class Str:
    def __str__(self) -> str:
        return "String"


@dataclass(frozen=True)
class Ref:
    class_name: str

    def __str__(self) -> str:
        return self.class_name


@dataclass(frozen=True)
class Array:
    element: "SemanticType"

    def __post_init__(self) -> None:
        if isinstance(self.element, Array):
            raise ValueError("multi-dimensional arrays are not supported")

    def __str__(self) -> str:
        return f"{self.element}[]"


SemanticType = Union[Numeric, Str, Ref, Array]


# -- annotation bases -------------------------------------------------------


@dataclass(frozen=True, order=True)
class Origin:
    """Where an annotation came from.

    DSL input fills ``line``/``column`` (1-based). JSON input has no positions,
    so it leaves them at 0 and records a JSON path instead.
    """

    line: int = 0
    column: int = 0
    path: str = ""

    def __str__(self) -> str:
        if self.line:
            return f"{self.line}:{self.column}"
        return self.path or "?"

    def to_json(self) -> dict:
        out: dict = {"line": self.line, "column": self.column}
        if self.path:
            out["path"] = self.path
        return out


_NO_ORIGIN = Origin()


@dataclass(frozen=True)
class Annotation:
    """Base class of the basis annotations; origin and raw name don't take part in equality."""

    origin: Origin = field(default=_NO_ORIGIN, compare=False, kw_only=True)
    raw_name: str = field(default="", compare=False, kw_only=True)

    navigational = False

    @property
    def basis(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Min(Annotation):
    value: Number

    def __str__(self) -> str:
        return f"@Min({self.value})"


@dataclass(frozen=True)
class Max(Annotation):
    value: Number

    def __str__(self) -> str:
        return f"@Max({self.value})"


@dataclass(frozen=True)
class Pattern(Annotation):
    regex: str

    def __str__(self) -> str:
        return f"@Pattern({self.regex!r})"


@dataclass(frozen=True)
class Nullable(Annotation):
    def __str__(self) -> str:
        return "@Nullable"


@dataclass(frozen=True)
class NotNull(Annotation):
    """Not a basis; a marker kept only for assertion generation."""

    def __str__(self) -> str:
        return "@NotNull"


@dataclass(frozen=True)
class Field(Annotation):
    name: str

    navigational = True

    def __post_init__(self) -> None:
        if not self.name or not self.name.isidentifier():
            raise ValueError(f"invalid field name {self.name!r}")

    def __str__(self) -> str:
        return f"@Field({self.name!r})"


@dataclass(frozen=True)
class SubClass(Annotation):
    class_name: str

    navigational = True

    def __post_init__(self) -> None:
        if not self.class_name:
            raise ValueError("empty subclass name")

    def __str__(self) -> str:
        return f"@SubClass({self.class_name})"


@dataclass(frozen=True)
class Element(Annotation):
    index: int  # 1-based

    navigational = True

    def __post_init__(self) -> None:
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"element index must be an integer >= 1, got {self.index!r}")

    def __str__(self) -> str:
        return f"@Element({self.index})"


LEAF_TYPES = (Min, Max, Pattern, Nullable, NotNull)


@dataclass(frozen=True)
class ConstraintChain:
    """Navigational prefix followed by leaf constraints, all on one variable."""

    items: Tuple[Annotation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("empty constraint chain")
        seen_leaf = False
        for item in self.items:
            if item.navigational:
                if seen_leaf:
                    raise ValueError(f"{item} follows a leaf constraint")
            else:
                seen_leaf = True
        if sum(isinstance(i, Nullable) for i in self.items) > 1:
            raise ValueError("@Nullable repeated in one chain")

    @property
    def prefix(self) -> Tuple[Annotation, ...]:
        return tuple(i for i in self.items if i.navigational)

    @property
    def leaves(self) -> Tuple[Annotation, ...]:
        return tuple(i for i in self.items if not i.navigational)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __str__(self) -> str:
        return " ".join(str(i) for i in self.items)


# -- method specs -----------------------------------------------------------


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: SemanticType
    chains: Tuple[ConstraintChain, ...] = ()


@dataclass(frozen=True)
class Param:
    name: str
    type: SemanticType
    chains: Tuple[ConstraintChain, ...] = ()
    # Extra numeric boundaries standing in for search-derived values.
    hints: Tuple[Number, ...] = ()


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: Tuple[Param, ...] = ()
    return_type: Optional[SemanticType] = None  # None is void
    return_chains: Tuple[ConstraintChain, ...] = ()
    class_model: Mapping[str, Tuple[FieldDecl, ...]] = field(default_factory=dict)
    subclass_model: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    owner: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "return_chains", tuple(self.return_chains))
        if self.return_type is None and self.return_chains:
            raise ValueError("void method cannot carry return constraints")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    # class-model queries

    def superclass_of(self, class_name: str) -> Optional[str]:
        for parent, subs in self.subclass_model.items():
            if class_name in subs:
                return parent
        return None

    def fields_of(self, class_name: str) -> Tuple[FieldDecl, ...]:
        """Declared plus inherited fields, nearest declaration wins."""
        chain = []
        seen = set()
        c: Optional[str] = class_name
        while c is not None and c not in seen:
            seen.add(c)
            chain.append(c)
            c = self.superclass_of(c)
        out: dict = {}
        for c in reversed(chain):
            for f in self.class_model.get(c, ()):
                out[f.name] = f
        return tuple(out.values())

    def lookup_field(self, class_name: str, field_name: str) -> Optional[FieldDecl]:
        for f in self.fields_of(class_name):
            if f.name == field_name:
                return f
        return None

    def resolve_subclass(self, base: str, name: str) -> Optional[str]:
        """Return the model's name for ``name`` if it is a (transitive) subclass of ``base``.

        Fully qualified names match a model class by their last component.
        """
        todo = list(self.subclass_model.get(base, ()))
        seen = set()
        while todo:
            c = todo.pop(0)
            if c in seen:
                continue
            seen.add(c)
            if c == name or c == name.rsplit(".", 1)[-1] or c.rsplit(".", 1)[-1] == name.rsplit(".", 1)[-1]:
                return c
            todo.extend(self.subclass_model.get(c, ()))
        return None

    def is_subclass(self, name: str, base: str) -> bool:
        c: Optional[str] = name
        seen = set()
        while c is not None and c not in seen:
            if c == base:
                return True
            seen.add(c)
            c = self.superclass_of(c)
        return False

    def all_chains(self) -> Sequence[Tuple[str, SemanticType, Tuple[ConstraintChain, ...]]]:
        """Every (slot key, root type, chains) triple in declaration order."""
        out = [(p.name, p.type, p.chains) for p in self.params]
        if self.return_type is not None:
            out.append(("@return", self.return_type, self.return_chains))
        for cls in self.class_model:
            for f in self.class_model[cls]:
                if f.chains:
                    out.append((f"@field:{cls}.{f.name}", f.type, f.chains))
        return out


# -- chain navigation -------------------------------------------------------


class ChainResolutionError(Exception):
    code = "ResolutionError"

    def __init__(self, item: Annotation, message: str) -> None:
        super().__init__(f"{item.origin}: {message}")
        self.item = item
        self.message = message


class UnknownField(ChainResolutionError):
    code = "UnknownField"


class FieldOnNonRef(ChainResolutionError):
    code = "FieldOnNonRef"


class UnknownSubclass(ChainResolutionError):
    code = "UnknownSubclass"


class ElementOnNonArray(ChainResolutionError):
    code = "ElementOnNonArray"


def navigate(item: Annotation, current: SemanticType, model: MethodSpec) -> SemanticType:
    """Apply one navigational annotation to ``current``."""
    if isinstance(item, Element):
        if not isinstance(current, Array):
            raise ElementOnNonArray(item, f"{item} applied to non-array type {current}")
        return current.element
    if isinstance(item, SubClass):
        if not isinstance(current, Ref):
            raise UnknownSubclass(item, f"{item} applied to non-reference type {current}")
        found = model.resolve_subclass(current.class_name, item.class_name)
        if found is None:
            raise UnknownSubclass(item, f"{item.class_name} is not a known subclass of {current.class_name}")
        return Ref(found)
    if isinstance(item, Field):
        if not isinstance(current, Ref):
            raise FieldOnNonRef(item, f"{item} applied to non-reference type {current}")
        decl = model.lookup_field(current.class_name, item.name)
        if decl is None:
            raise UnknownField(item, f"class {current.class_name} has no field {item.name!r}")
        return decl.type
    raise TypeError(f"{item} is not navigational")


def resolve_chain_target(chain: ConstraintChain, root: SemanticType, model: MethodSpec) -> SemanticType:
    """Type reached after following the chain's navigational prefix from ``root``."""
    current = root
    for item in chain.prefix:
        current = navigate(item, current, model)
    return current


def path_key(chain: ConstraintChain) -> Tuple[Tuple[str, object], ...]:
    """Hashable form of a chain's navigational prefix."""
    out = []
    for item in chain.prefix:
        if isinstance(item, Field):
            out.append(("field", item.name))
        elif isinstance(item, Element):
            out.append(("element", item.index))
        else:
            out.append(("subclass", item.class_name))
    return tuple(out)
