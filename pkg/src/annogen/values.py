"""Generated test values (value trees) and their JSON encoding."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

from . import model as M


class Classification(enum.Enum):
    IN = "in"
    ON = "on"
    OUT = "out"
    UNCONSTRAINED = "unconstrained"


# Out dominates On dominates In when combining leaf classifications.
_RANK = {Classification.UNCONSTRAINED: 0, Classification.IN: 1, Classification.ON: 2, Classification.OUT: 3}


def combine(classes) -> Classification:
    best = Classification.UNCONSTRAINED
    for c in classes:
        if _RANK[c] > _RANK[best]:
            best = c
    return best


@dataclass(frozen=True)
class NumLeaf:
    value: M.Number
    kind: M.NumKind
    classification: Classification = Classification.UNCONSTRAINED


@dataclass(frozen=True)
class StrLeaf:
    value: str
    classification: Classification = Classification.UNCONSTRAINED


@dataclass(frozen=True)
class NullLeaf:
    classification: Classification = Classification.UNCONSTRAINED


@dataclass(frozen=True, eq=True)
class ObjectNode:
    class_name: str
    fields: Dict[str, "ValueTree"] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=True)
class ArrayNode:
    length: int
    elements: Dict[int, "ValueTree"]  # 1-based slots that differ from the default
    default: "ValueTree"
    length_classification: Classification = Classification.UNCONSTRAINED

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        for i in self.elements:
            if not 1 <= i <= self.length:
                raise ValueError(f"element index {i} outside [1, {self.length}]")

    def element(self, index: int) -> Optional["ValueTree"]:
        if not 1 <= index <= self.length:
            return None
        return self.elements.get(index, self.default)


ValueTree = Union[NumLeaf, StrLeaf, NullLeaf, ObjectNode, ArrayNode]


# -- JSON -------------------------------------------------------------------


def to_json(tree: ValueTree, path: str) -> dict:
    if isinstance(tree, NumLeaf):
        return {
            "kind": "num",
            "type": tree.kind.value,
            "value": tree.value,
            "class": tree.classification.value,
            "path": path,
        }
    if isinstance(tree, StrLeaf):
        return {"kind": "str", "value": tree.value, "class": tree.classification.value, "path": path}
    if isinstance(tree, NullLeaf):
        return {"kind": "null", "class": tree.classification.value, "path": path}
    if isinstance(tree, ObjectNode):
        return {
            "kind": "object",
            "className": tree.class_name,
            "fields": {k: to_json(v, f"{path}.{k}") for k, v in tree.fields.items()},
            "path": path,
        }
    if isinstance(tree, ArrayNode):
        return {
            "kind": "array",
            "length": tree.length,
            "lengthClass": tree.length_classification.value,
            "elements": {str(i): to_json(v, f"{path}[{i}]") for i, v in sorted(tree.elements.items())},
            "default": to_json(tree.default, f"{path}[*]"),
            "path": path,
        }
    raise TypeError(tree)


class ValueFormatError(ValueError):
    pass


def _cls(obj: dict) -> Classification:
    try:
        return Classification(obj.get("class", "unconstrained"))
    except ValueError:
        raise ValueFormatError(f"unknown classification {obj.get('class')!r}") from None


def from_json(obj, declared: Optional[M.SemanticType] = None) -> ValueTree:
    """Decode a value tree; bare JSON scalars are accepted when ``declared`` says what they are."""
    if obj is None:
        return NullLeaf()
    if isinstance(obj, bool):
        raise ValueFormatError("boolean values are not supported")
    if isinstance(obj, (int, float)):
        kind = declared.kind if isinstance(declared, M.Numeric) else (M.NumKind.DOUBLE if isinstance(obj, float) else M.NumKind.LONG)
        if isinstance(obj, float) and not math.isfinite(obj):
            raise ValueFormatError("non-finite number")
        return NumLeaf(obj, kind)
    if isinstance(obj, str):
        return StrLeaf(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueFormatError(f"not a value tree: {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "num":
            v = obj["value"]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueFormatError("num value must be a number")
            return NumLeaf(v, M.NumKind(obj.get("type", "double")), _cls(obj))
        if kind == "str":
            if not isinstance(obj["value"], str):
                raise ValueFormatError("str value must be a string")
            return StrLeaf(obj["value"], _cls(obj))
        if kind == "null":
            return NullLeaf(_cls(obj))
        if kind == "object":
            fields = obj.get("fields", {})
            if not isinstance(fields, dict):
                raise ValueFormatError("object fields must be a map")
            return ObjectNode(str(obj["className"]), {k: from_json(v) for k, v in fields.items()})
        if kind == "array":
            length = obj["length"]
            if isinstance(length, bool) or not isinstance(length, int) or length < 0:
                raise ValueFormatError("array length must be a non-negative integer")
            elements = {int(k): from_json(v) for k, v in obj.get("elements", {}).items()}
            default = from_json(obj["default"]) if "default" in obj else NullLeaf()
            lc = Classification(obj.get("lengthClass", "unconstrained"))
            return ArrayNode(length, elements, default, lc)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValueFormatError):
            raise
        raise ValueFormatError(f"malformed {kind} value: {exc}") from None
    raise ValueFormatError(f"unknown value kind {kind!r}")


def literal(tree: ValueTree) -> str:
    """Compact Java-ish rendering, for tables."""
    if isinstance(tree, NumLeaf):
        return repr(tree.value)
    if isinstance(tree, StrLeaf):
        return json.dumps(tree.value, ensure_ascii=False)
    if isinstance(tree, NullLeaf):
        return "null"
    if isinstance(tree, ObjectNode):
        inner = ", ".join(f"{k}={literal(v)}" for k, v in tree.fields.items())
        return f"{tree.class_name}{{{inner}}}"
    if isinstance(tree, ArrayNode):
        shown = ", ".join(f"[{i}]={literal(v)}" for i, v in sorted(tree.elements.items()))
        rest = f"*={literal(tree.default)}"
        return f"len {tree.length} {{{', '.join(x for x in (shown, rest) if x)}}}"
    raise TypeError(tree)
