"""Canonical JSON form of a MethodSpec.

Layout is documented by ``data/methodspec.schema.json``; chain items are
single-key objects such as ``{"min": 0}`` or ``{"element": 2}``.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import List, Optional, Tuple

import jsonschema

from . import model as M
from .diagnostics import ParseDiagnostic, error
from .dsl import BOOLEAN_TYPES, PRIMITIVES, STRING_TYPES


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("annogen.data").joinpath("methodspec.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _schema_diag(err: jsonschema.ValidationError, base: Tuple = ()) -> ParseDiagnostic:
    # For a chain item, report the error of the alternative the item's key selects.
    if err.validator == "oneOf" and isinstance(err.instance, dict) and len(err.instance) == 1:
        key = next(iter(err.instance))
        for sub in err.context or ():
            if sub.relative_path and sub.relative_path[0] == key:
                path = tuple(base) + tuple(sub.absolute_path)
                return error("SchemaError", sub.message, M.Origin(path=_json_path(path)))
    path = tuple(base) + tuple(err.absolute_path)
    return error("SchemaError", err.message, M.Origin(path=_json_path(path)))


def schema_errors(doc, base: Tuple = ()) -> List[ParseDiagnostic]:
    validator = jsonschema.Draft202012Validator(schema())
    errs = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    return [_schema_diag(e, base) for e in errs]


# -- decoding ---------------------------------------------------------------


class _SchemaViolation(Exception):
    def __init__(self, message: str, path: str) -> None:
        super().__init__(message)
        self.message = message
        self.path = path


def parse_type(text: str, path: str) -> M.SemanticType:
    dims = 0
    while text.endswith("[]"):
        text = text[:-2]
        dims += 1
    if dims > 1:
        raise _SchemaViolation("multi-dimensional arrays are not supported", path)
    if text in BOOLEAN_TYPES:
        raise _SchemaViolation("boolean values are not supported", path)
    if text == "void":
        raise _SchemaViolation("void is only allowed as a return type", path)
    if text in PRIMITIVES:
        base: M.SemanticType = M.Numeric(PRIMITIVES[text])
    elif text in STRING_TYPES:
        base = M.Str()
    else:
        base = M.Ref(text)
    return M.Array(base) if dims else base


def _item(obj: dict, path: str) -> M.Annotation:
    (key, value), = obj.items()
    kw = dict(origin=M.Origin(path=path), raw_name=key)
    try:
        if key == "min":
            return M.Min(value, **kw)
        if key == "max":
            return M.Max(value, **kw)
        if key == "pattern":
            return M.Pattern(value, **kw)
        if key == "nullable":
            return M.Nullable(**kw)
        if key == "notNull":
            return M.NotNull(**kw)
        if key == "field":
            return M.Field(value, **kw)
        if key == "subclass":
            return M.SubClass(value, **kw)
        if key == "element":
            return M.Element(value, **kw)
    except ValueError as exc:
        raise _SchemaViolation(str(exc), f"{path}.{key}") from None
    raise _SchemaViolation(f"unknown chain item {key!r}", path)


def _chains(raw, path: str) -> Tuple[M.ConstraintChain, ...]:
    out = []
    for ci, chain in enumerate(raw or ()):
        cpath = f"{path}[{ci}]"
        items = tuple(_item(obj, f"{cpath}[{ii}]") for ii, obj in enumerate(chain))
        try:
            out.append(M.ConstraintChain(items))
        except ValueError as exc:
            raise _SchemaViolation(str(exc), cpath) from None
    return tuple(out)


def _decode(doc: dict, base: str = "$") -> M.MethodSpec:
    classes = {}
    for cname, fields in (doc.get("classModel") or {}).items():
        classes[cname] = tuple(
            M.FieldDecl(
                f["name"],
                parse_type(f["type"], f"{base}.classModel.{cname}[{i}].type"),
                _chains(f.get("chains"), f"{base}.classModel.{cname}[{i}].chains"),
            )
            for i, f in enumerate(fields)
        )
    subclasses = {k: tuple(v) for k, v in (doc.get("subclassModel") or {}).items()}
    params = []
    for i, p in enumerate(doc.get("params") or ()):
        ppath = f"{base}.params[{i}]"
        params.append(
            M.Param(
                p["name"],
                parse_type(p["type"], f"{ppath}.type"),
                _chains(p.get("chains"), f"{ppath}.chains"),
                tuple(p.get("hints") or ()),
            )
        )
    rt = doc.get("returnType", "void")
    rtype = None if rt == "void" else parse_type(rt, f"{base}.returnType")
    try:
        return M.MethodSpec(
            doc["name"],
            tuple(params),
            rtype,
            _chains(doc.get("returnChains"), f"{base}.returnChains"),
            classes,
            subclasses,
            owner=doc.get("owner"),
        )
    except ValueError as exc:
        raise _SchemaViolation(str(exc), base) from None


def _decode_checked(doc, base: Tuple, diags: List[ParseDiagnostic]) -> Optional[M.MethodSpec]:
    errs = schema_errors(doc, base)
    if errs:
        diags.extend(errs)
        return None
    try:
        return _decode(doc, _json_path(base))
    except _SchemaViolation as exc:
        diags.append(error("SchemaError", exc.message, M.Origin(path=exc.path)))
        return None


def _load(source: str, diags: List[ParseDiagnostic]):
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        diags.append(error("SyntaxError", exc.msg, M.Origin(exc.lineno, exc.colno)))
        return None


def parse_json_spec(source: str) -> Tuple[Optional[M.MethodSpec], List[ParseDiagnostic]]:
    """Parse one method object."""
    diags: List[ParseDiagnostic] = []
    doc = _load(source, diags)
    if doc is None and diags:
        return None, diags
    if not isinstance(doc, dict):
        diags.append(error("SchemaError", "expected a method object", M.Origin(path="$")))
        return None, diags
    return _decode_checked(doc, (), diags), diags


def parse_json_document(source: str) -> Tuple[List[M.MethodSpec], List[ParseDiagnostic]]:
    """Parse a method object, an array of them, or ``{"methods": [...]}``."""
    diags: List[ParseDiagnostic] = []
    doc = _load(source, diags)
    if doc is None and diags:
        return [], diags
    if isinstance(doc, dict) and "methods" in doc and set(doc) == {"methods"}:
        items, base = doc["methods"], ("methods",)
    elif isinstance(doc, list):
        items, base = doc, ()
    else:
        items, base = [doc], None
    if not isinstance(items, list):
        diags.append(error("SchemaError", "methods must be an array", M.Origin(path="$.methods")))
        return [], diags
    specs = []
    for i, item in enumerate(items):
        spec = _decode_checked(item, base + (i,) if base is not None else (), diags)
        if spec is not None:
            specs.append(spec)
    if any(d.is_error for d in diags):
        return [], diags
    return specs, diags


# -- encoding ---------------------------------------------------------------


def type_to_json(t: Optional[M.SemanticType]) -> str:
    if t is None:
        return "void"
    return str(t)


def item_to_json(item: M.Annotation) -> dict:
    if isinstance(item, M.Min):
        return {"min": item.value}
    if isinstance(item, M.Max):
        return {"max": item.value}
    if isinstance(item, M.Pattern):
        return {"pattern": item.regex}
    if isinstance(item, M.Nullable):
        return {"nullable": True}
    if isinstance(item, M.NotNull):
        return {"notNull": True}
    if isinstance(item, M.Field):
        return {"field": item.name}
    if isinstance(item, M.SubClass):
        return {"subclass": item.class_name}
    if isinstance(item, M.Element):
        return {"element": item.index}
    raise TypeError(item)


def chains_to_json(chains) -> list:
    return [[item_to_json(i) for i in c.items] for c in chains]


def spec_to_json(spec: M.MethodSpec) -> dict:
    out: dict = {
        "name": spec.name,
        "params": [],
        "returnType": type_to_json(spec.return_type),
        "returnChains": chains_to_json(spec.return_chains),
        "classModel": {
            c: [{"name": f.name, "type": type_to_json(f.type), "chains": chains_to_json(f.chains)} for f in fields]
            for c, fields in spec.class_model.items()
        },
        "subclassModel": {c: list(subs) for c, subs in spec.subclass_model.items()},
    }
    if spec.owner is not None:
        out["owner"] = spec.owner
    for p in spec.params:
        entry = {"name": p.name, "type": type_to_json(p.type), "chains": chains_to_json(p.chains)}
        if p.hints:
            entry["hints"] = list(p.hints)
        out["params"].append(entry)
    return out


def dump_spec(spec: M.MethodSpec) -> str:
    return json.dumps(spec_to_json(spec), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
