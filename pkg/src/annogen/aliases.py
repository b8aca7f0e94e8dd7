"""Mapping third-party annotation names onto the basis annotations.

Lookup ignores the package prefix and letter case, so
``javax.validation.constraints.Min``, ``Min`` and ``MIN`` all hit one entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from . import model as M
from .diagnostics import ParseDiagnostic, error, warning

EMAIL_REGEX = r"^[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,6}$"
NOT_BLANK_REGEX = r"^[\s\S]*\S[\s\S]*$"
NOT_EMPTY_REGEX = r"^[\s\S]+$"


@dataclass(frozen=True)
class ClassLiteral:
    """``Foo.class`` as an attribute value."""

    name: str


@dataclass(frozen=True)
class AnnotationUse:
    """An annotation as written, before normalization."""

    name: str
    attributes: Mapping[str, object]
    origin: M.Origin = M.Origin()


# -- rewrite rules ----------------------------------------------------------


@dataclass(frozen=True)
class DirectBasis:
    basis: str  # min max pattern nullable notnull field subclass element
    value: object = None  # fixed attribute value, else taken from "value"


@dataclass(frozen=True)
class PatternExpansion:
    regex: str


@dataclass(frozen=True)
class RangeExpansion:
    """Min/Max from fixed numbers or, when None, from the min/max attributes."""

    min: Optional[M.Number] = None
    max: Optional[M.Number] = None


@dataclass(frozen=True)
class LengthExpansion:
    """Size-like constraint: array length bounds, or a length regex on strings."""

    min: Optional[int] = None
    max: Optional[int] = None


@dataclass(frozen=True)
class DigitsExpansion:
    pass


@dataclass(frozen=True)
class Ignore:
    pass


IGNORE = Ignore()

Rule = Union[DirectBasis, PatternExpansion, RangeExpansion, LengthExpansion, DigitsExpansion, Ignore]

BUILTIN_RULES: Dict[str, Rule] = {
    "min": DirectBasis("min"),
    "max": DirectBasis("max"),
    "decimalmin": DirectBasis("min"),
    "decimalmax": DirectBasis("max"),
    "range": RangeExpansion(),
    "positive": DirectBasis("min", 1),
    "positiveorzero": DirectBasis("min", 0),
    "negative": DirectBasis("max", -1),
    "negativeorzero": DirectBasis("max", 0),
    "size": LengthExpansion(),
    "length": LengthExpansion(),
    "pattern": DirectBasis("pattern"),
    "email": PatternExpansion(EMAIL_REGEX),
    "notempty": LengthExpansion(min=1),
    "notblank": PatternExpansion(NOT_BLANK_REGEX),
    "digits": DigitsExpansion(),
    "null": DirectBasis("nullable"),
    "nil": DirectBasis("nullable"),
    "nullable": DirectBasis("nullable"),
    "notnull": DirectBasis("notnull"),
    "nonnull": DirectBasis("notnull"),
    "field": DirectBasis("field"),
    "subclass": DirectBasis("subclass"),
    "element": DirectBasis("element"),
}


def normalize_name(raw_name: str) -> str:
    return raw_name.rsplit(".", 1)[-1].lower()


class AliasConfigError(ValueError):
    pass


def parse_rule(text: str) -> Rule:
    """Parse the right-hand side of an alias config line.

    Forms: ``min``, ``min:<n>``, ``max``, ``max:<n>``, ``range``, ``range:<lo>:<hi>``,
    ``length``, ``length:<lo>:<hi>`` (either side may be empty), ``pattern``,
    ``pattern:<regex>``, ``digits``, ``nullable``, ``notnull``, ``field``,
    ``subclass``, ``element``, ``ignore``.
    """
    kind, _, rest = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "pattern":
        return PatternExpansion(rest) if rest else DirectBasis("pattern")
    if kind in ("min", "max"):
        return DirectBasis(kind, _number(rest)) if rest.strip() else DirectBasis(kind)
    if kind in ("range", "length"):
        if not rest.strip():
            return RangeExpansion() if kind == "range" else LengthExpansion()
        lo, sep, hi = rest.partition(":")
        if not sep:
            raise AliasConfigError(f"expected {kind}:<lo>:<hi>, got {text!r}")
        lo_v = _number(lo) if lo.strip() else None
        hi_v = _number(hi) if hi.strip() else None
        return RangeExpansion(lo_v, hi_v) if kind == "range" else LengthExpansion(lo_v, hi_v)
    if kind == "digits" and not rest:
        return DigitsExpansion()
    if kind == "ignore" and not rest:
        return IGNORE
    if kind in ("nullable", "notnull", "field", "subclass", "element") and not rest:
        return DirectBasis(kind)
    raise AliasConfigError(f"unknown alias rule {text!r}")


def _number(text: str) -> M.Number:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError:
        raise AliasConfigError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise AliasConfigError(f"not a finite number: {text!r}")
    return v


class AliasTable:
    def __init__(self, entries: Optional[Mapping[str, Rule]] = None) -> None:
        self.entries: Dict[str, Rule] = dict(BUILTIN_RULES if entries is None else entries)

    def lookup(self, raw_name: str) -> Optional[Rule]:
        return self.entries.get(normalize_name(raw_name))

    def extended(self, extra: Mapping[str, Rule]) -> "AliasTable":
        merged = dict(self.entries)
        for k, v in extra.items():
            merged[normalize_name(k)] = v
        return AliasTable(merged)

    @classmethod
    def from_config(cls, text: str, base: Optional["AliasTable"] = None) -> "AliasTable":
        """Read ``name = rule`` lines (``#`` starts a comment) on top of ``base``."""
        extra = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, sep, rule = line.partition("=")
            if not sep or not name.strip():
                raise AliasConfigError(f"line {lineno}: expected name = rule")
            try:
                extra[name.strip()] = parse_rule(rule)
            except AliasConfigError as exc:
                raise AliasConfigError(f"line {lineno}: {exc}") from None
        return (base or DEFAULT_TABLE).extended(extra)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "AliasTable":
        return cls.from_config(Path(path).read_text(encoding="utf-8"))


DEFAULT_TABLE = AliasTable()


# -- normalization ----------------------------------------------------------


def _attr(attributes: Mapping[str, object], *names: str):
    lowered = {k.lower(): v for k, v in attributes.items()}
    for n in names:
        if n in lowered:
            return lowered[n]
    return None


def _as_number(v) -> Optional[M.Number]:
    if isinstance(v, bool):
        return None
    if isinstance(v, (int, float)):
        return v if not (isinstance(v, float) and not math.isfinite(v)) else None
    if isinstance(v, str):
        try:
            return _number(v)
        except AliasConfigError:
            return None
    return None


def _length_regex(lo: Optional[int], hi: Optional[int]) -> str:
    if hi is None:
        if lo in (None, 0):
            return r"^[\s\S]*$"
        if lo == 1:
            return NOT_EMPTY_REGEX
        return rf"^[\s\S]{{{lo},}}$"
    return rf"^[\s\S]{{{lo or 0},{hi}}}$"


def normalize_annotation(
    raw_name: str,
    attributes: Mapping[str, object],
    target: Optional[M.SemanticType] = None,
    origin: M.Origin = M.Origin(),
    table: Optional[AliasTable] = None,
) -> Tuple[Union[List[M.Annotation], Ignore], List[ParseDiagnostic]]:
    """Rewrite one written annotation as basis annotations.

    ``target`` is the type the annotation ends up constraining, when known;
    size-like and digit annotations expand differently for strings, arrays and
    numbers. Never raises; problems come back as diagnostics.
    """
    table = table or DEFAULT_TABLE
    diags: List[ParseDiagnostic] = []
    kw = dict(origin=origin, raw_name=raw_name)

    parts = raw_name.split(".")
    if len(parts) > 1 and parts[-1].lower() == "list":
        # Container form: @Pattern.List({@Pattern(..), @Pattern(..)})
        inner = _attr(attributes, "value")
        if isinstance(inner, AnnotationUse):
            inner = [inner]
        if isinstance(inner, (list, tuple)) and all(isinstance(x, AnnotationUse) for x in inner):
            out: List[M.Annotation] = []
            for use in inner:
                got, d = normalize_annotation(use.name, use.attributes, target, use.origin, table)
                diags.extend(d)
                if not isinstance(got, Ignore):
                    out.extend(got)
            return (out if out else IGNORE), diags

    rule = table.lookup(raw_name)
    if rule is None:
        diags.append(warning("UnknownAnnotationIgnored", f"@{raw_name} has no known meaning; ignored", origin))
        return IGNORE, diags
    if isinstance(rule, Ignore):
        return IGNORE, diags

    def bad(message: str):
        diags.append(error("InvalidAttribute", f"@{raw_name}: {message}", origin))
        return IGNORE, diags

    if isinstance(rule, DirectBasis):
        value = rule.value if rule.value is not None else _attr(attributes, "value")
        if rule.basis in ("min", "max"):
            num = _as_number(value)
            if num is None:
                return bad(f"expected a numeric value, got {value!r}")
            cls = M.Min if rule.basis == "min" else M.Max
            return [cls(num, **kw)], diags
        if rule.basis == "pattern":
            regex = _attr(attributes, "regexp", "value") if rule.value is None else rule.value
            if not isinstance(regex, str):
                return bad("expected a regular expression string")
            return [M.Pattern(regex, **kw)], diags
        if rule.basis == "nullable":
            return [M.Nullable(**kw)], diags
        if rule.basis == "notnull":
            return [M.NotNull(**kw)], diags
        if rule.basis == "field":
            if not isinstance(value, str) or not value.isidentifier():
                return bad(f"expected a field name, got {value!r}")
            return [M.Field(value, **kw)], diags
        if rule.basis == "subclass":
            if isinstance(value, ClassLiteral):
                value = value.name
            if not isinstance(value, str) or not value:
                return bad(f"expected a class, got {value!r}")
            return [M.SubClass(value, **kw)], diags
        if rule.basis == "element":
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                return bad(f"element index must be an integer >= 1, got {value!r}")
            return [M.Element(value, **kw)], diags
        raise AssertionError(rule)

    if isinstance(rule, PatternExpansion):
        regex = _attr(attributes, "regexp")
        return [M.Pattern(regex if isinstance(regex, str) else rule.regex, **kw)], diags

    if isinstance(rule, RangeExpansion):
        out = []
        for cls, fixed, key in ((M.Min, rule.min, "min"), (M.Max, rule.max, "max")):
            raw = fixed if fixed is not None else _attr(attributes, key)
            if raw is None:
                continue
            num = _as_number(raw)
            if num is None:
                return bad(f"{key} must be numeric, got {raw!r}")
            out.append(cls(num, **kw))
        if not out:
            diags.append(warning("EmptyRange", f"@{raw_name} without min or max; ignored", origin))
            return IGNORE, diags
        return out, diags

    if isinstance(rule, LengthExpansion):
        bounds = []
        for fixed, key in ((rule.min, "min"), (rule.max, "max")):
            raw = fixed if fixed is not None else _attr(attributes, key)
            if raw is None:
                bounds.append(None)
                continue
            if isinstance(raw, bool) or not isinstance(raw, int):
                return bad(f"{key} must be an integer, got {raw!r}")
            bounds.append(raw)
        lo, hi = bounds
        if isinstance(target, M.Str):
            if (lo is not None and lo < 0) or (hi is not None and (hi < 0 or hi < (lo or 0))):
                return bad(f"invalid string length bounds {lo}..{hi}")
            return [M.Pattern(_length_regex(lo, hi), **kw)], diags
        if target is None and rule == LengthExpansion(min=1):
            return [M.Pattern(NOT_EMPTY_REGEX, **kw)], diags
        out = []
        if lo is not None:
            out.append(M.Min(lo, **kw))
        if hi is not None:
            out.append(M.Max(hi, **kw))
        if not out:
            return IGNORE, diags
        return out, diags

    if isinstance(rule, DigitsExpansion):
        integer = _attr(attributes, "integer")
        fraction = _attr(attributes, "fraction") or 0
        if isinstance(integer, bool) or not isinstance(integer, int) or integer < 1:
            return bad("integer must be a positive integer")
        if isinstance(fraction, bool) or not isinstance(fraction, int) or fraction < 0:
            return bad("fraction must be a non-negative integer")
        if isinstance(target, M.Numeric):
            if target.kind.integral or fraction == 0:
                hi: M.Number = 10**integer - 1
            else:
                hi = round(10**integer - 10.0**-fraction, fraction)
            return [M.Min(-hi, **kw), M.Max(hi, **kw)], diags
        frac = rf"(\.[0-9]{{1,{fraction}}})?" if fraction else ""
        return [M.Pattern(rf"^-?[0-9]{{1,{integer}}}{frac}$", **kw)], diags

    raise AssertionError(rule)
