"""Assertion predicates derived from constraints on return values and fields."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from . import model as M
from . import rxgen
from .datagen import SpecInvalid, group_chains
from .validator import effective_bound, validate
from .values import ArrayNode, NullLeaf, NumLeaf, ObjectNode, StrLeaf, ValueTree


class TypeMismatch(TypeError):
    pass


class Style(enum.Enum):
    NEUTRAL = "neutral"
    JAVA = "java"


# -- subjects ---------------------------------------------------------------


@dataclass(frozen=True)
class FieldStep:
    name: str


@dataclass(frozen=True)
class ElementStep:
    index: int  # 1-based


@dataclass(frozen=True)
class CastStep:
    class_name: str
    accepted: FrozenSet[str]


@dataclass(frozen=True)
class LengthStep:
    pass


Step = Union[FieldStep, ElementStep, CastStep, LengthStep]


@dataclass(frozen=True)
class Subject:
    root: str
    steps: Tuple[Step, ...] = ()

    def __str__(self) -> str:
        out = self.root
        for s in self.steps:
            if isinstance(s, FieldStep):
                out += f".{s.name}"
            elif isinstance(s, ElementStep):
                out += f"[{s.index}]"
            elif isinstance(s, LengthStep):
                out += ".length"
        return out

    def java(self) -> str:
        out = self.root
        cast: Optional[str] = None
        for s in self.steps:
            if isinstance(s, CastStep):
                cast = s.class_name.rsplit(".", 1)[-1]
                continue
            if cast is not None:
                out = f"(({cast}) {out})"
                cast = None
            if isinstance(s, FieldStep):
                out += f".{s.name}"
            elif isinstance(s, ElementStep):
                out += f"[{s.index - 1}]"
            elif isinstance(s, LengthStep):
                out += ".length"
        return out

    def extend(self, step: Step) -> "Subject":
        return Subject(self.root, self.steps + (step,))


# -- forms ------------------------------------------------------------------


@dataclass(frozen=True)
class Range:
    lo: Optional[M.Number] = None
    hi: Optional[M.Number] = None

    def __post_init__(self) -> None:
        if self.lo is None and self.hi is None:
            raise ValueError("Range needs at least one bound")


@dataclass(frozen=True)
class Match:
    regex: str


@dataclass(frozen=True)
class MatchAny:
    regexes: Tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.regexes) < 2:
            raise ValueError("MatchAny needs two or more patterns; use Match")


@dataclass(frozen=True)
class NotNull:
    pass


@dataclass(frozen=True)
class SubclassOf:
    class_name: str
    accepted: FrozenSet[str]


@dataclass(frozen=True)
class Conjunction:
    parts: Tuple["AssertionPredicate", ...]


Form = Union[Range, Match, MatchAny, NotNull, SubclassOf, Conjunction]


@dataclass(frozen=True)
class AssertionPredicate:
    subject: Subject
    form: Form
    post_mutation: bool = False
    # Subjects that are allowed to be null; the predicate holds vacuously if one is.
    unless_null: Tuple[Subject, ...] = ()

    def to_json(self) -> dict:
        return {
            "subject": str(self.subject),
            "postMutation": self.post_mutation,
            "neutral": render(self, Style.NEUTRAL),
            "java": render(self, Style.JAVA),
        }


# -- derivation -------------------------------------------------------------


def _accepted(spec: M.MethodSpec, name: str) -> FrozenSet[str]:
    names = set(spec.class_model) | set(spec.subclass_model)
    for subs in spec.subclass_model.values():
        names.update(subs)
    return frozenset({name} | {c for c in names if spec.is_subclass(c, name)})


def _walk_prefix(prefix, root: M.SemanticType, subject: Subject, spec: M.MethodSpec):
    """Subjects reached after each navigational item, and the final type."""
    t = root
    reached = [subject]
    for item in prefix:
        if isinstance(item, M.Field):
            subject = subject.extend(FieldStep(item.name))
        elif isinstance(item, M.Element):
            subject = subject.extend(ElementStep(item.index))
        elif isinstance(item, M.SubClass):
            name = spec.resolve_subclass(t.class_name, item.class_name) or item.class_name
            subject = subject.extend(CastStep(name, _accepted(spec, name)))
        t = M.navigate(item, t, spec)
        reached.append(subject)
    return reached, t


def derive_slot_predicates(
    root_name: str,
    root: M.SemanticType,
    chains: Sequence[M.ConstraintChain],
    spec: M.MethodSpec,
    post_mutation: bool = False,
) -> List[AssertionPredicate]:
    """One predicate per navigated path; chains sharing a path are merged."""
    groups = group_chains(chains, root, spec)
    nullable_at = {g.key for g in groups if g.nullable}
    out = []
    for g in groups:
        reached, target = _walk_prefix(g.prefix, root, Subject(root_name), spec)
        subject = reached[-1]
        parts: List[AssertionPredicate] = []
        leaves = [x for c in g.chains for x in c.leaves]
        if any(isinstance(x, M.NotNull) for x in leaves):
            parts.append(AssertionPredicate(subject, NotNull()))
        mins = [x.value for x in leaves if isinstance(x, M.Min)]
        maxs = [x.value for x in leaves if isinstance(x, M.Max)]
        if mins or maxs:
            kind = target.kind if isinstance(target, M.Numeric) else None
            rsubj = subject if isinstance(target, M.Numeric) else subject.extend(LengthStep())
            parts.append(AssertionPredicate(rsubj, Range(effective_bound(mins, kind, True), effective_bound(maxs, kind, False))))
        regexes = [x.regex for x in leaves if isinstance(x, M.Pattern)]
        if len(regexes) == 1:
            parts.append(AssertionPredicate(subject, Match(regexes[0])))
        elif regexes:
            parts.append(AssertionPredicate(subject, MatchAny(tuple(regexes))))
        if not parts and g.prefix and isinstance(g.prefix[-1], M.SubClass):
            cast = subject.steps[-1]
            parts.append(AssertionPredicate(Subject(subject.root, subject.steps[:-1]), SubclassOf(cast.class_name, cast.accepted)))
        if not parts:
            continue
        form = parts[0].form if len(parts) == 1 else Conjunction(tuple(parts))
        pred_subject = parts[0].subject if len(parts) == 1 else subject

        # Positions licensed to be null along the path (including the target itself).
        guards = []
        keys = [()]
        walked: list = []
        for item in g.prefix:
            walked.extend(M.path_key(M.ConstraintChain((item,))))
            keys.append(tuple(walked))
        for key, subj in zip(keys, reached):
            if key in nullable_at and not isinstance(form, NotNull):
                if subj not in guards:
                    guards.append(subj)
        out.append(AssertionPredicate(pred_subject, form, post_mutation, tuple(guards)))
    return out


def derive_assertions(spec: M.MethodSpec, return_name: str = "r") -> List[AssertionPredicate]:
    """Predicates for the return value, then post-mutation predicates for owner fields."""
    report = validate(spec)
    if not report.valid:
        raise SpecInvalid(report)
    eff = report.effective_spec
    out: List[AssertionPredicate] = []
    if eff.return_type is not None:
        out += derive_slot_predicates(return_name, eff.return_type, eff.return_chains, eff)
    if eff.owner is not None:
        for f in eff.fields_of(eff.owner):
            if f.chains:
                out += derive_slot_predicates(f"this.{f.name}", f.type, f.chains, eff, post_mutation=True)
    return out


# -- evaluation -------------------------------------------------------------

_MISSING = object()


def _resolve(subject: Subject, value: ValueTree):
    node = value
    for s in subject.steps:
        if node is _MISSING or isinstance(node, NullLeaf):
            return _MISSING if node is _MISSING else node
        if isinstance(s, FieldStep):
            if not isinstance(node, ObjectNode):
                raise TypeMismatch(f"{subject}: field access on a non-object")
            node = node.fields.get(s.name, _MISSING)
        elif isinstance(s, ElementStep):
            if not isinstance(node, ArrayNode):
                raise TypeMismatch(f"{subject}: element access on a non-array")
            node = node.element(s.index)
            node = _MISSING if node is None else node
        elif isinstance(s, CastStep):
            if not isinstance(node, ObjectNode):
                raise TypeMismatch(f"{subject}: cast of a non-object")
            if node.class_name not in s.accepted:
                return _MISSING
        elif isinstance(s, LengthStep):
            if not isinstance(node, ArrayNode):
                raise TypeMismatch(f"{subject}: length of a non-array")
            node = NumLeaf(node.length, M.NumKind.INT)
    return node


def _compiled(regex: str):
    return rxgen.parse_regex(regex)


def evaluate_predicate(pred: AssertionPredicate, value: ValueTree) -> bool:
    """True iff ``value`` (the root named by the subject) satisfies ``pred``."""
    for guard in pred.unless_null:
        if isinstance(_resolve(guard, value), NullLeaf):
            return True
    form = pred.form
    if isinstance(form, Conjunction):
        return all(evaluate_predicate(p, value) for p in form.parts)
    node = _resolve(pred.subject, value)
    if node is _MISSING:
        return False
    if isinstance(form, NotNull):
        return not isinstance(node, NullLeaf)
    if isinstance(node, NullLeaf):
        return False
    if isinstance(form, Range):
        if not isinstance(node, NumLeaf):
            raise TypeMismatch(f"{pred.subject}: range check on a non-number")
        v = node.value
        return (form.lo is None or v >= form.lo) and (form.hi is None or v <= form.hi)
    if isinstance(form, (Match, MatchAny)):
        if not isinstance(node, StrLeaf):
            raise TypeMismatch(f"{pred.subject}: pattern check on a non-string")
        regexes = [form.regex] if isinstance(form, Match) else form.regexes
        return any(rxgen.fullmatch(_compiled(r), node.value) for r in regexes)
    if isinstance(form, SubclassOf):
        if not isinstance(node, ObjectNode):
            raise TypeMismatch(f"{pred.subject}: instanceof on a non-object")
        return node.class_name in form.accepted
    raise TypeError(form)


# -- rendering --------------------------------------------------------------


def java_string(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or 0x7F <= ord(ch) < 0xA0:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def _num(v: M.Number) -> str:
    return repr(v)


def _java_expr(pred: AssertionPredicate, nested: bool) -> str:
    form = pred.form
    s = pred.subject.java()
    if isinstance(form, Conjunction):
        text = " && ".join(_java_expr(p, True) for p in form.parts)
    elif isinstance(form, Range):
        terms = []
        if form.lo is not None:
            terms.append(f"{_num(form.lo)} <= {s}")
        if form.hi is not None:
            terms.append(f"{s} <= {_num(form.hi)}")
        text = " && ".join(terms)
        if nested and len(terms) > 1:
            text = f"({text})"
    elif isinstance(form, Match):
        text = f"Pattern.matches({java_string(form.regex)},{s})"
    elif isinstance(form, MatchAny):
        text = " || ".join(f"Pattern.matches({java_string(r)},{s})" for r in form.regexes)
        if nested:
            text = f"({text})"
    elif isinstance(form, NotNull):
        text = f"{s} != null"
    elif isinstance(form, SubclassOf):
        text = f"{s} instanceof {form.class_name.rsplit('.', 1)[-1]}"
    else:
        raise TypeError(form)
    if pred.unless_null:
        nulls = " || ".join(f"{g.java()} == null" for g in pred.unless_null)
        text = f"{nulls} || ({text})"
        if nested:
            text = f"({text})"
    return text


def _neutral(pred: AssertionPredicate) -> str:
    form = pred.form
    s = str(pred.subject)
    if isinstance(form, Conjunction):
        text = "(and " + " ".join(_neutral(p) for p in form.parts) + ")"
    elif isinstance(form, Range):
        lo = "*" if form.lo is None else _num(form.lo)
        hi = "*" if form.hi is None else _num(form.hi)
        text = f"(range {s} {lo} {hi})"
    elif isinstance(form, Match):
        text = f"(match {s} {json.dumps(form.regex, ensure_ascii=False)})"
    elif isinstance(form, MatchAny):
        text = f"(match-any {s} " + " ".join(json.dumps(r, ensure_ascii=False) for r in form.regexes) + ")"
    elif isinstance(form, NotNull):
        text = f"(not-null {s})"
    elif isinstance(form, SubclassOf):
        text = f"(subclass-of {s} {form.class_name})"
    else:
        raise TypeError(form)
    if pred.unless_null:
        text = "(or " + " ".join(f"(null {g})" for g in pred.unless_null) + f" {text})"
    return text


def render(pred: AssertionPredicate, style: Style = Style.JAVA) -> str:
    if style is Style.JAVA:
        text = f"assert({_java_expr(pred, False)});"
        return f"/* after mutation */ {text}" if pred.post_mutation else text
    text = _neutral(pred)
    return f"(post-mutation {text})" if pred.post_mutation else text
