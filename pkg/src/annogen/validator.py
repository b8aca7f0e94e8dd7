"""Semantic checks on constraint chains.

Rule codes:

V1 PatternOnNonString, V2 MinMaxConflict, V3 NegativeArrayLength,
V4 OutOfRepresentableRange, V5 NavigationalOnly, V6 MinMaxOnRef,
V7 NullableOnPrimitive, V8 ElementBeyondLength.

Chains that cannot be navigated are reported under the resolution error's
code (UnknownField, FieldOnNonRef, UnknownSubclass, ElementOnNonArray), and
patterns outside the supported regex subset under InvalidPattern.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from . import model as M
from .diagnostics import Severity
from .rxgen import RegexError, parse_regex

RULE_CODES = {
    "V1": "PatternOnNonString",
    "V2": "MinMaxConflict",
    "V3": "NegativeArrayLength",
    "V4": "OutOfRepresentableRange",
    "V5": "NavigationalOnly",
    "V6": "MinMaxOnRef",
    "V7": "NullableOnPrimitive",
    "V8": "ElementBeyondLength",
}
RULE_OF_CODE = {name: rule for rule, name in RULE_CODES.items()}


class Verdict(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class Finding:
    code: str
    severity: Severity
    origin: M.Origin
    message: str
    slot: str  # parameter name, "@return", or "@field:Class.name"

    @property
    def rule(self) -> Optional[str]:
        return RULE_OF_CODE.get(self.code)

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "code": self.code,
            "severity": self.severity.value,
            "origin": self.origin.to_json(),
            "message": self.message,
            "slot": self.slot,
        }

    def __str__(self) -> str:
        tag = f"{self.rule} {self.code}" if self.rule else self.code
        return f"{self.origin}: {self.severity.value}: [{tag}] {self.slot}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    verdict: Verdict
    findings: Tuple[Finding, ...]
    effective_spec: M.MethodSpec

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.VALID

    @property
    def effective_chains(self) -> Dict[str, Tuple[M.ConstraintChain, ...]]:
        return {slot: chains for slot, _, chains in self.effective_spec.all_chains()}

    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    def to_json(self) -> dict:
        from .jsonspec import chains_to_json

        return {
            "method": self.effective_spec.name,
            "verdict": self.verdict.value,
            "findings": [f.to_json() for f in self.findings],
            "effectiveChains": {k: chains_to_json(v) for k, v in self.effective_chains.items()},
        }


def effective_bound(values, kind: Optional[M.NumKind], lower: bool):
    """Tightest of several Min (lower=True) or Max values, rounded inward for integral kinds."""
    if not values:
        return None
    v = max(values) if lower else min(values)
    if kind is None or kind.integral:
        if isinstance(v, float):
            v = math.ceil(v) if lower else math.floor(v)
    return v


def _numeric_kind(t: M.SemanticType) -> Optional[M.NumKind]:
    if isinstance(t, M.Numeric):
        return t.kind
    return None  # array lengths behave like integers


class _SlotChecker:
    def __init__(self, slot: str, root: M.SemanticType, spec: M.MethodSpec, out: List[Finding]) -> None:
        self.slot = slot
        self.root = root
        self.spec = spec
        self.out = out

    def report(self, code: str, item: M.Annotation, message: str, severity=Severity.ERROR) -> None:
        self.out.append(Finding(code, severity, item.origin, message, self.slot))

    def check(self, chains: Tuple[M.ConstraintChain, ...]) -> Tuple[M.ConstraintChain, ...]:
        # Per-item rules. Each surviving entry: (chain index, target type, kept items)
        staged: List[Tuple[int, M.SemanticType, List[M.Annotation]]] = []
        for ci, chain in enumerate(chains):
            try:
                target = M.resolve_chain_target(chain, self.root, self.spec)
            except M.ChainResolutionError as exc:
                self.report(exc.code, exc.item, exc.message)
                continue
            if not chain.leaves and not isinstance(chain.items[-1], M.SubClass):
                last = chain.items[-1]
                self.report("NavigationalOnly", last, f"{last} must be combined with a constraint")
                continue
            kept = list(chain.prefix)
            for leaf in chain.leaves:
                if self.leaf_ok(leaf, target):
                    kept.append(leaf)
            staged.append((ci, target, kept))

        self.check_ranges(staged)
        self.check_element_lengths(staged)

        out = []
        for ci, target, kept in staged:
            if kept is None:
                continue
            has_leaf = any(not i.navigational for i in kept)
            if has_leaf or (kept and isinstance(kept[-1], M.SubClass)):
                out.append(M.ConstraintChain(tuple(kept)))
        return tuple(out)

    def leaf_ok(self, leaf: M.Annotation, target: M.SemanticType) -> bool:
        if isinstance(leaf, (M.Min, M.Max)):
            if isinstance(target, M.Numeric):
                lo, hi = M.NUMERIC_BOUNDS[target.kind]
                if not lo <= leaf.value <= hi:
                    self.report(
                        "OutOfRepresentableRange",
                        leaf,
                        f"{leaf} is outside the {target.kind.value} range [{lo}, {hi}]",
                    )
                    return False
                if target.kind.integral and isinstance(leaf.value, float) and not leaf.value.is_integer():
                    self.report(
                        "NonIntegralBound",
                        leaf,
                        f"{leaf} on integral type {target.kind.value} is rounded inward",
                        Severity.WARNING,
                    )
                return True
            if isinstance(target, M.Array):
                if leaf.value < 0:
                    self.report("NegativeArrayLength", leaf, f"{leaf} bounds an array length below zero")
                    return False
                if leaf.value > M.ARRAY_LENGTH_BOUNDS[1]:
                    self.report("OutOfRepresentableRange", leaf, f"{leaf} exceeds the maximum array length")
                    return False
                if isinstance(leaf.value, float) and not leaf.value.is_integer():
                    self.report("NonIntegralBound", leaf, f"{leaf} on an array length is rounded inward", Severity.WARNING)
                return True
            self.report("MinMaxOnRef", leaf, f"{leaf} cannot constrain {target}")
            return False
        if isinstance(leaf, M.Pattern):
            if not isinstance(target, M.Str):
                self.report("PatternOnNonString", leaf, f"{leaf} applied to non-string type {target}")
                return False
            try:
                parse_regex(leaf.regex)
            except RegexError as exc:
                self.report("InvalidPattern", leaf, str(exc))
                return False
            return True
        if isinstance(leaf, M.Nullable):
            if isinstance(target, M.Numeric):
                self.report("NullableOnPrimitive", leaf, f"@Nullable on primitive type {target}")
                return False
            return True
        if isinstance(leaf, M.NotNull):
            if isinstance(target, M.Numeric):
                self.report("RedundantNotNull", leaf, "@NotNull on a primitive has no effect", Severity.WARNING)
            return True
        raise TypeError(leaf)

    def check_ranges(self, staged) -> None:
        groups: Dict[tuple, list] = {}
        for entry in staged:
            ci, target, kept = entry
            key = M.path_key(M.ConstraintChain(tuple(kept))) if kept else ()
            groups.setdefault(key, []).append(entry)
        for key, entries in groups.items():
            target = entries[0][1]
            if not isinstance(target, (M.Numeric, M.Array)):
                continue
            kind = _numeric_kind(target)
            mins = [i for _, _, kept in entries for i in kept if isinstance(i, M.Min)]
            maxs = [i for _, _, kept in entries for i in kept if isinstance(i, M.Max)]
            for items, lower in ((mins, True), (maxs, False)):
                if len(items) > 1:
                    best = effective_bound([i.value for i in items], None, lower)
                    for i in items:
                        if i.value != best:
                            self.report(
                                "RedundantBound",
                                i,
                                f"{i} is looser than another bound on the same target; the tighter one applies",
                                Severity.WARNING,
                            )
            lo = effective_bound([i.value for i in mins], kind, True)
            hi = effective_bound([i.value for i in maxs], kind, False)
            if lo is not None and hi is not None and lo > hi:
                culprit = max(mins, key=lambda i: i.value)
                self.report(
                    "MinMaxConflict",
                    culprit,
                    f"lower bound {lo} exceeds upper bound {hi}; both are ignored",
                )
                drop = {id(i) for i in mins + maxs}
                for entry in entries:
                    entry[2][:] = [i for i in entry[2] if id(i) not in drop]

    def check_element_lengths(self, staged) -> None:
        # Upper length bound per array path, from surviving Max items.
        max_len: Dict[tuple, M.Number] = {}
        for _, target, kept in staged:
            if isinstance(target, M.Array) and kept:
                key = M.path_key(M.ConstraintChain(tuple(kept)))
                hi = effective_bound([i.value for i in kept if isinstance(i, M.Max)], None, False)
                if hi is not None:
                    max_len[key] = hi if key not in max_len else min(max_len[key], hi)
        if not max_len:
            return
        for n, (ci, target, kept) in enumerate(staged):
            if not kept:
                continue
            prefix: List[M.Annotation] = []
            for item in kept:
                if not item.navigational:
                    break
                if isinstance(item, M.Element):
                    key = M.path_key(M.ConstraintChain(tuple(prefix))) if prefix else ()
                    if key in max_len and item.index > max_len[key]:
                        self.report(
                            "ElementBeyondLength",
                            item,
                            f"{item} lies beyond the maximum array length {max_len[key]}",
                        )
                        kept[:] = []
                        break
                prefix.append(item)


def validate(spec: M.MethodSpec) -> ValidationReport:
    findings: List[Finding] = []

    def run(slot: str, root: M.SemanticType, chains):
        return _SlotChecker(slot, root, spec, findings).check(chains)

    params = tuple(replace(p, chains=run(p.name, p.type, p.chains)) for p in spec.params)
    ret = run("@return", spec.return_type, spec.return_chains) if spec.return_type is not None else ()
    classes = {}
    for cls, fields in spec.class_model.items():
        classes[cls] = tuple(
            replace(f, chains=run(f"@field:{cls}.{f.name}", f.type, f.chains)) if f.chains else f for f in fields
        )
    effective = replace(spec, params=params, return_chains=ret, class_model=classes)
    verdict = Verdict.INVALID if any(f.severity is Severity.ERROR for f in findings) else Verdict.VALID
    return ValidationReport(verdict, tuple(findings), effective)
