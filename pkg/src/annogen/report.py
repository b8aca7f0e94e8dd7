"""Distribution of values inside, on and outside the constrained domains.

Classification here is recomputed from the spec alone and never reads the
tags stored on value trees. Strings are checked with the standard library's
``re`` engine (ASCII mode) so it stays independent of the generator's own
regex matcher.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import model as M
from .validator import validate
from .values import ArrayNode, NullLeaf, NumLeaf, ObjectNode, StrLeaf, ValueTree

IN, ON, OUT, UNCONSTRAINED = "in", "on", "out", "unconstrained"
_RANK = {UNCONSTRAINED: 0, IN: 1, ON: 2, OUT: 3}


class UnknownParam(KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no parameter named {self.name!r}"


@dataclass(frozen=True)
class DistributionRow:
    param: str
    n_in: int
    n_on: int
    n_out: int
    n_unconstrained: int

    @property
    def always_in(self) -> bool:
        return self.n_out == 0 and self.n_in + self.n_on >= 1

    @property
    def always_out(self) -> bool:
        return self.n_in == 0 and self.n_on == 0 and self.n_out >= 1

    @property
    def reasonably_distributed(self) -> bool:
        return self.n_in >= 1 and self.n_out >= 1

    def to_json(self) -> dict:
        return {
            "param": self.param,
            "in": self.n_in,
            "on": self.n_on,
            "out": self.n_out,
            "unconstrained": self.n_unconstrained,
            "alwaysIn": self.always_in,
            "alwaysOut": self.always_out,
            "reasonablyDistributed": self.reasonably_distributed,
        }


class _Target:
    """Leaf constraints collected at one navigated path."""

    def __init__(self, steps: tuple, target: M.SemanticType) -> None:
        self.steps = steps
        self.target = target
        self.mins: List[M.Number] = []
        self.maxs: List[M.Number] = []
        self.patterns: List[str] = []
        self.hints: List[M.Number] = []
        self.nullable = False

    @property
    def constrained(self) -> bool:
        return bool(self.mins or self.maxs or self.patterns)

    def interval(self) -> Tuple[Optional[M.Number], Optional[M.Number]]:
        lo = max(self.mins) if self.mins else None
        hi = min(self.maxs) if self.maxs else None
        integral = not isinstance(self.target, M.Numeric) or self.target.kind.integral
        if integral:
            lo = math.ceil(lo) if isinstance(lo, float) else lo
            hi = math.floor(hi) if isinstance(hi, float) else hi
        return lo, hi


def _steps(chain: M.ConstraintChain) -> tuple:
    out = []
    for item in chain.prefix:
        if isinstance(item, M.Field):
            out.append(("f", item.name))
        elif isinstance(item, M.Element):
            out.append(("e", item.index))
        else:
            out.append(("s", item.class_name.rsplit(".", 1)[-1]))
    return tuple(out)


def _targets(param: M.Param, spec: M.MethodSpec) -> List[_Target]:
    found: Dict[tuple, _Target] = {}
    for chain in param.chains:
        key = _steps(chain)
        if key not in found:
            found[key] = _Target(key, M.resolve_chain_target(chain, param.type, spec))
        t = found[key]
        for leaf in chain.leaves:
            if isinstance(leaf, M.Min):
                t.mins.append(leaf.value)
            elif isinstance(leaf, M.Max):
                t.maxs.append(leaf.value)
            elif isinstance(leaf, M.Pattern):
                t.patterns.append(leaf.regex)
            elif isinstance(leaf, M.Nullable):
                t.nullable = True
    root = found.get(())
    if root is not None and param.hints and isinstance(param.type, (M.Numeric, M.Array)):
        # Hints inside the interval are extra boundaries, reported as On.
        integral = not isinstance(param.type, M.Numeric) or param.type.kind.integral
        root.hints = [round(h) if integral else h for h in param.hints]
    return list(found.values())


def _classify_number(v: M.Number, lo, hi, hints=()) -> str:
    if v == lo or v == hi:
        return ON
    if (lo is None or v > lo) and (hi is None or v < hi):
        return ON if v in hints else IN
    return OUT


class _Classifier:
    def __init__(self, param: M.Param, spec: M.MethodSpec) -> None:
        self.spec = spec
        self.targets = _targets(param, spec)
        self.null_ok = {t.steps for t in self.targets if t.nullable}

    def _is_instance(self, node: ObjectNode, simple: str) -> bool:
        c: Optional[str] = node.class_name
        seen = set()
        while c is not None and c not in seen:
            if c.rsplit(".", 1)[-1] == simple:
                return True
            seen.add(c)
            c = self.spec.superclass_of(c)
        return False

    def classify_one(self, t: _Target, tree: ValueTree) -> Optional[str]:
        node = tree
        for depth, (kind, arg) in enumerate(t.steps):
            if isinstance(node, NullLeaf):
                return None if t.steps[:depth] in self.null_ok else OUT
            if kind == "f":
                node = node.fields.get(arg) if isinstance(node, ObjectNode) else None
            elif kind == "e":
                node = node.element(arg) if isinstance(node, ArrayNode) else None
            elif not (isinstance(node, ObjectNode) and self._is_instance(node, arg)):
                node = None
            if node is None:
                return OUT if (t.constrained or t.nullable) else None
        if isinstance(node, NullLeaf):
            if t.nullable:
                return IN
            return OUT if t.constrained else None
        if not t.constrained:
            return IN if t.nullable else None
        if t.patterns:
            if not isinstance(node, StrLeaf):
                return OUT
            hit = any(re.fullmatch(p, node.value, re.ASCII) for p in t.patterns)
            return IN if hit else OUT
        lo, hi = t.interval()
        if isinstance(node, ArrayNode):
            return _classify_number(node.length, lo, hi, t.hints)
        if isinstance(node, NumLeaf):
            return _classify_number(node.value, lo, hi, t.hints)
        return OUT

    def classify(self, tree: ValueTree) -> str:
        best = UNCONSTRAINED
        for t in self.targets:
            c = self.classify_one(t, tree)
            if c is not None and _RANK[c] > _RANK[best]:
                best = c
        return best


def classify_value(spec: M.MethodSpec, param: str, tree: ValueTree) -> str:
    eff = validate(spec).effective_spec
    try:
        p = eff.param(param)
    except KeyError:
        raise UnknownParam(param) from None
    return _Classifier(p, eff).classify(tree)


def _has_bound_or_pattern(param: M.Param) -> bool:
    return any(isinstance(x, (M.Min, M.Max, M.Pattern)) for c in param.chains for x in c.leaves)


def classify(spec: M.MethodSpec, values: Mapping[str, Sequence[ValueTree]]) -> List[DistributionRow]:
    """One row per parameter carrying a bound or pattern, in parameter order."""
    eff = validate(spec).effective_spec
    names = {p.name for p in eff.params}
    for name in values:
        if name not in names:
            raise UnknownParam(name)
    rows = []
    for p in eff.params:
        if not _has_bound_or_pattern(p):
            continue
        clf = _Classifier(p, eff)
        counts = {IN: 0, ON: 0, OUT: 0, UNCONSTRAINED: 0}
        for tree in values.get(p.name, ()):
            counts[clf.classify(tree)] += 1
        rows.append(DistributionRow(p.name, counts[IN], counts[ON], counts[OUT], counts[UNCONSTRAINED]))
    return rows


def all_reasonable(rows: Sequence[DistributionRow]) -> bool:
    return all(r.reasonably_distributed for r in rows)


def _flags(r: DistributionRow) -> str:
    names = []
    if r.always_in:
        names.append("alwaysIn")
    if r.always_out:
        names.append("alwaysOut")
    if r.reasonably_distributed:
        names.append("reasonablyDistributed")
    return ",".join(names) or "-"


def format_table(rows: Sequence[DistributionRow], method: Optional[str] = None) -> str:
    header = ("param", "in", "on", "out", "unconstrained", "flags")
    body = [(r.param, str(r.n_in), str(r.n_on), str(r.n_out), str(r.n_unconstrained), _flags(r)) for r in rows]
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = []
    if method:
        lines.append(f"method {method}")
    for row in [header] + body:
        cells = [c.ljust(w) if i in (0, 5) else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
