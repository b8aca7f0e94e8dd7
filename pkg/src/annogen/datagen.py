"""Test-input candidate sets: in, on and outside each constrained domain."""

from __future__ import annotations

import itertools
import json
import struct
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import model as M
from . import rxgen
from .rng import SeededRng, splitmix64
from .validator import effective_bound, validate
from .values import (
    ArrayNode,
    Classification,
    NullLeaf,
    NumLeaf,
    ObjectNode,
    StrLeaf,
    ValueTree,
    combine,
    to_json,
)

DEFAULT_DEPTH_CAP = 3

IN, ON, OUT, UNCONSTRAINED = (
    Classification.IN,
    Classification.ON,
    Classification.OUT,
    Classification.UNCONSTRAINED,
)


class SpecInvalid(Exception):
    def __init__(self, report) -> None:
        super().__init__(f"method {report.effective_spec.name} failed validation")
        self.report = report


@dataclass(frozen=True)
class GenConfig:
    per_bucket: int = 1
    per_pattern: int = 2
    max_unbounded_reps: int = rxgen.generate.DEFAULT_MAX_UNBOUNDED_REPS
    max_cases: int = 64
    default_array_len: int = 3
    only_valid: bool = False
    candidates: Optional[Tuple[str, ...]] = None  # overrides the built-in adversarial strings

    def __post_init__(self) -> None:
        for name, minimum in (
            ("per_bucket", 1),
            ("per_pattern", 1),
            ("max_unbounded_reps", 0),
            ("max_cases", 1),
            ("default_array_len", 0),
        ):
            if getattr(self, name) < minimum:
                raise ValueError(f"{name} must be >= {minimum}")


# -- numeric bucketing ------------------------------------------------------


@dataclass(frozen=True)
class Bucketing:
    """Sorted boundaries over a numeric kind's range (``kind`` None: array length)."""

    kind: Optional[M.NumKind]
    boundaries: Tuple[M.Number, ...]
    lower: Optional[M.Number] = None
    upper: Optional[M.Number] = None
    hints: Tuple[M.Number, ...] = ()

    @property
    def buckets(self) -> Tuple[Tuple[M.Number, M.Number], ...]:
        b = self.boundaries
        return tuple(zip(b, b[1:]))

    @property
    def integral(self) -> bool:
        return self.kind is None or self.kind.integral

    def classify(self, v: M.Number) -> Classification:
        if self.lower is None and self.upper is None:
            return UNCONSTRAINED
        if v == self.lower or v == self.upper:
            return ON
        inside = (self.lower is None or v > self.lower) and (self.upper is None or v < self.upper)
        if not inside:
            return OUT
        return ON if v in self.hints else IN


def _representable(kind: Optional[M.NumKind]) -> Tuple[M.Number, M.Number]:
    return M.ARRAY_LENGTH_BOUNDS if kind is None else M.NUMERIC_BOUNDS[kind]


def build_bucketing(
    chains: Sequence[M.ConstraintChain],
    kind: Optional[M.NumKind],
    hints: Sequence[M.Number] = (),
) -> Bucketing:
    """Boundaries = type extremes, effective Min/Max, and hints clamped into range."""
    lo_rep, hi_rep = _representable(kind)
    leaves = [leaf for c in chains for leaf in c.leaves]
    lower = effective_bound([x.value for x in leaves if isinstance(x, M.Min)], kind, True)
    upper = effective_bound([x.value for x in leaves if isinstance(x, M.Max)], kind, False)
    integral = kind is None or kind.integral
    clamped = []
    for h in hints:
        h = min(max(h, lo_rep), hi_rep)
        if integral:
            h = round(h)
        clamped.append(h)
    points = [lo_rep, hi_rep] + [b for b in (lower, upper) if b is not None] + clamped
    boundaries: List[M.Number] = []
    for p in sorted(points):
        if not boundaries or p != boundaries[-1]:
            boundaries.append(p)
    if lower is not None and upper is not None:
        in_range = tuple(h for h in clamped if lower <= h <= upper)
    else:
        in_range = tuple(h for h in clamped if (lower is None or h >= lower) and (upper is None or h <= upper))
    if lower is None and upper is None:
        in_range = ()
    return Bucketing(kind, tuple(boundaries), lower, upper, in_range)


def _to_float32(x: float) -> float:
    return struct.unpack("<f", struct.pack("<f", x))[0]


def _sample_bucket(bucketing: Bucketing, a, b, rng: SeededRng):
    if bucketing.integral:
        lo, hi = a + 1, b - 1
        return rng.randint(lo, hi) if lo <= hi else None
    x = rng.uniform_open(float(a), float(b))
    if x is not None and bucketing.kind is M.NumKind.FLOAT:
        x = _to_float32(x)
        if not a < x < b:
            return None
    return x


def sample_values(bucketing: Bucketing, rng: SeededRng, per_bucket: int = 1) -> List[M.Number]:
    """Boundary values plus ``per_bucket`` interior samples per bucket, ascending."""
    values: List[M.Number] = list(bucketing.boundaries)
    for a, b in bucketing.buckets:
        for _ in range(per_bucket):
            v = _sample_bucket(bucketing, a, b, rng)
            if v is not None:
                values.append(v)
    out: List[M.Number] = []
    for v in sorted(values):
        if not out or v != out[-1]:
            out.append(v)
    return out


def generate_numeric(bucketing: Bucketing, rng: SeededRng, per_bucket: int = 1) -> List[NumLeaf]:
    kind = bucketing.kind or M.NumKind.INT
    return [NumLeaf(v, kind, bucketing.classify(v)) for v in sample_values(bucketing, rng, per_bucket)]


# -- strings ----------------------------------------------------------------


def _dedupe(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def generate_string(
    patterns: Sequence[str],
    rng: SeededRng,
    per_pattern: int = 2,
    max_unbounded_reps: int = rxgen.generate.DEFAULT_MAX_UNBOUNDED_REPS,
    candidates: Optional[Sequence[str]] = None,
) -> List[StrLeaf]:
    """Matches for each pattern (In) and strings matching none of them (Out)."""
    asts = [rxgen.parse_regex(p) for p in patterns]
    inside = []
    for ast in asts:
        for _ in range(per_pattern):
            inside.append(rxgen.generate_match(ast, rng, max_unbounded_reps))
    disjunction = asts[0] if len(asts) == 1 else rxgen.Alternation(tuple(rxgen.Group(a) for a in asts))
    pool = list(rxgen.builtin_candidates() if candidates is None else candidates)
    outside = []
    for _ in range(per_pattern):
        s = rxgen.generate_nonmatch(disjunction, rng, pool)
        if s is None:
            break
        outside.append(s)
        if s in pool:
            pool = pool[pool.index(s) + 1 :]
    return [StrLeaf(s, IN) for s in _dedupe(inside)] + [StrLeaf(s, OUT) for s in _dedupe(outside) if s not in inside]


# -- object and array construction ------------------------------------------


@dataclass
class _Group:
    """All chains of one slot that share a navigational prefix."""

    key: tuple
    prefix: Tuple[M.Annotation, ...]
    target: M.SemanticType
    chains: List[M.ConstraintChain] = field(default_factory=list)

    def leaves(self, cls) -> list:
        return [x for c in self.chains for x in c.leaves if isinstance(x, cls)]

    @property
    def nullable(self) -> bool:
        return bool(self.leaves(M.Nullable))

    @property
    def is_length(self) -> bool:
        return isinstance(self.target, M.Array) and bool(self.leaves((M.Min, M.Max)))

    @property
    def is_numeric(self) -> bool:
        return isinstance(self.target, M.Numeric) and bool(self.leaves((M.Min, M.Max)))

    @property
    def is_string(self) -> bool:
        return isinstance(self.target, M.Str) and bool(self.leaves(M.Pattern))


def group_chains(chains: Sequence[M.ConstraintChain], root: M.SemanticType, spec: M.MethodSpec) -> List[_Group]:
    groups: Dict[tuple, _Group] = {}
    for chain in chains:
        key = M.path_key(chain)
        if key not in groups:
            groups[key] = _Group(key, chain.prefix, M.resolve_chain_target(chain, root, spec))
        groups[key].chains.append(chain)
    return list(groups.values())


class _Builder:
    def __init__(self, spec: M.MethodSpec, config: GenConfig) -> None:
        self.spec = spec
        self.config = config

    def default(self, t: M.SemanticType, depth: int = 0) -> ValueTree:
        if isinstance(t, M.Numeric):
            return NumLeaf(0, t.kind)
        if isinstance(t, M.Str):
            return StrLeaf("")
        if isinstance(t, M.Ref):
            if depth >= DEFAULT_DEPTH_CAP:
                return NullLeaf()
            return ObjectNode(
                t.class_name, {f.name: self.default(f.type, depth + 1) for f in self.spec.fields_of(t.class_name)}
            )
        if isinstance(t, M.Array):
            return ArrayNode(0, {}, self.default(t.element, depth + 1))
        raise TypeError(t)

    def random(self, t: M.SemanticType, rng: SeededRng, depth: int = 0) -> ValueTree:
        if isinstance(t, M.Numeric):
            lo, hi = M.NUMERIC_BOUNDS[t.kind]
            if t.kind.integral:
                return NumLeaf(rng.randint(lo, hi), t.kind)
            x = rng.uniform_open(lo, hi) or 0.0
            return NumLeaf(_to_float32(x) if t.kind is M.NumKind.FLOAT else x, t.kind)
        if isinstance(t, M.Str):
            return StrLeaf(rxgen.generate_match(_ANY_SHORT, rng))
        if isinstance(t, M.Ref):
            if depth >= DEFAULT_DEPTH_CAP:
                return NullLeaf()
            return ObjectNode(
                t.class_name,
                {f.name: self.random(f.type, rng, depth + 1) for f in self.spec.fields_of(t.class_name)},
            )
        if isinstance(t, M.Array):
            n = rng.below(self.config.default_array_len + 1)
            elements = {i: self.random(t.element, rng, depth + 1) for i in range(1, n + 1)}
            return ArrayNode(n, elements, self.default(t.element, depth + 1))
        raise TypeError(t)

    def install(self, node: ValueTree, steps, t: M.SemanticType, fn, depth: int = 0) -> ValueTree:
        """Rebuild ``node`` with ``fn`` applied at the end of the navigational ``steps``."""
        if not steps:
            return fn(node)
        item, rest = steps[0], steps[1:]
        if isinstance(item, M.Field):
            if not isinstance(node, ObjectNode):
                node = self.default(t, depth)
                if not isinstance(node, ObjectNode):
                    node = ObjectNode(t.class_name, {})
            decl = self.spec.lookup_field(node.class_name, item.name)
            ftype = decl.type if decl is not None else M.navigate(item, t, self.spec)
            fields = dict(node.fields)
            child = fields.get(item.name)
            if child is None:
                child = self.default(ftype, depth + 1)
            fields[item.name] = self.install(child, rest, ftype, fn, depth + 1)
            return ObjectNode(node.class_name, fields)
        if isinstance(item, M.Element):
            if not isinstance(node, ArrayNode):
                node = self.default(t, depth)
            length = node.length
            if length < item.index:
                length = max(item.index, self.config.default_array_len)
            elements = dict(node.elements)
            child = elements.get(item.index, node.default)
            elements[item.index] = self.install(child, rest, t.element, fn, depth + 1)
            return ArrayNode(length, elements, node.default, node.length_classification)
        if isinstance(item, M.SubClass):
            sub = self.spec.resolve_subclass(t.class_name, item.class_name) or item.class_name
            if not isinstance(node, ObjectNode) or node.class_name != sub:
                fresh = self.default(M.Ref(sub), depth)
                if isinstance(node, ObjectNode) and isinstance(fresh, ObjectNode):
                    merged = dict(fresh.fields)
                    merged.update({k: v for k, v in node.fields.items() if k in merged})
                    fresh = ObjectNode(sub, merged)
                node = fresh
            return self.install(node, rest, M.Ref(sub), fn, depth)
        raise TypeError(item)


_ANY_SHORT = rxgen.parse_regex(r"[ -~]{0,12}")


@dataclass(frozen=True)
class Candidate:
    value: ValueTree
    classification: Classification
    group: Optional[int] = None  # index of the chain group the candidate varies

    def to_json(self, path: str) -> dict:
        out = {"classification": self.classification.value, "value": to_json(self.value, path)}
        if self.group is not None:
            out["group"] = self.group
        return out


@dataclass(frozen=True)
class CandidateSet:
    param: str
    values: Tuple[Candidate, ...]
    seed: int

    def trees(self) -> List[ValueTree]:
        return [c.value for c in self.values]

    def to_json(self) -> dict:
        return {"param": self.param, "seed": self.seed, "values": [c.to_json(self.param) for c in self.values]}


def _nullable_keys(groups: Sequence[_Group]) -> set:
    return {g.key for g in groups if g.nullable}


def tagged_class(tree: ValueTree, groups: Sequence[_Group], spec: M.MethodSpec) -> Classification:
    """Combine the classification tags found at each group's path."""
    nullable = _nullable_keys(groups)
    found = []
    for g in groups:
        node: Optional[ValueTree] = tree
        status = "ok"
        walked: list = []
        for item in g.prefix:
            if isinstance(node, NullLeaf):
                status = "vacuous" if tuple(walked) in nullable else "missing"
                break
            node = _step(node, item, spec)
            if node is None:
                status = "missing"
                break
            walked.append(_key_part(item))
        if status == "vacuous":
            continue
        constrained = g.is_length or g.is_numeric or g.is_string
        if status == "missing":
            if constrained or g.nullable:
                found.append(OUT)
            continue
        if isinstance(node, NullLeaf):
            if g.nullable:
                found.append(IN)
            elif constrained:
                found.append(OUT)
            continue
        if g.is_length:
            found.append(node.length_classification if isinstance(node, ArrayNode) else OUT)
        elif g.is_numeric or g.is_string:
            found.append(node.classification if isinstance(node, (NumLeaf, StrLeaf)) else OUT)
        elif g.nullable:
            found.append(IN)
    return combine(found)


def _key_part(item: M.Annotation):
    return M.path_key(M.ConstraintChain((item,)))[0]


def _step(node: ValueTree, item: M.Annotation, spec: M.MethodSpec) -> Optional[ValueTree]:
    if isinstance(item, M.Field):
        return node.fields.get(item.name) if isinstance(node, ObjectNode) else None
    if isinstance(item, M.Element):
        return node.element(item.index) if isinstance(node, ArrayNode) else None
    if isinstance(item, M.SubClass):
        if isinstance(node, ObjectNode):
            name = item.class_name
            if node.class_name == name or node.class_name.rsplit(".", 1)[-1] == name.rsplit(".", 1)[-1]:
                return node
            if any(
                spec.is_subclass(node.class_name, c) and c.rsplit(".", 1)[-1] == name.rsplit(".", 1)[-1]
                for c in spec.class_model
            ):
                return node
        return None
    raise TypeError(item)


def _tree_key(tree: ValueTree) -> str:
    return json.dumps(to_json(tree, ""), sort_keys=True)


def _leaf_candidates(g: _Group, rng: SeededRng, config: GenConfig, hints) -> list:
    """(kind, payload) pairs: ("leaf", ValueTree) or ("length", NumLeaf)."""
    out: list = []
    if g.is_numeric:
        b = build_bucketing(g.chains, g.target.kind, hints if g.key == () else ())
        out += [("leaf", leaf) for leaf in generate_numeric(b, rng, config.per_bucket)]
    elif g.is_length:
        b = build_bucketing(g.chains, None, hints if g.key == () else ())
        out += [("length", leaf) for leaf in generate_numeric(b, rng, config.per_bucket)]
    elif g.is_string:
        patterns = [p.regex for p in g.leaves(M.Pattern)]
        leaves = generate_string(patterns, rng, config.per_pattern, config.max_unbounded_reps, config.candidates)
        out += [("leaf", leaf) for leaf in leaves]
    if g.nullable:
        out.append(("leaf", NullLeaf(IN)))
    return out


def _preferred(cands: list, required_length: int):
    """Leaf candidate used in the baseline: the first In value, else the first On value."""
    for wanted in (IN, ON):
        for kind, leaf in cands:
            if leaf.classification is not wanted or isinstance(leaf, NullLeaf):
                continue
            if kind == "length" and leaf.value < required_length:
                continue
            return kind, leaf
    return None


def _applier(kind: str, leaf):
    if kind == "length":
        length = leaf.value

        def set_length(node):
            elements = {i: v for i, v in node.elements.items() if i <= length}
            return ArrayNode(length, elements, node.default, leaf.classification)

        return set_length
    return lambda node: leaf


def generate_slot(
    chains: Sequence[M.ConstraintChain],
    root: M.SemanticType,
    spec: M.MethodSpec,
    rng: SeededRng,
    config: GenConfig = GenConfig(),
    hints: Sequence[M.Number] = (),
) -> List[Candidate]:
    builder = _Builder(spec, config)
    if not chains:
        values = [builder.default(root), builder.random(root, rng)]
        return [Candidate(v, UNCONSTRAINED) for v in values]

    groups = group_chains(chains, root, spec)
    per_group = [_leaf_candidates(g, rng, config, hints) for g in groups]

    required: Dict[tuple, int] = {}
    for g in groups:
        walked: list = []
        for item in g.prefix:
            if isinstance(item, M.Element):
                key = tuple(walked)
                required[key] = max(required.get(key, 0), item.index)
            walked.append(_key_part(item))

    # Baseline: every group at a preferred value; length groups last so they see all elements.
    baseline = builder.default(root)
    order = sorted(range(len(groups)), key=lambda i: groups[i].is_length)
    for i in order:
        g = groups[i]
        pick = _preferred(per_group[i], required.get(g.key, 0))
        if pick is not None:
            baseline = builder.install(baseline, g.prefix, root, _applier(*pick))
        elif g.prefix:
            baseline = builder.install(baseline, g.prefix, root, lambda node: node)

    out: List[Candidate] = []
    seen = set()

    def add(tree: ValueTree, gi: Optional[int]) -> None:
        k = _tree_key(tree)
        if k in seen:
            return
        seen.add(k)
        out.append(Candidate(tree, tagged_class(tree, groups, spec), gi))

    for gi, (g, cands) in enumerate(zip(groups, per_group)):
        for kind, leaf in cands:
            add(builder.install(baseline, g.prefix, root, _applier(kind, leaf)), gi)
        if not (g.is_numeric or g.is_length or g.is_string):
            add(baseline, gi)
    if not out:
        add(baseline, None)
    return out


def generate_reference(
    chains: Sequence[M.ConstraintChain],
    root: M.SemanticType,
    spec: M.MethodSpec,
    rng: SeededRng,
    config: GenConfig = GenConfig(),
) -> List[ValueTree]:
    """Object/array values, one per leaf candidate of each chain."""
    if not isinstance(root, (M.Ref, M.Array)):
        raise TypeError(f"expected a reference or array root, got {root}")
    return [c.value for c in generate_slot(chains, root, spec, rng, config)]


def param_rng(seed: int, ordinal: int) -> SeededRng:
    return SeededRng(seed ^ splitmix64(ordinal))


def generate_for_method(
    spec: M.MethodSpec,
    seed: int = 0,
    config: GenConfig = GenConfig(),
    allow_invalid: bool = False,
) -> Dict[str, CandidateSet]:
    """Candidate sets per parameter. Raises SpecInvalid unless ``allow_invalid``."""
    report = validate(spec)
    if not report.valid and not allow_invalid:
        raise SpecInvalid(report)
    effective = report.effective_spec
    out: Dict[str, CandidateSet] = {}
    for ordinal, p in enumerate(effective.params):
        rng = param_rng(seed, ordinal)
        cands = generate_slot(p.chains, p.type, effective, rng, config, p.hints)
        if config.only_valid:
            cands = [c for c in cands if c.classification is not OUT]
        out[p.name] = CandidateSet(p.name, tuple(cands), seed)
    return out


def combine_cases(sizes: Sequence[int], max_cases: int) -> List[Tuple[int, ...]]:
    """Pick argument index tuples from the Cartesian product.

    The first max(sizes) cases walk all lists in lock step (case k uses index
    k mod n for a list of n), so every candidate appears at least once; the
    rest follow in lexicographic order. The list stops at ``max_cases``.
    """
    if any(n == 0 for n in sizes):
        return []
    if not sizes:
        return [()]
    out: List[Tuple[int, ...]] = []
    seen = set()
    for k in range(max(sizes)):
        case = tuple(k % n for n in sizes)
        if case not in seen:
            seen.add(case)
            out.append(case)
        if len(out) >= max_cases:
            return out
    for case in itertools.product(*(range(n) for n in sizes)):
        if len(out) >= max_cases:
            break
        if case not in seen:
            seen.add(case)
            out.append(case)
    return out
