"""Regex AST and character-set helpers."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Tuple, Union

MAX_CODEPOINT = 0x10FFFF

Ranges = Tuple[Tuple[int, int], ...]


def normalize(ranges) -> Ranges:
    out: list = []
    for lo, hi in sorted(ranges):
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


def complement(ranges: Ranges) -> Ranges:
    out = []
    nxt = 0
    for lo, hi in ranges:
        if lo > nxt:
            out.append((nxt, lo - 1))
        nxt = hi + 1
    if nxt <= MAX_CODEPOINT:
        out.append((nxt, MAX_CODEPOINT))
    return tuple(out)


def intersect(a: Ranges, b: Ranges) -> Ranges:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def contains(ranges: Ranges, cp: int) -> bool:
    i = bisect_right(ranges, (cp, MAX_CODEPOINT + 1)) - 1
    return i >= 0 and ranges[i][0] <= cp <= ranges[i][1]


def size(ranges: Ranges) -> int:
    return sum(hi - lo + 1 for lo, hi in ranges)


def nth(ranges: Ranges, k: int) -> int:
    for lo, hi in ranges:
        n = hi - lo + 1
        if k < n:
            return lo + k
        k -= n
    raise IndexError(k)


# ASCII semantics for the predefined classes.
DIGIT: Ranges = ((0x30, 0x39),)
WORD: Ranges = normalize([(0x30, 0x39), (0x41, 0x5A), (0x5F, 0x5F), (0x61, 0x7A)])
SPACE: Ranges = normalize([(0x09, 0x0D), (0x20, 0x20)])
NEWLINE: Ranges = ((0x0A, 0x0A),)

PREDEF: dict = {
    "d": DIGIT,
    "D": complement(DIGIT),
    "w": WORD,
    "W": complement(WORD),
    "s": SPACE,
    "S": complement(SPACE),
}

# Characters generated output is drawn from: printable ASCII plus tab and newline.
UNIVERSE: Ranges = normalize([(0x20, 0x7E), (0x09, 0x0A)])


@dataclass(frozen=True)
class Literal:
    char: str


@dataclass(frozen=True)
class CharClass:
    ranges: Ranges
    negated: bool = False
    # Individually listed members outside ASCII; these stay eligible for sampling.
    listed: Ranges = ()

    def __post_init__(self) -> None:
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"bad character range {lo:#x}-{hi:#x}")

    @property
    def members(self) -> Ranges:
        return complement(self.ranges) if self.negated else self.ranges


@dataclass(frozen=True)
class Dot:
    pass


@dataclass(frozen=True)
class PredefClass:
    name: str  # one of d D w W s S

    @property
    def members(self) -> Ranges:
        return PREDEF[self.name]


@dataclass(frozen=True)
class Concat:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Alternation:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Repeat:
    child: "Node"
    min: int
    max: Optional[int]  # None is unbounded

    def __post_init__(self) -> None:
        if self.max is not None and self.min > self.max:
            raise ValueError("min repeat greater than max repeat")


@dataclass(frozen=True)
class Group:
    child: "Node"


@dataclass(frozen=True)
class AnchorStart:
    pass


@dataclass(frozen=True)
class AnchorEnd:
    pass


Node = Union[Literal, CharClass, Dot, PredefClass, Concat, Alternation, Repeat, Group, AnchorStart, AnchorEnd]

EMPTY = Concat(())


def char_set(node) -> Ranges:
    """Code points a single-character node accepts."""
    if isinstance(node, Literal):
        cp = ord(node.char)
        return ((cp, cp),)
    if isinstance(node, Dot):
        return complement(NEWLINE)
    if isinstance(node, (CharClass, PredefClass)):
        return node.members
    raise TypeError(node)


def sampling_set(node) -> Ranges:
    """Code points generation draws from for a single-character node."""
    members = char_set(node)
    narrowed = intersect(members, UNIVERSE)
    if isinstance(node, CharClass):
        extra = intersect(members, node.listed)
        narrowed = normalize(narrowed + extra)
        if not narrowed and not node.negated:
            narrowed = members
    return narrowed
