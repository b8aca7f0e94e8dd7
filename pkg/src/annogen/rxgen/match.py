"""Full-match check over the AST by propagating sets of string positions."""

from __future__ import annotations

from typing import FrozenSet, Set

from . import ast as A


def _step(node, s: str, positions: Set[int]) -> Set[int]:
    n = len(s)
    if isinstance(node, (A.Literal, A.Dot, A.CharClass, A.PredefClass)):
        if isinstance(node, A.Literal):
            return {p + 1 for p in positions if p < n and s[p] == node.char}
        members = A.char_set(node)
        return {p + 1 for p in positions if p < n and A.contains(members, ord(s[p]))}
    if isinstance(node, A.AnchorStart):
        return {p for p in positions if p == 0}
    if isinstance(node, A.AnchorEnd):
        return {p for p in positions if p == n}
    if isinstance(node, A.Group):
        return _step(node.child, s, positions)
    if isinstance(node, A.Concat):
        for kid in node.children:
            if not positions:
                break
            positions = _step(kid, s, positions)
        return positions
    if isinstance(node, A.Alternation):
        out: Set[int] = set()
        for kid in node.children:
            out |= _step(kid, s, positions)
        return out
    if isinstance(node, A.Repeat):
        current = set(positions)
        for _ in range(node.min):
            if not current:
                return current
            current = _step(node.child, s, current)
        reached = set(current)
        frontier = current
        count = node.min
        while frontier and (node.max is None or count < node.max):
            nxt = _step(node.child, s, frontier)
            if node.max is None:
                # Positions already seen cannot lead anywhere new.
                frontier = nxt - reached
            else:
                frontier = nxt
            reached |= nxt
            count += 1
        return reached
    raise TypeError(node)


def end_positions(node, s: str, start: int = 0) -> FrozenSet[int]:
    return frozenset(_step(node, s, {start}))


def fullmatch(node, s: str) -> bool:
    return len(s) in _step(node, s, {0})
