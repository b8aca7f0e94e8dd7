"""String generation from a regex AST, driven by a SeededRng."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Iterable, List, Optional, Sequence

from ..rng import SeededRng
from . import ast as A
from .match import fullmatch

DEFAULT_MAX_UNBOUNDED_REPS = 16
NONMATCH_RANDOM_ATTEMPTS = 64


def _emit(node, rng: SeededRng, cap: int, out: List[str]) -> None:
    if isinstance(node, A.Literal):
        out.append(node.char)
    elif isinstance(node, (A.Dot, A.CharClass, A.PredefClass)):
        pool = A.sampling_set(node)
        out.append(chr(A.nth(pool, rng.below(A.size(pool)))))
    elif isinstance(node, (A.AnchorStart, A.AnchorEnd)):
        pass
    elif isinstance(node, A.Group):
        _emit(node.child, rng, cap, out)
    elif isinstance(node, A.Concat):
        for kid in node.children:
            _emit(kid, rng, cap, out)
    elif isinstance(node, A.Alternation):
        _emit(rng.choice(node.children), rng, cap, out)
    elif isinstance(node, A.Repeat):
        if node.max is None:
            extra = 0
            while extra < cap and rng.coin():
                extra += 1
            count = node.min + extra
        else:
            count = rng.randint(node.min, node.max)
        for _ in range(count):
            _emit(node.child, rng, cap, out)
    else:
        raise TypeError(node)


def generate_match(ast, rng: SeededRng, max_unbounded_reps: int = DEFAULT_MAX_UNBOUNDED_REPS) -> str:
    """A string that fully matches ``ast``.

    Unbounded repetition adds a geometric(1/2) number of extra copies, capped at
    ``max_unbounded_reps``.
    """
    if max_unbounded_reps < 0:
        raise ValueError("max_unbounded_reps must be >= 0")
    out: List[str] = []
    _emit(ast, rng, max_unbounded_reps, out)
    return "".join(out)


@lru_cache(maxsize=1)
def _load_candidates() -> tuple:
    text = resources.files("annogen.data").joinpath("candidates.txt").read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        out.append(json.loads(line))
    return tuple(out)


def builtin_candidates() -> List[str]:
    """Adversarial strings: empty, URL, XML, JSON, escapes, very long, ..."""
    return list(_load_candidates())


def _random_string(rng: SeededRng, max_len: int = 16) -> str:
    n = rng.below(max_len + 1)
    return "".join(chr(A.nth(A.UNIVERSE, rng.below(A.size(A.UNIVERSE)))) for _ in range(n))


def _random_tries(ast, rng: SeededRng) -> Iterable[str]:
    for k in range(NONMATCH_RANDOM_ATTEMPTS):
        if k % 2 == 0:
            yield _random_string(rng)
        else:
            # Perturb a matching string: drop, duplicate or append a character.
            s = generate_match(ast, rng, 4)
            op = rng.below(3)
            if op == 0 and s:
                i = rng.below(len(s))
                yield s[:i] + s[i + 1 :]
            elif op == 1 and s:
                i = rng.below(len(s))
                yield s[:i] + s[i] + s[i:]
            else:
                yield s + _random_string(rng, 2) + "!"


def generate_nonmatch(ast, rng: SeededRng, candidates: Optional[Sequence[str]] = None) -> Optional[str]:
    """First candidate that does not fully match ``ast``, then random tries, else None."""
    if candidates is None:
        candidates = builtin_candidates()
    for c in candidates:
        if not fullmatch(ast, c):
            return c
    for s in _random_tries(ast, rng):
        if not fullmatch(ast, s):
            return s
    return None
