"""Regex subset: parser, full-match checker, and matching/non-matching string generation."""

from .ast import (
    Alternation,
    AnchorEnd,
    AnchorStart,
    CharClass,
    Concat,
    Dot,
    Group,
    Literal,
    PredefClass,
    Repeat,
)
from .generate import builtin_candidates, generate_match, generate_nonmatch
from .match import fullmatch
from .parser import RegexError, RegexSyntaxError, RegexUnsupported, parse_regex

__all__ = [
    "Alternation",
    "AnchorEnd",
    "AnchorStart",
    "CharClass",
    "Concat",
    "Dot",
    "Group",
    "Literal",
    "PredefClass",
    "Repeat",
    "RegexError",
    "RegexSyntaxError",
    "RegexUnsupported",
    "builtin_candidates",
    "fullmatch",
    "generate_match",
    "generate_nonmatch",
    "parse_regex",
]
