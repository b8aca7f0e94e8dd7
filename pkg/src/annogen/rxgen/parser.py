"""Recursive-descent parser for the supported regex subset.

Supported: literals and escapes, ``.``, classes with ranges and negation,
``\\d \\w \\s`` and their negations (ASCII semantics), ``* + ?`` and braces
(lazy suffix accepted and ignored), ``|``, capturing/non-capturing/named groups,
``^ $ \\A \\Z`` at the edges of the pattern.
"""

from __future__ import annotations

from . import ast as A


class RegexError(ValueError):
    def __init__(self, message: str, pattern: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos} in {pattern!r}")
        self.message = message
        self.pattern = pattern
        self.pos = pos


class RegexSyntaxError(RegexError):
    pass


class RegexUnsupported(RegexError):
    def __init__(self, construct: str, pattern: str, pos: int) -> None:
        super().__init__(f"unsupported construct: {construct}", pattern, pos)
        self.construct = construct


_SIMPLE_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "v": "\v", "a": "\a", "0": "\0"}


class _Parser:
    def __init__(self, pattern: str) -> None:
        self.p = pattern
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.p[j] if j < len(self.p) else None

    def error(self, msg: str, pos=None):
        return RegexSyntaxError(msg, self.p, self.i if pos is None else pos)

    def unsupported(self, what: str, pos=None):
        return RegexUnsupported(what, self.p, self.i if pos is None else pos)

    # grammar

    def parse(self) -> A.Node:
        node = self.alternation()
        if self.i < len(self.p):
            if self.p[self.i] == ")":
                raise self.error("unbalanced parenthesis")
            raise self.error(f"unexpected {self.p[self.i]!r}")
        return node

    def alternation(self) -> A.Node:
        branches = [self.concat()]
        while self.peek() == "|":
            self.i += 1
            branches.append(self.concat())
        return branches[0] if len(branches) == 1 else A.Alternation(tuple(branches))

    def concat(self) -> A.Node:
        items = []
        while self.peek() is not None and self.peek() not in "|)":
            items.append(self.repeat())
        if len(items) == 1:
            return items[0]
        return A.Concat(tuple(items))

    def repeat(self) -> A.Node:
        start = self.i
        atom = self.atom()
        quantified = False
        while True:
            c = self.peek()
            bounds = None
            if c in ("*", "+", "?"):
                bounds = {"*": (0, None), "+": (1, None), "?": (0, 1)}[c]
                qpos = self.i
                self.i += 1
            elif c == "{":
                qpos = self.i
                bounds = self.braces()
                if bounds is None:
                    break
            else:
                break
            if quantified:
                raise self.error("multiple repeat", qpos)
            if isinstance(atom, (A.AnchorStart, A.AnchorEnd)):
                raise self.error("nothing to repeat", start)
            lo, hi = bounds
            if hi is not None and lo > hi:
                raise self.error("min repeat greater than max repeat", qpos)
            atom = A.Repeat(atom, lo, hi)
            quantified = True
            nxt = self.peek()
            if nxt == "?":
                self.i += 1  # lazy: same language under full match
            elif nxt == "+":
                raise self.unsupported("possessive quantifier")
        return atom

    def braces(self):
        """Parse {n}, {n,}, {,m}, {n,m}; None (position unchanged) if not a quantifier."""
        j = self.i + 1
        p = self.p
        k = j
        while k < len(p) and p[k].isdigit():
            k += 1
        lo_txt = p[j:k]
        if k < len(p) and p[k] == "}":
            if not lo_txt:
                return None
            self.i = k + 1
            n = int(lo_txt)
            return n, n
        if k >= len(p) or p[k] != ",":
            return None
        m = k + 1
        while m < len(p) and p[m].isdigit():
            m += 1
        hi_txt = p[k + 1 : m]
        if m >= len(p) or p[m] != "}":
            return None
        self.i = m + 1
        return (int(lo_txt) if lo_txt else 0), (int(hi_txt) if hi_txt else None)

    def atom(self) -> A.Node:
        c = self.peek()
        if c in ("*", "+", "?"):
            raise self.error("nothing to repeat")
        if c == "{" and self.braces_ahead():
            raise self.error("nothing to repeat")
        if c == "(":
            return self.group()
        if c == "[":
            return self.char_class()
        self.i += 1
        if c == ".":
            return A.Dot()
        if c == "^":
            return A.AnchorStart()
        if c == "$":
            return A.AnchorEnd()
        if c == "\\":
            return self.escape(in_class=False)
        return A.Literal(c)

    def braces_ahead(self) -> bool:
        saved = self.i
        try:
            return self.braces() is not None
        finally:
            self.i = saved

    def group(self) -> A.Node:
        start = self.i
        self.i += 1
        if self.peek() == "?":
            nxt = self.peek(1)
            if nxt == ":":
                self.i += 2
            elif nxt == "P" and self.peek(2) == "<":
                end = self.p.find(">", self.i + 3)
                name = self.p[self.i + 3 : end] if end != -1 else ""
                if end == -1 or not name.isidentifier():
                    raise self.error("bad group name")
                self.i = end + 1
            elif nxt == "P" and self.peek(2) == "=":
                raise self.unsupported("backreference")
            elif nxt in ("=", "!"):
                raise self.unsupported("lookahead")
            elif nxt == "<" and self.peek(2) in ("=", "!"):
                raise self.unsupported("lookbehind")
            elif nxt == "#":
                raise self.unsupported("comment group")
            elif nxt == "(":
                raise self.unsupported("conditional group")
            else:
                raise self.unsupported("inline flags")
        inner = self.alternation()
        if self.peek() != ")":
            raise self.error("missing ), unterminated subpattern", start)
        self.i += 1
        return A.Group(inner)

    def escape(self, in_class: bool):
        """Parse after a backslash. Returns a node (outside classes) or code-point ranges."""
        pos = self.i - 1
        c = self.peek()
        if c is None:
            raise self.error("bad escape (end of pattern)", pos)
        self.i += 1
        if c in A.PREDEF:
            return A.PredefClass(c) if not in_class else A.PREDEF[c]
        if c in _SIMPLE_ESCAPES:
            if c == "0" and self.peek() is not None and self.peek().isdigit():
                raise self.unsupported("octal escape", pos)
            return self._lit(_SIMPLE_ESCAPES[c], in_class)
        if c == "b" and in_class:
            return self._lit("\b", in_class)
        if c == "x":
            return self._lit(self.hex_digits(2, pos), in_class)
        if c == "u":
            return self._lit(self.hex_digits(4, pos), in_class)
        if c == "U":
            return self._lit(self.hex_digits(8, pos), in_class)
        if not in_class:
            if c == "A":
                return A.AnchorStart()
            if c == "Z":
                return A.AnchorEnd()
            if c in "bB":
                raise self.unsupported("word boundary", pos)
        if c.isdigit():
            raise self.unsupported("backreference", pos)
        if c.isascii() and c.isalnum():
            raise self.error(f"bad escape \\{c}", pos)
        return self._lit(c, in_class)

    @staticmethod
    def _lit(ch: str, in_class: bool):
        return ((ord(ch), ord(ch)),) if in_class else A.Literal(ch)

    def hex_digits(self, n: int, pos: int) -> str:
        txt = self.p[self.i : self.i + n]
        if len(txt) != n or any(ch not in "0123456789abcdefABCDEF" for ch in txt):
            raise self.error("incomplete hex escape", pos)
        self.i += n
        cp = int(txt, 16)
        if cp > A.MAX_CODEPOINT:
            raise self.error("bad escape", pos)
        return chr(cp)

    def char_class(self) -> A.CharClass:
        start = self.i
        self.i += 1
        negated = False
        if self.peek() == "^":
            negated = True
            self.i += 1
        ranges: list = []
        listed: list = []
        first = True
        while True:
            c = self.peek()
            if c is None:
                raise self.error("unterminated character set", start)
            if c == "]" and not first:
                self.i += 1
                break
            first = False
            lo = self.class_atom()
            if self.peek() == "-" and self.peek(1) not in (None, "]"):
                dash = self.i
                self.i += 1
                hi = self.class_atom()
                if len(lo) != 1 or len(hi) != 1 or lo[0][0] != lo[0][1] or hi[0][0] != hi[0][1]:
                    raise self.error("bad character range", dash)
                if lo[0][0] > hi[0][0]:
                    raise self.error("bad character range", dash)
                ranges.append((lo[0][0], hi[0][0]))
            else:
                ranges.extend(lo)
                if len(lo) == 1 and lo[0][0] == lo[0][1] and lo[0][0] > 0x7F:
                    listed.append(lo[0])
        node = A.CharClass(A.normalize(ranges), negated, A.normalize(listed))
        if not A.sampling_set(node):
            raise self.unsupported("character class with no generatable members", start)
        return node

    def class_atom(self):
        c = self.peek()
        self.i += 1
        if c == "\\":
            return self.escape(in_class=True)
        return ((ord(c), ord(c)),)


def _check_anchors(node, left: bool, right: bool, pattern: str) -> None:
    """Anchors are only allowed where they act as full-match delimiters."""
    if isinstance(node, A.AnchorStart):
        if not left:
            raise RegexUnsupported("anchor ^ inside the pattern", pattern, 0)
    elif isinstance(node, A.AnchorEnd):
        if not right:
            raise RegexUnsupported("anchor $ inside the pattern", pattern, 0)
    elif isinstance(node, A.Concat):
        kids = node.children
        for i, kid in enumerate(kids):
            kl = left and all(isinstance(k, A.AnchorStart) for k in kids[:i])
            kr = right and all(isinstance(k, A.AnchorEnd) for k in kids[i + 1 :])
            _check_anchors(kid, kl, kr, pattern)
    elif isinstance(node, A.Alternation):
        for kid in node.children:
            _check_anchors(kid, left, right, pattern)
    elif isinstance(node, A.Group):
        _check_anchors(node.child, left, right, pattern)
    elif isinstance(node, A.Repeat):
        single = node.max is not None and node.max <= 1
        _check_anchors(node.child, left and single, right and single, pattern)


def parse_regex(pattern: str) -> A.Node:
    """Parse ``pattern`` into an AST; raises RegexSyntaxError or RegexUnsupported."""
    node = _Parser(pattern).parse()
    _check_anchors(node, True, True, pattern)
    return node
