"""Parser for the annotated-signature DSL.

A document holds class declarations and method signatures::

    class Person { int age; }
    class Student extends Person { }
    int Ticket.discount(@Range(min=0, max=150) int age hints(12, 60))
        returns @Range(min=80, max=160);

The grammar is written out in ``docs/grammar.md``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import model as M
from .aliases import AliasTable, AnnotationUse, ClassLiteral, Ignore, normalize_annotation
from .diagnostics import ParseDiagnostic, error, warning

PRIMITIVES = {
    "byte": M.NumKind.BYTE,
    "short": M.NumKind.SHORT,
    "int": M.NumKind.INT,
    "long": M.NumKind.LONG,
    "char": M.NumKind.CHAR,
    "float": M.NumKind.FLOAT,
    "double": M.NumKind.DOUBLE,
    "Byte": M.NumKind.BYTE,
    "Short": M.NumKind.SHORT,
    "Integer": M.NumKind.INT,
    "Long": M.NumKind.LONG,
    "Character": M.NumKind.CHAR,
    "Float": M.NumKind.FLOAT,
    "Double": M.NumKind.DOUBLE,
}
STRING_TYPES = {"String", "java.lang.String", "CharSequence", "java.lang.CharSequence"}
BOOLEAN_TYPES = {"boolean", "Boolean", "java.lang.Boolean"}
MODIFIERS = {"public", "private", "protected", "static", "final", "abstract", "synchronized", "native"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<number>(?:0[xX][0-9a-fA-F]+|\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)[lLfFdD]?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<punct>[@(),={}\[\].;<>-])
    """,
    re.VERBOSE | re.DOTALL,
)

_JAVA_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    @property
    def origin(self) -> M.Origin:
        return M.Origin(self.line, self.column)


class DslSyntaxError(Exception):
    def __init__(self, message: str, origin: M.Origin) -> None:
        super().__init__(message)
        self.message = message
        self.origin = origin


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}", M.Origin(line, pos - line_start + 1))
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- raw syntax tree --------------------------------------------------------


@dataclass
class RawType:
    name: str
    dims: int
    origin: M.Origin


@dataclass
class RawField:
    annotations: List[AnnotationUse]
    type: RawType
    name: str


@dataclass
class RawClass:
    name: str
    parent: Optional[str]
    fields: List[RawField]
    origin: M.Origin


@dataclass
class RawParam:
    annotations: List[AnnotationUse]
    type: RawType
    name: str
    hints: List[M.Number]
    origin: M.Origin


@dataclass
class RawMethod:
    return_type: RawType
    owner: Optional[str]
    name: str
    params: List[RawParam]
    return_annotations: List[AnnotationUse]
    origin: M.Origin


@dataclass
class RawDocument:
    classes: List[RawClass] = field(default_factory=list)
    methods: List[RawMethod] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: List[Token], diags: List[ParseDiagnostic]) -> None:
        self.toks = tokens
        self.i = 0
        self.diags = diags

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise DslSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.origin)
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise DslSyntaxError(f"expected {what}, found {self.tok.text or 'end of input'!r}", self.tok.origin)
        return self.advance()

    def qname(self) -> str:
        parts = [self.ident().text]
        while self.at(".") and self.peek().kind == "ident" and self.peek().text != "class":
            self.advance()
            parts.append(self.ident().text)
        return ".".join(parts)

    # document

    def document(self) -> RawDocument:
        doc = RawDocument()
        while self.tok.kind != "eof":
            if self.at(";"):
                self.advance()
                continue
            leading = self.annotations()
            start = self.i
            while self.tok.kind == "ident" and self.tok.text in MODIFIERS:
                self.advance()
            if self.at("class"):
                if leading:
                    raise DslSyntaxError("annotations are not allowed on classes", leading[0].origin)
                doc.classes.append(self.class_decl())
            else:
                self.i = start
                method = self.method()
                # Annotations written before the method constrain its return value.
                method.return_annotations[:0] = leading
                doc.methods.append(method)
        return doc

    def class_decl(self) -> RawClass:
        origin = self.expect("class").origin
        name = self.qname()
        parent = None
        if self.at("extends"):
            self.advance()
            parent = self.qname()
        self.expect("{")
        fields = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise DslSyntaxError("unterminated class body", origin)
            annotations = self.annotations()
            while self.tok.kind == "ident" and self.tok.text in MODIFIERS:
                self.advance()
            ftype = self.type_ref()
            fname = self.ident("field name").text
            self.expect(";")
            fields.append(RawField(annotations, ftype, fname))
        self.expect("}")
        return RawClass(name, parent, fields, origin)

    def method(self) -> RawMethod:
        while self.tok.kind == "ident" and self.tok.text in MODIFIERS:
            self.advance()
        origin = self.tok.origin
        rtype = self.type_ref()
        name = self.qname()
        owner = None
        if "." in name:
            owner, name = name.rsplit(".", 1)
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        ret_annotations: List[AnnotationUse] = []
        if self.at("returns"):
            self.advance()
            ret_annotations = self.annotations()
        if self.at(";"):
            self.advance()
        return RawMethod(rtype, owner, name, params, ret_annotations, origin)

    def param(self) -> RawParam:
        origin = self.tok.origin
        annotations = self.annotations()
        if self.at("final"):
            self.advance()
        ptype = self.type_ref()
        name = self.ident("parameter name").text
        hints: List[M.Number] = []
        if self.at("hints"):
            self.advance()
            self.expect("(")
            if not self.at(")"):
                hints.append(self.number_value())
                while self.at(","):
                    self.advance()
                    hints.append(self.number_value())
            self.expect(")")
        return RawParam(annotations, ptype, name, hints, origin)

    def type_ref(self) -> RawType:
        origin = self.tok.origin
        name = self.qname()
        if self.at("<"):
            raise DslSyntaxError("generic types are not supported", self.tok.origin)
        dims = 0
        while self.at("["):
            self.advance()
            self.expect("]")
            dims += 1
        return RawType(name, dims, origin)

    # annotations

    def annotations(self) -> List[AnnotationUse]:
        out = []
        while self.at("@"):
            out.append(self.annotation())
        return out

    def annotation(self) -> AnnotationUse:
        origin = self.expect("@").origin
        name = self.qname()
        attrs: Dict[str, object] = {}
        if self.at("("):
            self.advance()
            if not self.at(")"):
                if self.tok.kind == "ident" and self.peek().text == "=":
                    while True:
                        key = self.ident("attribute name").text
                        self.expect("=")
                        if key.lower() in attrs:
                            raise DslSyntaxError(f"duplicate attribute {key!r}", self.tok.origin)
                        attrs[key.lower()] = self.value()
                        if not self.at(","):
                            break
                        self.advance()
                else:
                    attrs["value"] = self.value()
            self.expect(")")
        return AnnotationUse(name, attrs, origin)

    def number_value(self):
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "number":
            raise DslSyntaxError(f"expected a number, found {self.tok.text!r}", self.tok.origin)
        v = _parse_number(self.advance().text)
        return -v if neg else v

    def value(self):
        t = self.tok
        if t.kind == "number" or self.at("-"):
            return self.number_value()
        if t.kind == "string":
            self.advance()
            return self.string_value(t)
        if self.at("{"):
            self.advance()
            items = []
            while not self.at("}"):
                items.append(self.value())
                if not self.at(","):
                    break
                self.advance()
            self.expect("}")
            return items
        if self.at("@"):
            return self.annotation()
        if t.kind == "ident":
            if t.text in ("true", "false"):
                self.advance()
                return t.text == "true"
            name = self.qname()
            if self.at(".") and self.peek().text == "class":
                self.advance()
                self.advance()
                return ClassLiteral(name)
            return name
        raise DslSyntaxError(f"expected an attribute value, found {t.text or 'end of input'!r}", t.origin)

    def string_value(self, t: Token) -> str:
        body = t.text[1:-1]
        out = []
        i = 0
        while i < len(body):
            c = body[i]
            if c != "\\":
                out.append(c)
                i += 1
                continue
            nxt = body[i + 1]
            if nxt in _JAVA_ESCAPES:
                out.append(_JAVA_ESCAPES[nxt])
                i += 2
            elif nxt == "u" and re.fullmatch(r"[0-9a-fA-F]{4}", body[i + 2 : i + 6]):
                out.append(chr(int(body[i + 2 : i + 6], 16)))
                i += 6
            else:
                # Not a Java escape: keep it, so regexes written with single backslashes survive.
                self.diags.append(
                    warning("NonJavaEscape", f"'\\{nxt}' is not a Java string escape; kept verbatim", t.origin)
                )
                out.append(c + nxt)
                i += 2
        return "".join(out)


def _parse_number(text: str) -> M.Number:
    body = text
    if body[-1] in "lLfFdD" and not body.lower().startswith("0x"):
        body = body[:-1]
    elif body[-1] in "lL":
        body = body[:-1]
    if body.lower().startswith("0x"):
        return int(body, 16)
    if any(c in body for c in ".eE"):
        return float(body)
    return int(body)


# -- building MethodSpecs ---------------------------------------------------


class _Builder:
    def __init__(self, doc: RawDocument, table: Optional[AliasTable], diags: List[ParseDiagnostic]) -> None:
        self.doc = doc
        self.table = table
        self.diags = diags
        self.failed = False

    def err(self, code: str, message: str, origin: M.Origin) -> None:
        self.diags.append(error(code, message, origin))
        self.failed = True

    def semantic_type(self, raw: RawType, allow_void: bool = False) -> Optional[M.SemanticType]:
        if raw.name == "void" and raw.dims == 0:
            if allow_void:
                return None
            self.err("UnsupportedType", "void is only allowed as a return type", raw.origin)
            return M.Ref("void")
        if raw.name in BOOLEAN_TYPES:
            self.err("UnsupportedType", "boolean values cannot be constrained and are not supported", raw.origin)
            return M.Ref(raw.name)
        if raw.dims > 1:
            self.err("UnsupportedType", "multi-dimensional arrays are not supported", raw.origin)
        if raw.name in PRIMITIVES:
            base: M.SemanticType = M.Numeric(PRIMITIVES[raw.name])
        elif raw.name in STRING_TYPES:
            base = M.Str()
        else:
            base = M.Ref(raw.name)
        return M.Array(base) if raw.dims else base

    def class_model(self):
        classes: Dict[str, Tuple[M.FieldDecl, ...]] = {}
        subclasses: Dict[str, List[str]] = {}
        # Fields first without chains so chain navigation can see every class.
        for rc in self.doc.classes:
            if rc.name in classes:
                self.err("DuplicateClass", f"class {rc.name} declared twice", rc.origin)
            classes[rc.name] = tuple(M.FieldDecl(f.name, self.semantic_type(f.type)) for f in rc.fields)
            if rc.parent:
                subclasses.setdefault(rc.parent, []).append(rc.name)
        sub_model = {k: tuple(v) for k, v in subclasses.items()}
        probe = M.MethodSpec("_", class_model=classes, subclass_model=sub_model)
        for rc in self.doc.classes:
            decls = []
            for f, decl in zip(rc.fields, classes[rc.name]):
                chains = self.chains(f.annotations, decl.type, probe)
                decls.append(M.FieldDecl(decl.name, decl.type, chains))
            classes[rc.name] = tuple(decls)
        return classes, sub_model

    def chains(self, uses: List[AnnotationUse], root: M.SemanticType, probe: M.MethodSpec):
        chains: List[List[M.Annotation]] = []
        current: List[M.Annotation] = []
        seen_leaf = False
        target: Optional[M.SemanticType] = root
        for use in uses:
            got, d = normalize_annotation(use.name, use.attributes, target, use.origin, self.table)
            self.diags.extend(d)
            if any(x.is_error for x in d):
                self.failed = True
            if isinstance(got, Ignore):
                continue
            for inst in got:
                if inst.navigational:
                    if seen_leaf:
                        chains.append(current)
                        current, seen_leaf, target = [], False, root
                    current.append(inst)
                    if target is not None:
                        try:
                            target = M.navigate(inst, target, probe)
                        except M.ChainResolutionError:
                            target = None  # reported by the validator
                else:
                    if isinstance(inst, M.Nullable) and any(isinstance(x, M.Nullable) for x in current):
                        self.diags.append(warning("DuplicateNullable", "@Nullable repeated; ignored", inst.origin))
                        continue
                    current.append(inst)
                    seen_leaf = True
        if current:
            chains.append(current)
        return tuple(M.ConstraintChain(tuple(c)) for c in chains)

    def build(self) -> List[Optional[M.MethodSpec]]:
        classes, sub_model = self.class_model()
        class_failed = self.failed
        probe = M.MethodSpec("_", class_model=classes, subclass_model=sub_model)
        out: List[Optional[M.MethodSpec]] = []
        for rm in self.doc.methods:
            self.failed = class_failed
            rtype = self.semantic_type(rm.return_type, allow_void=True)
            params = []
            for rp in rm.params:
                ptype = self.semantic_type(rp.type)
                params.append(M.Param(rp.name, ptype, self.chains(rp.annotations, ptype, probe), tuple(rp.hints)))
            ret_chains: Tuple[M.ConstraintChain, ...] = ()
            if rm.return_annotations:
                if rtype is None:
                    self.err("VoidReturnConstraints", "void method cannot carry return annotations", rm.origin)
                else:
                    ret_chains = self.chains(rm.return_annotations, rtype, probe)
            if self.failed:
                out.append(None)
                continue
            try:
                out.append(
                    M.MethodSpec(
                        rm.name,
                        tuple(params),
                        rtype,
                        ret_chains,
                        classes,
                        sub_model,
                        owner=rm.owner,
                    )
                )
            except ValueError as exc:
                self.err("InvalidMethod", str(exc), rm.origin)
                out.append(None)
        return out


def parse_dsl_document(
    source: str, table: Optional[AliasTable] = None
) -> Tuple[List[M.MethodSpec], List[ParseDiagnostic]]:
    """Parse every method in ``source``. Any error yields an empty list."""
    diags: List[ParseDiagnostic] = []
    try:
        raw = _Parser(tokenize(source), diags).document()
    except DslSyntaxError as exc:
        diags.append(error("SyntaxError", exc.message, exc.origin))
        return [], diags
    specs = _Builder(raw, table, diags).build()
    if any(d.is_error for d in diags) or any(s is None for s in specs):
        return [], diags
    return specs, diags


def parse_signature_dsl(
    source: str, table: Optional[AliasTable] = None
) -> Tuple[Optional[M.MethodSpec], List[ParseDiagnostic]]:
    """Parse a document holding exactly one method signature."""
    specs, diags = parse_dsl_document(source, table)
    if any(d.is_error for d in diags):
        return None, diags
    if len(specs) != 1:
        diags.append(error("ExpectedSingleMethod", f"expected one method, found {len(specs)}", M.Origin(1, 1)))
        return None, diags
    return specs[0], diags
