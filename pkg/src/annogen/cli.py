"""Command-line front end: validate, generate, assert, report."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

from . import __version__
from . import model as M
from .aliases import DEFAULT_TABLE, AliasConfigError, AliasTable
from .assertions import Style, derive_assertions, render
from .datagen import GenConfig, SpecInvalid, combine_cases, generate_for_method
from .diagnostics import ParseDiagnostic
from .dsl import parse_dsl_document
from .jsonspec import parse_json_document
from .report import UnknownParam, all_reasonable, classify, format_table
from .validator import validate
from .values import ValueFormatError, from_json

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_REPORT = 2
EXIT_USAGE = 64

SEED_MAX = 2**64 - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nat(minimum: int):
    def parse(text: str) -> int:
        try:
            v = int(text, 0)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}")
        return v

    return parse


def _seed(text: str) -> int:
    v = _nat(0)(text)
    if v > SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


@dataclass(frozen=True)
class Config:
    seed: int = 0
    per_bucket: int = 1
    per_pattern: int = 2
    max_unbounded_reps: int = 16
    max_cases: int = 64
    default_array_len: int = 3
    only_valid: bool = False
    format: Optional[str] = None
    alias_file: Optional[str] = None

    def gen_config(self) -> GenConfig:
        return GenConfig(
            per_bucket=self.per_bucket,
            per_pattern=self.per_pattern,
            max_unbounded_reps=self.max_unbounded_reps,
            max_cases=self.max_cases,
            default_array_len=self.default_array_len,
            only_valid=self.only_valid,
        )

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "Config":
        return cls(
            seed=getattr(args, "seed", 0),
            per_bucket=getattr(args, "per_bucket", 1),
            per_pattern=getattr(args, "per_pattern", 2),
            max_unbounded_reps=getattr(args, "max_unbounded_reps", 16),
            max_cases=getattr(args, "max_cases", 64),
            default_array_len=getattr(args, "default_array_len", 3),
            only_valid=getattr(args, "only_valid", False),
            format=args.format,
            alias_file=args.alias_file,
        )


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- loading ----------------------------------------------------------------


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not valid UTF-8") from None


def _looks_like_json(path: str, text: str) -> bool:
    if path.lower().endswith(".json"):
        return True
    return text.lstrip()[:1] in ("{", "[")


def load_specs(path: str, alias_file: Optional[str], stdin: TextIO, stderr: TextIO) -> List[M.MethodSpec]:
    table = DEFAULT_TABLE
    if alias_file:
        try:
            table = AliasTable.from_file(alias_file)
        except OSError as exc:
            raise UsageError(f"cannot read {alias_file}: {exc.strerror or exc}") from None
        except AliasConfigError as exc:
            raise UsageError(f"{alias_file}: {exc}") from None
    text = _read(path, stdin)
    if _looks_like_json(path, text):
        specs, diags = parse_json_document(text)
    else:
        specs, diags = parse_dsl_document(text, table)
    _print_diags(diags, path, stderr)
    if any(d.is_error for d in diags):
        raise UsageError(f"{path}: the spec could not be parsed")
    return specs


def _print_diags(diags: Sequence[ParseDiagnostic], path: str, stderr: TextIO) -> None:
    for d in diags:
        stderr.write(f"{path}:{d}\n")


# -- commands ---------------------------------------------------------------


def cmd_validate(args, cfg: Config, stdout: TextIO, stderr: TextIO, stdin: TextIO) -> int:
    specs = load_specs(args.spec, cfg.alias_file, stdin, stderr)
    reports = [validate(s) for s in specs]
    if (cfg.format or "table") == "json":
        stdout.write(dumps({"methods": [r.to_json() for r in reports]}))
    else:
        for r in reports:
            stdout.write(f"{r.effective_spec.name}: {r.verdict.value}\n")
            for f in r.findings:
                stdout.write(f"  {f}\n")
    return EXIT_OK if all(r.valid for r in reports) else EXIT_INVALID


def generate_document(specs: Sequence[M.MethodSpec], cfg: Config) -> dict:
    """The JSON document written by ``generate``; raises SpecInvalid."""
    gen = cfg.gen_config()
    methods = []
    for spec in specs:
        sets = generate_for_method(spec, cfg.seed, gen)
        names = list(sets)
        cases = combine_cases([len(sets[n].values) for n in names], gen.max_cases)
        rows = classify(spec, {n: sets[n].trees() for n in names})
        methods.append(
            {
                "method": spec.name,
                "seed": cfg.seed,
                "params": names,
                "candidates": {
                    n: {"seed": s.seed, "values": [c.to_json(n) for c in s.values]} for n, s in sets.items()
                },
                "cases": [list(c) for c in cases],
                "distribution": [r.to_json() for r in rows],
            }
        )
    return {"methods": methods}


def cmd_generate(args, cfg: Config, stdout: TextIO, stderr: TextIO, stdin: TextIO) -> int:
    specs = load_specs(args.spec, cfg.alias_file, stdin, stderr)
    try:
        doc = generate_document(specs, cfg)
    except SpecInvalid as exc:
        stderr.write(f"{args.spec}: {exc}\n")
        for f in exc.report.errors():
            stderr.write(f"  {f}\n")
        return EXIT_INVALID
    if (cfg.format or "json") == "table":
        stdout.write(_generate_table(doc))
    else:
        stdout.write(dumps(doc))
    return EXIT_OK


def _generate_table(doc: dict) -> str:
    from .values import literal

    lines = []
    for m in doc["methods"]:
        lines.append(f"method {m['method']} (seed {m['seed']})")
        for name, cs in m["candidates"].items():
            for v in cs["values"]:
                lines.append(f"  {name:<12} {v['classification']:<13} {literal(from_json(v['value']))}")
        lines.append(f"  {len(m['cases'])} cases")
    return "\n".join(lines) + "\n"


def cmd_assert(args, cfg: Config, stdout: TextIO, stderr: TextIO, stdin: TextIO) -> int:
    specs = load_specs(args.spec, cfg.alias_file, stdin, stderr)
    style = Style(args.style)
    out = []
    for spec in specs:
        try:
            preds = derive_assertions(spec)
        except SpecInvalid as exc:
            stderr.write(f"{args.spec}: {exc}\n")
            for f in exc.report.errors():
                stderr.write(f"  {f}\n")
            return EXIT_INVALID
        out.append((spec.name, preds))
    if cfg.format == "json":
        stdout.write(dumps({"methods": [{"method": n, "assertions": [p.to_json() for p in ps]} for n, ps in out]}))
    else:
        for _, preds in out:
            for p in preds:
                stdout.write(render(p, style) + "\n")
    return EXIT_OK


def _values_for(spec: M.MethodSpec, raw) -> dict:
    if not isinstance(raw, dict):
        raise ValueFormatError("values must be a map from parameter name to a list")
    values = {}
    for name, items in raw.items():
        if isinstance(items, dict) and "values" in items:
            items = [v["value"] if isinstance(v, dict) and "classification" in v else v for v in items["values"]]
        if not isinstance(items, list):
            raise ValueFormatError(f"values for {name!r} must be a list")
        declared = next((p.type for p in spec.params if p.name == name), None)
        values[name] = [from_json(v, declared) for v in items]
    return values


def load_values(text: str, specs: Sequence[M.MethodSpec]) -> List[Tuple[M.MethodSpec, dict]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueFormatError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    by_name = {s.name: s for s in specs}
    if isinstance(doc, dict) and isinstance(doc.get("methods"), list):
        out = []
        for m in doc["methods"]:
            if not isinstance(m, dict) or m.get("method") not in by_name:
                raise ValueFormatError(f"unknown method in values: {m.get('method') if isinstance(m, dict) else m!r}")
            spec = by_name[m["method"]]
            out.append((spec, _values_for(spec, m.get("candidates", {}))))
        return out
    if len(specs) != 1:
        raise ValueFormatError("a plain value map needs a spec with exactly one method")
    return [(specs[0], _values_for(specs[0], doc))]


def cmd_report(args, cfg: Config, stdout: TextIO, stderr: TextIO, stdin: TextIO) -> int:
    specs = load_specs(args.spec, cfg.alias_file, stdin, stderr)
    for spec in specs:
        report = validate(spec)
        if not report.valid:
            stderr.write(f"{args.spec}: method {spec.name} failed validation\n")
            return EXIT_INVALID
    if args.spec == "-" and args.values == "-":
        raise UsageError("spec and values cannot both come from stdin")
    text = _read(args.values, stdin)
    try:
        pairs = load_values(text, specs)
        results = [(spec, classify(spec, values)) for spec, values in pairs]
    except (ValueFormatError, UnknownParam) as exc:
        raise UsageError(f"{args.values}: {exc}") from None
    if (cfg.format or "table") == "json":
        stdout.write(
            dumps(
                {
                    "methods": [{"method": s.name, "rows": [r.to_json() for r in rows]} for s, rows in results],
                    "allReasonablyDistributed": all(all_reasonable(rows) for _, rows in results),
                }
            )
        )
    else:
        stdout.write("\n".join(format_table(rows, s.name) for s, rows in results))
    return EXIT_OK if all(all_reasonable(rows) for _, rows in results) else EXIT_REPORT


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="annogen", description="Annotation-driven test data and assertion generator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("spec", help="signature DSL or JSON spec file, or - for stdin")
        p.add_argument("--format", choices=("json", "table"), default=None)
        p.add_argument("--alias-file", metavar="PATH", help="extra annotation alias rules")

    p = sub.add_parser("validate", help="check constraint chains")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="emit candidate test inputs")
    common(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--per-bucket", type=_nat(1), default=1)
    p.add_argument("--per-pattern", type=_nat(1), default=2)
    p.add_argument("--max-unbounded-reps", type=_nat(0), default=16)
    p.add_argument("--max-cases", type=_nat(1), default=64)
    p.add_argument("--default-array-len", type=_nat(0), default=3)
    p.add_argument("--only-valid", action="store_true", help="drop out-of-domain candidates")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("assert", help="derive assertions for return values and fields")
    common(p)
    p.add_argument("--style", choices=[s.value for s in Style], default=Style.JAVA.value)
    p.set_defaults(func=cmd_assert)

    p = sub.add_parser("report", help="classify values in, on or out of their domain")
    common(p)
    p.add_argument("values", help="values JSON (generate output or a name -> list map), or -")
    p.set_defaults(func=cmd_report)
    return parser


def main(
    argv: Optional[Sequence[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
    stdin: Optional[TextIO] = None,
) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    args = build_parser().parse_args(argv)
    cfg = Config.from_args(args)
    try:
        return args.func(args, cfg, stdout, stderr, stdin)
    except UsageError as exc:
        stderr.write(f"annogen: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
