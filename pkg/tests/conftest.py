from __future__ import annotations

import json
from pathlib import Path

import pytest

from annogen.dsl import parse_dsl_document
from annogen.jsonspec import parse_json_document

FIXTURES = Path(__file__).parent / "fixtures"
VALID_DIR = FIXTURES / "valid"
RULES_DIR = FIXTURES / "rules"


def load_specs(path: Path):
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        specs, diags = parse_json_document(text)
    else:
        specs, diags = parse_dsl_document(text)
    errors = [d for d in diags if d.is_error]
    assert not errors, errors
    return specs


def load_spec(name: str, method: str | None = None):
    specs = load_specs(VALID_DIR / name)
    if method is None:
        assert len(specs) == 1
        return specs[0]
    return next(s for s in specs if s.name == method)


def valid_fixture_paths():
    return sorted(VALID_DIR.iterdir())


def all_valid_specs():
    return [(p.name, s) for p in valid_fixture_paths() for s in load_specs(p)]


def regex_corpus():
    lines = (FIXTURES / "regex_corpus.txt").read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip() and not line.startswith("#")]


@pytest.fixture
def discount():
    return load_spec("discount.dsl")


# Acceptance criteria record their outcome here; printed after the run.
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, title, seconds, limit = ACCEPTANCE_RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({seconds:.3f}s, limit {limit}s)")
