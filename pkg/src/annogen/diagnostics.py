from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import Origin


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    code: str
    message: str
    origin: Origin

    def __post_init__(self) -> None:
        if not self.code:
            raise ValueError("diagnostic without a code")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.origin}: {self.severity.value}: [{self.code}] {self.message}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "origin": self.origin.to_json(),
        }


def error(code: str, message: str, origin: Origin) -> ParseDiagnostic:
    return ParseDiagnostic(Severity.ERROR, code, message, origin)


def warning(code: str, message: str, origin: Origin) -> ParseDiagnostic:
    return ParseDiagnostic(Severity.WARNING, code, message, origin)
