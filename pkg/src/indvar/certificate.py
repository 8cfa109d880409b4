"""Three-valued verdicts with a replayable evidence trail."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any


class Verdict(str, Enum):
    CERTIFIED_TRUE = "CERTIFIED_TRUE"
    CERTIFIED_FALSE = "CERTIFIED_FALSE"
    FAILS_UP_TO_DEPTH = "FAILS_UP_TO_DEPTH"
    CONDITIONAL = "CONDITIONAL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value

    @property
    def is_negative(self) -> bool:
        return self in (Verdict.CERTIFIED_FALSE, Verdict.FAILS_UP_TO_DEPTH)


@dataclass
class Certificate:
    """Outcome of a truncated check.

    ``evidence`` is a human-readable trace, one line per established fact, in
    the order the facts were established. ``data`` holds the structured
    payload (witness polynomials, interleaving maps, relations, ...).
    """

    check: str
    verdict: Verdict
    depth: int | None = None
    degree_bound: int | None = None
    evidence: list[str] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_TRUE

    def note(self, line: str) -> None:
        self.evidence.append(line)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.check, "verdict": self.verdict.value}
        if self.depth is not None:
            out["depth"] = self.depth
        if self.degree_bound is not None:
            out["degree_bound"] = self.degree_bound
        out["evidence"] = list(self.evidence)
        out["data"] = {k: jsonable(v) for k, v in self.data.items()}
        return out

    def __repr__(self) -> str:
        where = []
        if self.depth is not None:
            where.append(f"depth={self.depth}")
        if self.degree_bound is not None:
            where.append(f"D={self.degree_bound}")
        suffix = f" ({', '.join(where)})" if where else ""
        return f"<{self.check}: {self.verdict.value}{suffix}>"


def jsonable(value: Any) -> Any:
    """Convert certificate payloads into JSON-compatible values."""
    if isinstance(value, Certificate):
        return value.to_dict()
    if isinstance(value, Enum):
        return value.value
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return str(value)


def combine(check: str, parts: dict[str, Certificate], **kw: Any) -> Certificate:
    """Bundle sub-certificates; the weakest verdict wins."""
    rank = [
        Verdict.CERTIFIED_FALSE,
        Verdict.FAILS_UP_TO_DEPTH,
        Verdict.INCONCLUSIVE,
        Verdict.CONDITIONAL,
        Verdict.CERTIFIED_TRUE,
    ]
    verdict = min((c.verdict for c in parts.values()), key=rank.index, default=Verdict.CERTIFIED_TRUE)
    cert = Certificate(check, verdict, **kw)
    for name, part in parts.items():
        cert.note(f"{name}: {part.verdict.value}")
    cert.data["certificates"] = dict(parts)
    return cert
