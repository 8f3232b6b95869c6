"""Report records shared by the verification routines, and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality ``lhs < rhs`` (or ``lhs <= rhs`` when ``strict`` is False).

    ``lhs`` is None in bound-only mode, in which case ``holds`` is None too.
    A strict check passes only when the margin exceeds ``slack``; a non-strict
    one passes when the margin is at least ``-slack`` (rounding tolerance).
    """

    label: str
    lhs: float | None
    rhs: float
    margin: float | None
    holds: bool | None
    slack: float = 0.0
    strict: bool = True
    params: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(
        cls,
        label: str,
        lhs: float | None,
        rhs: float,
        *,
        strict: bool = True,
        slack: float = 0.0,
        params: dict[str, Any] | None = None,
    ) -> BoundReport:
        params = dict(params or {})
        if lhs is None:
            return cls(label, None, rhs, None, None, slack, strict, params)
        margin = rhs - lhs
        holds = margin > slack if strict else margin >= -slack
        return cls(label, lhs, rhs, margin, bool(holds), slack, strict, params)

    @property
    def status(self) -> str:
        if self.holds is None:
            return "bound-only"
        if self.holds:
            return "pass"
        if self.strict and self.margin is not None and self.margin > 0:
            return "inconclusive"
        return "fail"

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "slack": self.slack,
            "holds": self.holds,
            "strict": self.strict,
            "status": self.status,
            "params": _jsonable(self.params),
        }


@dataclass(frozen=True)
class ConstantsReport:
    """A computed constant (or certified bound) checked against the stated value."""

    name: str
    computed: float
    paper_value: float
    relation: str  # "<=", ">=" or "=="
    verdict: bool
    slack: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def check(
        cls,
        name: str,
        computed: float,
        paper_value: float,
        relation: str,
        *,
        rel_slack: float = 1e-9,
        abs_tol: float = 0.0,
        details: dict[str, Any] | None = None,
    ) -> ConstantsReport:
        # The slack is applied against the computed value, so rounding can only
        # make a verdict harder to obtain, never easier.
        slack = rel_slack * abs(computed)
        if relation == "<=":
            verdict = computed + slack <= paper_value
        elif relation == ">=":
            verdict = computed - slack >= paper_value
        elif relation == "==":
            slack = max(slack, abs_tol)
            verdict = abs(computed - paper_value) <= slack
        else:
            raise ValueError(f"unknown relation {relation!r}")
        return cls(name, computed, paper_value, relation, bool(verdict), slack, dict(details or {}))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "computed": self.computed,
            "paper_bound": self.paper_value,
            "relation": self.relation,
            "slack": self.slack,
            "verdict": self.verdict,
            "details": _jsonable(self.details),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()  # numpy scalar
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def dumps(payload: Any) -> str:
    """Serialize deterministically: sorted keys, shortest round-trip floats."""
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
