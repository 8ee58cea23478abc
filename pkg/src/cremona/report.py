"""Case reports and their deterministic JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any

from .maps import RationalMap
from .poly import Polynomial, to_string

CERTIFIED = "certified"
CERTIFIED_BY_THRESHOLD = "certified_by_threshold"
INCONCLUSIVE = "inconclusive"
OUT_OF_SCOPE = "out_of_scope"

EXIT_CODES = {CERTIFIED: 0, CERTIFIED_BY_THRESHOLD: 0, INCONCLUSIVE: 2, OUT_OF_SCOPE: 2}


def target_names(n: int) -> list[str]:
    return [f"y{i}" for i in range(n)]


@dataclass
class CaseStep:
    name: str
    map: RationalMap | None
    checks: dict = dc_field(default_factory=dict)
    system_degree: int | None = None
    source_names: list | None = None
    coordinate_change: list | None = None
    field_mode: str = "exact-Q"

    @property
    def target_dim(self) -> int | None:
        return None if self.map is None else self.map.target_dim

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "field_mode": self.field_mode}
        if self.system_degree is not None:
            out["system_degree"] = self.system_degree
        if self.map is not None:
            names = self.source_names or target_names(self.map.source_dim + 1)
            out["source_variables"] = list(names)
            out["forms"] = [to_string(f, names) for f in self.map.forms]
            out["target_dim"] = self.map.target_dim
        if self.coordinate_change is not None:
            out["coordinate_change"] = [[jsonable(v) for v in row] for row in self.coordinate_change]
        tnames = target_names(self.map.target_dim + 1) if self.map is not None else None
        out["certificates"] = jsonable(self.checks, tnames)
        return out


@dataclass
class CaseReport:
    label: str
    status: str
    steps: list = dc_field(default_factory=list)
    final: dict = dc_field(default_factory=dict)
    field_mode: str = "exact-Q"
    seed: int = 0
    prime: int = 0
    evidence: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    variables: tuple = ("x0", "x1", "x2", "x3")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def final_names(self) -> list:
        maps = [s.map for s in self.steps if s.map is not None]
        if not maps:
            return list(self.variables)
        return target_names(maps[-1].target_dim + 1)

    def to_json(self, version: str | None = None) -> dict:
        from . import __version__
        return {
            "case": self.label,
            "status": self.status,
            "field_mode": self.field_mode,
            "evidence": list(self.evidence),
            "steps": [s.to_json() for s in self.steps],
            "final": jsonable(self.final, self.final_names()),
            "notes": list(self.notes),
            "provenance": {"seed": self.seed, "prime": self.prime,
                           "tool_version": version or __version__},
        }


def jsonable(obj, names=None):
    """Recursively convert to JSON-safe values; rationals become "p/q" strings.

    Polynomials are written with ``names`` (default x0, x1, ...).
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Polynomial):
        return to_string(obj, names if names and len(names) == obj.nvars else None)
    if isinstance(obj, dict):
        return {str(k): jsonable(v, names) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v, names) for v in obj]
    if hasattr(obj, "to_json"):
        try:
            doc = obj.to_json(names)
        except TypeError:
            doc = obj.to_json()
        return jsonable(doc, names)
    if hasattr(obj, "value"):
        return jsonable(obj.value, names)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
