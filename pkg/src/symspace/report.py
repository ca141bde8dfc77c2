"""Versioned JSON reports with fixed-precision floats."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA = "symspace/1"


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x + 0.0, ".17g")  # folds -0.0 into 0.0


def _plain(obj):
    """Convert numpy containers and scalars to builtin types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        return _float(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text in which every float carries 17 significant digits."""
    return _emit(_plain(obj), indent, 0) + "\n"


def loads(text: str):
    return json.loads(text)


@dataclass
class CheckResult:
    name: str
    bound: float
    worst_margin: float
    argmin_seed: int | None
    n_samples: int
    finding_mode: bool = False  # violations are findings, not failures

    def passed(self, tol: float) -> bool:
        return self.worst_margin >= -tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bound": self.bound,
            "worst_margin": self.worst_margin,
            "argmin_seed": self.argmin_seed,
            "n_samples": self.n_samples,
            "finding_mode": self.finding_mode,
        }


@dataclass
class VerificationReport:
    command: str
    config: dict
    version: str
    tol: float
    checks: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def status(self) -> str:
        failed = [c for c in self.checks if not c.passed(self.tol)]
        if any(not c.finding_mode for c in failed):
            return "fail"
        return "finding" if failed else "pass"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "version": self.version,
            "status": self.status,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "payload": self.payload,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def numerical_payload(report: dict) -> dict:
    """The part of a report that must be reproducible bit for bit."""
    return {k: v for k, v in report.items() if k != "wall_time"}
