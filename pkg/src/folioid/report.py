"""Check reports in the shape the batch runner serializes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of one sampled check: pass/fail plus the worst residual seen."""

    name: str
    passed: bool
    max_residual: float = 0.0
    witness: Any = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict = {
            "name": self.name,
            "pass": bool(self.passed),
            "max_residual": float(self.max_residual),
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(value):
    import numpy as np

    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    return value
