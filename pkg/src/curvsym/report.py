"""Verification verdicts and deterministic JSON report writing."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from gmpy2 import mpq

from .tensor import format_rational

SCHEMA_VERSION = 1

EXACT_PASS = "exact-pass"
EXACT_FAIL = "exact-fail"
NUMERIC_PASS = "numeric-pass"
NUMERIC_FAIL = "numeric-fail"


@dataclass
class VerdictReport:
    check: str
    dim: int | None
    status: str
    witness: dict | None = None
    derived: dict = field(default_factory=dict)
    tol: float | None = None

    def __post_init__(self):
        if self.status == EXACT_FAIL and not self.witness:
            raise ValueError(f"{self.check}: an exact failure must carry a witness")

    @property
    def passed(self) -> bool:
        return self.status in (EXACT_PASS, NUMERIC_PASS)

    def to_dict(self) -> dict:
        d = {"check": self.check, "dim": self.dim, "status": self.status, "derived": jsonable(self.derived)}
        if self.witness is not None:
            d["witness"] = jsonable(self.witness)
        if self.tol is not None:
            d["tol"] = self.tol
        return d


def jsonable(obj: Any):
    """Convert exact rationals and numpy scalars into JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if type(obj).__name__ == "mpq" or isinstance(obj, mpq):
        return format_rational(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def render(payload: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"
    lines = []
    for rep in payload.get("reports", []):
        dim = rep.get("dim")
        lines.append(f"{rep['check']:<28} n={'-' if dim is None else dim!s:<4} {rep['status']}")
        for k, v in sorted(rep.get("derived", {}).items()):
            if isinstance(v, (dict, list)):
                v = json.dumps(v, sort_keys=True)
            lines.append(f"    {k}: {v}")
        if "witness" in rep:
            lines.append(f"    witness: {json.dumps(rep['witness'], sort_keys=True)}")
    if "message" in payload:
        lines.append(payload["message"])
    return "\n".join(lines) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
