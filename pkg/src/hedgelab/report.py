"""Structured results shared by the CLI and the acceptance runner."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, complex):
        return float(x.real)
    if hasattr(x, "item"):
        return x.item()
    return x


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    wall_time_ms: int = 0
    status: str = "ok"

    def add(self, name: str, value, reference: str, expected=None, tolerance=None,
            ok: bool | None = None, **extra) -> bool:
        """Record a quantity; when ``expected`` is given the check is |value - expected| <= tolerance."""
        entry: dict[str, Any] = {"value": _num(value), "reference": reference}
        if isinstance(value, Fraction):
            entry["exact"] = str(value)
        if expected is not None:
            entry["expected"] = _num(expected)
            entry["tolerance"] = tolerance
            if ok is None:
                diff = abs(value - expected)
                ok = bool(diff <= tolerance) if tolerance is not None else bool(diff == 0)
        if ok is not None:
            entry["ok"] = bool(ok)
        entry.update({k: _num(v) for k, v in extra.items()})
        self.results[name] = entry
        return True if ok is None else bool(ok)

    def note(self, name: str, value, reference: str = "") -> None:
        """Informational quantity, never asserted."""
        self.results[name] = {"value": _num(value), "reference": reference}

    @property
    def ok(self) -> bool:
        return all(r.get("ok", True) for r in self.results.values())

    def finish(self, start: float) -> "Report":
        self.wall_time_ms = int(round((time.perf_counter() - start) * 1000))
        self.status = "ok" if self.ok else "failed"
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_json_default, allow_nan=True, **kw)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))

    def table(self) -> str:
        lines = [f"{self.command}: {self.status}  ({self.wall_time_ms} ms)"]
        width = max((len(k) for k in self.results), default=0)
        for name, r in self.results.items():
            val = r["value"]
            shown = f"{val:.10g}" if isinstance(val, float) else str(val)
            if "exact" in r:
                shown += f" ({r['exact']})"
            mark = "" if "ok" not in r else ("  PASS" if r["ok"] else "  FAIL")
            exp = ""
            if "expected" in r and r["expected"] is not None:
                exp = f"  expected {r['expected']:.10g}" if isinstance(r["expected"], float) else f"  expected {r['expected']}"
                if r.get("tolerance") is not None:
                    exp += f" +/- {r['tolerance']:g}"
            lines.append(f"  {name:<{width}}  {shown}{exp}{mark}")
        return "\n".join(lines)


def _json_default(o):
    if isinstance(o, Fraction):
        return float(o)
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")
