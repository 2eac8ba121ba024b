"""Human and machine-readable reports.

The JSON form carries no timing, so identical invocations give identical
bytes.  Wall time appears only in the human form.
"""
from __future__ import annotations

import json
from typing import Any

from .verifier import ResourceLimitExceeded, Verdict

__all__ = ["verdict_report", "limit_report", "to_json", "to_text"]


def verdict_report(verdict: Verdict, **params: Any) -> dict[str, Any]:
    out = verdict.to_dict()
    out["parameters"] = params
    return out


def limit_report(check: str, exc: ResourceLimitExceeded, **params: Any) -> dict[str, Any]:
    return {"check": check, "verdict": "resource-limit", "limit": exc.what,
            "explored": exc.explored, "parameters": params}


def to_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _params(p: dict[str, Any]) -> str:
    return ", ".join(f"{k}={v}" for k, v in p.items() if v is not None)


def to_text(report: dict[str, Any], seconds: float | None = None, lines: list[str] | None = None) -> str:
    """``lines`` is the counterexample rendering (the dict form loses the structure)."""
    verdict = report["verdict"]
    head = f"{report['check']}: {verdict.upper()}"
    if report.get("parameters"):
        head += f" ({_params(report['parameters'])})"
    out = [head]
    if verdict == "resource-limit":
        out.append(f"limit {report['limit']} reached after {report['explored']} explored items; no verdict")
    else:
        if lines:
            out.extend(lines)
        stats = report.get("stats", {})
        out.append(f"explored {stats.get('states_explored', 0)}, depth reached {stats.get('depth_reached', 0)}")
    if seconds is not None:
        out.append(f"wall time {seconds:.3f} s")
    return "\n".join(out) + "\n"
