from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any

from ..core import Action, LocalConfig, format_trace

__all__ = [
    "Verdict", "ComplianceCounterexample", "FilterCounterexample",
    "UnwindingCounterexample", "InvariantCounterexample", "Limits",
    "ResourceLimitExceeded",
]


class ResourceLimitExceeded(RuntimeError):
    def __init__(self, what: str, explored: int):
        super().__init__(f"resource limit hit ({what}) after {explored} explored items")
        self.what = what
        self.explored = explored


class Limits:
    """Exploration budget; ``None`` disables a bound."""

    def __init__(self, max_states: int | None = 10_000_000, max_seconds: float | None = 600.0):
        self.max_states = max_states
        self.max_seconds = max_seconds
        self.count = 0
        self._t0 = time.monotonic()

    def tick(self, n: int = 1) -> None:
        self.count += n
        if self.max_states is not None and self.count > self.max_states:
            raise ResourceLimitExceeded("max-states", self.count)
        # the clock is only sampled every 4096 ticks
        if self.max_seconds is not None and (self.count & 0xFFF) == 0:
            if time.monotonic() - self._t0 > self.max_seconds:
                raise ResourceLimitExceeded("max-seconds", self.count)


def _actions(seq) -> list[str]:
    return [str(a) for a in seq]


def _config(q: LocalConfig) -> dict[str, Any]:
    return {"state": q.state, "buffer": list(q.buffer)}


@dataclass(frozen=True)
class ComplianceCounterexample:
    domain: str
    alpha: tuple[Action, ...]
    beta: tuple[Action, ...]
    shared_purge: tuple[Action, ...]
    obs_alpha: LocalConfig
    obs_beta: LocalConfig

    kind = "compliance"

    def to_dict(self):
        return {
            "kind": self.kind, "domain": self.domain,
            "alpha": _actions(self.alpha), "beta": _actions(self.beta),
            "shared_purge": _actions(self.shared_purge),
            "obs_alpha": _config(self.obs_alpha), "obs_beta": _config(self.obs_beta),
        }

    def render(self) -> list[str]:
        lines = [f"domain {self.domain} cannot tell these executions apart by purge "
                 f"({format_trace(self.shared_purge)}) yet observes different configurations"]
        for label, seq, ob in (("alpha", self.alpha, self.obs_alpha), ("beta", self.beta, self.obs_beta)):
            lines.append(f"{label}:")
            lines.extend(f"  {i}. {a}" for i, a in enumerate(seq, 1))
            if not seq:
                lines.append("  (empty)")
            lines.append(f"  obs({self.domain}) = ({ob.state}, {format_trace(ob.buffer)})")
        return lines


@dataclass(frozen=True)
class FilterCounterexample:
    edge: tuple[str, str]
    delta: tuple[Action, ...]
    a: Action
    filter_value: bool = False

    kind = "filter"

    def to_dict(self):
        return {"kind": self.kind, "edge": list(self.edge), "delta": _actions(self.delta),
                "a": str(self.a), "filter_value": self.filter_value}

    def render(self) -> list[str]:
        src, dst = self.edge
        lines = [f"{src} can perform {self.a} (received by {dst}) while the filter on {src}->{dst} is false"]
        lines.append("local history:")
        lines.extend(f"  {i}. {a}" for i, a in enumerate(self.delta, 1))
        if not self.delta:
            lines.append("  (empty)")
        lines.append(f"then: {self.a}")
        return lines


@dataclass(frozen=True)
class UnwindingCounterexample:
    condition: str
    domain: str
    witness_s: tuple[Action, ...]
    witness_t: tuple[Action, ...] | None
    action: Action | None

    kind = "unwinding"

    def to_dict(self):
        return {"kind": self.kind, "condition": self.condition, "domain": self.domain,
                "witness_s": _actions(self.witness_s),
                "witness_t": None if self.witness_t is None else _actions(self.witness_t),
                "action": None if self.action is None else str(self.action)}

    def render(self) -> list[str]:
        lines = [f"{self.condition} fails for domain {self.domain}",
                 f"s = s0.{format_trace(self.witness_s)}"]
        if self.witness_t is not None:
            lines.append(f"t = s0.{format_trace(self.witness_t)}")
        if self.action is not None:
            lines.append(f"action: {self.action}")
        return lines


@dataclass(frozen=True)
class InvariantCounterexample:
    process: str
    path: tuple[Action, ...]
    state: str

    kind = "invariant"

    def to_dict(self):
        return {"kind": self.kind, "process": self.process, "path": _actions(self.path), "state": self.state}

    def render(self) -> list[str]:
        lines = [f"{self.process} reaches violating state {self.state}"]
        lines.extend(f"  {i}. {a}" for i, a in enumerate(self.path, 1))
        return lines


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    counterexample: Any = None
    states_explored: int = 0
    depth_reached: int = 0

    @property
    def result(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "verdict": self.result,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
            "stats": {"states_explored": self.states_explored, "depth_reached": self.depth_reached},
        }
