"""Filter monitors: deterministic automata with bounded integer registers.

A monitor realises a filter function over a domain's local history.  It
reads the history followed by the candidate action and then answers whether
that last action may be transmitted (an *emit* rule matches).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import Action, Recv, Send
from .expr import Expr

__all__ = [
    "ActionPattern", "Exact", "AnySendOf", "AnyReceive", "Wildcard",
    "Register", "MonitorTransition", "EmitRule", "FilterMonitor",
    "MonitorError", "RegisterOverflow", "filter_eval",
]


class MonitorError(ValueError):
    pass


class RegisterOverflow(MonitorError):
    def __init__(self, register: str, value: int, lo: int, hi: int):
        super().__init__(f"register {register} := {value} leaves [{lo}, {hi}]")
        self.register = register
        self.value = value


@dataclass(frozen=True)
class Exact:
    action: Action

    def matches(self, a: Action) -> bool:
        return a == self.action

    def __str__(self):
        return str(self.action)


@dataclass(frozen=True)
class AnySendOf:
    msgs: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "msgs", frozenset(self.msgs))

    def matches(self, a: Action) -> bool:
        return isinstance(a, Send) and a.msg in self.msgs

    def __str__(self):
        return "!{" + ",".join(sorted(self.msgs)) + "}"


@dataclass(frozen=True)
class AnyReceive:
    def matches(self, a: Action) -> bool:
        return isinstance(a, Recv)

    def __str__(self):
        return "?*"


@dataclass(frozen=True)
class Wildcard:
    def matches(self, a: Action) -> bool:
        return True

    def __str__(self):
        return "*"


ActionPattern = Exact | AnySendOf | AnyReceive | Wildcard


@dataclass(frozen=True)
class Register:
    name: str
    min: int
    max: int
    init: int

    def __post_init__(self):
        if not self.min <= self.init <= self.max:
            raise MonitorError(f"register {self.name}: init {self.init} outside [{self.min}, {self.max}]")


@dataclass(frozen=True)
class MonitorTransition:
    src: str
    pattern: ActionPattern
    dst: str
    guard: Expr | None = None
    updates: tuple[tuple[str, Expr], ...] = ()


@dataclass(frozen=True)
class EmitRule:
    state: str
    pattern: ActionPattern
    guard: Expr | None = None


def _truth(v) -> bool:
    if not isinstance(v, bool):
        raise MonitorError(f"guard evaluated to non-boolean {v!r}")
    return v


# (monitor state, register values)
MonitorConfig = tuple[str, tuple[int, ...]]


@dataclass(frozen=True, eq=True)
class FilterMonitor:
    """Finite-state filter with bounded registers.

    Actions matched by no transition leave the configuration unchanged.
    Updates of one transition are applied simultaneously.
    """

    name: str
    states: frozenset[str]
    initial: str
    registers: tuple[Register, ...] = ()
    transitions: tuple[MonitorTransition, ...] = ()
    emit: tuple[EmitRule, ...] = ()
    _compiled: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "emit", tuple(self.emit))
        if self.initial not in self.states:
            raise MonitorError(f"monitor {self.name}: initial state {self.initial!r} unknown")
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise MonitorError(f"monitor {self.name}: duplicate register names")
        slots = {n: i for i, n in enumerate(names)}
        # per state: exact-action index plus the list of non-exact patterns
        by_state: dict[str, tuple[dict, list]] = {}
        for t in self.transitions:
            if t.src not in self.states or t.dst not in self.states:
                raise MonitorError(f"monitor {self.name}: transition {t.src}->{t.dst} uses unknown state")
            ups = []
            for reg, e in t.updates:
                if reg not in slots:
                    raise MonitorError(f"monitor {self.name}: update of unknown register {reg!r}")
                ups.append((slots[reg], e.compile_indexed(slots)))
            guard = t.guard.compile_indexed(slots) if t.guard is not None else None
            exact, generic = by_state.setdefault(t.src, ({}, []))
            entry = (t.pattern, guard, tuple(ups), t.dst)
            if isinstance(t.pattern, Exact):
                exact.setdefault(t.pattern.action, []).append(entry)
            else:
                generic.append(entry)
        emits: dict[str, list] = {}
        for r in self.emit:
            if r.state not in self.states:
                raise MonitorError(f"monitor {self.name}: emit rule in unknown state {r.state!r}")
            guard = r.guard.compile_indexed(slots) if r.guard is not None else None
            emits.setdefault(r.state, []).append((r.pattern, guard))
        object.__setattr__(self, "_compiled", {"by_state": by_state, "emits": emits})

    @property
    def initial_config(self) -> MonitorConfig:
        return (self.initial, tuple(r.init for r in self.registers))

    def step(self, config: MonitorConfig, a: Action) -> MonitorConfig:
        state, regs = config
        chosen = None
        table = self._compiled["by_state"].get(state)
        if table is None:
            return config
        exact, generic = table
        for candidates in (exact.get(a, ()), generic):
            for pattern, guard, ups, dst in candidates:
                if pattern.matches(a) and (guard is None or _truth(guard(regs))):
                    if chosen is not None:
                        raise MonitorError(f"monitor {self.name}: two transitions enabled on {a} in {state}")
                    chosen = (ups, dst)
        if chosen is None:
            return config
        ups, dst = chosen
        if not ups:
            return (dst, regs)
        new = list(regs)
        for idx, fn in ups:
            v = fn(regs)
            r = self.registers[idx]
            if isinstance(v, bool) or not isinstance(v, int) or not r.min <= v <= r.max:
                raise RegisterOverflow(r.name, v, r.min, r.max)
            new[idx] = v
        return (dst, tuple(new))

    def run(self, history: Iterable[Action], config: MonitorConfig | None = None) -> MonitorConfig:
        c = self.initial_config if config is None else config
        for a in history:
            c = self.step(c, a)
        return c

    def emits(self, config: MonitorConfig, a: Action) -> bool:
        state, regs = config
        for pattern, guard in self._compiled["emits"].get(state, ()):
            if pattern.matches(a) and (guard is None or _truth(guard(regs))):
                return True
        return False

    def patterns(self) -> list[ActionPattern]:
        return [t.pattern for t in self.transitions] + [r.pattern for r in self.emit]


def filter_eval(monitor: FilterMonitor, history: Iterable[Action], a: Action) -> bool:
    """Value of the filter on ``history . a`` (``a`` is run through the monitor too)."""
    c = monitor.run(history)
    c = monitor.step(c, a)
    return monitor.emits(c, a)
