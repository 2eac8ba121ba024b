"""Processes, actions and distributed machines.

A process is a finite graph whose edges are labelled by send actions ``!m``
and receive actions ``?p m``.  Composing processes yields a distributed
machine in which every message has exactly one sender and at least one
receiver; each process owns a FIFO input buffer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

__all__ = [
    "Send", "Recv", "Action", "ProcessSpec", "LocalConfig", "GlobalState",
    "DistributedMachine", "compose", "dom", "obs", "initial_state",
    "ModelError", "ComposabilityError", "NoSender", "MultipleSenders",
    "NoReceiver", "DuplicateProcId", "UnknownMessage", "UnknownProcess",
]


class ModelError(ValueError):
    """Raised for malformed processes, machines or states."""


class ComposabilityError(ModelError):
    pass


class NoSender(ComposabilityError):
    def __init__(self, msg: str):
        super().__init__(f"message {msg!r} is received but no process sends it")
        self.msg = msg


class MultipleSenders(ComposabilityError):
    def __init__(self, msg: str, procs: Iterable[str]):
        self.msg = msg
        self.procs = tuple(procs)
        super().__init__(f"message {msg!r} is sent by several processes: {', '.join(self.procs)}")


class NoReceiver(ComposabilityError):
    def __init__(self, msg: str):
        super().__init__(f"message {msg!r} is sent but no process receives it")
        self.msg = msg


class DuplicateProcId(ComposabilityError):
    def __init__(self, name: str):
        super().__init__(f"duplicate process id {name!r}")
        self.name = name


class UnknownMessage(ModelError, KeyError):
    def __str__(self):
        return f"unknown message {self.args[0]!r}"


class UnknownProcess(ModelError, KeyError):
    def __str__(self):
        return f"unknown process {self.args[0]!r}"


@dataclass(frozen=True, slots=True, order=False)
class Send:
    """Emission ``!m`` of message ``msg``."""

    msg: str

    def __str__(self) -> str:
        return f"!{self.msg}"


@dataclass(frozen=True, slots=True, order=False)
class Recv:
    """Reception ``?receiver msg``."""

    receiver: str
    msg: str

    def __str__(self) -> str:
        return f"?{self.receiver} {self.msg}"


Action = Send | Recv


def parse_action(text: str) -> Action:
    """Parse ``!m`` or ``?p m`` notation."""
    text = text.strip()
    if text.startswith("!") and len(text) > 1 and " " not in text:
        return Send(text[1:])
    if text.startswith("?"):
        parts = text[1:].split()
        if len(parts) == 2:
            return Recv(parts[0], parts[1])
    raise ValueError(f"cannot parse action {text!r}; expected '!m' or '?p m'")


def format_trace(actions: Iterable[Action]) -> str:
    s = " ".join(str(a) for a in actions)
    return s if s else "ε"


class LocalConfig(NamedTuple):
    """A process's local state and its input buffer (oldest first)."""

    state: str
    buffer: tuple[str, ...] = ()


# one LocalConfig per process, in declaration order
GlobalState = tuple[LocalConfig, ...]


@dataclass(frozen=True, eq=True)
class ProcessSpec:
    """A single security domain.

    ``step`` maps ``(state, action)`` to the successor state; an absent key
    means the action is undefined in that state.  ``valuations`` optionally
    attaches named values to states (used by invariant predicates).
    """

    id: str
    states: frozenset[str]
    initial: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    step: Mapping[tuple[str, Action], str] = field(hash=False)
    valuations: Mapping[str, Mapping[str, int | str]] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(self, "step", dict(self.step))
        object.__setattr__(self, "valuations", {s: dict(v) for s, v in self.valuations.items()})
        if not self.id:
            raise ModelError("process id must be a non-empty string")
        if self.initial not in self.states:
            raise ModelError(f"process {self.id}: initial state {self.initial!r} not in states")
        for (src, a), dst in self.step.items():
            if src not in self.states or dst not in self.states:
                raise ModelError(f"process {self.id}: transition {src} --{a}--> {dst} leaves the state set")
            if isinstance(a, Send):
                if a.msg not in self.outputs:
                    raise ModelError(f"process {self.id}: {a} but {a.msg!r} not in outputs")
            elif isinstance(a, Recv):
                if a.receiver != self.id or a.msg not in self.inputs:
                    raise ModelError(f"process {self.id}: {a} is not one of its receive actions")
            else:
                raise ModelError(f"process {self.id}: bad action {a!r}")
        for s in self.valuations:
            if s not in self.states:
                raise ModelError(f"process {self.id}: valuation for unknown state {s!r}")

    @property
    def alphabet(self) -> frozenset[Action]:
        return frozenset([Send(m) for m in self.outputs] + [Recv(self.id, m) for m in self.inputs])

    def in_alphabet(self, a: Action) -> bool:
        if isinstance(a, Send):
            return a.msg in self.outputs
        return a.receiver == self.id and a.msg in self.inputs

    def successor(self, state: str, a: Action) -> str | None:
        return self.step.get((state, a))

    def transitions_from(self, state: str) -> list[tuple[Action, str]]:
        return [(a, t) for (s, a), t in self.step.items() if s == state]


class DistributedMachine:
    """Composition of processes; build it with :func:`compose`."""

    def __init__(self, processes: list[ProcessSpec], sender_of: dict[str, str],
                 receivers_of: dict[str, frozenset[str]]):
        self.processes = tuple(processes)
        self.sender_of = dict(sender_of)
        self.receivers_of = dict(receivers_of)
        self.index = {p.id: i for i, p in enumerate(self.processes)}
        self.messages = tuple(sorted(self.sender_of))
        self._compile()

    def _compile(self):
        # per-process lookup tables for the hot paths in semantics
        self._sends = []
        self._recvs = []
        for p in self.processes:
            sends: dict[str, list[tuple[Send, str]]] = {}
            recvs: dict[tuple[str, str], str] = {}
            for (s, a), t in p.step.items():
                if isinstance(a, Send):
                    sends.setdefault(s, []).append((a, t))
                else:
                    recvs[(s, a.msg)] = t
            for lst in sends.values():
                lst.sort(key=lambda at: at[0].msg)
            self._sends.append(sends)
            self._recvs.append(recvs)
        self._recv_idx = {m: tuple(sorted(self.index[r] for r in rs)) for m, rs in self.receivers_of.items()}

    def __eq__(self, other):
        if not isinstance(other, DistributedMachine):
            return NotImplemented
        return self.processes == other.processes

    def __hash__(self):
        return hash(tuple(p.id for p in self.processes))

    def __repr__(self):
        return f"DistributedMachine({', '.join(p.id for p in self.processes)})"

    @property
    def proc_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.processes)

    def process(self, pid: str) -> ProcessSpec:
        try:
            return self.processes[self.index[pid]]
        except KeyError:
            raise UnknownProcess(pid) from None

    def action_key(self, a: Action) -> tuple:
        """Total order on actions: sends first, then process order, then name."""
        if isinstance(a, Send):
            return (0, self.index[self.sender_of[a.msg]], a.msg)
        return (1, self.index[a.receiver], a.msg)

    def all_actions(self) -> list[Action]:
        acts: list[Action] = []
        for p in self.processes:
            acts.extend(p.alphabet)
        return sorted(set(acts), key=self.action_key)


def compose(processes: Iterable[ProcessSpec]) -> DistributedMachine:
    processes = list(processes)
    if not processes:
        raise ModelError("cannot compose an empty list of processes")
    seen = set()
    for p in processes:
        if p.id in seen:
            raise DuplicateProcId(p.id)
        seen.add(p.id)

    senders: dict[str, list[str]] = {}
    receivers: dict[str, set[str]] = {}
    for p in processes:
        for m in p.outputs:
            senders.setdefault(m, []).append(p.id)
        for m in p.inputs:
            receivers.setdefault(m, set()).add(p.id)
    for m in sorted(set(senders) | set(receivers)):
        procs = senders.get(m, [])
        if len(procs) > 1:
            raise MultipleSenders(m, procs)
        if not procs:
            raise NoSender(m)
        if not receivers.get(m):
            raise NoReceiver(m)
    return DistributedMachine(
        processes,
        {m: ps[0] for m, ps in senders.items()},
        {m: frozenset(rs) for m, rs in receivers.items()},
    )


def initial_state(machine: DistributedMachine) -> GlobalState:
    return tuple(LocalConfig(p.initial, ()) for p in machine.processes)


def dom(machine: DistributedMachine, a: Action) -> str:
    """The security domain of an action: the unique sender of its message."""
    try:
        return machine.sender_of[a.msg]
    except KeyError:
        raise UnknownMessage(a.msg) from None


def obs(machine: DistributedMachine, domain: str, state: GlobalState) -> LocalConfig:
    try:
        i = machine.index[domain]
    except KeyError:
        raise UnknownProcess(domain) from None
    return state[i]
