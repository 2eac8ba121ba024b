"""Step semantics of distributed machines and single processes."""
from __future__ import annotations

from typing import Callable, Iterator, TypeVar

from .core import (Action, DistributedMachine, GlobalState, LocalConfig,
                   ModelError, ProcessSpec, Recv, Send, initial_state)

__all__ = [
    "enabled_actions", "step_global", "replay", "enumerate_executions",
    "local_executions", "project", "reachable_states", "NotEnabled",
    "MalformedState", "bfs_executions",
]

T = TypeVar("T")


class MalformedState(ModelError):
    pass


class NotEnabled(ModelError):
    def __init__(self, action: Action):
        super().__init__(f"action {action} is not enabled")
        self.action = action


def _check_state(machine: DistributedMachine, state: GlobalState) -> None:
    if len(state) != len(machine.processes):
        raise MalformedState(f"expected {len(machine.processes)} local configs, got {len(state)}")
    for p, q in zip(machine.processes, state):
        if q.state not in p.states:
            raise MalformedState(f"{p.id}: unknown local state {q.state!r}")
        for m in q.buffer:
            if m not in p.inputs:
                raise MalformedState(f"{p.id}: buffer holds {m!r} which it cannot receive")


def _enabled(machine: DistributedMachine, state: GlobalState) -> list[Action]:
    """Enabled actions, already sorted by ``machine.action_key``."""
    sends: list[Action] = []
    recvs: list[Action] = []
    for i, (s, buf) in enumerate(state):
        for a, _ in machine._sends[i].get(s, ()):
            sends.append(a)
        if buf:
            table = machine._recvs[i]
            for m in buf:
                if (s, m) in table:
                    # only the first receivable entry may be consumed
                    recvs.append(Recv(machine.processes[i].id, m))
                    break
    return sends + recvs


def enabled_actions(machine: DistributedMachine, state: GlobalState) -> set[Action]:
    _check_state(machine, state)
    return set(_enabled(machine, state))


def _step(machine: DistributedMachine, state: GlobalState, a: Action) -> GlobalState | None:
    if isinstance(a, Send):
        i = machine.index[machine.sender_of[a.msg]]
        s, buf = state[i]
        t = None
        for b, tgt in machine._sends[i].get(s, ()):
            if b.msg == a.msg:
                t = tgt
                break
        if t is None:
            return None
        new = list(state)
        new[i] = LocalConfig(t, buf)
        for j in machine._recv_idx[a.msg]:
            sj, bj = new[j]
            new[j] = LocalConfig(sj, bj + (a.msg,))
        return tuple(new)
    i = machine.index.get(a.receiver)
    if i is None:
        return None
    s, buf = state[i]
    table = machine._recvs[i]
    for k, m in enumerate(buf):
        if (s, m) in table:
            if m != a.msg:
                return None
            new = list(state)
            new[i] = LocalConfig(table[(s, m)], buf[:k] + buf[k + 1:])
            return tuple(new)
    return None


def step_global(machine: DistributedMachine, state: GlobalState, a: Action) -> GlobalState:
    """Apply ``a`` to ``state``; raises :class:`NotEnabled` if it cannot fire."""
    nxt = _step(machine, state, a)
    if nxt is None:
        raise NotEnabled(a)
    return nxt


def replay(machine: DistributedMachine, alpha, start: GlobalState | None = None) -> GlobalState:
    q = initial_state(machine) if start is None else start
    for a in alpha:
        q = step_global(machine, q, a)
    return q


def bfs_executions(machine: DistributedMachine, depth: int, init: T,
                   extend: Callable[[T, GlobalState, Action, GlobalState], T],
                   ) -> Iterator[tuple[tuple[Action, ...], GlobalState, T]]:
    """Breadth-first enumeration of executions up to ``depth`` with a fold.

    Executions come out shortest first and, within one length, in
    lexicographic order of ``machine.action_key``.  ``extend`` threads
    caller-defined context along each execution.
    """
    q0 = initial_state(machine)
    frontier = [((), q0, init)]
    yield frontier[0]
    for _ in range(depth):
        nxt = []
        for alpha, q, ctx in frontier:
            for a in _enabled(machine, q):
                q2 = _step(machine, q, a)
                entry = (alpha + (a,), q2, extend(ctx, q, a, q2))
                yield entry
                nxt.append(entry)
        if not nxt:
            return
        frontier = nxt


def enumerate_executions(machine: DistributedMachine, depth: int
                         ) -> Iterator[tuple[tuple[Action, ...], GlobalState]]:
    for alpha, q, _ in bfs_executions(machine, depth, None, lambda c, q, a, q2: None):
        yield alpha, q


def reachable_states(machine: DistributedMachine, depth: int) -> dict[GlobalState, tuple[Action, ...]]:
    """Distinct global states reachable in at most ``depth`` steps, each with a shortest witness."""
    q0 = initial_state(machine)
    seen = {q0: ()}
    frontier = [q0]
    for _ in range(depth):
        nxt = []
        for q in frontier:
            for a in _enabled(machine, q):
                q2 = _step(machine, q, a)
                if q2 not in seen:
                    seen[q2] = seen[q] + (a,)
                    nxt.append(q2)
        if not nxt:
            break
        frontier = nxt
    return seen


def _local_key(proc: ProcessSpec) -> Callable[[Action], tuple]:
    return lambda a: (0, a.msg) if isinstance(a, Send) else (1, a.msg)


def local_executions(proc: ProcessSpec, depth: int) -> Iterator[tuple[tuple[Action, ...], str]]:
    """All locally valid action sequences of ``proc`` up to ``depth``.

    Buffers are not modelled: a receive is valid whenever the local step
    function is defined on it.
    """
    by_state: dict[str, list[tuple[Action, str]]] = {}
    for (s, a), t in proc.step.items():
        by_state.setdefault(s, []).append((a, t))
    key = _local_key(proc)
    for lst in by_state.values():
        lst.sort(key=lambda at: key(at[0]))
    frontier = [((), proc.initial)]
    yield frontier[0]
    for _ in range(depth):
        nxt = []
        for delta, s in frontier:
            for a, t in by_state.get(s, ()):
                entry = (delta + (a,), t)
                yield entry
                nxt.append(entry)
        if not nxt:
            return
        frontier = nxt


def project(machine: DistributedMachine, alpha, domain: str) -> tuple[Action, ...]:
    """The subsequence of ``alpha`` made of ``domain``'s own sends and receives."""
    p = machine.process(domain)
    return tuple(a for a in alpha if p.in_alphabet(a))
