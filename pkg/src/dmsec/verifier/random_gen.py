"""Seeded random machines, monitors and filtered policies for cross-validation."""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..core import DistributedMachine, ProcessSpec, Recv, Send, compose
from ..expr import Expr
from ..monitor import (AnyReceive, AnySendOf, EmitRule, Exact, FilterMonitor,
                       MonitorTransition, Register, Wildcard)
from ..policy import TOP, Filter, SecurityPolicy, implicit_policy

__all__ = ["RandomConfig", "random_machine", "random_filter_monitor", "random_filtered_policy"]


@dataclass(frozen=True)
class RandomConfig:
    min_procs: int = 2
    max_procs: int = 4
    max_states: int = 4
    max_messages: int = 6
    density: float = 0.5

    def __post_init__(self):
        if not 1 <= self.min_procs <= self.max_procs <= 4:
            raise ValueError("process count must lie in [1, 4]")
        if not 1 <= self.max_states <= 4:
            raise ValueError("states per process must lie in [1, 4]")
        if not 1 <= self.max_messages <= 6:
            raise ValueError("message count must lie in [1, 6]")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")


def random_machine(seed: int, config: RandomConfig = RandomConfig()) -> DistributedMachine:
    rng = random.Random(seed)
    n = rng.randint(config.min_procs, config.max_procs)
    procs = [f"P{i}" for i in range(n)]
    nmsg = rng.randint(1, config.max_messages)
    msgs = [f"m{i}" for i in range(nmsg)]
    outputs = {p: set() for p in procs}
    inputs = {p: set() for p in procs}
    # routing first, so the result always composes
    for m in msgs:
        sender = rng.choice(procs)
        outputs[sender].add(m)
        others = [p for p in procs if p != sender]
        if not others or rng.random() < 0.1:
            inputs[sender].add(m)
        if others:
            for r in rng.sample(others, rng.randint(1, min(2, len(others)))):
                inputs[r].add(m)
    specs = []
    for p in procs:
        k = rng.randint(1, config.max_states)
        states = [f"s{i}" for i in range(k)]
        alphabet = [Send(m) for m in sorted(outputs[p])] + [Recv(p, m) for m in sorted(inputs[p])]
        step = {}
        for s in states:
            for a in alphabet:
                if rng.random() < config.density:
                    step[(s, a)] = rng.choice(states)
        specs.append(ProcessSpec(p, frozenset(states), "s0", frozenset(inputs[p]), frozenset(outputs[p]), step))
    return compose(specs)


def _guard(rng: random.Random, regs: list[Register]) -> Expr | None:
    if not regs or rng.random() < 0.5:
        return None
    r = rng.choice(regs)
    c = rng.randint(r.min, r.max)
    form = rng.randrange(4)
    if form == 0:
        return Expr(f"{r.name} = {c}")
    if form == 1:
        return Expr(f"{r.name} <= {c}")
    if form == 2:
        return Expr(f"{r.name} mod 2 = {c % 2}")
    return Expr(f"not ({r.name} = {c}) or {r.name} > {c}")


def random_filter_monitor(seed: int, machine: DistributedMachine, edge: tuple[str, str],
                          permissive: bool = False) -> FilterMonitor:
    """A random monitor over the alphabet of the edge source.

    ``permissive`` adds, in every state, an unguarded emit rule for the sends
    that reach ``dst``; the rest of the monitor stays random.
    """
    src, dst = edge
    rng = random.Random(f"monitor:{seed}:{src}:{dst}")
    proc = machine.process(src)
    alphabet = sorted(proc.alphabet, key=lambda a: (0 if isinstance(a, Send) else 1, a.msg))
    sends = [a for a in alphabet if isinstance(a, Send)]
    states = [f"q{i}" for i in range(rng.randint(1, 3))]
    regs = []
    for i in range(rng.randint(0, 2)):
        lo, hi = rng.randint(-8, 0), rng.randint(0, 8)
        regs.append(Register(f"r{i}", lo, hi, rng.randint(lo, hi)))

    transitions = []
    for s in states:
        for a in alphabet:
            if rng.random() >= 0.5:
                continue
            updates = []
            for r in regs:
                if rng.random() < 0.5:
                    width = r.max - r.min + 1
                    if rng.random() < 0.7 and width > 1:
                        k = rng.randint(1, width - 1)
                        updates.append((r.name, Expr(f"({r.name} - ({r.min}) + {k}) mod {width} + ({r.min})")))
                    else:
                        updates.append((r.name, Expr(str(rng.randint(r.min, r.max)))))
            transitions.append(MonitorTransition(s, Exact(a), rng.choice(states), _guard(rng, regs), tuple(updates)))

    emit = []
    if rng.random() >= 0.1:
        for s in states:
            for _ in range(rng.randint(0, 3)):
                kind = rng.random()
                if kind < 0.4 and sends:
                    pat = Exact(rng.choice(sends))
                elif kind < 0.7 and sends:
                    pat = AnySendOf(frozenset(a.msg for a in rng.sample(sends, rng.randint(1, len(sends)))))
                elif kind < 0.85:
                    pat = Wildcard()
                else:
                    pat = AnyReceive()
                emit.append(EmitRule(s, pat, _guard(rng, regs)))
    if permissive:
        towards = frozenset(a.msg for a in sends if dst in machine.receivers_of[a.msg])
        if towards:
            emit.extend(EmitRule(s, AnySendOf(towards)) for s in states)
    return FilterMonitor(f"f_{src}_{dst}_{seed}", frozenset(states), states[0], tuple(regs),
                         tuple(transitions), tuple(emit))


def random_filtered_policy(seed: int, machine: DistributedMachine, p_filter: float = 0.5,
                           p_extra: float = 0.1, p_permissive: float = 0.5) -> SecurityPolicy:
    """The implicit policy, optionally widened, with filters on some cross edges."""
    rng = random.Random(f"policy:{seed}")
    base = implicit_policy(machine)
    edges = dict(base.edges)
    for s in machine.proc_ids:
        for d in machine.proc_ids:
            if s != d and (s, d) not in edges and rng.random() < p_extra:
                edges[(s, d)] = TOP
    cross = [e for e in sorted(edges, key=lambda e: (machine.index[e[0]], machine.index[e[1]])) if e[0] != e[1]]
    chosen = [e for e in cross if rng.random() < p_filter]
    if not chosen and cross:
        chosen = [rng.choice(cross)]
    for e in chosen:
        edges[e] = Filter(random_filter_monitor(seed, machine, e, rng.random() < p_permissive))
    return SecurityPolicy(base.domains, edges)
