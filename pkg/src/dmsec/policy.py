"""Security policies, implicit policies and the purge function."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import (Action, DistributedMachine, ModelError, Recv, Send,
                   UnknownProcess, dom)
from .monitor import AnySendOf, Exact, FilterMonitor

__all__ = [
    "Top", "TOP", "Filter", "EdgeLabel", "SecurityPolicy", "PolicyError",
    "UnknownDomain", "MissingEdge", "MissingSelfEdge", "FilterAlphabetViolation",
    "implicit_policy", "validate_policy", "purge", "PurgeTracker",
]


class PolicyError(ModelError):
    pass


class UnknownDomain(PolicyError, KeyError):
    def __str__(self):
        return f"unknown domain {self.args[0]!r}"


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "⊤"


TOP = Top()


@dataclass(frozen=True)
class Filter:
    monitor: FilterMonitor

    def __str__(self):
        return f"filter:{self.monitor.name}"


EdgeLabel = Top | Filter


@dataclass(frozen=True)
class SecurityPolicy:
    """Domains plus labelled edges; at most one edge per ordered pair."""

    domains: tuple[str, ...]
    edges: Mapping[tuple[str, str], EdgeLabel] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        object.__setattr__(self, "edges", dict(self.edges))
        if len(set(self.domains)) != len(self.domains):
            raise PolicyError("duplicate domain")
        known = set(self.domains)
        for (src, dst), label in self.edges.items():
            if src not in known:
                raise UnknownDomain(src)
            if dst not in known:
                raise UnknownDomain(dst)
            if not isinstance(label, (Top, Filter)):
                raise PolicyError(f"edge {src}->{dst}: bad label {label!r}")
            if src == dst and not isinstance(label, Top):
                raise PolicyError(f"self-edge of {src} must be labelled ⊤")

    def label(self, src: str, dst: str) -> EdgeLabel | None:
        return self.edges.get((src, dst))

    def filtered_edges(self) -> list[tuple[str, str, FilterMonitor]]:
        order = {d: i for i, d in enumerate(self.domains)}
        out = [(s, d, lab.monitor) for (s, d), lab in self.edges.items() if isinstance(lab, Filter)]
        return sorted(out, key=lambda e: (order[e[0]], order[e[1]]))

    def with_self_edges(self) -> "SecurityPolicy":
        edges = dict(self.edges)
        for d in self.domains:
            edges.setdefault((d, d), TOP)
        return SecurityPolicy(self.domains, edges)

    def with_label(self, src: str, dst: str, label: EdgeLabel | None) -> "SecurityPolicy":
        edges = dict(self.edges)
        if label is None:
            edges.pop((src, dst), None)
        else:
            edges[(src, dst)] = label
        return SecurityPolicy(self.domains, edges)


def implicit_policy(machine: DistributedMachine) -> SecurityPolicy:
    """One domain per process; a ⊤ edge wherever a message can flow."""
    edges: dict[tuple[str, str], EdgeLabel] = {(p, p): TOP for p in machine.proc_ids}
    for m, src in machine.sender_of.items():
        for dst in machine.receivers_of[m]:
            edges[(src, dst)] = TOP
    return SecurityPolicy(machine.proc_ids, edges)


@dataclass(frozen=True)
class MissingEdge:
    src: str
    dst: str

    def __str__(self):
        return f"MissingEdge({self.src}, {self.dst}): a message flows from {self.src} to {self.dst} but the policy has no edge"


@dataclass(frozen=True)
class MissingSelfEdge:
    domain: str

    def __str__(self):
        return f"MissingSelfEdge({self.domain})"


@dataclass(frozen=True)
class FilterAlphabetViolation:
    src: str
    dst: str
    pattern: str

    def __str__(self):
        return f"FilterAlphabetViolation({self.src}, {self.dst}): pattern {self.pattern} lies outside {self.src}'s alphabet"


def validate_policy(machine: DistributedMachine, policy: SecurityPolicy) -> list:
    for d in policy.domains:
        if d not in machine.index:
            raise UnknownDomain(d)
    warnings: list = []
    pairs = sorted({(machine.sender_of[m], r) for m in machine.messages for r in machine.receivers_of[m]},
                   key=lambda e: (machine.index[e[0]], machine.index[e[1]]))
    for src, dst in pairs:
        if src != dst and (src, dst) not in policy.edges:
            warnings.append(MissingEdge(src, dst))
    for d in policy.domains:
        if not isinstance(policy.edges.get((d, d)), Top):
            warnings.append(MissingSelfEdge(d))
    for src, dst, mon in policy.filtered_edges():
        proc = machine.process(src)
        for pat in mon.patterns():
            bad = False
            if isinstance(pat, Exact):
                bad = not proc.in_alphabet(pat.action)
            elif isinstance(pat, AnySendOf):
                bad = not pat.msgs <= proc.outputs
            if bad:
                warnings.append(FilterAlphabetViolation(src, dst, str(pat)))
    return warnings


class PurgeTracker:
    """Incremental purge bookkeeping along one execution.

    The tracker state is an immutable value so that it can be shared by
    branching explorations.  For every filtered edge it holds the monitor
    configuration after the source's projected history and, per
    (message, receiver) pair, the FIFO queue of filter values of sends not
    yet received.  A receive by another process inherits the value of its
    matching send.
    """

    def __init__(self, machine: DistributedMachine, policy: SecurityPolicy):
        for d in policy.domains:
            if d not in machine.index:
                raise UnknownDomain(d)
        self.machine = machine
        self.policy = policy
        self.edges = policy.filtered_edges()
        self.domains = machine.proc_ids
        self._slots = []
        for src, _dst, _mon in self.edges:
            slots = {}
            for m in sorted(machine.process(src).outputs):
                for r in sorted(machine.receivers_of[m]):
                    if r != src:
                        slots[(m, r)] = len(slots)
            self._slots.append(slots)
        self._plans: dict[Action, tuple] = {}

    @property
    def initial(self):
        configs = tuple(mon.initial_config for _s, _d, mon in self.edges)
        queues = tuple(tuple(() for _ in slots) for slots in self._slots)
        return (configs, queues)

    def _plan(self, a: Action):
        plan = self._plans.get(a)
        if plan is not None:
            return plan
        m = self.machine
        src_of_a = dom(m, a)
        edge_vis = {}
        for (s, d), lab in self.policy.edges.items():
            if s == src_of_a and d in m.index:
                edge_vis[d] = lab
        top = frozenset(m.index[d] for d, lab in edge_vis.items() if isinstance(lab, Top))
        work = []
        for e, (src, dst, mon) in enumerate(self.edges):
            proc = m.process(src)
            local = proc.in_alphabet(a)
            pushes = ()
            pop = None
            if isinstance(a, Send) and src == src_of_a:
                pushes = tuple(self._slots[e][(a.msg, r)] for r in sorted(m.receivers_of[a.msg]) if r != src)
            elif isinstance(a, Recv) and src == src_of_a and a.receiver != src:
                pop = self._slots[e].get((a.msg, a.receiver))
            gates = src == src_of_a and isinstance(edge_vis.get(dst), Filter)
            if local or pushes or pop is not None:
                work.append((e, mon, local, pushes, pop, m.index[dst] if gates else None))
        plan = (top, tuple(work))
        self._plans[a] = plan
        return plan

    def advance(self, state, a: Action):
        """Return ``(new_state, visible)`` where ``visible`` holds domain indices that keep ``a``."""
        top, work = self._plan(a)
        if not work:
            return state, top
        configs, queues = state
        configs = list(configs)
        queues = list(queues)
        visible = set(top)
        for e, mon, local, pushes, pop, gated_dst in work:
            if local:
                c = mon.step(configs[e], a)
                configs[e] = c
                value = mon.emits(c, a)
            else:
                q = list(queues[e])
                pending = q[pop]
                if pending:
                    value = pending[0]
                    q[pop] = pending[1:]
                else:
                    # no matching send: not a valid execution; purge stays total
                    value = False
                queues[e] = tuple(q)
            if pushes:
                q = list(queues[e])
                for slot in pushes:
                    q[slot] = q[slot] + (value,)
                queues[e] = tuple(q)
            if gated_dst is not None and value:
                visible.add(gated_dst)
        return (tuple(configs), tuple(queues)), visible


def purge(machine: DistributedMachine, policy: SecurityPolicy, domain: str,
          alpha: Iterable[Action]) -> tuple[Action, ...]:
    """Erase the actions of ``alpha`` that ``domain`` may not learn about."""
    if domain not in policy.domains:
        raise UnknownDomain(domain)
    if domain not in machine.index:
        raise UnknownProcess(domain)
    tracker = PurgeTracker(machine, policy)
    target = machine.index[domain]
    state = tracker.initial
    out = []
    for a in alpha:
        state, visible = tracker.advance(state, a)
        if target in visible:
            out.append(a)
    return tuple(out)
