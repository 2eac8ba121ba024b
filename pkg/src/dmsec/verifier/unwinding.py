"""Unwinding conditions over the states reachable within a depth bound."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from ..core import DistributedMachine, GlobalState, dom, obs
from ..policy import SecurityPolicy
from ..semantics import _enabled, _step, reachable_states
from .verdict import Limits, UnwindingCounterexample, Verdict

__all__ = ["UnwindingRelation", "canonical_relation", "constant_relation", "check_unwinding"]


@dataclass(frozen=True)
class UnwindingRelation:
    """States ``s`` and ``t`` are related for a domain iff their keys agree."""

    name: str
    key_for: Callable[[DistributedMachine, str, GlobalState], Hashable]


canonical_relation = UnwindingRelation("canonical", lambda m, d, q: obs(m, d, q))
constant_relation = UnwindingRelation("constant", lambda m, d, q: 0)


def check_unwinding(machine: DistributedMachine, policy: SecurityPolicy,
                    relation: UnwindingRelation = canonical_relation, depth: int = 7,
                    strict_step: bool = False, limits: Limits | None = None) -> Verdict:
    """Output consistency, step consistency and local respect.

    Step consistency is required for actions enabled in both related states;
    with ``strict_step`` related states must also enable the same actions.
    Filtered edges count as edges for local respect: their filters are the
    business of the Local Filter Respect check.
    """
    limits = limits or Limits(None, None)
    states = reachable_states(machine, depth)
    limits.tick(len(states))
    reached = max((len(w) for w in states.values()), default=0)
    explored = len(states)
    key_for = relation.key_for

    def fail(cond, d, s, t=None, a=None):
        cex = UnwindingCounterexample(cond, d, states[s], None if t is None else states[t], a)
        return Verdict("unwinding", False, cex, explored, reached)

    succ = {q: [(a, _step(machine, q, a)) for a in _enabled(machine, q)] for q in states}
    for d in policy.domains:
        groups: dict = {}
        keys = {}
        for q in states:
            k = key_for(machine, d, q)
            keys[q] = k
            groups.setdefault(k, []).append(q)
        for members in groups.values():
            first = members[0]
            o = obs(machine, d, first)
            for q in members[1:]:
                if obs(machine, d, q) != o:
                    return fail("output consistency", d, first, q)
            by_action: dict = {}
            enabled0 = {a for a, _ in succ[first]}
            for q in members:
                limits.tick()
                if strict_step and {a for a, _ in succ[q]} != enabled0:
                    diff = sorted(enabled0 ^ {a for a, _ in succ[q]}, key=machine.action_key)
                    return fail("step consistency (strict: different enabled actions)", d, first, q, diff[0])
                for a, q2 in succ[q]:
                    k2 = key_for(machine, d, q2)
                    seen = by_action.get(a)
                    if seen is None:
                        by_action[a] = (q, k2)
                    elif seen[1] != k2:
                        return fail("step consistency", d, seen[0], q, a)
        for q in states:
            for a, q2 in succ[q]:
                if (dom(machine, a), d) not in policy.edges and key_for(machine, d, q2) != keys[q]:
                    return fail("local respect", d, q, None, a)
    return Verdict("unwinding", True, None, explored, reached)
