"""Brute-force compliance oracle.

Every execution up to the depth bound is enumerated; per domain we keep a
map from purged sequence to the observation reached.  Two executions with
the same purge but different observations violate compliance.
"""
from __future__ import annotations

from ..core import DistributedMachine
from ..policy import PurgeTracker, SecurityPolicy, UnknownDomain
from ..semantics import bfs_executions
from .verdict import ComplianceCounterexample, Limits, Verdict

__all__ = ["check_compliance"]


def check_compliance(machine: DistributedMachine, policy: SecurityPolicy, depth: int = 8,
                     limits: Limits | None = None) -> Verdict:
    limits = limits or Limits(None, None)
    tracker = PurgeTracker(machine, policy)
    targets = []
    for d in policy.domains:
        if d not in machine.index:
            raise UnknownDomain(d)
        targets.append((d, machine.index[d]))
    n = len(machine.processes)

    def extend(ctx, q, a, q2):
        st, purges = ctx
        st, visible = tracker.advance(st, a)
        return st, tuple(p + (a,) if i in visible else p for i, p in enumerate(purges))

    seen = [dict() for _ in targets]
    explored = 0
    reached = 0
    init = (tracker.initial, tuple(() for _ in range(n)))
    for alpha, q, (_st, purges) in bfs_executions(machine, depth, init, extend):
        limits.tick()
        explored += 1
        reached = len(alpha)
        for k, (d, i) in enumerate(targets):
            key = purges[i]
            ob = q[i]
            prev = seen[k].get(key)
            if prev is None:
                seen[k][key] = (ob, alpha)
            elif prev[0] != ob:
                cex = ComplianceCounterexample(d, prev[1], alpha, key, prev[0], ob)
                return Verdict("compliance", False, cex, explored, reached)
    return Verdict("compliance", True, None, explored, reached)
