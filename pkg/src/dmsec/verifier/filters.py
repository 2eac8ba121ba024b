"""Local Filter Respect: a purely local check of one filtered edge."""
from __future__ import annotations

from collections import deque

from ..core import DistributedMachine, Send
from ..policy import Filter, PolicyError, SecurityPolicy
from .verdict import FilterCounterexample, Limits, Verdict

__all__ = ["check_local_filter_respect", "NotAFilteredEdge"]


class NotAFilteredEdge(PolicyError):
    pass


def check_local_filter_respect(machine: DistributedMachine, policy: SecurityPolicy,
                               edge: tuple[str, str], mode: str = "fixpoint",
                               depth: int | None = None, limits: Limits | None = None) -> Verdict:
    """Explore ``src`` x monitor and look for an enabled, ``dst``-bound send the filter rejects.

    ``mode`` is ``"fixpoint"`` (explore to closure) or ``"depth"`` (local
    histories of length at most ``depth``).  Breadth-first order makes the
    reported history a shortest one.
    """
    src, dst = edge
    label = policy.label(src, dst)
    if not isinstance(label, Filter):
        raise NotAFilteredEdge(f"edge {src}->{dst} carries no filter")
    if mode not in ("fixpoint", "depth"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "depth" and (depth is None or depth < 0):
        raise ValueError("depth mode needs a non-negative depth")
    limits = limits or Limits(None, None)
    mon = label.monitor
    proc = machine.process(src)
    outgoing: dict[str, list] = {}
    for (s, a), t in proc.step.items():
        outgoing.setdefault(s, []).append((a, t))
    for lst in outgoing.values():
        lst.sort(key=lambda at: (0, at[0].msg) if isinstance(at[0], Send) else (1, at[0].msg))
    observed = {m for m in proc.outputs if dst in machine.receivers_of.get(m, ())}

    start = (proc.initial, mon.initial_config)
    parent = {start: None}
    level = {start: 0}
    queue = deque([start])
    reached = 0
    while queue:
        node = queue.popleft()
        limits.tick()
        s, c = node
        lvl = level[node]
        reached = max(reached, lvl)
        if mode == "depth" and lvl > depth:
            continue
        for a, t in outgoing.get(s, ()):
            c2 = mon.step(c, a)
            if isinstance(a, Send) and a.msg in observed and not mon.emits(c2, a):
                cex = FilterCounterexample((src, dst), _path(parent, node), a, False)
                return Verdict("filter", False, cex, len(parent), reached)
            nxt = (t, c2)
            if nxt not in parent:
                parent[nxt] = (node, a)
                level[nxt] = lvl + 1
                queue.append(nxt)
    return Verdict("filter", True, None, len(parent), reached)


def _path(parent, node):
    out = []
    while parent[node] is not None:
        node, a = parent[node]
        out.append(a)
    return tuple(reversed(out))
