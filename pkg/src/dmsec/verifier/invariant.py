"""AG checks over a single process's local state graph."""
from __future__ import annotations

from collections import deque
from typing import Any, Mapping

from ..core import ProcessSpec, Send
from ..expr import EvalError, Expr, PredicateParseError
from .verdict import InvariantCounterexample, Limits, Verdict

__all__ = ["check_invariant", "state_env"]


def state_env(proc: ProcessSpec, state: str, constants: Mapping[str, Any] | None = None) -> dict[str, Any]:
    env: dict[str, Any] = {"state": state, "location": state}
    if constants:
        env.update(constants)
    env.update(proc.valuations.get(state, {}))
    return env


def check_invariant(proc: ProcessSpec, predicate: str | Expr,
                    constants: Mapping[str, Any] | None = None,
                    limits: Limits | None = None) -> Verdict:
    """Check ``AG predicate`` on the buffer-free reachability graph of ``proc``.

    The predicate sees ``state``/``location`` (the state id), the state's
    valuation and ``constants``.  Unbound names stand for themselves, so
    ``location = Price_Sent`` compares against the symbol.
    """
    expr = predicate if isinstance(predicate, Expr) else Expr(predicate)
    fn = expr.compile_env()
    limits = limits or Limits(None, None)
    outgoing: dict[str, list] = {}
    for (s, a), t in proc.step.items():
        outgoing.setdefault(s, []).append((a, t))
    for lst in outgoing.values():
        lst.sort(key=lambda at: (0 if isinstance(at[0], Send) else 1, at[0].msg, at[1]))

    parent = {proc.initial: None}
    depth = {proc.initial: 0}
    queue = deque([proc.initial])
    while queue:
        s = queue.popleft()
        limits.tick()
        try:
            ok = fn(state_env(proc, s, constants))
        except EvalError as e:
            raise PredicateParseError(f"cannot evaluate {expr.source!r} in state {s}: {e}") from e
        if not isinstance(ok, bool):
            raise PredicateParseError(f"predicate {expr.source!r} is not boolean (got {ok!r})")
        if not ok:
            path = []
            n = s
            while parent[n] is not None:
                n, a = parent[n]
                path.append(a)
            cex = InvariantCounterexample(proc.id, tuple(reversed(path)), s)
            return Verdict("invariant", False, cex, len(parent), depth[s])
        for a, t in outgoing.get(s, ()):
            if t not in parent:
                parent[t] = (s, a)
                depth[t] = depth[s] + 1
                queue.append(t)
    return Verdict("invariant", True, None, len(parent), max(depth.values()))
