"""Re-verification of counterexamples from first principles.

Nothing here goes through the incremental purge tracker or the product
explorations of the checkers: purge is recomputed by its recursive
definition, filters are run from scratch over the projected history, and
executions are replayed step by step.
"""
from __future__ import annotations

from typing import Any, Iterable, Mapping

from .core import Action, DistributedMachine, ModelError, Send, dom, obs, parse_action
from .expr import Expr
from .monitor import filter_eval
from .policy import Filter, SecurityPolicy, Top
from .semantics import NotEnabled, enabled_actions, project, replay, step_global
from .verifier.invariant import state_env

__all__ = ["reference_purge", "filter_value", "recheck", "InvalidCounterexample"]


class InvalidCounterexample(ModelError):
    """The counterexample does not describe a run of the given model."""


def filter_value(machine: DistributedMachine, policy: SecurityPolicy, alpha: tuple[Action, ...],
                 i: int, dst: str) -> bool | None:
    """Value of the filter on ``dom(alpha[i]) -> dst`` for the i-th action, or None if the edge is unfiltered."""
    a = alpha[i]
    src = dom(machine, a)
    label = policy.label(src, dst)
    if not isinstance(label, Filter):
        return None
    mon = label.monitor
    proc = machine.process(src)
    if proc.in_alphabet(a):
        return filter_eval(mon, project(machine, alpha[:i], src), a)
    # a receive by another process: the value of the matching send
    k = sum(1 for b in alpha[:i] if b == a)
    seen = 0
    for j in range(i):
        if alpha[j] == Send(a.msg):
            if seen == k:
                return filter_eval(mon, project(machine, alpha[:j], src), alpha[j])
            seen += 1
    return False


def reference_purge(machine: DistributedMachine, policy: SecurityPolicy, domain: str,
                    alpha: Iterable[Action]) -> tuple[Action, ...]:
    alpha = tuple(alpha)
    out = []
    for i, a in enumerate(alpha):
        src = dom(machine, a)
        label = policy.label(src, domain)
        if src == domain or isinstance(label, Top):
            out.append(a)
        elif isinstance(label, Filter) and filter_value(machine, policy, alpha, i, domain):
            out.append(a)
    return tuple(out)


def _actions(items) -> tuple[Action, ...]:
    try:
        return tuple(parse_action(s) for s in items)
    except (ValueError, TypeError) as e:
        raise InvalidCounterexample(f"bad action list: {e}") from None


def _replay(machine, alpha):
    try:
        return replay(machine, alpha)
    except (NotEnabled, ModelError) as e:
        raise InvalidCounterexample(f"trace {[str(a) for a in alpha]} does not replay: {e}") from None


def _local_run(proc, actions):
    s = proc.initial
    for a in actions:
        t = proc.successor(s, a)
        if t is None:
            raise InvalidCounterexample(f"{proc.id} cannot perform {a} in state {s}")
        s = t
    return s


def recheck(machine: DistributedMachine, policy: SecurityPolicy | None, cex: Mapping[str, Any],
            predicate: str | None = None, constants: Mapping[str, Any] | None = None) -> tuple[bool, str]:
    """Return ``(confirmed, explanation)``.

    ``confirmed`` is True when the counterexample violates the definition it
    cites.  Malformed or non-replayable input raises InvalidCounterexample.
    """
    kind = cex.get("kind")
    if kind == "compliance":
        d = cex["domain"]
        alpha, beta = _actions(cex["alpha"]), _actions(cex["beta"])
        qa, qb = _replay(machine, alpha), _replay(machine, beta)
        pa = reference_purge(machine, policy, d, alpha)
        pb = reference_purge(machine, policy, d, beta)
        if pa != pb:
            return False, f"purges for {d} differ"
        if obs(machine, d, qa) == obs(machine, d, qb):
            return False, f"observations of {d} agree"
        return True, f"equal purges for {d}, different observations"
    if kind == "filter":
        src, dst = cex["edge"]
        delta = _actions(cex["delta"])
        (a,) = _actions([cex["a"]])
        proc = machine.process(src)
        s = _local_run(proc, delta)
        if proc.successor(s, a) is None:
            return False, f"{a} is not enabled after the history"
        if not isinstance(a, Send) or dst not in machine.receivers_of.get(a.msg, ()):
            return False, f"{a} is not received by {dst}"
        label = policy.label(src, dst)
        if not isinstance(label, Filter):
            return False, f"{src}->{dst} carries no filter"
        if filter_eval(label.monitor, delta, a):
            return False, "the filter admits the action"
        return True, f"filter on {src}->{dst} rejects enabled {a}"
    if kind == "unwinding":
        d = cex["domain"]
        s = _replay(machine, _actions(cex["witness_s"]))
        cond = cex["condition"]
        a = _actions([cex["action"]])[0] if cex.get("action") else None
        if cond == "local respect":
            if (dom(machine, a), d) in policy.edges:
                return False, f"{dom(machine, a)} may flow to {d}"
            return obs(machine, d, s) != obs(machine, d, _step(machine, s, a)), "local respect"
        t = _replay(machine, _actions(cex["witness_t"]))
        if obs(machine, d, s) != obs(machine, d, t):
            return False, "witness states are not related"
        if cond == "output consistency":
            return False, "related states have equal observations"
        if cond.startswith("step consistency (strict"):
            return enabled_actions(machine, s) != enabled_actions(machine, t), cond
        s2, t2 = _step(machine, s, a), _step(machine, t, a)
        return obs(machine, d, s2) != obs(machine, d, t2), cond
    if kind == "invariant":
        if predicate is None:
            raise InvalidCounterexample("an invariant counterexample needs the predicate")
        proc = machine.process(cex["process"])
        s = _local_run(proc, _actions(cex["path"]))
        if s != cex["state"]:
            return False, f"the path ends in {s}, not {cex['state']}"
        ok = Expr(predicate).evaluate(state_env(proc, s, constants))
        return (not ok), "predicate is false" if not ok else "predicate holds"
    raise InvalidCounterexample(f"unknown counterexample kind {kind!r}")


def _step(machine, q, a):
    try:
        return step_global(machine, q, a)
    except NotEnabled:
        raise InvalidCounterexample(f"{a} is not enabled at the witness state") from None

