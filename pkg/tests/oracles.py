"""Reference implementations used only by the tests.

Each one is written straight from the definitions and shares no code with
the package beyond the data types and running a monitor on a sequence.
"""
from __future__ import annotations

from dmsec.core import Recv, Send
from dmsec.policy import Filter, Top


def compute_excess_ref(prod, lb, ub):
    if lb <= prod <= ub:
        return 0
    return prod - ub if prod > ub else prod - lb


def _sender(machine, a):
    return machine.sender_of[a.msg]


def enabled_ref(machine, state):
    """Enabled actions of a global state, straight from the step rules."""
    out = []
    for i, p in enumerate(machine.processes):
        s, buf = state[i]
        for (src, a), _t in p.step.items():
            if src != s:
                continue
            if isinstance(a, Send):
                out.append(a)
        # the first buffered message this process can take
        for m in buf:
            if (s, Recv(p.id, m)) in p.step:
                out.append(Recv(p.id, m))
                break
    return out


def step_ref(machine, state, a):
    new = []
    src = _sender(machine, a)
    for i, p in enumerate(machine.processes):
        s, buf = state[i]
        if isinstance(a, Send):
            if p.id == src:
                s = p.step[(s, a)]
            if p.id in machine.receivers_of[a.msg]:
                buf = buf + (a.msg,)
        elif p.id == a.receiver:
            k = buf.index(a.msg)
            buf = buf[:k] + buf[k + 1:]
            s = p.step[(s, a)]
        new.append((s, buf))
    return tuple(new)


def executions_ref(machine, depth):
    """All (trace, state) pairs of length <= depth, by plain recursion."""
    init = tuple((p.initial, ()) for p in machine.processes)
    out = []

    def go(alpha, q):
        out.append((alpha, q))
        if len(alpha) < depth:
            for a in enabled_ref(machine, q):
                go(alpha + (a,), step_ref(machine, q, a))

    go((), init)
    return out


def _local(machine, pid, a):
    p = machine.process(pid)
    return (isinstance(a, Send) and a.msg in p.outputs) or (isinstance(a, Recv) and a.receiver == pid)


def _filter_at(machine, mon, src, alpha, j):
    hist = [b for b in alpha[:j] if _local(machine, src, b)]
    c = mon.initial_config
    for b in hist + [alpha[j]]:
        c = mon.step(c, b)
    return mon.emits(c, alpha[j])


def purge_ref(machine, policy, domain, alpha):
    """Purge by its recursive definition, with FIFO send/receive matching."""
    alpha = tuple(alpha)
    kept = []
    for i, a in enumerate(alpha):
        src = _sender(machine, a)
        lab = policy.edges.get((src, domain))
        if src == domain or isinstance(lab, Top):
            kept.append(a)
            continue
        if not isinstance(lab, Filter):
            continue
        if _local(machine, src, a):
            if _filter_at(machine, lab.monitor, src, alpha, i):
                kept.append(a)
            continue
        # receive by someone else: value of the matching send
        nth = sum(1 for b in alpha[:i] if b == a)
        sends = [j for j in range(i) if alpha[j] == Send(a.msg)]
        if nth < len(sends) and _filter_at(machine, lab.monitor, src, alpha, sends[nth]):
            kept.append(a)
    return tuple(kept)


def projection_ref(machine, policy, domain, alpha):
    """Filter-free policies: keep exactly the actions whose domain may flow to ``domain``."""
    return tuple(a for a in alpha
                 if _sender(machine, a) == domain or (_sender(machine, a), domain) in policy.edges)


def f_excess_ref(alpha, a, n, lb, ub):
    """The excess filter evaluated directly on a history of SMG."""
    if isinstance(a, Send) and a.msg.startswith("P("):
        return len(alpha) == 0 or alpha[-1] == Send("E(0)")
    if isinstance(a, Send) and a.msg.startswith("E("):
        if len(alpha) < n:
            return False
        last = alpha[len(alpha) - n:]
        counts = {i: 0 for i in range(1, n + 1)}
        prod = 0
        for b in last:
            if not (isinstance(b, Recv) and b.msg.startswith("Plan_")):
                return False
            who, val = b.msg[len("Plan_"):].rstrip(")").split("(")
            counts[int(who)] += 1
            prod += int(val)
        if any(c != 1 for c in counts.values()):
            return False
        return int(a.msg[2:-1]) == compute_excess_ref(prod, lb, ub)
    return False


def random_walk(machine, rng, length):
    """A random execution of at most ``length`` steps (stops early at deadlock)."""
    q = tuple((p.initial, ()) for p in machine.processes)
    alpha = []
    for _ in range(length):
        acts = enabled_ref(machine, q)
        if not acts:
            break
        a = acts[rng.randrange(len(acts))]
        alpha.append(a)
        q = step_ref(machine, q, a)
    return tuple(alpha)


def is_subsequence(small, big):
    it = iter(big)
    return all(any(x == y for y in it) for x in small)
