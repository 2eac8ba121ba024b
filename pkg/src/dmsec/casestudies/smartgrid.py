"""Prosumer-based smart microgrid.

The coordinator SMG broadcasts a price, collects one production plan per
prosumer, and broadcasts the excess over the line-capacity band until the
plans are accepted.  Valued messages become message families over finite
integer domains: ``P(price)``, ``E(excess)`` and ``Plan_i(prod)``.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

from ..core import DistributedMachine, ModelError, ProcessSpec, Recv, Send, compose
from ..expr import Expr
from ..monitor import (AnySendOf, EmitRule, Exact, FilterMonitor,
                       MonitorTransition, Register)
from ..policy import Filter, SecurityPolicy, implicit_policy

__all__ = [
    "SmartGridParams", "compute_excess", "build_smartgrid", "smg_process",
    "prosumer_process", "f_excess_monitor", "price_msg", "excess_msg",
    "plan_msg", "SMG", "prosumer", "StateLimitExceeded", "INVARIANT_PRICE_SENT",
    "INVARIANT_EXCESS_SENT",
]

SMG = "SMG"

INVARIANT_PRICE_SENT = "location = Price_Sent => excess = 0"
INVARIANT_EXCESS_SENT = (
    "location = Excess_Sent => (excess = 0 and Prod <= UB and Prod >= LB)"
    " or (excess = Prod - UB and Prod > UB)"
    " or (excess = Prod - LB and Prod < LB)"
)


class StateLimitExceeded(ModelError):
    pass


@dataclass(frozen=True)
class SmartGridParams:
    n: int = 3
    plan_min: int = -2
    plan_max: int = 2
    lb: int = -3
    ub: int = 3
    prices: tuple[int, ...] = (1, 2)
    state_limit: int = 2_000_000

    def __post_init__(self):
        object.__setattr__(self, "prices", tuple(sorted(set(self.prices))))
        if self.n < 1:
            raise ValueError("need at least one prosumer")
        if self.plan_min > self.plan_max:
            raise ValueError("plan_min must not exceed plan_max")
        if self.lb > self.ub:
            raise ValueError("L_B must not exceed U_B")
        if not self.prices:
            raise ValueError("price domain is empty")

    @property
    def prod_range(self) -> tuple[int, int]:
        return self.n * self.plan_min, self.n * self.plan_max

    @property
    def plans(self) -> range:
        return range(self.plan_min, self.plan_max + 1)

    def excess_values(self) -> list[int]:
        lo, hi = self.prod_range
        return sorted({compute_excess(p, self) for p in range(lo, hi + 1)})

    @property
    def constants(self) -> dict[str, int]:
        return {"LB": self.lb, "UB": self.ub}


def compute_excess(prod: int, params: SmartGridParams) -> int:
    if params.lb <= prod <= params.ub:
        return 0
    if prod > params.ub:
        return prod - params.ub
    return prod - params.lb


def prosumer(i: int) -> str:
    return f"Pr_{i}"


def price_msg(price: int) -> str:
    return f"P({price})"


def excess_msg(excess: int) -> str:
    return f"E({excess})"


def plan_msg(i: int, prod: int) -> str:
    return f"Plan_{i}({prod})"


def _state_name(loc, price, prod, excess, mask, n) -> str:
    bits = "".join("1" if mask >> i & 1 else "0" for i in range(n))
    return f"{loc}[price={price},Prod={prod},excess={excess},recv={bits}]"


def smg_process(params: SmartGridParams) -> ProcessSpec:
    """The coordinator, with data variables folded into explicit states.

    Silent moves of the reference automaton (Price_Sent -> Collect_Plans,
    Excess_Sent -> Collect_Plans / Init) are merged into the next visible
    action, so every state carries a send or receive edge.
    """
    n = params.n
    full = (1 << n) - 1
    init = ("Init", 0, 0, 0, 0)
    names: dict[tuple, str] = {}
    step = {}
    valuations = {}

    def name(node):
        s = names.get(node)
        if s is None:
            if len(names) >= params.state_limit:
                raise StateLimitExceeded(f"SMG exceeds {params.state_limit} states")
            s = names[node] = _state_name(*node, n)
            loc, price, prod, excess, mask = node
            val = {"location": loc, "price": price, "Prod": prod, "excess": excess}
            val.update({f"received_{i + 1}": mask >> i & 1 for i in range(n)})
            valuations[s] = val
            queue.append(node)
        return s

    def collect_from_empty(src, excess):
        for i in range(n):
            for v in params.plans:
                step[(src, Recv(SMG, plan_msg(i + 1, v)))] = name(("Collect_Plans", 0, v, excess, 1 << i))

    def send_price(src, excess):
        for p in params.prices:
            step[(src, Send(price_msg(p)))] = name(("Price_Sent", p, 0, excess, 0))

    queue: deque = deque()
    name(init)
    while queue:
        node = queue.popleft()
        src = names[node]
        loc, price, prod, excess, mask = node
        if loc == "Init":
            send_price(src, excess)
        elif loc == "Price_Sent":
            collect_from_empty(src, excess)
        elif loc == "Collect_Plans":
            if mask == full:
                e = compute_excess(prod, params)
                step[(src, Send(excess_msg(e)))] = name(("Excess_Sent", 0, prod, e, full))
            else:
                for i in range(n):
                    if not mask >> i & 1:
                        for v in params.plans:
                            step[(src, Recv(SMG, plan_msg(i + 1, v)))] = name(
                                ("Collect_Plans", 0, prod + v, excess, mask | 1 << i))
        elif loc == "Excess_Sent":
            if excess != 0:
                collect_from_empty(src, excess)
            else:
                send_price(src, 0)

    inputs = {plan_msg(i + 1, v) for i in range(n) for v in params.plans}
    outputs = {price_msg(p) for p in params.prices} | {excess_msg(e) for e in params.excess_values()}
    return ProcessSpec(SMG, frozenset(names.values()), names[init], frozenset(inputs),
                       frozenset(outputs), step, valuations)


def prosumer_process(i: int, params: SmartGridParams) -> ProcessSpec:
    """Prosumer ``i``: any plan after a price or a nonzero excess."""
    pid = prosumer(i)
    step = {}
    for p in params.prices:
        step[("wait", Recv(pid, price_msg(p)))] = "plan"
    for v in params.plans:
        step[("plan", Send(plan_msg(i, v)))] = "sent"
    for e in params.excess_values():
        step[("sent", Recv(pid, excess_msg(e)))] = "wait" if e == 0 else "plan"
    inputs = {price_msg(p) for p in params.prices} | {excess_msg(e) for e in params.excess_values()}
    outputs = {plan_msg(i, v) for v in params.plans}
    return ProcessSpec(pid, frozenset({"wait", "plan", "sent"}), "wait", frozenset(inputs),
                       frozenset(outputs), step)


def _excess_condition(v: int) -> str:
    if v == 0:
        return "Prod >= LB and Prod <= UB"
    if v > 0:
        return f"Prod > UB and Prod - UB = {v}"
    return f"Prod < LB and Prod - LB = {v}"


def f_excess_monitor(params: SmartGridParams) -> FilterMonitor:
    """Filter on SMG -> Pr_i edges.

    Registers: ``prev``/``cur`` hold the kind of the previous and current
    action (0 none, 1 sent E(0), 2 other send, 3 plan received); ``Prod``
    sums the first plan of each prosumer in the current round; ``got_i``
    counts prosumer i's plans in the round, saturating at 2.  A round is
    everything since the last send.
    """
    n = params.n
    lo, hi = params.prod_range
    got = [f"got_{i + 1}" for i in range(n)]
    regs = [Register("prev", 0, 3, 0), Register("cur", 0, 3, 0), Register("Prod", lo, hi, 0)]
    regs += [Register(g, 0, 2, 0) for g in got]
    shift = (("prev", Expr("cur")),)
    nonzero = [excess_msg(e) for e in params.excess_values() if e != 0]

    trans = [MonitorTransition("run", AnySendOf(frozenset(price_msg(p) for p in params.prices)), "run",
                               None, shift + (("cur", Expr("2")),))]
    if 0 in params.excess_values():
        trans.append(MonitorTransition("run", Exact(Send(excess_msg(0))), "run", None, shift + (("cur", Expr("1")),)))
    if nonzero:
        trans.append(MonitorTransition("run", AnySendOf(frozenset(nonzero)), "run", None, shift + (("cur", Expr("2")),)))
    new_round = Expr("cur = 1 or cur = 2")
    for i in range(n):
        for v in params.plans:
            pat = Exact(Recv(SMG, plan_msg(i + 1, v)))
            fresh = tuple((g, Expr("1" if j == i else "0")) for j, g in enumerate(got))
            trans.append(MonitorTransition("run", pat, "run", new_round,
                                           shift + (("cur", Expr("3")), ("Prod", Expr(str(v)))) + fresh))
            trans.append(MonitorTransition("run", pat, "run", Expr(f"(cur = 0 or cur = 3) and {got[i]} = 0"),
                                           shift + (("cur", Expr("3")), ("Prod", Expr(f"Prod + {v}")),
                                                    (got[i], Expr("1")))))
            trans.append(MonitorTransition("run", pat, "run", Expr(f"(cur = 0 or cur = 3) and {got[i]} >= 1"),
                                           shift + (("cur", Expr("3")), (got[i], Expr("2")))))

    all_once = " and ".join(f"{g} = 1" for g in got)
    emit = [EmitRule("run", AnySendOf(frozenset(price_msg(p) for p in params.prices)), Expr("prev = 0 or prev = 1"))]
    for e in params.excess_values():
        cond = _excess_condition(e).replace("LB", f"({params.lb})").replace("UB", f"({params.ub})")
        emit.append(EmitRule("run", Exact(Send(excess_msg(e))), Expr(f"prev = 3 and {all_once} and {cond}")))
    return FilterMonitor("f_excess", frozenset({"run"}), "run", tuple(regs), tuple(trans), tuple(emit))


def build_smartgrid(params: SmartGridParams = SmartGridParams()) -> tuple[DistributedMachine, SecurityPolicy]:
    if params.n == 2:
        warnings.warn("with two prosumers the excess reveals the other prosumer's plan", stacklevel=2)
    procs = [smg_process(params)] + [prosumer_process(i + 1, params) for i in range(params.n)]
    machine = compose(procs)
    policy = implicit_policy(machine)
    mon = f_excess_monitor(params)
    for i in range(params.n):
        policy = policy.with_label(SMG, prosumer(i + 1), Filter(mon))
    return machine, policy
