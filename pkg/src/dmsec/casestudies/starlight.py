"""The Starlight Interactive Link: a switch routing user commands to a high
or a low security network, toggled by the user."""
from __future__ import annotations

from ..core import DistributedMachine, ProcessSpec, Recv, Send, compose
from ..expr import Expr
from ..monitor import EmitRule, Exact, FilterMonitor, MonitorTransition, Register
from ..policy import Filter, SecurityPolicy, implicit_policy

__all__ = ["switch_process", "build_starlight", "build_starlight_mutant", "starlight_filter"]

SWITCH_STATES = ("h", "hr", "hc", "ℓ", "ℓr", "ℓc")


def switch_process(mutant: bool = False) -> ProcessSpec:
    """The switch S.  The mutant may also forward a command to L from ``hc``."""
    r = lambda m: Recv("S", m)  # noqa: E731
    step = {
        ("h", r("cmd")): "hc",
        ("hc", Send("cmdH")): "h",
        ("h", r("res")): "hr",
        ("hr", Send("display")): "h",
        ("h", r("toggle")): "ℓ",
        ("ℓ", r("toggle")): "h",
        ("ℓ", r("cmd")): "ℓc",
        ("ℓc", Send("cmdL")): "ℓ",
        ("ℓ", r("res")): "ℓr",
        ("ℓr", Send("display")): "ℓ",
    }
    if mutant:
        step[("hc", Send("cmdL"))] = "h"
    return ProcessSpec("S", frozenset(SWITCH_STATES), "h",
                       frozenset({"cmd", "toggle", "res"}), frozenset({"cmdL", "cmdH", "display"}), step)


def _others() -> list[ProcessSpec]:
    high = ProcessSpec(
        "H", frozenset({"idle", "busy"}), "idle", frozenset({"cmdH", "resL"}), frozenset({"res"}),
        {("idle", Recv("H", "cmdH")): "busy",
         ("idle", Recv("H", "resL")): "busy",
         ("busy", Send("res")): "idle"},
    )
    low = ProcessSpec(
        "L", frozenset({"idle", "busy"}), "idle", frozenset({"cmdL"}), frozenset({"resL"}),
        {("idle", Recv("L", "cmdL")): "busy",
         ("busy", Send("resL")): "idle"},
    )
    user = ProcessSpec(
        "U", frozenset({"u"}), "u", frozenset({"display"}), frozenset({"cmd", "toggle"}),
        {("u", Send("cmd")): "u",
         ("u", Send("toggle")): "u",
         ("u", Recv("U", "display")): "u"},
    )
    return [high, low, user]


def starlight_filter() -> FilterMonitor:
    """``!cmdL`` may reach L only after an odd number of toggles."""
    return FilterMonitor(
        "f", frozenset({"run"}), "run",
        (Register("toggles", 0, 1, 0),),
        (MonitorTransition("run", Exact(Recv("S", "toggle")), "run", None,
                           (("toggles", Expr("(toggles + 1) mod 2")),)),),
        (EmitRule("run", Exact(Send("cmdL")), Expr("toggles = 1")),),
    )


def _build(mutant: bool) -> tuple[DistributedMachine, SecurityPolicy]:
    high, low, user = _others()
    machine = compose([high, low, switch_process(mutant), user])
    policy = implicit_policy(machine).with_label("S", "L", Filter(starlight_filter()))
    return machine, policy


def build_starlight() -> tuple[DistributedMachine, SecurityPolicy]:
    return _build(False)


def build_starlight_mutant() -> tuple[DistributedMachine, SecurityPolicy]:
    return _build(True)
