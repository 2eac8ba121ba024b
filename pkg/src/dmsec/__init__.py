"""Information-flow security for asynchronous distributed machines.

Processes communicate through per-process FIFO buffers.  Security policies
may gate edges with filter monitors; the checkers decide bounded policy
compliance, Local Filter Respect, unwinding conditions and local invariants.
"""
from .core import (Action, ComposabilityError, DistributedMachine, GlobalState,
                   LocalConfig, ModelError, MultipleSenders, NoReceiver,
                   NoSender, ProcessSpec, Recv, Send, compose, dom,
                   format_trace, initial_state, obs, parse_action)
from .expr import Expr, parse_expr
from .monitor import (AnyReceive, AnySendOf, EmitRule, Exact, FilterMonitor,
                      MonitorTransition, Register, Wildcard, filter_eval)
from .policy import (TOP, Filter, PolicyError, PurgeTracker, SecurityPolicy,
                     Top, implicit_policy, purge, validate_policy)
from .semantics import (enabled_actions, enumerate_executions, project,
                        reachable_states, replay, step_global)
from .verifier import (Limits, ResourceLimitExceeded, Verdict,
                       check_compliance, check_invariant,
                       check_local_filter_respect, check_unwinding)

__version__ = "0.1.0"

__all__ = [
    "Action", "Send", "Recv", "ProcessSpec", "DistributedMachine", "LocalConfig",
    "GlobalState", "compose", "initial_state", "dom", "obs", "parse_action",
    "format_trace", "ModelError", "ComposabilityError", "NoSender", "NoReceiver",
    "MultipleSenders", "Expr", "parse_expr", "FilterMonitor", "Register",
    "MonitorTransition", "EmitRule", "Exact", "AnySendOf", "AnyReceive", "Wildcard",
    "filter_eval", "SecurityPolicy", "Filter", "Top", "TOP", "PolicyError",
    "implicit_policy", "purge", "PurgeTracker", "validate_policy",
    "enabled_actions", "step_global", "replay", "enumerate_executions",
    "reachable_states", "project", "check_compliance", "check_local_filter_respect",
    "check_unwinding", "check_invariant", "Verdict", "Limits", "ResourceLimitExceeded",
]
