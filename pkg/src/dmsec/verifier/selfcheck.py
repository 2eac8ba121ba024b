"""Random cross-validation suites.

``implicit`` checks that every random machine complies with its implicit
policy.  ``filtered`` collects random filtered policies whose filtered
edges all pass Local Filter Respect and checks them for compliance; a
failure there would mean the local check is unsound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..policy import implicit_policy
from .compliance import check_compliance
from .filters import check_local_filter_respect
from .random_gen import RandomConfig, random_filtered_policy, random_machine
from .verdict import Limits

__all__ = ["SuiteResult", "implicit_suite", "filtered_suite"]


@dataclass
class SuiteResult:
    name: str
    depth: int
    checked: list[int] = field(default_factory=list)
    failures: list[dict[str, Any]] = field(default_factory=list)
    skipped: int = 0
    executions: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name, "depth": self.depth, "verdict": "pass" if self.passed else "fail",
            "checked": len(self.checked), "first_seed": self.checked[0] if self.checked else None,
            "last_seed": self.checked[-1] if self.checked else None, "skipped": self.skipped,
            "executions": self.executions, "failures": self.failures,
        }


def implicit_suite(seeds: int, depth: int = 6, config: RandomConfig = RandomConfig(),
                   limits: Limits | None = None) -> SuiteResult:
    res = SuiteResult("implicit", depth)
    for seed in range(seeds):
        m = random_machine(seed, config)
        v = check_compliance(m, implicit_policy(m), depth, limits)
        res.checked.append(seed)
        res.executions += v.states_explored
        if not v.passed:
            res.failures.append({"seed": seed, "counterexample": v.counterexample.to_dict()})
    return res


def filtered_suite(pairs: int, depth: int = 6, config: RandomConfig = RandomConfig(),
                   limits: Limits | None = None, max_attempts: int | None = None) -> SuiteResult:
    """Check ``pairs`` LFR-passing (machine, filtered policy) pairs for compliance.

    Seeds are tried in order; pairs with a failing filtered edge are skipped.
    """
    res = SuiteResult("filtered", depth)
    max_attempts = max_attempts if max_attempts is not None else 20 * pairs
    seed = 0
    while len(res.checked) < pairs and seed < max_attempts:
        m = random_machine(seed, config)
        pol = random_filtered_policy(seed, m)
        if all(check_local_filter_respect(m, pol, (s, d), limits=limits).passed
               for s, d, _mon in pol.filtered_edges()):
            v = check_compliance(m, pol, depth, limits)
            res.checked.append(seed)
            res.executions += v.states_explored
            if not v.passed:
                res.failures.append({"seed": seed, "counterexample": v.counterexample.to_dict()})
        else:
            res.skipped += 1
        seed += 1
    if len(res.checked) < pairs:
        res.failures.append({"error": f"only {len(res.checked)} LFR-passing pairs in {seed} seeds"})
    return res
