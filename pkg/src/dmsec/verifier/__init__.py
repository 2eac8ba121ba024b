from .compliance import check_compliance
from .filters import NotAFilteredEdge, check_local_filter_respect
from .invariant import check_invariant
from .random_gen import (RandomConfig, random_filter_monitor,
                         random_filtered_policy, random_machine)
from .selfcheck import SuiteResult, filtered_suite, implicit_suite
from .unwinding import (UnwindingRelation, canonical_relation, check_unwinding,
                        constant_relation)
from .verdict import (ComplianceCounterexample, FilterCounterexample,
                      InvariantCounterexample, Limits, ResourceLimitExceeded,
                      UnwindingCounterexample, Verdict)

__all__ = [
    "check_compliance", "check_local_filter_respect", "check_unwinding",
    "check_invariant", "random_machine", "random_filter_monitor",
    "random_filtered_policy", "RandomConfig", "UnwindingRelation",
    "canonical_relation", "constant_relation", "Verdict", "Limits",
    "ResourceLimitExceeded", "NotAFilteredEdge", "ComplianceCounterexample",
    "FilterCounterexample", "UnwindingCounterexample", "InvariantCounterexample",
    "SuiteResult", "implicit_suite", "filtered_suite",
]
