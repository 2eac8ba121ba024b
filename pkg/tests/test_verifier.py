import random

import pytest
from hypothesis import given, settings, strategies as st

from dmsec.casestudies import build_starlight, build_starlight_mutant
from dmsec.core import Recv, Send, obs
from dmsec.expr import PredicateParseError
from dmsec.policy import SecurityPolicy, implicit_policy
from dmsec.replay import recheck
from dmsec.semantics import replay
from dmsec.verifier import (Limits, NotAFilteredEdge, ResourceLimitExceeded,
                            check_compliance, check_invariant,
                            check_local_filter_respect, check_unwinding,
                            constant_relation, random_filtered_policy,
                            random_machine)

from oracles import purge_ref

seeds = st.integers(min_value=0, max_value=100_000)


def leaky_starlight():
    # drop the S->L edge entirely: L then receives commands it may not learn about
    m, pol = build_starlight()
    return m, pol.with_label("S", "L", None)


def assert_compliance_cex_is_real(m, pol, v):
    cex = v.counterexample
    d = cex.domain
    assert purge_ref(m, pol, d, cex.alpha) == purge_ref(m, pol, d, cex.beta)
    assert obs(m, d, replay(m, cex.alpha)) != obs(m, d, replay(m, cex.beta))
    assert recheck(m, pol, cex.to_dict())[0]


def test_starlight_complies():
    m, pol = build_starlight()
    v = check_compliance(m, pol, depth=6)
    assert v.passed and v.counterexample is None
    assert v.depth_reached == 6


def test_mutant_compliance_counterexample():
    m, pol = build_starlight_mutant()
    v = check_compliance(m, pol, depth=6)
    assert not v.passed
    assert v.counterexample.domain == "L"
    assert_compliance_cex_is_real(m, pol, v)


def test_missing_edge_is_a_violation():
    m, pol = leaky_starlight()
    v = check_compliance(m, pol, depth=5)
    assert not v.passed
    assert_compliance_cex_is_real(m, pol, v)


def test_compliance_is_deterministic():
    m, pol = build_starlight_mutant()
    assert check_compliance(m, pol, 6).to_dict() == check_compliance(m, pol, 6).to_dict()


def test_starlight_filter_respect():
    m, pol = build_starlight()
    assert check_local_filter_respect(m, pol, ("S", "L")).passed
    assert check_local_filter_respect(m, pol, ("S", "L"), mode="depth", depth=5).passed


def test_mutant_filter_witness_is_shortest():
    m, pol = build_starlight_mutant()
    v = check_local_filter_respect(m, pol, ("S", "L"))
    assert not v.passed
    assert v.counterexample.delta == (Recv("S", "cmd"),)
    assert v.counterexample.a == Send("cmdL")
    assert recheck(m, pol, v.counterexample.to_dict())[0]
    # a depth bound below the witness length cannot see it
    assert check_local_filter_respect(m, pol, ("S", "L"), mode="depth", depth=0).passed
    assert not check_local_filter_respect(m, pol, ("S", "L"), mode="depth", depth=1).passed


def test_filter_check_needs_filtered_edge():
    m, pol = build_starlight()
    with pytest.raises(NotAFilteredEdge):
        check_local_filter_respect(m, pol, ("U", "S"))
    with pytest.raises(ValueError):
        check_local_filter_respect(m, pol, ("S", "L"), mode="depth")


def test_starlight_unwinding():
    m, pol = build_starlight()
    assert check_unwinding(m, pol, depth=6).passed
    # H's view says nothing about whether U has sent a command yet, so the
    # strict variant (equal enabled sets) rejects the canonical relation
    strict = check_unwinding(m, pol, depth=6, strict_step=True)
    assert not strict.passed
    assert strict.counterexample.condition.startswith("step consistency (strict")
    assert recheck(m, pol, strict.counterexample.to_dict())[0]


def test_unwinding_reports_local_respect_failure():
    m, pol = leaky_starlight()
    v = check_unwinding(m, pol, depth=5)
    assert not v.passed
    assert v.counterexample.condition == "local respect"
    assert v.counterexample.domain == "L"
    assert recheck(m, pol, v.counterexample.to_dict())[0]


def test_constant_relation_breaks_output_consistency():
    m, pol = build_starlight()
    v = check_unwinding(m, pol, relation=constant_relation, depth=3)
    assert not v.passed
    assert v.counterexample.condition == "output consistency"


def restricted_policy(seed, m):
    rng = random.Random(seed)
    edges = {e: lab for e, lab in implicit_policy(m).edges.items() if e[0] == e[1] or rng.random() < 0.7}
    return SecurityPolicy(m.proc_ids, edges)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_unwinding_implies_compliance(seed):
    m = random_machine(seed)
    pol = restricted_policy(seed, m)
    u = check_unwinding(m, pol, depth=5)
    c = check_compliance(m, pol, depth=5)
    if u.passed:
        assert c.passed
    if not c.passed:
        assert_compliance_cex_is_real(m, pol, c)
    if not u.passed:
        assert recheck(m, pol, u.counterexample.to_dict())[0]


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_filter_respect_implies_compliance(seed):
    m = random_machine(seed)
    pol = random_filtered_policy(seed, m)
    lfr = [check_local_filter_respect(m, pol, (s, d)) for s, d, _ in pol.filtered_edges()]
    for v in lfr:
        if not v.passed:
            assert recheck(m, pol, v.counterexample.to_dict())[0]
    c = check_compliance(m, pol, depth=5)
    if all(v.passed for v in lfr):
        assert c.passed
    if not c.passed:
        assert_compliance_cex_is_real(m, pol, c)


def test_invariant_on_switch():
    m, _ = build_starlight()
    s = m.process("S")
    assert check_invariant(s, "state != nowhere").passed
    v = check_invariant(s, "not state = ℓc")
    assert not v.passed
    assert v.counterexample.path == (Recv("S", "toggle"), Recv("S", "cmd"))
    assert recheck(m, None, v.counterexample.to_dict(), "not state = ℓc")[0]


def test_invariant_must_be_boolean():
    m, _ = build_starlight()
    with pytest.raises(PredicateParseError):
        check_invariant(m.process("S"), "1 + 1")


def test_resource_limits():
    m, pol = build_starlight()
    with pytest.raises(ResourceLimitExceeded) as e:
        check_compliance(m, pol, depth=8, limits=Limits(max_states=50))
    assert e.value.what == "max-states"
    with pytest.raises(ResourceLimitExceeded):
        check_unwinding(m, pol, depth=7, limits=Limits(max_states=10))
    with pytest.raises(ResourceLimitExceeded):
        check_local_filter_respect(m, pol, ("S", "L"), limits=Limits(max_states=2))


def test_failures_persist_at_greater_depth():
    m, pol = build_starlight_mutant()
    first = check_compliance(m, pol, depth=3)
    assert not first.passed
    for depth in range(4, 8):
        v = check_compliance(m, pol, depth=depth)
        assert not v.passed
        assert v.counterexample == first.counterexample


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_random_failures_persist(seed):
    m = random_machine(seed)
    pol = restricted_policy(seed, m)
    if not check_compliance(m, pol, depth=3).passed:
        assert not check_compliance(m, pol, depth=5).passed
