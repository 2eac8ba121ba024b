import random

import pytest
from hypothesis import given, settings, strategies as st

from dmsec.casestudies import build_starlight, starlight_filter
from dmsec.core import Recv, Send, dom
from dmsec.policy import (TOP, Filter, FilterAlphabetViolation, MissingEdge,
                          MissingSelfEdge, PolicyError, SecurityPolicy,
                          UnknownDomain, implicit_policy, purge, validate_policy)
from dmsec.replay import reference_purge
from dmsec.verifier import random_filtered_policy, random_machine

from oracles import is_subsequence, projection_ref, purge_ref, random_walk

seeds = st.integers(min_value=0, max_value=100_000)


def test_implicit_policy_of_starlight():
    m, _ = build_starlight()
    pol = implicit_policy(m)
    cross = sorted(e for e in pol.edges if e[0] != e[1])
    assert cross == [("H", "S"), ("L", "H"), ("S", "H"), ("S", "L"), ("S", "U"), ("U", "S")]
    assert all(pol.label(d, d) == TOP for d in m.proc_ids)
    assert validate_policy(m, pol) == []


def test_policy_construction_errors():
    with pytest.raises(UnknownDomain):
        SecurityPolicy(("A",), {("A", "B"): TOP})
    with pytest.raises(PolicyError):
        SecurityPolicy(("A",), {("A", "A"): Filter(starlight_filter())})
    with pytest.raises(PolicyError):
        SecurityPolicy(("A", "A"), {})


def test_validation_warnings():
    m, pol = build_starlight()
    pol = pol.with_label("U", "S", None).with_label("H", "H", None)
    warns = validate_policy(m, pol)
    assert MissingEdge("U", "S") in warns
    assert MissingSelfEdge("H") in warns
    # the Starlight filter mentions ?S toggle, which L cannot perform
    bad = pol.with_label("L", "H", Filter(starlight_filter()))
    assert any(isinstance(w, FilterAlphabetViolation) for w in validate_policy(m, bad))


def test_starlight_purge_hides_unfiltered_cmdl():
    m, pol = build_starlight()
    alpha = (Send("cmd"), Recv("S", "cmd"), Send("cmdL"))
    # no toggle yet, so L learns nothing of the forwarded command
    assert purge(m, pol, "L", alpha) == ()
    beta = (Send("toggle"), Recv("S", "toggle"), Send("cmd"), Recv("S", "cmd"), Send("cmdL"), Recv("L", "cmdL"))
    assert purge(m, pol, "L", beta) == (Send("cmdL"), Recv("L", "cmdL"))
    assert purge(m, pol, "S", beta) == beta


def test_receive_inherits_value_of_matching_send():
    m, pol = build_starlight()
    alpha = (Send("toggle"), Recv("S", "toggle"), Send("cmd"), Recv("S", "cmd"), Send("cmdL"),
             Send("toggle"), Recv("S", "toggle"), Recv("L", "cmdL"))
    # the filter has flipped back to false, but the receive takes the value of its send
    assert Recv("L", "cmdL") in purge(m, pol, "L", alpha)


def sample(seed, length=10):
    m = random_machine(seed)
    pol = random_filtered_policy(seed, m)
    alpha = random_walk(m, random.Random(seed), length)
    return m, pol, alpha


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_purge_agrees_with_oracles(seed):
    m, pol, alpha = sample(seed)
    for d in m.proc_ids:
        p = purge(m, pol, d, alpha)
        assert p == purge_ref(m, pol, d, alpha)
        assert p == reference_purge(m, pol, d, alpha)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_purge_structural_properties(seed):
    m, pol, alpha = sample(seed)
    for d in m.proc_ids:
        full = purge(m, pol, d, alpha)
        assert is_subsequence(full, alpha)
        assert [a for a in alpha if dom(m, a) == d] == [a for a in full if dom(m, a) == d]
        for k in range(len(alpha)):
            before = purge(m, pol, d, alpha[:k])
            after = purge(m, pol, d, alpha[:k + 1])
            assert after in (before, before + (alpha[k],))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_filter_free_purge_is_projection(seed):
    m = random_machine(seed)
    pol = implicit_policy(m)
    alpha = random_walk(m, random.Random(seed), 12)
    for d in m.proc_ids:
        assert purge(m, pol, d, alpha) == projection_ref(m, pol, d, alpha)


def test_purge_unknown_domain():
    m, pol = build_starlight()
    with pytest.raises(UnknownDomain):
        purge(m, pol, "X", ())
