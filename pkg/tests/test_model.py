"""Data model, validation, thresholds, and the election file format."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrvote.instances import GeneratorParams, e0, generate_random
from attrvote.model import (
    Ballot,
    Candidate,
    Committee,
    DomainSpec,
    Election,
    ElectionFormatError,
    approver_set,
    election_from_json,
    election_to_json,
    meets_group_threshold,
    validate,
)


def test_e0_is_valid():
    assert validate(e0()).holds


def test_validate_rejects_out_of_domain_approval():
    e = e0()
    bad = Ballot("vx", (frozenset({"z"}), frozenset()))
    broken = Election(e.domain, e.candidates, e.ballots + (bad,), e.k)
    verdict = validate(broken)
    assert not verdict.holds
    assert "out-of-domain approval" in verdict.reason


def test_validate_rejects_k_out_of_range():
    e = e0()
    verdict = validate(Election(e.domain, e.candidates, e.ballots, e.m + 1))
    assert not verdict.holds
    assert "k out of range" in verdict.reason


def test_validate_rejects_duplicate_ids():
    e = e0()
    verdict = validate(Election(e.domain, e.candidates + (e.candidates[0],), e.ballots, 1))
    assert not verdict.holds
    assert "duplicate candidate id" in verdict.reason
    dup = Election(e.domain, e.candidates, e.ballots + (e.ballots[0],), 1)
    assert "duplicate voter id" in validate(dup).reason


def test_validate_rejects_empty_domain():
    dom = DomainSpec(("dim1",), ((),))
    e = Election(dom, [Candidate("c1", ("a",))], [Ballot("v1", (frozenset(),))], 1)
    assert not validate(e).holds


def test_approver_sets_on_e0():
    e = e0()
    assert approver_set(e, 0, "a1") == {"v1", "v2", "v4"}
    assert approver_set(e, 1, "b2") == {"v3", "v4"}
    assert approver_set(e, 1, "b1") == {"v1", "v2", "v4"}


def test_approver_set_unknown_value():
    with pytest.raises(ValueError):
        approver_set(e0(), 0, "nope")


def test_approver_set_nobody():
    e = generate_random(
        GeneratorParams(seed=5, voters=3, candidates=2, dimensions=1,
                        domain_size=4, approval_prob=0.0, k=1)
    )
    for a in e.domain.values[0]:
        assert approver_set(e, 0, a) == frozenset()


def test_meets_group_threshold_examples():
    e = generate_random(
        GeneratorParams(seed=1, voters=90, candidates=5, dimensions=2,
                        domain_size=5, approval_prob=0.2, k=3)
    )
    assert meets_group_threshold(30, e)
    assert not meets_group_threshold(29, e)
    assert meets_group_threshold(e.n, e)


@given(n=st.integers(1, 60), k=st.integers(1, 12), g=st.integers(0, 80))
@settings(max_examples=200, deadline=None)
def test_threshold_agrees_with_rational_comparison(n, k, g):
    dom = DomainSpec(("dim1",), (("a",),))
    cands = [Candidate(f"c{i}", ("a",)) for i in range(k)]
    ballots = [Ballot(f"v{i}", (frozenset(),)) for i in range(n)]
    e = Election(dom, cands, ballots, k)
    assert meets_group_threshold(g, e) == (Fraction(g) >= Fraction(n, k))


@given(seed=st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_double_counting_of_approvals(seed):
    e = generate_random(
        GeneratorParams(seed=seed, voters=8, candidates=5, dimensions=2,
                        domain_size=4, approval_prob=0.5, k=2)
    )
    total_by_value = sum(
        len(approver_set(e, j, a))
        for j in range(e.d)
        for a in e.domain.values[j]
    )
    total_by_ballot = sum(b.approval_count() for b in e.ballots)
    assert total_by_value == total_by_ballot


@given(seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_approver_sets_rebuild_ballots(seed):
    e = generate_random(
        GeneratorParams(seed=seed, voters=6, candidates=4, dimensions=3,
                        domain_size=3, approval_prob=0.4, k=2)
    )
    rebuilt = {b.voter: [set() for _ in range(e.d)] for b in e.ballots}
    for j in range(e.d):
        for a in e.domain.values[j]:
            for vid in approver_set(e, j, a):
                rebuilt[vid][j].add(a)
    for b in e.ballots:
        assert tuple(frozenset(s) for s in rebuilt[b.voter]) == b.approvals


def test_committee_values_and_size():
    e = e0(k=2)
    c = Committee.from_ids(e, ["c2", "c1"])
    assert c.members == ("c1", "c2")
    assert c.values[0] == {"a1", "a2"}
    assert c.values[1] == {"b1", "b2"}


def test_committee_shared_values_shrink():
    dom = DomainSpec(("dim1",), (("a", "b"),))
    cands = [Candidate("c1", ("a",)), Candidate("c2", ("a",))]
    ballots = [Ballot("v1", (frozenset({"a"}),))]
    e = Election(dom, cands, ballots, 2)
    c = Committee.from_ids(e, ["c1", "c2"])
    assert len(c.values[0]) == 1


# -- file format ------------------------------------------------------------


def test_election_json_round_trip_is_byte_identical():
    e = e0()
    text = election_to_json(e)
    again = election_to_json(election_from_json(text))
    assert text == again


def test_election_json_rejects_unknown_keys():
    doc = json.loads(election_to_json(e0()))
    doc["extra"] = 1
    with pytest.raises(ElectionFormatError, match="unknown key"):
        election_from_json(json.dumps(doc))


def test_election_json_rejects_missing_keys():
    doc = json.loads(election_to_json(e0()))
    del doc["voters"]
    with pytest.raises(ElectionFormatError, match="missing key"):
        election_from_json(json.dumps(doc))


def test_election_json_rejects_bad_shapes():
    doc = json.loads(election_to_json(e0()))
    doc["candidates"][0]["attributes"] = ["a1"]
    with pytest.raises(ElectionFormatError):
        election_from_json(json.dumps(doc))


def test_generated_election_round_trips(tmp_path):
    e = generate_random(
        GeneratorParams(seed=77, voters=12, candidates=6, dimensions=3,
                        domain_size=4, approval_prob=0.3, k=2)
    )
    text = election_to_json(e)
    e2 = election_from_json(text)
    assert election_to_json(e2) == text
    assert validate(e2).holds
