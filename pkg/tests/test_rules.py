"""Scoring rules: frozen worked-example values, invariants, selections."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrvote.instances import GeneratorParams, e0, generate_random
from attrvote.model import Ballot, Committee, Election
from attrvote.rules import (
    BudgetExceededError,
    av_candidate_score,
    av_committee_score,
    av_select,
    av_set_committee_score,
    av_voter_committee_score,
    iter_committee_indices,
    mav_objective,
    pav_objective,
    pav_utility,
    rav_select,
    sav_select,
    sav_total_score,
    sav_voter_score,
)

import oracles


def small_election(seed, n=8, m=6, d=2, domain=4, p=0.4, k=2):
    return generate_random(
        GeneratorParams(seed=seed, voters=n, candidates=m, dimensions=d,
                        domain_size=domain, approval_prob=p, k=k)
    )


# -- AV ----------------------------------------------------------------------


def test_av_candidate_scores_on_e0():
    e = e0()
    assert av_candidate_score(e, "c1") == 3
    assert av_candidate_score(e, "c2") == 2


def test_av_score_of_universally_approved_candidate():
    e = e0()
    # v4 approves everything; make everyone approve everything on c1's slots
    ballots = [
        Ballot(b.voter, (b.approvals[0] | {"a1"}, b.approvals[1] | {"b1"}))
        for b in e.ballots
    ]
    full = Election(e.domain, e.candidates, ballots, e.k)
    assert av_candidate_score(full, "c1") == full.n


@given(seed=st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_av_candidate_score_matches_direct_definition(seed):
    e = small_election(seed)
    for c in e.candidates:
        assert av_candidate_score(e, c.id) == oracles.av_score_direct(e, c.id)


def test_av_voter_committee_score_on_e0():
    e = e0()
    w1 = Committee.from_ids(e, ["c1"])
    assert av_voter_committee_score(e, w1, "v1") == 1
    e2 = e0(k=2)
    w12 = Committee.from_ids(e2, ["c1", "c2"])
    assert av_voter_committee_score(e2, w12, "v4") == 2


def test_av_voter_score_empty_ballot_is_zero():
    e = e0()
    ballots = e.ballots + (Ballot("v5", (frozenset(), frozenset())),)
    e5 = Election(e.domain, e.candidates, ballots, 1)
    w = Committee.from_ids(e5, ["c1"])
    assert av_voter_committee_score(e5, w, "v5") == 0


@given(seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_av_candidate_score_is_sum_of_singleton_voter_scores(seed):
    e = small_election(seed, k=1)
    for c in e.candidates:
        w = Committee.from_ids(e, [c.id])
        total = sum(
            (av_voter_committee_score(e, w, b.voter) for b in e.ballots),
            Fraction(0),
        )
        assert total == av_candidate_score(e, c.id)


def test_av_select_on_e0():
    r = av_select(e0())
    assert r.committee.members == ("c1",)
    assert r.objective == 3


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_av_select_maximizes_over_all_committees(seed):
    e = small_election(seed, n=6, m=6, k=2)
    chosen = av_select(e)
    best, best_value = oracles.best_committee_by(e, av_committee_score)
    assert chosen.objective == best_value
    assert chosen.committee.members == best.members


def test_av_set_score_differs_only_under_shared_values():
    e = small_election(3, m=5, domain=2, k=3)  # tiny domain forces sharing
    for combo in iter_committee_indices(e):
        w = Committee.from_indices(e, combo)
        sum_form = av_committee_score(e, w)
        set_form = av_set_committee_score(e, w)
        shares = any(len(w.values[j]) < w.size for j in range(e.d))
        assert set_form <= sum_form
        if not shares:
            assert set_form == sum_form


# -- SAV ---------------------------------------------------------------------


def test_sav_voter_scores_on_e0():
    e = e0()
    w = Committee.from_ids(e, ["c1"])
    assert sav_voter_score(e, w, "v1") == 1
    assert sav_voter_score(e, w, "v3") == 0


def test_sav_empty_ballot_scores_zero():
    e = e0()
    ballots = e.ballots + (Ballot("v5", (frozenset(), frozenset())),)
    e5 = Election(e.domain, e.candidates, ballots, 1)
    w = Committee.from_ids(e5, ["c1"])
    assert sav_voter_score(e5, w, "v5") == 0


@given(seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_sav_voter_score_within_unit_interval(seed):
    e = small_election(seed, p=0.6)
    for combo in iter_committee_indices(e):
        w = Committee.from_indices(e, combo)
        for b in e.ballots:
            s = sav_voter_score(e, w, b.voter)
            assert 0 <= s <= 1


def test_sav_select_on_e0():
    r = sav_select(e0())
    assert r.committee.members == ("c1",)
    assert r.objective == 3


def test_sav_select_single_candidate():
    e = small_election(9, m=1, k=1)
    assert sav_select(e).committee.members == ("c1",)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_sav_select_matches_exhaustive_total(seed):
    e = small_election(seed, n=6, m=5, k=2)
    r = sav_select(e)
    _, best_value = oracles.best_committee_by(e, sav_total_score)
    assert r.objective == best_value
    assert sav_total_score(e, r.committee) == best_value


def test_enumeration_budget_refusal_names_requirement():
    e = small_election(4, m=14, k=7)
    with pytest.raises(BudgetExceededError) as err:
        sav_select(e, budget=10)
    assert err.value.required == 3432
    assert "3432" in str(err.value)


# -- RAV ---------------------------------------------------------------------


@given(seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_rav_first_stage_equals_av_top_one(seed):
    e = small_election(seed, k=2)
    top_av = av_select(Election(e.domain, e.candidates, e.ballots, 1))
    r = rav_select(e)
    assert r.trace[0].chosen == top_av.committee.members


def test_rav_trace_has_k_stages():
    e = small_election(11, k=3, m=6)
    r = rav_select(e)
    assert len(r.trace) == 3
    assert [s.stage for s in r.trace] == [1, 2, 3]


# -- PAV ---------------------------------------------------------------------


def test_pav_utility_values():
    assert pav_utility(2 * 2, 2) == Fraction(3, 2)  # p = 2
    assert pav_utility(0, 3) == 0  # p = 0
    assert pav_utility(3, 2) == Fraction(5, 4)  # p = 3/2
    assert pav_utility(1, 3) == Fraction(1, 3)  # p = 1/3


def test_pav_utility_monotone_and_interpolating():
    d = 4
    values = [pav_utility(s, d) for s in range(5 * d + 1)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    harmonic = Fraction(0)
    for q in range(1, 5):
        harmonic += Fraction(1, q)
        assert values[q * d] == harmonic


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_pav_objective_monotone_under_adding_candidate(seed):
    e = small_election(seed, m=6, k=2)
    rng = random.Random(seed)
    idx = sorted(rng.sample(range(e.m), 3))
    small = Committee.from_indices(e, idx[:2])
    big = Committee.from_indices(e, idx)
    assert pav_objective(e, small) <= pav_objective(e, big)


# -- MAV ---------------------------------------------------------------------


def test_mav_zero_when_committee_matches_every_ballot():
    e = e0(k=2)
    ballots = tuple(
        Ballot(b.voter, (frozenset({"a1", "a2"}), frozenset({"b1", "b2"})))
        for b in e.ballots
    )
    full = Election(e.domain, e.candidates, ballots, 2)
    w = Committee.from_ids(full, ["c1", "c2"])
    assert mav_objective(full, w) == 0


def test_mav_maximal_distance_is_one():
    e = e0()
    # v3 approves only {a2} and {b2}; committee {c1} covers {a1},{b1}
    w = Committee.from_ids(e, ["c1"])
    assert mav_objective(e, w) == 1


def test_mav_invariant_under_voter_and_dimension_permutation():
    e = small_election(21, d=3, k=2)
    w = Committee.from_indices(e, (0, 2))
    base = mav_objective(e, w)

    shuffled = Election(e.domain, e.candidates, tuple(reversed(e.ballots)), e.k)
    w2 = Committee.from_indices(shuffled, (0, 2))
    assert mav_objective(shuffled, w2) == base

    perm = [2, 0, 1]
    from attrvote.model import Candidate, DomainSpec

    dom = DomainSpec(
        tuple(e.domain.names[j] for j in perm),
        tuple(e.domain.values[j] for j in perm),
    )
    cands = [
        Candidate(c.id, tuple(c.attributes[j] for j in perm)) for c in e.candidates
    ]
    ballots = [
        Ballot(b.voter, tuple(b.approvals[j] for j in perm)) for b in e.ballots
    ]
    permuted = Election(dom, cands, ballots, e.k)
    w3 = Committee.from_indices(permuted, (0, 2))
    assert mav_objective(permuted, w3) == base


@given(seed=st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_scores_are_reproducible(seed):
    e = small_election(seed, k=2)
    w = Committee.from_indices(e, (0, 1))
    assert pav_objective(e, w) == pav_objective(e, w)
    assert mav_objective(e, w) == mav_objective(e, w)
    assert sav_total_score(e, w) == sav_total_score(e, w)
