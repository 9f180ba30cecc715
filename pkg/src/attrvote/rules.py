"""Scoring and selection rules for attribute-approval committees.

Five classic approval-aggregation rules lifted from candidate approvals to
per-dimension attribute approvals:

* AV   -- additive approval score; selection is candidate-separable and runs
          in time linear in the number of approvals.
* SAV  -- satisfaction score, each voter's matched attributes divided by
          their (capped) ballot size; selection enumerates committees because
          the set-based numerator is not candidate-separable.
* RAV  -- k-stage greedy AV with harmonic reweighting of already-satisfied
          voters.
* PAV  -- harmonic utility of each voter's per-committee approval score;
          exact optimization lives in :mod:`attrvote.solvers`.
* MAV  -- minimax normalized symmetric difference between committee values
          and ballots; exact optimization lives in :mod:`attrvote.solvers`.

All scores are exact ``Fraction`` values.  Every selection breaks ties toward
lower candidate input indices (for committees: lexicographically smallest
index tuple), which makes each rule a deterministic function of its input.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .model import Ballot, Committee, Election

DEFAULT_BUDGET = 10**6


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive enumeration would visit too many committees."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration over {required} committees exceeds budget {budget}; "
            f"rerun with budget >= {required}"
        )
        self.required = required
        self.budget = budget


class RuleId(enum.Enum):
    AV = "av"
    SAV = "sav"
    RAV = "rav"
    PAV = "pav"
    MAV = "mav"
    GAV = "gav"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class StageRecord:
    stage: int
    chosen: tuple[str, ...]
    score: Fraction


@dataclass(frozen=True)
class SelectionResult:
    """A selected committee, the rule's objective value, and a stage trace.

    The trace has one record per greedy stage for multi-stage rules (RAV,
    GAV) and a single record for single-shot rules.  ``rule`` is a
    :class:`RuleId` for the named rules and a plain string for auxiliary
    procedures such as the justified-committee heuristic.
    """

    rule: "RuleId | str"
    committee: Committee
    objective: Fraction
    trace: tuple[StageRecord, ...]


def match_count(candidate_attributes: tuple[str, ...], ballot: Ballot) -> int:
    """Number of dimensions on which the ballot approves the candidate's value."""
    return sum(
        1
        for j, a in enumerate(candidate_attributes)
        if a in ballot.approvals[j]
    )


def iter_committee_indices(
    election: Election, budget: Optional[int] = DEFAULT_BUDGET
) -> Iterator[tuple[int, ...]]:
    """All size-k index tuples in lexicographic order, guarded by ``budget``."""
    total = math.comb(election.m, election.k)
    if budget is not None and total > budget:
        raise BudgetExceededError(total, budget)
    return itertools.combinations(range(election.m), election.k)


# -- AV --------------------------------------------------------------------


def av_candidate_score(election: Election, candidate_id: str) -> Fraction:
    """Sum over voters of the candidate's matched dimensions, divided by d."""
    tally = election.approval_tally()
    cand = election.candidate(candidate_id)
    num = sum(tally[j].get(a, 0) for j, a in enumerate(cand.attributes))
    return Fraction(num, election.d)


def av_voter_committee_score(
    election: Election, committee: Committee, voter_id: str
) -> Fraction:
    """Per-voter committee score: sum over members of matches, divided by d.

    This candidate-sum form is the canonical AV(W, v) reused by the SAV
    denominator analysis, RAV's reweighting and PAV's utility argument.
    """
    ballot = election.ballots[election.voter_index(voter_id)]
    s = sum(
        match_count(election.candidates[i].attributes, ballot)
        for i in committee.indices
    )
    return Fraction(s, election.d)


def av_committee_score(election: Election, committee: Committee) -> Fraction:
    """Candidate-sum committee score (separable, the canonical objective)."""
    return sum(
        (av_candidate_score(election, c) for c in committee.members),
        Fraction(0),
    )


def av_set_committee_score(election: Election, committee: Committee) -> Fraction:
    """Diagnostic set form: matched *distinct* committee values per voter.

    Differs from :func:`av_committee_score` exactly when members share a
    value on some dimension.  Normalized by d for comparability.
    """
    num = 0
    for ballot in election.ballots:
        for j, wj in enumerate(committee.values):
            num += len(wj & ballot.approvals[j])
    return Fraction(num, election.d)


def av_select(election: Election) -> SelectionResult:
    """Top-k candidates by AV score; ties to lower input index."""
    tally = election.approval_tally()
    nums = [
        sum(tally[j].get(a, 0) for j, a in enumerate(c.attributes))
        for c in election.candidates
    ]
    chosen = heapq.nsmallest(
        election.k, range(election.m), key=lambda i: (-nums[i], i)
    )
    committee = Committee.from_indices(election, chosen)
    objective = Fraction(sum(nums[i] for i in chosen), election.d)
    trace = (StageRecord(1, committee.members, objective),)
    return SelectionResult(RuleId.AV, committee, objective, trace)


# -- SAV -------------------------------------------------------------------


def _sav_denominator(election: Election, ballot: Ballot) -> int:
    return min(ballot.approval_count(), election.k * election.d)


def sav_voter_score(
    election: Election, committee: Committee, voter_id: str
) -> Fraction:
    """Matched distinct committee values over the capped ballot size.

    A voter with an empty ballot scores 0: an indifferent voter contributes
    no satisfaction, and this avoids the 0/0 corner.
    """
    ballot = election.ballots[election.voter_index(voter_id)]
    den = _sav_denominator(election, ballot)
    if den == 0:
        return Fraction(0)
    num = sum(
        len(wj & ballot.approvals[j]) for j, wj in enumerate(committee.values)
    )
    return Fraction(num, den)


def sav_total_score(election: Election, committee: Committee) -> Fraction:
    return sum(
        (sav_voter_score(election, committee, b.voter) for b in election.ballots),
        Fraction(0),
    )


def _sav_weight_sums(election: Election) -> list[dict[str, Fraction]]:
    """Per (dimension, value): sum of 1/denominator over that value's approvers."""
    wsums: list[dict[str, Fraction]] = [dict() for _ in range(election.d)]
    for ballot in election.ballots:
        den = _sav_denominator(election, ballot)
        if den == 0:
            continue
        w = Fraction(1, den)
        for j, approved in enumerate(ballot.approvals):
            wj = wsums[j]
            for a in approved:
                wj[a] = wj.get(a, 0) + w
    return wsums


def sav_select(
    election: Election, budget: Optional[int] = DEFAULT_BUDGET
) -> SelectionResult:
    """Exact SAV maximizer by exhaustive enumeration over all committees."""
    wsums = _sav_weight_sums(election)
    cands = election.candidates
    best: Optional[tuple[int, ...]] = None
    best_score = Fraction(-1)
    for combo in iter_committee_indices(election, budget):
        score = Fraction(0)
        for j in range(election.d):
            seen = set()
            for i in combo:
                a = cands[i].attributes[j]
                if a not in seen:
                    seen.add(a)
                    score += wsums[j].get(a, Fraction(0))
        if score > best_score:
            best_score = score
            best = combo
    assert best is not None
    committee = Committee.from_indices(election, best)
    trace = (StageRecord(1, committee.members, best_score),)
    return SelectionResult(RuleId.SAV, committee, best_score, trace)


# -- RAV -------------------------------------------------------------------


def rav_select(election: Election) -> SelectionResult:
    """k-stage greedy: each stage adds the candidate maximizing the
    reweighted approval score, with voter weight 1/(1 + AV(W, v)) under the
    current partial committee."""
    d = election.d
    matches = [
        [match_count(c.attributes, b) for b in election.ballots]
        for c in election.candidates
    ]
    sat = [0] * election.n  # d * AV(W, v) so far, as integers
    remaining = list(range(election.m))
    chosen: list[int] = []
    trace = []
    for stage in range(1, election.k + 1):
        best_i = -1
        best_score = Fraction(-1)
        for i in remaining:
            row = matches[i]
            score = Fraction(0)
            for v in range(election.n):
                mv = row[v]
                if mv:
                    # 1/(1 + sat/d) * (mv/d)  ==  mv / (d + sat)
                    score += Fraction(mv, d + sat[v])
            if score > best_score:
                best_score = score
                best_i = i
        remaining.remove(best_i)
        chosen.append(best_i)
        row = matches[best_i]
        for v in range(election.n):
            sat[v] += row[v]
        trace.append(
            StageRecord(stage, (election.candidates[best_i].id,), best_score)
        )
    committee = Committee.from_indices(election, chosen)
    objective = av_committee_score(election, committee)
    return SelectionResult(RuleId.RAV, committee, objective, tuple(trace))


# -- PAV -------------------------------------------------------------------


def _harmonic(q: int) -> Fraction:
    h = Fraction(0)
    for t in range(1, q + 1):
        h += Fraction(1, t)
    return h


def pav_utility(score_numerator: int, d: int) -> Fraction:
    """Harmonic utility of a per-voter score p = score_numerator / d.

    At integers this is the harmonic number H(p); between integers it
    interpolates linearly with slope 1/(floor(p)+1), which keeps the utility
    monotone and continuous.
    """
    q, r = divmod(score_numerator, d)
    return _harmonic(q) + Fraction(r, d * (q + 1))


def pav_objective(election: Election, committee: Committee) -> Fraction:
    """Sum over voters of the harmonic utility of their committee score."""
    total = Fraction(0)
    cand_attrs = [election.candidates[i].attributes for i in committee.indices]
    for ballot in election.ballots:
        s = sum(match_count(attrs, ballot) for attrs in cand_attrs)
        total += pav_utility(s, election.d)
    return total


# -- MAV -------------------------------------------------------------------


def mav_objective(election: Election, committee: Committee) -> Fraction:
    """Maximum over voters of the worst per-dimension normalized distance.

    The per-dimension distance is the symmetric difference between the
    committee's value set and the ballot's approval set, divided by the
    domain size.
    """
    worst = Fraction(0)
    sizes = [len(vs) for vs in election.domain.values]
    wsizes = [len(wj) for wj in committee.values]
    for ballot in election.ballots:
        for j, wj in enumerate(committee.values):
            cj = ballot.approvals[j]
            diff = wsizes[j] + len(cj) - 2 * len(wj & cj)
            dist = Fraction(diff, sizes[j])
            if dist > worst:
                worst = dist
    return worst
