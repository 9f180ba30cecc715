"""Committee-property checkers and the rule-axiom harness.

Committee-level checkers (unanimity, simple and compound justified
representation) are polynomial and return a :class:`~attrvote.model.Verdict`
whose witness re-checks to a genuine violation.

The justified-representation definitions quantify over all voter subsets;
both checkers reduce that to one scan per (dimension, value): any violating
subset shares an approved value a on some dimension j and is therefore
contained in the maximal group U of a-approvers that are unrepresented (on
every dimension for the simple form, on dimension j itself for the compound
form), so it suffices to test each U against the n/k threshold.  The
exponential-oracle equivalence is enforced in the test suite.

Rule-level checks (homogeneity, consistency, monotonicity, committee
monotonicity) are metamorphic: they re-run a rule on transformed inputs and
compare outcomes.  The monotonicity harness samples perturbations from a
seeded RNG, so it is a falsifier, not a verifier.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from .gav import TieBreakMode, gav_select
from .model import Ballot, Committee, Election, Verdict
from .rules import (
    DEFAULT_BUDGET,
    RuleId,
    SelectionResult,
    av_select,
    rav_select,
    sav_select,
)

# -- committee-level checkers ------------------------------------------------


def check_weak_unanimity(election: Election, committee: Committee) -> Verdict:
    """Some unanimously approved value must make it into the committee.

    Holds vacuously when no dimension has a unanimous value; otherwise some
    dimension must carry a unanimous value inside the committee's value set.
    """
    unanimous = [election.unanimous_values(j) for j in range(election.d)]
    present = [j for j in range(election.d) if unanimous[j]]
    if not present:
        return Verdict(True, "no unanimous value")
    for j in present:
        if unanimous[j] & committee.values[j]:
            return Verdict(True, f"unanimous value covered on dimension {j}")
    return Verdict(
        False,
        "weak unanimity violated",
        witness={
            "unanimous_dimensions": present,
            "unanimous_values": {j: sorted(unanimous[j]) for j in present},
        },
    )


def check_strong_unanimity(election: Election, committee: Committee) -> Verdict:
    """Every dimension with a unanimous value must carry one in the committee."""
    for j in range(election.d):
        uj = election.unanimous_values(j)
        if uj and not (uj & committee.values[j]):
            return Verdict(
                False,
                f"strong unanimity violated on dimension {j}",
                witness={"dimension": j, "unanimous_values": sorted(uj)},
            )
    return Verdict(True)


def _sjr_witness(election: Election, j: int, value: str, mask: int) -> Verdict:
    return Verdict(
        False,
        "unrepresented cohesive group",
        witness={
            "dimension": j,
            "value": value,
            "voters": list(election.voters_from_mask(mask)),
        },
    )


def check_sjr(election: Election, committee: Committee) -> Verdict:
    """Simple justified representation.

    Fails iff some value a on some dimension j is approved by a group of at
    least n/k voters none of whom approves any committee value on any
    dimension.
    """
    covered = 0
    for j in range(election.d):
        covered |= election.coverage_mask(j, committee.values[j])
    n, k = election.n, election.k
    for j in range(election.d):
        for a in election.domain.values[j]:
            group = election.approver_mask(j, a) & ~covered
            if group and group.bit_count() * k >= n:
                return _sjr_witness(election, j, a, group)
    return Verdict(True)


def check_cjr(election: Election, committee: Committee) -> Verdict:
    """Compound justified representation: the simple demand, dimension-wise.

    Fails iff some value a on dimension j is approved by a group of at least
    n/k voters none of whom approves any committee value on dimension j
    itself.
    """
    n, k = election.n, election.k
    for j in range(election.d):
        covered_j = election.coverage_mask(j, committee.values[j])
        for a in election.domain.values[j]:
            group = election.approver_mask(j, a) & ~covered_j
            if group and group.bit_count() * k >= n:
                return _sjr_witness(election, j, a, group)
    return Verdict(True)


# -- witness revalidation ------------------------------------------------


def revalidate_representation_witness(
    election: Election,
    committee: Committee,
    witness,
    compound: bool,
) -> bool:
    """Independently re-check a justified-representation witness."""
    j = witness["dimension"]
    value = witness["value"]
    voters = witness["voters"]
    if not voters:
        return False
    if len(voters) * election.k < election.n:
        return False
    for vid in voters:
        ballot = election.ballots[election.voter_index(vid)]
        if value not in ballot.approvals[j]:
            return False
        if compound:
            if ballot.approvals[j] & committee.values[j]:
                return False
        else:
            for jj in range(election.d):
                if ballot.approvals[jj] & committee.values[jj]:
                    return False
    return True


# -- rule dispatch ---------------------------------------------------------


def run_rule(
    rule: RuleId,
    election: Election,
    budget: Optional[int] = DEFAULT_BUDGET,
    tie_break: TieBreakMode = TieBreakMode.BY_INDEX,
) -> SelectionResult:
    """Run one selection rule; exact PAV/MAV route through the solvers."""
    if rule is RuleId.AV:
        return av_select(election)
    if rule is RuleId.SAV:
        return sav_select(election, budget)
    if rule is RuleId.RAV:
        return rav_select(election)
    if rule is RuleId.GAV:
        return gav_select(election, tie_break)
    from . import solvers  # deferred: solvers imports the checkers above

    if rule is RuleId.PAV:
        return solvers.pav_exact(election, budget)
    if rule is RuleId.MAV:
        return solvers.mav_exact(election, budget)
    raise ValueError(f"unknown rule: {rule}")


# -- metamorphic rule-axiom checks ----------------------------------------


def _with_ballots(election: Election, ballots: Sequence[Ballot], k=None) -> Election:
    return Election(
        election.domain,
        election.candidates,
        tuple(ballots),
        election.k if k is None else k,
    )


def replicate_ballots(election: Election, r: int) -> Election:
    """The same election with every ballot replicated r times, fresh ids."""
    ballots = []
    for t in range(r):
        for b in election.ballots:
            vid = b.voter if t == 0 else f"{b.voter}+{t}"
            ballots.append(Ballot(vid, b.approvals))
    return _with_ballots(election, ballots)


def check_homogeneity(
    rule: RuleId,
    election: Election,
    replication: int,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> Verdict:
    """Replicating every ballot must not change the winning committee."""
    if replication < 1:
        raise ValueError("replication must be >= 1")
    base = run_rule(rule, election, budget).committee.member_set()
    scaled = run_rule(rule, replicate_ballots(election, replication), budget)
    if scaled.committee.member_set() == base:
        return Verdict(True)
    return Verdict(
        False,
        "homogeneity violated",
        witness={
            "replication": replication,
            "committee": sorted(base),
            "replicated_committee": sorted(scaled.committee.member_set()),
        },
    )


def check_consistency(
    rule: RuleId,
    election_a: Election,
    election_b: Election,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> Verdict:
    """If two electorates elect the same committee, so must their union."""
    if election_a.k != election_b.k:
        raise ValueError("consistency requires equal committee sizes")
    if [c.id for c in election_a.candidates] != [c.id for c in election_b.candidates]:
        raise ValueError("consistency requires identical candidate lists")
    ids_a = {b.voter for b in election_a.ballots}
    if any(b.voter in ids_a for b in election_b.ballots):
        raise ValueError("voter ids must be disjoint")
    wa = run_rule(rule, election_a, budget).committee.member_set()
    wb = run_rule(rule, election_b, budget).committee.member_set()
    if wa != wb:
        return Verdict(True, "vacuous: different committees")
    union = _with_ballots(
        election_a, tuple(election_a.ballots) + tuple(election_b.ballots)
    )
    wu = run_rule(rule, union, budget).committee.member_set()
    if wu == wa:
        return Verdict(True)
    return Verdict(
        False,
        "consistency violated",
        witness={
            "committee": sorted(wa),
            "union_committee": sorted(wu),
        },
    )


def _add_value(ballot: Ballot, j: int, value: str) -> Ballot:
    approvals = list(ballot.approvals)
    approvals[j] = ballot.approvals[j] | {value}
    return Ballot(ballot.voter, tuple(approvals))


def _drop_value(ballot: Ballot, j: int, value: str) -> Ballot:
    approvals = list(ballot.approvals)
    approvals[j] = ballot.approvals[j] - {value}
    return Ballot(ballot.voter, tuple(approvals))


def check_monotonicity(
    rule: RuleId,
    election: Election,
    seed: int,
    budget: Optional[int] = DEFAULT_BUDGET,
    tie_break: TieBreakMode = TieBreakMode.BY_INDEX,
) -> Verdict:
    """Seeded perturbation check of the two monotonicity conditions.

    Condition 1: extra approvals for a winner's attribute must not dethrone
    it.  Condition 2: removing approvals from a loser's attribute must not
    elect it.  Either condition is skipped (vacuous) when no eligible
    perturbation exists.
    """
    rng = random.Random(seed)
    result = run_rule(rule, election, budget, tie_break)
    winners = result.committee.member_set()
    losers = [c.id for c in election.candidates if c.id not in winners]

    # condition 1: add approvals to a winner's attribute
    cid = rng.choice(sorted(winners))
    cand = election.candidate(cid)
    j = rng.randrange(election.d)
    value = cand.attributes[j]
    non_approvers = [
        b.voter for b in election.ballots if value not in b.approvals[j]
    ]
    if non_approvers:
        extra = {rng.choice(non_approvers)}
        for b in election.ballots:
            if rng.random() < 0.5:
                extra.add(b.voter)
        ballots = [
            _add_value(b, j, value) if b.voter in extra else b
            for b in election.ballots
        ]
        after = run_rule(rule, _with_ballots(election, ballots), budget, tie_break)
        if cid not in after.committee.member_set():
            return Verdict(
                False,
                "monotonicity violated (approval gain dethroned a winner)",
                witness={
                    "condition": 1,
                    "candidate": cid,
                    "dimension": j,
                    "added_voters": sorted(extra),
                    "before": sorted(winners),
                    "after": sorted(after.committee.member_set()),
                },
            )

    # condition 2: remove approvals from a loser's attribute
    if losers:
        cid = rng.choice(losers)
        cand = election.candidate(cid)
        dims = [
            j
            for j in range(election.d)
            if any(cand.attributes[j] in b.approvals[j] for b in election.ballots)
        ]
        if dims:
            j = rng.choice(dims)
            value = cand.attributes[j]
            approvers = [
                b.voter for b in election.ballots if value in b.approvals[j]
            ]
            taken = [v for v in approvers if rng.random() < 0.5]
            if not taken:
                taken = [rng.choice(approvers)]
            ballots = [
                _drop_value(b, j, value) if b.voter in set(taken) else b
                for b in election.ballots
            ]
            after = run_rule(rule, _with_ballots(election, ballots), budget, tie_break)
            if cid in after.committee.member_set():
                return Verdict(
                    False,
                    "monotonicity violated (approval loss elected a loser)",
                    witness={
                        "condition": 2,
                        "candidate": cid,
                        "dimension": j,
                        "removed_voters": sorted(taken),
                        "before": sorted(winners),
                        "after": sorted(after.committee.member_set()),
                    },
                )
    return Verdict(True)


def check_committee_monotonicity(
    rule: RuleId,
    election: Election,
    k_max: int,
    budget: Optional[int] = DEFAULT_BUDGET,
    tie_break: TieBreakMode = TieBreakMode.BY_INDEX,
) -> Verdict:
    """Committees for k = 1..k_max must grow by inclusion."""
    if not (1 <= k_max <= election.m):
        raise ValueError("k_max out of range")
    previous: Optional[frozenset[str]] = None
    prev_k = 0
    for k in range(1, k_max + 1):
        sized = Election(election.domain, election.candidates, election.ballots, k)
        members = run_rule(rule, sized, budget, tie_break).committee.member_set()
        if previous is not None and not previous < members:
            return Verdict(
                False,
                f"committee monotonicity violated between k={prev_k} and k={k}",
                witness={
                    "k": prev_k,
                    "committee_k": sorted(previous),
                    "committee_k_plus_1": sorted(members),
                },
            )
        previous, prev_k = members, k
    return Verdict(True)


# -- trial suite -------------------------------------------------------------

AXIOM_PROPERTIES = (
    "homogeneity",
    "consistency",
    "monotonicity",
    "committee-monotonicity",
)


def _suite_trial(
    rule: RuleId, trial_seed: int, k_max: int, budget: Optional[int]
) -> dict[str, Verdict]:
    from .instances import GeneratorParams, generate_random

    prng = random.Random(trial_seed)
    m = prng.randint(3, 7)
    d = prng.randint(1, 3)
    n = prng.randint(2, 10)
    # Candidates carry distinct values per dimension: the classic axioms are
    # statements about candidates, and they lift to attribute ballots exactly
    # when no two candidates share a value (a perturbation aimed at one
    # candidate's value must not feed its rivals).  Shared-value elections
    # are exercised by the fixture suites instead.
    params = GeneratorParams(
        seed=trial_seed,
        voters=n,
        candidates=m,
        dimensions=d,
        domain_size=m + prng.randint(0, 2),
        approval_prob=prng.uniform(0.2, 0.7),
        k=prng.randint(1, min(3, m)),
        distinct_values=True,
    )
    election = generate_random(params)

    partner_raw = generate_random(
        GeneratorParams(
            seed=trial_seed + 0x9E3779B9,
            voters=prng.randint(2, 10),
            candidates=m,
            dimensions=d,
            domain_size=params.domain_size,
            approval_prob=prng.uniform(0.2, 0.7),
            k=params.k,
            distinct_values=True,
        )
    )
    partner = Election(
        election.domain,
        election.candidates,
        tuple(Ballot(f"w{i + 1}", b.approvals) for i, b in enumerate(partner_raw.ballots)),
        election.k,
    )

    return {
        "homogeneity": check_homogeneity(rule, election, 2 + trial_seed % 2, budget),
        "consistency": check_consistency(rule, election, partner, budget),
        "monotonicity": check_monotonicity(rule, election, trial_seed, budget),
        "committee-monotonicity": check_committee_monotonicity(
            rule, election, min(k_max, election.m), budget
        ),
    }


def axiom_suite(
    rule: RuleId,
    trials: int,
    seed: int,
    k_max: int = 4,
    budget: Optional[int] = DEFAULT_BUDGET,
    threads: int = 1,
) -> dict:
    """Run the metamorphic harness over seeded random elections.

    Reports, per property, how many trials ran and every violation found.
    A clean report claims only "no violation in N trials"; each reported
    witness carries its trial seed so it can be reproduced exactly.
    """
    from .instances import spawn_seeds

    seeds = spawn_seeds(seed, trials)
    run = lambda s: _suite_trial(rule, s, k_max, budget)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = [run(s) for s in seeds]

    report: dict = {
        "rule": str(rule),
        "trials": trials,
        "seed": seed,
        "properties": {},
    }
    for prop in AXIOM_PROPERTIES:
        violations = [
            {"trial_seed": s, **dict(v.witness or {})}
            for s, v in zip(seeds, (o[prop] for o in outcomes))
            if not v.holds
        ]
        report["properties"][prop] = {
            "checked": trials,
            "violations": len(violations),
            "witnesses": violations,
        }
    return report
