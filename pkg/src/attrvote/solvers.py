"""Exhaustive solvers, set-cover reductions, and the justified-AV heuristic.

Exact optimization of PAV and MAV, the search for compound-justified
committees, and the justified-committee-with-highest-AV problem are all
NP-hard, so the exact procedures here enumerate candidate subsets and are
guarded by a committee budget (default one million).  Enumeration order is
lexicographic by candidate index and every tie resolves to the first
(lexicographically smallest) committee, which makes all results
deterministic.

The two reduction builders construct elections from set-cover instances such
that, on yes-instances, a committee with the target property exists, and on
no-instances it does not.  The builders are transcriptions of index-dense
assignment scripts; their correctness is property-tested by running both
sides of the equivalence on exhaustively generated tiny instances rather
than trusted.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .axioms import check_cjr
from .gav import gav_select
from .instances import election_from_approver_sets
from .model import Committee, Election, Verdict
from .rules import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    RuleId,
    SelectionResult,
    StageRecord,
    iter_committee_indices,
    match_count,
    mav_objective,
    pav_utility,
)


@dataclass(frozen=True)
class SearchReport:
    """Outcome of an exhaustive or constructive committee search.

    ``exhausted`` is true only when the full committee space was visited, in
    which case ``best`` (if any) is a global optimum under the documented
    tie-breaking.  ``decision`` carries the yes/no answer of decision-form
    searches; ``note`` explains early exits.
    """

    objective: str
    best: Optional[Committee]
    best_value: Optional[Fraction]
    examined: int
    exhausted: bool
    decision: Optional[bool] = None
    note: str = ""


def enumerate_committees(
    election: Election,
    visit: Optional[Callable[[tuple[int, ...]], None]] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> SearchReport:
    """Visit all size-k candidate index tuples in lexicographic order."""
    count = 0
    for combo in iter_committee_indices(election, budget):
        if visit is not None:
            visit(combo)
        count += 1
    return SearchReport("enumerate", None, None, count, True)


# -- exact PAV / MAV --------------------------------------------------------


def pav_exact(
    election: Election, budget: Optional[int] = DEFAULT_BUDGET
) -> SelectionResult:
    """Global maximizer of the harmonic-utility objective by enumeration."""
    d = election.d
    matches = [
        [match_count(c.attributes, b) for b in election.ballots]
        for c in election.candidates
    ]
    utils = [pav_utility(s, d) for s in range(election.k * d + 1)]
    best: Optional[tuple[int, ...]] = None
    best_score = Fraction(-1)
    nrange = range(election.n)
    for combo in iter_committee_indices(election, budget):
        rows = [matches[i] for i in combo]
        score = Fraction(0)
        for v in nrange:
            score += utils[sum(row[v] for row in rows)]
        if score > best_score:
            best_score = score
            best = combo
    assert best is not None
    committee = Committee.from_indices(election, best)
    return SelectionResult(
        RuleId.PAV,
        committee,
        best_score,
        (StageRecord(1, committee.members, best_score),),
    )


def mav_exact(
    election: Election, budget: Optional[int] = DEFAULT_BUDGET
) -> SelectionResult:
    """Global minimizer of the minimax distance objective by enumeration."""
    best: Optional[Committee] = None
    best_score: Optional[Fraction] = None
    for combo in iter_committee_indices(election, budget):
        committee = Committee.from_indices(election, combo)
        score = mav_objective(election, committee)
        if best_score is None or score < best_score:
            best_score = score
            best = committee
    assert best is not None and best_score is not None
    return SelectionResult(
        RuleId.MAV, best, best_score, (StageRecord(1, best.members, best_score),)
    )


# -- justified committee with highest AV -----------------------------------


def _candidate_masks(election: Election):
    """Per-candidate: per-dimension approver masks plus their union."""
    per_dim = [
        [election.approver_mask(j, c.attributes[j]) for j in range(election.d)]
        for c in election.candidates
    ]
    any_dim = [0] * election.m
    for i, row in enumerate(per_dim):
        acc = 0
        for mask in row:
            acc |= mask
        any_dim[i] = acc
    return per_dim, any_dim


def _threat_values(election: Election):
    """(dimension, value, approver mask) for values that could seat a group."""
    n, k = election.n, election.k
    threats = []
    for j in range(election.d):
        for a in election.domain.values[j]:
            mask = election.approver_mask(j, a)
            if mask.bit_count() * k >= n:
                threats.append((j, a, mask))
    return threats


def max_av_justified(
    election: Election,
    tau: Optional[Fraction] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> SearchReport:
    """Search committees that are justified and score high under AV.

    Without ``tau``: among committees satisfying simple justified
    representation, return one maximizing the AV committee score (none may
    exist; the report then carries no committee).

    With ``tau``: decide whether some committee's slot-approval count
    (voters counted once per approved committee attribute slot) reaches
    ``tau`` while every attribute of every non-member keeps fewer than n/k
    approvers that the committee leaves entirely unrepresented.
    """
    n, k, d = election.n, election.k, election.d
    tally = election.approval_tally()
    slot_counts = [
        sum(tally[j].get(c.attributes[j], 0) for j in range(d))
        for c in election.candidates
    ]
    per_dim_masks, any_masks = _candidate_masks(election)

    if tau is None:
        threats = _threat_values(election)
        best: Optional[tuple[int, ...]] = None
        best_num = -1
        examined = 0
        for combo in iter_committee_indices(election, budget):
            examined += 1
            num = sum(slot_counts[i] for i in combo)
            if num <= best_num:
                continue
            covered = 0
            for i in combo:
                covered |= any_masks[i]
            ok = True
            for _, _, mask in threats:
                group = mask & ~covered
                if group and group.bit_count() * k >= n:
                    ok = False
                    break
            if ok:
                best_num = num
                best = combo
        committee = Committee.from_indices(election, best) if best else None
        value = Fraction(best_num, d) if best is not None else None
        return SearchReport(
            "max-av-justified", committee, value, examined, True, decision=best is not None
        )

    examined = 0
    for combo in iter_committee_indices(election, budget):
        examined += 1
        total = sum(slot_counts[i] for i in combo)
        if total < tau:
            continue
        support = 0
        for i in combo:
            support |= any_masks[i]
        inside = set(combo)
        ok = True
        for c in range(election.m):
            if c in inside:
                continue
            for j in range(d):
                group = per_dim_masks[c][j] & ~support
                if group and group.bit_count() * k >= n:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            committee = Committee.from_indices(election, combo)
            return SearchReport(
                "max-av-justified",
                committee,
                Fraction(total),
                examined,
                False,
                decision=True,
            )
    return SearchReport("max-av-justified", None, None, examined, True, decision=False)


# -- compound justified representation --------------------------------------


def cjr_exists(
    election: Election, budget: Optional[int] = DEFAULT_BUDGET
) -> SearchReport:
    """Find any committee providing compound justified representation, or
    certify that none exists by exhausting the committee space."""
    n, k, d = election.n, election.k, election.d
    per_dim_masks, _ = _candidate_masks(election)
    threats_by_dim: list[list[tuple[str, int]]] = [[] for _ in range(d)]
    for j, a, mask in _threat_values(election):
        threats_by_dim[j].append((a, mask))
    examined = 0
    for combo in iter_committee_indices(election, budget):
        examined += 1
        ok = True
        for j in range(d):
            if not threats_by_dim[j]:
                continue
            covered = 0
            for i in combo:
                covered |= per_dim_masks[i][j]
            for _, mask in threats_by_dim[j]:
                group = mask & ~covered
                if group and group.bit_count() * k >= n:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            committee = Committee.from_indices(election, combo)
            return SearchReport(
                "cjr-exists", committee, None, examined, False, decision=True
            )
    return SearchReport("cjr-exists", None, None, examined, True, decision=False)


def cjr_product_construction(election: Election) -> SearchReport:
    """Per-dimension greedy cover, then realization by existing candidates.

    Builds, for each dimension, a set of at most k values that satisfies
    justified representation on that dimension alone, then looks for
    candidates whose attribute vectors realize all those values
    simultaneously.  Succeeds whenever the candidate set contains the full
    product of the per-dimension value choices; otherwise reports that the
    assumption is not met, without certifying that no compound-justified
    committee exists.
    """
    if election.d == 1:
        result = gav_select(election)
        verdict = check_cjr(election, result.committee)
        return SearchReport(
            "cjr-product",
            result.committee,
            result.objective,
            0,
            False,
            decision=bool(verdict),
            note="single dimension: greedy committee",
        )

    full = (1 << election.n) - 1
    picks: list[list[str]] = []
    for j in range(election.d):
        active = full
        chosen: list[str] = []
        for _ in range(election.k):
            best_a = None
            best_cnt = 0
            for a in election.domain.values[j]:
                cnt = (election.approver_mask(j, a) & active).bit_count()
                if cnt > best_cnt:
                    best_cnt = cnt
                    best_a = a
            if best_a is None:
                break
            chosen.append(best_a)
            active &= ~election.approver_mask(j, best_a)
            if active == 0:
                break
        picks.append(chosen)

    slots = max((len(p) for p in picks), default=0)
    used: list[int] = []
    for t in range(slots):
        required = {
            j: p[min(t, len(p) - 1)] for j, p in enumerate(picks) if p
        }
        found = None
        for i, cand in enumerate(election.candidates):
            if i in used:
                continue
            if all(cand.attributes[j] == a for j, a in required.items()):
                found = i
                break
        if found is None:
            return SearchReport(
                "cjr-product",
                None,
                None,
                0,
                False,
                decision=None,
                note="assumption not met: no candidate realizes "
                + json.dumps(required, sort_keys=True),
            )
        used.append(found)
    for i in range(election.m):
        if len(used) == election.k:
            break
        if i not in used:
            used.append(i)
    committee = Committee.from_indices(election, used)
    verdict = check_cjr(election, committee)
    return SearchReport(
        "cjr-product",
        committee,
        None,
        0,
        False,
        decision=bool(verdict),
        note="" if verdict else "constructed committee fails the compound check",
    )


# -- justified-AV heuristic --------------------------------------------------


def justified_av_heuristic(election: Election) -> SelectionResult:
    """Greedy seed plus hill-climbing swaps under a representation guard.

    Starts from the greedy committee (which satisfies simple justified
    representation), then repeatedly applies the first single-candidate swap
    in index order that strictly increases the AV committee score while
    keeping the representation check satisfied.  Terminates at a local
    optimum; deterministic throughout.  This is a heuristic stand-in: the
    exact problem is NP-hard (see :func:`max_av_justified`).
    """
    n, k, d = election.n, election.k, election.d
    tally = election.approval_tally()
    slot_counts = [
        sum(tally[j].get(c.attributes[j], 0) for j in range(d))
        for c in election.candidates
    ]
    _, any_masks = _candidate_masks(election)
    threats = _threat_values(election)

    def sjr_ok(indices: tuple[int, ...]) -> bool:
        covered = 0
        for i in indices:
            covered |= any_masks[i]
        for _, _, mask in threats:
            group = mask & ~covered
            if group and group.bit_count() * k >= n:
                return False
        return True

    current = list(gav_select(election).committee.indices)
    improved = True
    while improved:
        improved = False
        for pos in range(len(current)):
            out = current[pos]
            for inn in range(election.m):
                if inn in current or slot_counts[inn] <= slot_counts[out]:
                    continue
                trial = tuple(sorted(current[:pos] + [inn] + current[pos + 1 :]))
                if sjr_ok(trial):
                    current = list(trial)
                    improved = True
                    break
            if improved:
                break
    committee = Committee.from_indices(election, current)
    objective = Fraction(sum(slot_counts[i] for i in current), d)
    return SelectionResult(
        "justified-av-heuristic",
        committee,
        objective,
        (StageRecord(1, committee.members, objective),),
    )


# -- set cover ----------------------------------------------------------------

_SETCOVER_KEYS = {"universe", "subsets", "budget"}


@dataclass(frozen=True)
class SetCoverInstance:
    """A set-cover question: do ``budget`` of the subsets cover their union?"""

    universe: int
    subsets: tuple[frozenset[int], ...]
    budget: int

    def check(self) -> Verdict:
        if self.universe < 1:
            return Verdict(False, "universe must be positive")
        if not self.subsets:
            return Verdict(False, "no subsets")
        for idx, s in enumerate(self.subsets):
            if not s:
                return Verdict(False, f"subset {idx} is empty")
            if any(e < 1 or e > self.universe for e in s):
                return Verdict(False, f"subset {idx} has out-of-universe element")
        if self.budget < 1:
            return Verdict(False, "budget must be positive")
        return Verdict(True)

    def union(self) -> frozenset[int]:
        out: set[int] = set()
        for s in self.subsets:
            out |= s
        return frozenset(out)


def setcover_from_dict(doc: Mapping) -> SetCoverInstance:
    unknown = set(doc) - _SETCOVER_KEYS
    if unknown:
        raise ValueError(f"unknown key: {sorted(unknown)[0]!r}")
    missing = _SETCOVER_KEYS - set(doc)
    if missing:
        raise ValueError(f"missing key: {sorted(missing)[0]!r}")
    return SetCoverInstance(
        int(doc["universe"]),
        tuple(frozenset(int(e) for e in s) for s in doc["subsets"]),
        int(doc["budget"]),
    )


def setcover_to_dict(instance: SetCoverInstance) -> dict:
    return {
        "universe": instance.universe,
        "subsets": [sorted(s) for s in instance.subsets],
        "budget": instance.budget,
    }


def solve_set_cover(
    instance: SetCoverInstance,
) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Exact decision: can at most ``budget`` distinct subsets cover the
    universe {1..n'}?

    Exhaustive over subset families; limited to instances with at most 20
    subsets.  Returns the first covering family (0-based subset indices) in
    size-then-lexicographic order, or ``(False, None)``.
    """
    verdict = instance.check()
    if not verdict:
        raise ValueError(f"malformed set-cover instance: {verdict.reason}")
    m = len(instance.subsets)
    if m > 20:
        raise ValueError("exhaustive set-cover solver is limited to 20 subsets")
    target = frozenset(range(1, instance.universe + 1))
    for r in range(1, min(instance.budget, m) + 1):
        for combo in itertools.combinations(range(m), r):
            acc: set[int] = set()
            for i in combo:
                acc |= instance.subsets[i]
            if acc >= target:
                return True, combo
    return False, None


# -- reductions ----------------------------------------------------------------


def _reduction_elements(instance: SetCoverInstance) -> tuple[int, list[set[int]]]:
    """Validate that the subsets cover the declared universe exactly.

    The reductions identify element t with voter t, so they are defined only
    on instances whose subset union is the full universe {1..n'}.
    """
    if instance.union() != frozenset(range(1, instance.universe + 1)):
        raise ValueError(
            "malformed set-cover instance: subsets do not cover the declared universe"
        )
    return instance.universe, [set(s) for s in instance.subsets]


def reduce_setcover_to_cjr(instance: SetCoverInstance, k: int) -> Election:
    """Build a 2-dimensional election whose compound-justified committees of
    size k correspond to covers by k subsets.

    The first m' candidates carry the subsets as approver sets on both
    dimensions; per voter block h of size n', two indexed families of gadget
    candidates pin the block's representation to dimension-specific values,
    and two further families do the same for the first block.  For k >= 3,
    gadget value slots that would otherwise have no approvers are filled with
    a single block-boundary voter, cycling over blocks 3..k.
    """
    verdict = instance.check()
    if not verdict:
        raise ValueError(f"malformed set-cover instance: {verdict.reason}")
    if k < 2:
        raise ValueError("the compound-representation reduction requires k >= 2")
    np_, subsets = _reduction_elements(instance)
    mp = len(subsets)
    n = k * np_
    m = mp + 2 * k * np_
    blocks = {
        h: set(range(np_ * (h - 1) + 1, np_ * h + 1)) for h in range(1, k + 1)
    }
    approvers: list[list[set[int]]] = [[set(), set()] for _ in range(m)]
    for i in range(mp):
        approvers[i][0] = set(subsets[i])
        approvers[i][1] = set(subsets[i])
    for h in range(2, k + 1):
        for i in range(1, np_ + 1):
            x = mp + (h - 2) * np_ + i
            approvers[x - 1][0] = {i} | (blocks[h] - {h * np_})
    for h in range(2, k + 1):
        for i in range(1, np_ + 1):
            x = mp + (k + h - 3) * np_ + i
            approvers[x - 1][1] = {i} | (blocks[h] - {h * np_})
    for i in range(1, np_ + 1):
        x = mp + (2 * k - 2) * np_ + i
        approvers[x - 1][0] = (blocks[1] - {i}) | {2 * np_}
    for i in range(1, np_ + 1):
        x = mp + (2 * k - 1) * np_ + i
        approvers[x - 1][1] = (blocks[1] - {i}) | {2 * np_}
    if k >= 3:
        fill = itertools.cycle(range(3, k + 1))
        for x in range(mp, m):
            for j in range(2):
                if not approvers[x][j]:
                    approvers[x][j] = {next(fill) * np_}
    return election_from_approver_sets(approvers, n, k)


def reduce_setcover_to_max_av_justified(
    instance: SetCoverInstance, k: int, d: int
) -> tuple[Election, Fraction]:
    """Build an election and threshold tau such that a justified committee
    with slot-approval count at least tau exists iff k subsets cover.

    The m' subset candidates get their subset's voters plus a shared filler
    block V' of size (2k-3)n' on every dimension; n' extra candidates carry
    one union element each, boosted on the first dimension by a fixed
    (2n'-1)-subset of a second filler block V''.
    """
    verdict = instance.check()
    if not verdict:
        raise ValueError(f"malformed set-cover instance: {verdict.reason}")
    if not ((k >= 2 and d >= 2) or (k >= 3 and d == 1)):
        raise ValueError(
            "the justified-AV reduction requires k >= 2 with d >= 2, or k >= 3 with d = 1"
        )
    np_, subsets = _reduction_elements(instance)
    mp = len(subsets)
    n = 2 * k * np_
    vprime = set(range(np_ + 1, np_ + (2 * k - 3) * np_ + 1))
    vsecond = list(range(np_ + (2 * k - 3) * np_ + 1, 2 * k * np_ + 1))
    assert len(vsecond) == 2 * np_
    vsecond_sub = set(vsecond[:-1])  # drop the highest-indexed voter
    approvers: list[list[set[int]]] = [
        [set() for _ in range(d)] for _ in range(mp + np_)
    ]
    for i in range(mp):
        for j in range(d):
            approvers[i][j] = set(subsets[i]) | vprime
    for i in range(1, np_ + 1):
        approvers[mp + i - 1][0] = {i} | vsecond_sub
        for j in range(1, d):
            approvers[mp + i - 1][j] = {i}
    tau = Fraction(d * (k * ((2 * k - 3) * np_) + np_))
    return election_from_approver_sets(approvers, n, k), tau
