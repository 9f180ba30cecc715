"""Greedy approval voting over attributes.

Each stage selects the candidate whose single best attribute has the most
approvals among the still-active voters, adds it to the committee, retires
the candidate, and deactivates every voter who approves at least one of the
chosen candidate's attributes.  When the active voter list empties before the
committee is full, it is reset to the full electorate.

Two tie-breaking regimes are provided.  ``BY_INDEX`` resolves every tie
toward the lowest candidate input index.  ``STRONG_UNANIMITY`` first prefers,
among equally-approved attributes, the one with more approvals from voters
still unrepresented on that attribute's dimension, then prefers candidates
carrying more unanimously-approved values, and only then falls back to the
index.  The second regime is what makes the greedy rule cover a unanimous
value on every dimension whenever the committee is large enough (k >= d).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import Committee, Election
from .rules import RuleId, SelectionResult, StageRecord, av_committee_score


class TieBreakMode(enum.Enum):
    BY_INDEX = "by-index"
    STRONG_UNANIMITY = "strong-unanimity"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GavStage(StageRecord):
    """One greedy stage: the winning attribute, its in-round approval count,
    the voters deactivated by the pick, and whether the pick emptied the
    active list and forced a reset."""

    attribute: tuple[int, str]
    approvals: int
    removed: tuple[str, ...]
    reset: bool


def unrepresented_voters(
    election: Election, committee: Committee, j: int
) -> frozenset[str]:
    """Voters none of whose approved dimension-j values appear in the committee."""
    covered = election.coverage_mask(j, committee.values[j])
    n_mask = (1 << election.n) - 1
    return frozenset(election.voters_from_mask(n_mask & ~covered))


def _unrepresented_mask(election: Election, values_by_dim, j: int) -> int:
    covered = election.coverage_mask(j, values_by_dim[j])
    return ((1 << election.n) - 1) & ~covered


def gav_select(
    election: Election, mode: TieBreakMode = TieBreakMode.BY_INDEX
) -> SelectionResult:
    """Run the greedy attribute-approval selection; deterministic per mode."""
    n, d, k = election.n, election.d, election.k
    full_mask = (1 << n) - 1
    cands = election.candidates
    attr_masks = [
        [election.approver_mask(j, c.attributes[j]) for j in range(d)] for c in cands
    ]
    cand_any_mask = [0] * election.m
    for i in range(election.m):
        acc = 0
        for j in range(d):
            acc |= attr_masks[i][j]
        cand_any_mask[i] = acc

    unanimous = [election.unanimous_values(j) for j in range(d)]
    unanimous_count = [
        sum(1 for j in range(d) if cands[i].attributes[j] in unanimous[j])
        for i in range(election.m)
    ]

    active = full_mask
    pool = list(range(election.m))
    chosen: list[int] = []
    values_so_far: list[set[str]] = [set() for _ in range(d)]
    stages: list[GavStage] = []

    for stage in range(1, k + 1):
        # score every remaining candidate by its best attribute within V'
        best_count = -1
        entries: list[tuple[int, int]] = []  # (candidate index, dimension)
        for i in pool:
            row = attr_masks[i]
            for j in range(d):
                cnt = (row[j] & active).bit_count()
                if cnt > best_count:
                    best_count = cnt
                    entries = [(i, j)]
                elif cnt == best_count:
                    entries.append((i, j))

        if mode is TieBreakMode.STRONG_UNANIMITY and len(entries) > 1:
            entries = _strong_unanimity_filter(
                election, entries, attr_masks, values_so_far, unanimous_count
            )

        winner, wdim = min(entries, key=lambda e: (e[0], e[1]))
        removed_mask = active & cand_any_mask[winner]
        active &= ~removed_mask
        reset = False
        chosen.append(winner)
        pool.remove(winner)
        for j in range(d):
            values_so_far[j].add(cands[winner].attributes[j])
        if active == 0 and len(chosen) < k:
            active = full_mask
            reset = True
        stages.append(
            GavStage(
                stage=stage,
                chosen=(cands[winner].id,),
                score=Fraction(best_count),
                attribute=(wdim, cands[winner].attributes[wdim]),
                approvals=best_count,
                removed=election.voters_from_mask(removed_mask),
                reset=reset,
            )
        )

    committee = Committee.from_indices(election, chosen)
    objective = av_committee_score(election, committee)
    return SelectionResult(RuleId.GAV, committee, objective, tuple(stages))


def _strong_unanimity_filter(
    election: Election,
    entries: list[tuple[int, int]],
    attr_masks,
    values_so_far: list[set[str]],
    unanimous_count: list[int],
) -> list[tuple[int, int]]:
    """Apply the two strong-unanimity tie-break rules to argmax-tied entries.

    Rule 1 compares, per tied attribute, the approvals it has among voters
    currently unrepresented on its dimension (always over the full
    electorate; unanimity is a property of V, not of the active list).
    Rule 2 keeps the candidates carrying the most unanimously-approved
    values.  Remaining ties are resolved by the caller via candidate index.
    """
    unrep_cache: dict[int, int] = {}

    def unrep_mask(j: int) -> int:
        if j not in unrep_cache:
            unrep_cache[j] = _unrepresented_mask(election, values_so_far, j)
        return unrep_cache[j]

    best = -1
    survivors: list[tuple[int, int]] = []
    for i, j in entries:
        cnt = (attr_masks[i][j] & unrep_mask(j)).bit_count()
        if cnt > best:
            best = cnt
            survivors = [(i, j)]
        elif cnt == best:
            survivors.append((i, j))

    top_unanimous = max(unanimous_count[i] for i, _ in survivors)
    return [e for e in survivors if unanimous_count[e[0]] == top_unanimous]
