"""Deterministic fixture elections and a seeded random-election generator.

The named constructors build small elections that each exhibit one sharp
phenomenon: a committee size too small to honor every dimension's unanimous
value, score-maximizing rules skipping a unanimously approved attribute,
greedy and optimization rules ignoring a seat-sized cohesive bloc, tie-broken
satisfaction scores and minimax distances doing the same, and an election
admitting no compound-justified committee at all.  The test suite binds each
fixture to its expected conclusion.

The random generator is fully determined by its parameters: it uses a
counter-based (Philox) pseudo-random stream, so identical parameters always
produce byte-identical elections, and derived suites can fan out seeds
deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import Ballot, Candidate, DomainSpec, Election

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def election_from_approver_sets(
    approvers: Sequence[Sequence[Iterable[int]]], n: int, k: int
) -> Election:
    """Build an election from per-candidate, per-dimension approver sets.

    ``approvers[i][j]`` holds 1-based voter numbers approving candidate i's
    value on dimension j.  Every candidate receives its own fresh value on
    every dimension, so approver sets translate directly into ballots.
    """
    m = len(approvers)
    d = len(approvers[0])
    domain = DomainSpec(
        tuple(f"dim{j + 1}" for j in range(d)),
        tuple(tuple(f"{_LETTERS[j]}{i + 1}" for i in range(m)) for j in range(d)),
    )
    candidates = [
        Candidate(f"c{i + 1}", tuple(f"{_LETTERS[j]}{i + 1}" for j in range(d)))
        for i in range(m)
    ]
    approvals: list[list[set[str]]] = [[set() for _ in range(d)] for _ in range(n)]
    for i, per_dim in enumerate(approvers):
        for j, voters in enumerate(per_dim):
            value = candidates[i].attributes[j]
            for v in voters:
                approvals[v - 1][j].add(value)
    ballots = [
        Ballot(f"v{v + 1}", tuple(frozenset(s) for s in approvals[v]))
        for v in range(n)
    ]
    return Election(domain, candidates, ballots, k)


def e0(k: int = 1) -> Election:
    """The four-voter, two-candidate worked example used across the tests.

    v1 and v2 approve c1's two values, v3 approves c2's, v4 approves all
    four value slots.
    """
    return election_from_approver_sets(
        [
            [{1, 2, 4}, {1, 2, 4}],  # c1 = [a1, b1]
            [{3, 4}, {3, 4}],  # c2 = [a2, b2]
        ],
        n=4,
        k=k,
    )


def conflicting_unanimity(n: int = 2) -> Election:
    """Two candidates, two dimensions, one seat: each candidate carries one
    dimension's unanimous value, so no single pick covers both."""
    if n < 2:
        raise ValueError("needs at least two voters, otherwise both dimensions collapse")
    everyone = set(range(1, n + 1))
    return election_from_approver_sets(
        [
            [everyone, {1}],  # c1 = [a1, b1]
            [{1}, everyone],  # c2 = [a2, b2]
        ],
        n=n,
        k=1,
    )


def unanimity_outscored(n: int = 4, m: int = 4, d: int = 2, k: int = 1) -> Election:
    """The only unanimously approved value sits on a candidate whose total
    score loses to candidates approved by all-but-one voter on every
    dimension."""
    if n * (d - 1) <= 2 * d - 1:
        raise ValueError("needs n large enough that near-unanimous candidates outscore c1")
    if m < 2 or d < 2:
        raise ValueError("needs at least two candidates and two dimensions")
    everyone = set(range(1, n + 1))
    x1 = everyone - {n}
    x2 = everyone - {1}
    approvers: list[list[set[int]]] = []
    approvers.append([everyone] + [{1} for _ in range(d - 1)])  # c1
    for i in range(2, m + 1):
        block = x1 if i <= m // 2 else x2
        approvers.append([set(block) for _ in range(d)])
    return election_from_approver_sets(approvers, n=n, k=k)


def av_ignores_bloc(k: int = 2, d: int = 2, n: int | None = None) -> Election:
    """k candidates approved by the large bloc crowd out the two candidates
    that the remaining n/k voters approve, so the score-maximal committee
    leaves a seat-sized group unrepresented."""
    if k < 2 or d < 2:
        raise ValueError("needs k >= 2 and d >= 2")
    if n is None:
        n = 2 * k
    if n % k != 0:
        raise ValueError("needs k | n so the bloc size is exactly n/k")
    bloc = n // k
    x1 = set(range(1, n - bloc + 1))
    x2 = set(range(n - bloc + 1, n + 1))
    half = d // 2
    approvers: list[list[set[int]]] = []
    for _ in range(k):
        approvers.append([set(x1) for _ in range(d)])
    approvers.append(
        [set(x2) if j < half else {n} for j in range(d)]  # c_{k+1}
    )
    approvers.append(
        [{n} if j < half else set(x2) for j in range(d)]  # c_{k+2}
    )
    return election_from_approver_sets(approvers, n=n, k=k)


def greedy_ignores_bloc(k: int = 3) -> Election:
    """Overlapping voter ranges on five candidates plus a 30-voter bloc whose
    approvals sit on single dimensions of the last two candidates; extra
    candidates with fresh voters extend the pattern beyond three seats."""
    if k < 3:
        raise ValueError("needs k >= 3")
    extra = k - 3
    n = 90 + 30 * extra
    approvers: list[list[set[int]]] = [
        [set(range(1, 36)), set(range(1, 36))],
        [set(range(21, 56)), set(range(21, 56))],
        [set(range(26, 51)), set(range(26, 51))],
        [{1}, set(range(61, 91))],
        [set(range(61, 91)), {1, 2}],
    ]
    for t in range(extra):
        fresh = set(range(91 + 30 * t, 91 + 30 * (t + 1)))
        approvers.append([set(fresh), set(fresh)])
    return election_from_approver_sets(approvers, n=n, k=k)


def greedy_ignores_bloc_highdim(d: int = 3) -> Election:
    """Two seats, three or more dimensions: two candidates soak up the first
    thirty voters on every dimension while the other thirty voters' approvals
    are confined to one dimension of the third candidate."""
    if d < 3:
        raise ValueError("needs d >= 3")
    first = set(range(1, 31))
    rest = set(range(31, 61))
    approvers = [
        [set(first) for _ in range(d)],
        [set(first) for _ in range(d)],
        [set(rest)] + [{1} for _ in range(d - 1)],
    ]
    return election_from_approver_sets(approvers, n=60, k=2)


def sav_tie_trap() -> Election:
    """Two singleton-ballot voters against a two-voter bloc with doubled
    ballots: total satisfaction ties, and the index tie-break elects the two
    singleton candidates, stranding the bloc."""
    approvers = [
        [{1}, {1}],  # c1, approved by v1 only
        [{2}, {2}],  # c2, approved by v2 only
        [{3, 4}, {3, 4}],  # c3, the bloc's first choice
        [{3, 4}, {3, 4}],  # c4, the bloc's second choice
    ]
    return election_from_approver_sets(approvers, n=4, k=2)


def mav_outlier_trap() -> Election:
    """A two-voter bloc with a tiny ballot versus two outliers with huge
    disjoint ballots: covering the bloc's value forces one outlier to a
    larger worst-case distance, so the minimax optimum skips the bloc."""
    approvers: list[list[set[int]]] = [[{1, 2}, {1, 2}]]  # c1, the bloc value
    for _ in range(5):
        approvers.append([{3}, {3}])  # c2..c6, first outlier's ballot
    for _ in range(5):
        approvers.append([{4}, {4}])  # c7..c11, second outlier's ballot
    return election_from_approver_sets(approvers, n=4, k=2)


def cjr_infeasible() -> Election:
    """Six candidates, six voters, three seats: three two-voter blocs each
    pin one value on either dimension, forcing four distinct candidates into
    any dimension-wise-justified committee of size three."""
    approvers = [
        [{1, 2}, {1}],  # c1: a1 by bloc 1, b1 by v1
        [{3, 4}, {1}],  # c2
        [{5, 6}, {1}],  # c3
        [{1}, {1, 2}],  # c4: b4 by bloc 1
        [{1}, {3, 4}],  # c5
        [{1}, {5, 6}],  # c6
    ]
    return election_from_approver_sets(approvers, n=6, k=3)


COUNTEREXAMPLES: dict[str, Callable[..., Election]] = {
    "e0": e0,
    "conflicting-unanimity": conflicting_unanimity,
    "unanimity-outscored": unanimity_outscored,
    "av-ignores-bloc": av_ignores_bloc,
    "greedy-ignores-bloc": greedy_ignores_bloc,
    "greedy-ignores-bloc-highdim": greedy_ignores_bloc_highdim,
    "sav-tie-trap": sav_tie_trap,
    "mav-outlier-trap": mav_outlier_trap,
    "cjr-infeasible": cjr_infeasible,
}


def counterexample(name: str, **params) -> Election:
    """Build a named fixture election; parameters where the construction
    generalizes, a parameter error naming the constraint where not."""
    try:
        builder = COUNTEREXAMPLES[name]
    except KeyError:
        raise ValueError(
            f"unknown instance {name!r}; known: {sorted(COUNTEREXAMPLES)}"
        ) from None
    return builder(**params)


# -- random generator --------------------------------------------------------


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters of the seeded election generator.

    ``plant_unanimous`` lists dimensions that receive a value approved by
    every voter; ``plant_bloc`` injects a cohesive group of ceil(n/k) voters
    that approve one chosen value and nothing else.  Planted values are
    always values realized by some candidate, and voters only approve
    realized values, so every approval is attached to an electable value.
    """

    seed: int
    voters: int
    candidates: int
    dimensions: int
    domain_size: int
    approval_prob: float
    k: int
    plant_unanimous: tuple[int, ...] = ()
    plant_bloc: bool = False
    distinct_values: bool = False

    def check(self) -> None:
        if self.voters < 1 or self.candidates < 1 or self.dimensions < 1:
            raise ValueError("voters, candidates and dimensions must be positive")
        if self.dimensions > len(_LETTERS):
            raise ValueError("at most 26 dimensions")
        if self.domain_size < 1:
            raise ValueError("domain size must be positive")
        if not (0.0 <= self.approval_prob <= 1.0):
            raise ValueError("approval probability must lie in [0, 1]")
        if not (1 <= self.k <= self.candidates):
            raise ValueError("k must lie in [1, candidates]")
        if any(j < 0 or j >= self.dimensions for j in self.plant_unanimous):
            raise ValueError("planted dimension out of range")
        if self.distinct_values and self.domain_size < self.candidates:
            raise ValueError("distinct candidate values need domain_size >= candidates")


def generate_random(params: GeneratorParams) -> Election:
    """Generate an election; identical parameters give identical output."""
    params.check()
    n, m, d = params.voters, params.candidates, params.dimensions
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(params.seed)))

    domain = DomainSpec(
        tuple(f"dim{j + 1}" for j in range(d)),
        tuple(
            tuple(f"{_LETTERS[j]}{t + 1}" for t in range(params.domain_size))
            for j in range(d)
        ),
    )
    if params.distinct_values:
        cand_vals = np.column_stack(
            [rng.choice(params.domain_size, size=m, replace=False) for _ in range(d)]
        )
    else:
        cand_vals = rng.integers(0, params.domain_size, size=(m, d))
    candidates = [
        Candidate(
            f"c{i + 1}", tuple(domain.values[j][cand_vals[i, j]] for j in range(d))
        )
        for i in range(m)
    ]

    approvals: list[list[set[str]]] = [[set() for _ in range(d)] for _ in range(n)]
    for j in range(d):
        realized = sorted(set(cand_vals[:, j].tolist()))
        if not realized:
            continue
        matrix = rng.random((n, len(realized))) < params.approval_prob
        counts = matrix.sum(axis=1)
        flat = np.nonzero(matrix)[1]
        offset = 0
        names = [domain.values[j][t] for t in realized]
        for v in range(n):
            c = int(counts[v])
            if c:
                approvals[v][j].update(names[t] for t in flat[offset : offset + c])
                offset += c

    if params.plant_bloc:
        j = int(rng.integers(d))
        ci = int(rng.integers(m))
        value = candidates[ci].attributes[j]
        size = -(-n // params.k)  # ceil(n/k)
        members = rng.choice(n, size=size, replace=False)
        for v in members.tolist():
            approvals[v] = [set() for _ in range(d)]
            approvals[v][j].add(value)

    for j in params.plant_unanimous:
        ci = int(rng.integers(m))
        value = candidates[ci].attributes[j]
        for v in range(n):
            approvals[v][j].add(value)

    ballots = [
        Ballot(f"v{v + 1}", tuple(frozenset(s) for s in approvals[v]))
        for v in range(n)
    ]
    return Election(domain, candidates, ballots, params.k)


def spawn_seeds(master_seed: int, count: int) -> list[int]:
    """Deterministically fan a master seed out to per-trial seeds."""
    seq = np.random.SeedSequence(master_seed)
    return [int(child.generate_state(1)[0]) for child in seq.spawn(count)]
