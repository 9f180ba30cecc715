"""Core data model for attribute-approval elections.

An election consists of a per-dimension attribute domain, candidates carrying
one value per dimension, voters who approve sets of values per dimension, and
a target committee size k.  Everything downstream (rules, checkers, solvers)
works on these types; all of them are immutable after construction and every
operation here is a pure function, so concurrent use is safe.

Scores throughout the package are exact rationals (``fractions.Fraction``);
group-size thresholds are decided in cross-multiplied integer arithmetic so
that boundary groups are never misclassified by floating-point division.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validation or property check.

    ``witness`` is present exactly when ``holds`` is false and carries a
    structured counterexample that can be re-checked independently.
    ``reason`` is a short human-readable tag naming the violated condition.
    """

    holds: bool
    reason: str = ""
    witness: Optional[Mapping] = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class DomainSpec:
    """Per-dimension attribute domains.

    ``values[j]`` is the ordered list of admissible values on dimension j.
    Values are symbolic strings scoped to their dimension: equality of
    attributes is (dimension index, value), so the same spelling on two
    dimensions denotes two distinct attributes.
    """

    names: tuple[str, ...]
    values: tuple[tuple[str, ...], ...]

    @property
    def dimension_count(self) -> int:
        return len(self.values)

    @property
    def attribute_count(self) -> int:
        """Total number of distinct attributes over all dimensions."""
        return sum(len(vs) for vs in self.values)

    def check(self) -> Verdict:
        if len(self.names) != len(self.values):
            return Verdict(False, "dimension name/value list length mismatch")
        if not self.values:
            return Verdict(False, "no dimensions")
        for j, vs in enumerate(self.values):
            if not vs:
                return Verdict(False, f"empty domain on dimension {j}")
            if len(set(vs)) != len(vs):
                return Verdict(False, f"duplicate values on dimension {j}")
        return Verdict(True)


@dataclass(frozen=True)
class Candidate:
    """A candidate: an id plus one attribute value per dimension."""

    id: str
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class Ballot:
    """A voter's approvals: one (possibly empty) value set per dimension."""

    voter: str
    approvals: tuple[frozenset[str], ...]

    def approval_count(self) -> int:
        return sum(len(s) for s in self.approvals)


class Election:
    """An attribute-approval election.

    Construction precomputes cheap lookup tables; approver bitmasks (used by
    the representation checkers and the exhaustive solvers) are built lazily
    on first use so that very large elections pay only for what they touch.
    Instances are immutable by convention: no method mutates state other than
    the internal caches.
    """

    def __init__(
        self,
        domain: DomainSpec,
        candidates: Sequence[Candidate],
        ballots: Sequence[Ballot],
        k: int,
    ):
        self.domain = domain
        self.candidates = tuple(candidates)
        self.ballots = tuple(ballots)
        self.k = int(k)

        self._cand_pos = {c.id: i for i, c in enumerate(self.candidates)}
        self._voter_pos = {b.voter: i for i, b in enumerate(self.ballots)}
        self._value_pos = tuple(
            {a: t for t, a in enumerate(vs)} for t, vs in enumerate(domain.values)
        )
        # lazy caches
        self._masks: list[dict[str, int]] | None = None
        self._tally: list[dict[str, int]] | None = None

    # -- basic shape ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def d(self) -> int:
        return self.domain.dimension_count

    def candidate_index(self, cid: str) -> int:
        return self._cand_pos[cid]

    def candidate(self, cid: str) -> Candidate:
        return self.candidates[self._cand_pos[cid]]

    def voter_index(self, vid: str) -> int:
        return self._voter_pos[vid]

    # -- approver structures --------------------------------------------

    def _build_masks(self) -> list[dict[str, int]]:
        masks: list[dict[str, int]] = [dict() for _ in range(self.d)]
        for i, ballot in enumerate(self.ballots):
            bit = 1 << i
            for j, approved in enumerate(ballot.approvals):
                mj = masks[j]
                for a in approved:
                    mj[a] = mj.get(a, 0) | bit
        return masks

    def approver_mask(self, j: int, value: str) -> int:
        """Bitmask (by voter position) of voters approving ``value`` on dim j."""
        if self._masks is None:
            self._masks = self._build_masks()
        return self._masks[j].get(value, 0)

    def coverage_mask(self, j: int, values: Iterable[str]) -> int:
        """Voters approving at least one of ``values`` on dimension j."""
        covered = 0
        for a in values:
            covered |= self.approver_mask(j, a)
        return covered

    def voters_from_mask(self, mask: int) -> tuple[str, ...]:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self.ballots[i].voter)
            mask >>= 1
            i += 1
        return tuple(out)

    def approval_tally(self) -> list[dict[str, int]]:
        """Per-dimension approval counts for every value (cached)."""
        if self._tally is None:
            tally: list[dict[str, int]] = [dict() for _ in range(self.d)]
            for ballot in self.ballots:
                for j, approved in enumerate(ballot.approvals):
                    tj = tally[j]
                    for a in approved:
                        tj[a] = tj.get(a, 0) + 1
            self._tally = tally
        return self._tally

    def unanimous_values(self, j: int) -> frozenset[str]:
        """Values on dimension j approved by every voter."""
        if not self.ballots:
            return frozenset()
        acc = set(self.ballots[0].approvals[j])
        for ballot in self.ballots[1:]:
            if not acc:
                break
            acc &= ballot.approvals[j]
        return frozenset(acc)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Election(n={self.n}, m={self.m}, d={self.d}, k={self.k})"


class CommitteeError(ValueError):
    """Raised when a committee cannot be formed from the given ids."""


@dataclass(frozen=True)
class Committee:
    """A size-k set of candidates plus its per-dimension value sets.

    ``members`` is ordered by candidate input index, which makes committees
    with equal membership compare equal and gives deterministic serialization.
    ``values[j]`` is the set of attribute values the committee carries on
    dimension j; its size is below k exactly when members share a value there.
    """

    members: tuple[str, ...]
    indices: tuple[int, ...]
    values: tuple[frozenset[str], ...]

    @staticmethod
    def from_ids(election: Election, ids: Iterable[str]) -> "Committee":
        ids = list(ids)
        unknown = [c for c in ids if c not in election._cand_pos]
        if unknown:
            raise CommitteeError(f"unknown candidate id: {unknown[0]}")
        if len(set(ids)) != len(ids):
            raise CommitteeError("duplicate candidate in committee")
        indices = tuple(sorted(election.candidate_index(c) for c in ids))
        members = tuple(election.candidates[i].id for i in indices)
        values = tuple(
            frozenset(election.candidates[i].attributes[j] for i in indices)
            for j in range(election.d)
        )
        return Committee(members, indices, values)

    @staticmethod
    def from_indices(election: Election, indices: Iterable[int]) -> "Committee":
        idx = tuple(sorted(indices))
        members = tuple(election.candidates[i].id for i in idx)
        values = tuple(
            frozenset(election.candidates[i].attributes[j] for i in idx)
            for j in range(election.d)
        )
        return Committee(members, idx, values)

    @property
    def size(self) -> int:
        return len(self.members)

    def member_set(self) -> frozenset[str]:
        return frozenset(self.members)


# -- operations ----------------------------------------------------------


def validate(election: Election) -> Verdict:
    """Check every structural invariant; report the first violation.

    Accepts exactly the elections on which the rest of the package is
    defined: non-empty well-formed domains, candidates with one in-domain
    value per dimension, ballots approving only in-domain values, distinct
    ids, and 1 <= k <= m.  Voters with empty ballots and candidates with no
    approvals anywhere are legal.
    """
    dom = election.domain.check()
    if not dom:
        return dom
    d = election.d
    if election.n < 1:
        return Verdict(False, "no voters")
    if election.m < 1:
        return Verdict(False, "no candidates")
    if not (1 <= election.k <= election.m):
        return Verdict(
            False,
            f"k out of range: k={election.k} with m={election.m}",
        )
    seen = set()
    for c in election.candidates:
        if c.id in seen:
            return Verdict(False, f"duplicate candidate id: {c.id}")
        seen.add(c.id)
        if len(c.attributes) != d:
            return Verdict(
                False, f"candidate {c.id} has {len(c.attributes)} attributes, expected {d}"
            )
        for j, a in enumerate(c.attributes):
            if a not in election._value_pos[j]:
                return Verdict(
                    False,
                    f"out-of-domain attribute: candidate {c.id} dimension {j} value {a!r}",
                )
    seen = set()
    for b in election.ballots:
        if b.voter in seen:
            return Verdict(False, f"duplicate voter id: {b.voter}")
        seen.add(b.voter)
        if len(b.approvals) != d:
            return Verdict(
                False, f"ballot {b.voter} has {len(b.approvals)} dimensions, expected {d}"
            )
        for j, approved in enumerate(b.approvals):
            for a in approved:
                if a not in election._value_pos[j]:
                    return Verdict(
                        False,
                        f"out-of-domain approval: voter {b.voter} dimension {j} value {a!r}",
                    )
    return Verdict(True)


def approver_set(election: Election, j: int, value: str) -> frozenset[str]:
    """Voters who approved ``value`` on dimension ``j`` (0-based)."""
    if not (0 <= j < election.d):
        raise ValueError(f"dimension out of range: {j}")
    if value not in election._value_pos[j]:
        raise ValueError(f"unknown value on dimension {j}: {value!r}")
    return frozenset(
        b.voter for b in election.ballots if value in b.approvals[j]
    )


def meets_group_threshold(group_size: int, election: Election) -> bool:
    """True iff a group of this size is entitled to a committee seat.

    Implements ``group_size >= n/k`` as ``group_size * k >= n`` so the
    comparison is exact for every integer input.
    """
    if group_size < 0:
        raise ValueError("group size must be non-negative")
    return group_size * election.k >= election.n


# -- election file format --------------------------------------------------

_ELECTION_KEYS = {"k", "dimensions", "candidates", "voters"}


class ElectionFormatError(ValueError):
    """Raised when an election document does not match the file schema."""


def election_to_dict(election: Election) -> dict:
    """Serialize to the canonical JSON document structure.

    Approval sets are written sorted by domain order, so serialization is a
    pure function of the election content.
    """
    dom = election.domain
    order = election._value_pos
    return {
        "k": election.k,
        "dimensions": [
            {"name": dom.names[j], "values": list(dom.values[j])}
            for j in range(election.d)
        ],
        "candidates": [
            {"id": c.id, "attributes": list(c.attributes)} for c in election.candidates
        ],
        "voters": [
            {
                "id": b.voter,
                "approvals": [
                    sorted(b.approvals[j], key=order[j].__getitem__)
                    for j in range(election.d)
                ],
            }
            for b in election.ballots
        ],
    }


def election_from_dict(doc: Mapping) -> Election:
    """Parse the canonical JSON document structure; reject unknown keys."""
    if not isinstance(doc, Mapping):
        raise ElectionFormatError("election document must be a JSON object")
    unknown = set(doc) - _ELECTION_KEYS
    if unknown:
        raise ElectionFormatError(f"unknown key: {sorted(unknown)[0]!r}")
    missing = _ELECTION_KEYS - set(doc)
    if missing:
        raise ElectionFormatError(f"missing key: {sorted(missing)[0]!r}")
    dims = doc["dimensions"]
    if not isinstance(dims, list) or not dims:
        raise ElectionFormatError("dimensions must be a non-empty array")
    names = []
    values = []
    for jd, entry in enumerate(dims):
        extra = set(entry) - {"name", "values"}
        if extra:
            raise ElectionFormatError(f"unknown key in dimension {jd}: {sorted(extra)[0]!r}")
        names.append(str(entry["name"]))
        values.append(tuple(str(v) for v in entry["values"]))
    domain = DomainSpec(tuple(names), tuple(values))
    d = domain.dimension_count

    candidates = []
    for entry in doc["candidates"]:
        extra = set(entry) - {"id", "attributes"}
        if extra:
            raise ElectionFormatError(f"unknown key in candidate: {sorted(extra)[0]!r}")
        attrs = entry["attributes"]
        if len(attrs) != d:
            raise ElectionFormatError(
                f"candidate {entry['id']!r} has {len(attrs)} attributes, expected {d}"
            )
        candidates.append(Candidate(str(entry["id"]), tuple(str(a) for a in attrs)))

    ballots = []
    for entry in doc["voters"]:
        extra = set(entry) - {"id", "approvals"}
        if extra:
            raise ElectionFormatError(f"unknown key in voter: {sorted(extra)[0]!r}")
        approvals = entry["approvals"]
        if len(approvals) != d:
            raise ElectionFormatError(
                f"voter {entry['id']!r} has {len(approvals)} approval lists, expected {d}"
            )
        ballots.append(
            Ballot(
                str(entry["id"]),
                tuple(frozenset(str(a) for a in lst) for lst in approvals),
            )
        )

    if not isinstance(doc["k"], int) or isinstance(doc["k"], bool):
        raise ElectionFormatError("k must be an integer")
    return Election(domain, candidates, ballots, doc["k"])


def election_to_json(election: Election) -> str:
    return json.dumps(election_to_dict(election), ensure_ascii=False, indent=None) + "\n"


def election_from_json(text: str) -> Election:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ElectionFormatError(f"invalid JSON: {exc}") from exc
    return election_from_dict(doc)


def load_election(path: str) -> Election:
    with open(path, encoding="utf-8") as fh:
        return election_from_json(fh.read())


def save_election(election: Election, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(election_to_json(election))
