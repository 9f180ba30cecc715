"""attrvote: committee selection from attribute-approval ballots.

Voting rules (AV, SAV, RAV, PAV, MAV and a greedy rule), representation and
unanimity checkers, exhaustive solvers with set-cover reductions, curated
counterexample fixtures, a seeded election generator, and a JSON-speaking
command-line interface.
"""

__version__ = "0.1.0"

from .model import (
    Ballot,
    Candidate,
    Committee,
    DomainSpec,
    Election,
    Verdict,
    approver_set,
    meets_group_threshold,
    validate,
)
from .rules import RuleId, SelectionResult

__all__ = [
    "Ballot",
    "Candidate",
    "Committee",
    "DomainSpec",
    "Election",
    "RuleId",
    "SelectionResult",
    "Verdict",
    "approver_set",
    "meets_group_threshold",
    "validate",
    "__version__",
]
