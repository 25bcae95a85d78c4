"""Check reports: the single record type every verified statement produces.

A report pairs the two sides of one inequality or identity with the
provenance of each number.  Grid values are finite-sample lower bounds of
sup quantities, certified values are author-supplied upper bounds, exact
values are closed forms.  A "pass" on an upper-bound claim is only sound
if the left side is not itself a certified upper bound while the right
side is a grid lower bound; the constructor rejects that pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

GRID_LOWER = "grid_lower"
CERTIFIED_UPPER = "certified_upper"
EXACT = "exact"
_PROVENANCES = (GRID_LOWER, CERTIFIED_UPPER, EXACT)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-precondition"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verified identity or estimate.

    ``margin`` is ``rhs - lhs`` for upper-bound claims; identity checks
    store ``lhs = |difference|``, ``rhs = 0`` so the same pass rule
    ``margin >= -tolerance`` applies.
    """

    check_id: str
    status: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    lhs_provenance: str = EXACT
    rhs_provenance: str = EXACT
    witness: tuple = ()
    detail: str = ""

    def __post_init__(self):
        if self.status not in (PASS, FAIL, SKIPPED):
            raise ValueError(f"unknown status {self.status!r}")
        if self.lhs_provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.lhs_provenance!r}")
        if self.rhs_provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.rhs_provenance!r}")
        if (
            self.status != SKIPPED
            and self.lhs_provenance == CERTIFIED_UPPER
            and self.rhs_provenance == GRID_LOWER
        ):
            raise ValueError(
                "unsound provenance pairing: certified upper bound on the "
                "left of a claim checked against a grid lower bound"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "lhs_provenance": self.lhs_provenance,
            "rhs_provenance": self.rhs_provenance,
            "witness": list(self.witness),
            "detail": self.detail,
        }


def bound_report(
    check_id: str,
    lhs: float,
    rhs: float,
    *,
    tolerance: float,
    lhs_provenance: str = GRID_LOWER,
    rhs_provenance: str = CERTIFIED_UPPER,
    witness: tuple = (),
    detail: str = "",
) -> CheckReport:
    """Report for the upper-bound claim ``lhs <= rhs``."""
    margin = rhs - lhs
    # inf <= inf counts as a pass with zero margin
    if lhs == rhs:
        margin = 0.0
    status = PASS if margin >= -tolerance else FAIL
    return CheckReport(
        check_id,
        status,
        float(lhs),
        float(rhs),
        float(margin),
        float(tolerance),
        lhs_provenance,
        rhs_provenance,
        witness,
        detail,
    )


def identity_report(
    check_id: str,
    deviation: float,
    *,
    tolerance: float,
    witness: tuple = (),
    detail: str = "",
) -> CheckReport:
    """Report for an identity checked through ``|difference| <= tolerance``."""
    return CheckReport(
        check_id,
        PASS if deviation <= tolerance else FAIL,
        float(deviation),
        0.0,
        -float(deviation),
        float(tolerance),
        EXACT,
        EXACT,
        witness,
        detail,
    )


def skipped_report(check_id: str, reason: str) -> CheckReport:
    return CheckReport(
        check_id, SKIPPED, 0.0, 0.0, 0.0, 0.0, EXACT, EXACT, (), reason
    )


def worst(reports: list[CheckReport]) -> CheckReport:
    """The report with the smallest margin; failures take precedence."""
    if not reports:
        raise ValueError("no reports to aggregate")
    fails = [r for r in reports if r.status == FAIL]
    pool = fails if fails else reports
    return min(pool, key=lambda r: r.margin)


def merge_min_margin(check_id: str, reports: list[CheckReport]) -> CheckReport:
    """Collapse per-point or per-factor reports into one, keeping the
    worst margin and its witness."""
    w = worst(reports)
    if w.check_id != check_id:
        w = replace(w, check_id=check_id)
    return w
