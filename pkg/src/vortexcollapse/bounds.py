"""Bezout degree ledger for the four-vortex system and audits of observed solution counts."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import AuditViolation

COLLINEAR_COUNT = 20
LOWER_BOUND_NOTE = "lower bounds for the three excess components are used as exact values"


@dataclass(frozen=True)
class BoundLedger:
    equation_degrees: tuple[int, ...] = (2, 3, 4, 4, 5)
    deg_case1: int = 6 * 2 + 4 * 2
    deg_case2: int = 2
    deg_case3: int = 12 * 1 + 1 * 6
    trivial_multiplicity: int = 8
    collinear: int = COLLINEAR_COUNT
    note: str = LOWER_BOUND_NOTE

    @property
    def raw_degree(self) -> int:
        return math.prod(self.equation_degrees)

    @property
    def net_degree(self) -> int:
        return self.raw_degree - (self.deg_case1 + self.deg_case2 + self.deg_case3)

    @property
    def budget(self) -> int:
        return self.net_degree - self.trivial_multiplicity

    def remaining(self, n_1: int | None = None, n_minus_1: int | None = None) -> int:
        """Budget left once the solutions at lam = +-1 are paid for."""
        n_1 = self.collinear if n_1 is None else n_1
        n_minus_1 = n_1 if n_minus_1 is None else n_minus_1
        return self.budget - n_1 - n_minus_1

    def corollaries(self, n_1: int | None = None, n_minus_1: int | None = None) -> dict[str, int]:
        """Upper bounds that follow from the weighted count inequality."""
        rest = self.remaining(n_1, n_minus_1)
        return {
            "remaining": rest,
            # first-quadrant lam values, four conjugate/opposite images each, two signs per configuration
            "lambda_classes": rest // 8,
            "lambda_classes_with_i": (rest - 4) // 8,
            "real_collapse_per_lambda": rest // 8,
            "collapse_lambdas_real": rest // 4,
            "collapse_lambdas_complex": rest // 2,
            "real_collapse_at_i": rest // 4,
            "real_central": self.budget // 4,
            "complex_central": self.budget // 2,
        }


def ledger() -> BoundLedger:
    return BoundLedger()


@dataclass(frozen=True)
class CountAudit:
    """Solution counts per lam, each including both members of a ``+-`` pair.

    ``per_lambda`` keys are first-quadrant representatives (Re > 0, Im > 0);
    the conjugate and opposite values are assumed to carry the same count.
    """

    per_lambda: Mapping[complex, int] = field(default_factory=dict)
    n_i: int = 0
    n_minus_i: int | None = None
    n_1: int = COLLINEAR_COUNT
    n_minus_1: int | None = None

    def __post_init__(self) -> None:
        counts = list(self.per_lambda.values()) + [self.n_i, self.n_1]
        counts += [c for c in (self.n_minus_i, self.n_minus_1) if c is not None]
        for c in counts:
            if int(c) != c or c < 0:
                raise ValueError(f"counts must be nonnegative integers, got {c!r}")
        for lam in self.per_lambda:
            lam = complex(lam)
            if not (lam.real > 0 and lam.imag > 0):
                raise ValueError(f"per_lambda key {lam} is not in the open first quadrant")

    @property
    def minus_i(self) -> int:
        return self.n_i if self.n_minus_i is None else self.n_minus_i

    @property
    def minus_1(self) -> int:
        return self.n_1 if self.n_minus_1 is None else self.n_minus_1


@dataclass(frozen=True)
class AuditReport:
    weighted_total: int
    budget: int
    checks: dict[str, tuple[int, int, bool]]
    note: str = LOWER_BOUND_NOTE

    @property
    def passed(self) -> bool:
        return all(ok for *_, ok in self.checks.values())

    @property
    def violated(self) -> list[str]:
        return [k for k, (*_, ok) in self.checks.items() if not ok]


def audit(counts: CountAudit, *, collinear: int = COLLINEAR_COUNT, raise_on_violation: bool = True) -> AuditReport:
    """Check observed counts against the weighted inequality and its corollaries.

    ``collinear`` is the number of solutions assumed at each of lam = +-1
    when the observed value is smaller; it enters the budget left for collapse.
    """
    book = ledger()
    odd = [c for c in [*counts.per_lambda.values(), counts.n_i, counts.minus_i] if c % 2]
    n1 = max(counts.n_1, collinear)
    nm1 = max(counts.minus_1, collinear)
    bounds = book.corollaries(n1, nm1)
    total = 4 * sum(counts.per_lambda.values()) + counts.n_i + counts.minus_i + n1 + nm1
    occupied = sum(1 for c in counts.per_lambda.values() if c > 0)
    lambda_cap = bounds["lambda_classes_with_i"] if counts.n_i > 0 else bounds["lambda_classes"]
    collapse_lambdas = 4 * occupied + (2 if counts.n_i > 0 else 0)
    largest = max(counts.per_lambda.values(), default=0)

    checks = {
        "counts even": (len(odd), 0, not odd),
        "weighted count <= budget": (total, book.budget, total <= book.budget),
        "real collapse per lam <= bound": (largest // 2, bounds["real_collapse_per_lambda"],
                                            largest // 2 <= bounds["real_collapse_per_lambda"]),
        "real collapse at +-i <= bound": (counts.n_i // 2, bounds["real_collapse_at_i"],
                                           counts.n_i // 2 <= bounds["real_collapse_at_i"]),
        "first-quadrant lam values <= bound": (occupied, lambda_cap, occupied <= lambda_cap),
        "collapse lam values <= real bound": (collapse_lambdas, bounds["collapse_lambdas_real"],
                                               collapse_lambdas <= bounds["collapse_lambdas_real"]),
    }
    report = AuditReport(total, book.budget, checks)
    if raise_on_violation and not report.passed:
        raise AuditViolation("count audit failed: " + "; ".join(report.violated), report.violated)
    return report


def counts_from_scan(per_lambda_real: Mapping[complex, int], tol: float = 1e-12) -> CountAudit:
    """Fold real collapse counts from a unit-circle scan onto first-quadrant representatives.

    Scan counts are orbit representatives (one per ``+-`` pair), so they are
    doubled. The four values ``lam, conj lam, -lam, -conj lam`` share one
    representative, which receives the largest of their counts.
    """
    folded: dict[complex, int] = {}
    n_i = 0
    for lam, count in per_lambda_real.items():
        lam = complex(lam)
        if abs(lam.imag) <= tol:
            continue
        if abs(lam.real) <= tol:
            n_i = max(n_i, 2 * count)
            continue
        key = complex(round(abs(lam.real), 12), round(abs(lam.imag), 12))
        folded[key] = max(folded.get(key, 0), 2 * count)
    return CountAudit({k: v for k, v in folded.items()}, n_i=n_i)
