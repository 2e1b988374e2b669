"""Class-weighted funding simulation and the national top-scientist census.

Funding classes follow the four-tier scheme with a fixed per-capita ratio
between adjacent funded classes and nothing for the bottom class. Amounts
are computed in exact rational arithmetic so conservation and the adjacent
ratios hold without rounding slack.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .aggregation import DEFAULT_MIN_STAFF, RankedUnit
from .corpus import Taxonomy
from .errors import AllocationError, ValidationError
from .indicators import ResearcherScore
from .scenario import SCOPE_NATIONAL, TopSelection, select_top
from .stats import classify_quantiles


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class FundingPolicy:
    n_classes: int = 4
    adjacent_ratio: Fraction = Fraction(3)
    bottom_class_funded: bool = False
    budget: Fraction = Fraction(1_000_000)

    def __post_init__(self):
        object.__setattr__(self, "adjacent_ratio", _as_fraction(self.adjacent_ratio))
        object.__setattr__(self, "budget", _as_fraction(self.budget))
        if self.n_classes < 2:
            raise ValidationError("funding needs at least 2 classes")
        if self.adjacent_ratio <= 1:
            raise ValidationError("adjacent class ratio must exceed 1")
        if self.budget <= 0:
            raise ValidationError("budget must be positive")

    def class_weights(self) -> tuple[Fraction, ...]:
        """Per-capita weight of each class, best first: (r^2, r, 1, 0) by default."""
        funded = self.n_classes - (0 if self.bottom_class_funded else 1)
        weights = [self.adjacent_ratio ** (funded - 1 - i) for i in range(funded)]
        if not self.bottom_class_funded:
            weights.append(Fraction(0))
        return tuple(weights)


@dataclass(frozen=True)
class UnitAllocation:
    university_id: str
    class_index: int
    staff: int
    amount: Fraction
    per_capita: Fraction


@dataclass(frozen=True)
class FundingAllocation:
    uda: str | None
    policy: FundingPolicy
    units: tuple[UnitAllocation, ...]

    @property
    def total(self) -> Fraction:
        return sum((u.amount for u in self.units), Fraction(0))

    def class_of(self) -> dict[str, int]:
        return {u.university_id: u.class_index for u in self.units}


def allocate(
    ranked_units: Sequence[RankedUnit],
    policy: FundingPolicy,
    uda: str | None = None,
) -> FundingAllocation:
    """Split the budget across a ranked roster, staff-proportional within class.

    amount_u = budget * staff_u * weight(class_u) / sum_v staff_v * weight(class_v),
    which conserves the budget exactly and keeps the per-capita ratio between
    adjacent funded classes equal to the policy ratio.
    """
    classes = classify_quantiles(ranked_units, policy.n_classes)
    weights = policy.class_weights()
    denominator = sum(
        (unit.staff * weights[c] for unit, c in zip(ranked_units, classes)), Fraction(0)
    )
    if denominator == 0:
        raise AllocationError("all weighted staff are zero; nothing to allocate")
    units = []
    for unit, class_index in zip(ranked_units, classes):
        amount = policy.budget * unit.staff * weights[class_index] / denominator
        per_capita = amount / unit.staff if unit.staff else Fraction(0)
        units.append(
            UnitAllocation(unit.university_id, class_index, unit.staff, amount, per_capita)
        )
    return FundingAllocation(uda, policy, tuple(units))


@dataclass(frozen=True)
class UniversityCensus:
    university_id: str
    class_index: int | None
    staff: int
    top_count: int
    incidence: float


@dataclass
class TopCensus:
    """Where the nation's top scientists sit relative to the funding classes."""

    uda: str
    share: float
    n_classes: int
    universities: list[UniversityCensus]
    class_totals: list[int]
    total_tops: int
    stranded_count: int
    stranded_share: float
    unclassified_tops: int


def national_top_census(
    scores: Mapping[str, ResearcherScore],
    taxonomy: Taxonomy,
    uda: str,
    classes: Mapping[str, int],
    n_classes: int = 4,
    share: float = 0.20,
    min_staff: int = DEFAULT_MIN_STAFF,
    selection: TopSelection | None = None,
) -> TopCensus:
    """Count top national scientists per university and per funding class.

    Top status is per-SDS and national (independent of employer); classes
    come from the UDA-level funding classification. Tops employed outside the
    ranked roster are reported separately so the per-class totals always
    partition the classified total. Stranded means sitting in the bottom class.
    """
    if selection is None:
        selection = select_top(scores, SCOPE_NATIONAL, share, min_staff)
    elif selection.scope != SCOPE_NATIONAL:
        raise ValidationError("the census needs a nationally scoped selection")
    top_ids = selection.all_selected()

    staff_by_univ: dict[str, int] = defaultdict(int)
    tops_by_univ: dict[str, int] = defaultdict(int)
    for score in scores.values():
        if taxonomy.uda_of(score.sds) != uda:
            continue
        staff_by_univ[score.university_id] += 1
        if score.researcher_id in top_ids:
            tops_by_univ[score.university_id] += 1

    universities = []
    class_totals = [0] * n_classes
    unclassified = 0
    for univ in sorted(staff_by_univ):
        staff = staff_by_univ[univ]
        tops = tops_by_univ.get(univ, 0)
        class_index = classes.get(univ)
        if class_index is None:
            unclassified += tops
        else:
            class_totals[class_index] += tops
        universities.append(
            UniversityCensus(univ, class_index, staff, tops, tops / staff if staff else 0.0)
        )
    total = sum(class_totals)
    stranded = class_totals[-1]
    return TopCensus(
        uda=uda,
        share=selection.share,
        n_classes=n_classes,
        universities=universities,
        class_totals=class_totals,
        total_tops=total,
        stranded_count=stranded,
        stranded_share=stranded / total if total else 0.0,
        unclassified_tops=unclassified,
    )


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    details: dict

KIND_CLASS_INVERSION = "class_funding_inversion"
KIND_STRANDED_INCIDENCE = "stranded_high_incidence"


def paradox_report(census: TopCensus, allocation: FundingAllocation) -> list[Finding]:
    """Flag cases where the class-based scheme contradicts individual merit.

    (a) a better-funded class hosting fewer top scientists than a worse one;
    (b) an unfunded university whose top-scientist incidence beats the
    staff-weighted incidence of the first class.
    """
    weights = allocation.policy.class_weights()
    if len(weights) != census.n_classes:
        raise ValidationError("census and allocation use different class counts")
    findings: list[Finding] = []
    totals = census.class_totals
    for i, j in combinations(range(census.n_classes), 2):
        if weights[i] > weights[j] and totals[i] < totals[j]:
            findings.append(
                Finding(
                    KIND_CLASS_INVERSION,
                    f"class {i + 1} is funded at {weights[i]}x per capita but hosts "
                    f"{totals[i]} top scientists; class {j + 1} at {weights[j]}x hosts {totals[j]}",
                    {
                        "better_class": i + 1,
                        "worse_class": j + 1,
                        "better_class_tops": totals[i],
                        "worse_class_tops": totals[j],
                    },
                )
            )
    first_class = [u for u in census.universities if u.class_index == 0]
    first_staff = sum(u.staff for u in first_class)
    if first_staff:
        benchmark = sum(u.top_count for u in first_class) / first_staff
        unfunded = {c for c, w in enumerate(weights) if w == 0}
        for unit in census.universities:
            if unit.class_index in unfunded and unit.top_count and unit.incidence > benchmark:
                findings.append(
                    Finding(
                        KIND_STRANDED_INCIDENCE,
                        f"unfunded university {unit.university_id} has top-scientist "
                        f"incidence {unit.incidence:.1%}, above the first-class average "
                        f"{benchmark:.1%}",
                        {
                            "university_id": unit.university_id,
                            "incidence": unit.incidence,
                            "first_class_incidence": benchmark,
                            "top_count": unit.top_count,
                            "staff": unit.staff,
                        },
                    )
                )
    return findings
