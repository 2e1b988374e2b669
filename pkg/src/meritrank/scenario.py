"""Counterfactual top-removal engine and rank-shift diagnostics.

Each unit's top scientists are removed from both the score sums and the
staff denominators, then units are re-ranked over the same roster. National
baselines and averages stay frozen at their observed values so every unit is
judged against the same yardstick in both scenarios.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .aggregation import (
    LEVEL_SDS,
    LEVEL_UDA,
    PSTAR_MEAN_OF_UNITS,
    DEFAULT_MIN_STAFF,
    SdsUnitScore,
    national_averages,
    order_units,
    rank_units,
    sds_unit_scores,
    uda_unit_scores,
)
from .corpus import Corpus
from .errors import UndefinedStatisticError, ValidationError
from .indicators import ResearcherScore
from .stats import SpearmanResult, classify_quantiles, gini, round_half_up, spearman

SCOPE_UNIT = "unit"
SCOPE_NATIONAL = "national"

ROUND_HALF_UP = "half-up"
ROUND_FLOOR = "floor"

DEFAULT_SHARE = 0.20
DEFAULT_TRANSITION_CLASSES = 5


@dataclass(frozen=True)
class TopSelection:
    """Top scientists per group: (university, SDS) units or national SDS rosters."""

    scope: str
    share: float
    selected: Mapping

    def all_selected(self) -> frozenset[str]:
        return frozenset(rid for members in self.selected.values() for rid in members)


def _group_quota(share: float, n: int, rounding: str) -> int:
    # share = 0 selects nobody so the hypothetical scenario collapses to the
    # observed one; any positive share selects at least one member.
    if share == 0:
        return 0
    if rounding == ROUND_HALF_UP:
        k = round_half_up(share * n)
    elif rounding == ROUND_FLOOR:
        k = int(math.floor(share * n + 1e-9))
    else:
        raise ValidationError(f"unknown quota rounding {rounding!r}")
    return max(1, k)


def select_top(
    scores: Mapping[str, ResearcherScore],
    scope: str = SCOPE_UNIT,
    share: float = DEFAULT_SHARE,
    min_staff: int = DEFAULT_MIN_STAFF,
    rounding: str = ROUND_HALF_UP,
) -> TopSelection:
    """Select each group's k highest-SS members, k = max(1, round(share * n)).

    Groups below the staff minimum are skipped. Ties on SS break by
    researcher id so the selection is deterministic.
    """
    if not 0 <= share <= 1:
        raise ValidationError(f"selection share must be in [0, 1], got {share}")
    groups: dict = defaultdict(list)
    for score in scores.values():
        if scope == SCOPE_UNIT:
            key = (score.university_id, score.sds)
        elif scope == SCOPE_NATIONAL:
            key = score.sds
        else:
            raise ValidationError(f"unknown selection scope {scope!r}")
        groups[key].append(score)
    selected = {}
    for key, members in groups.items():
        if len(members) < min_staff:
            continue
        k = _group_quota(share, len(members), rounding)
        members.sort(key=lambda s: (-s.ss, s.researcher_id))
        selected[key] = tuple(s.researcher_id for s in members[:k])
    return TopSelection(scope, share, selected)


@dataclass(frozen=True)
class UnitShift:
    university_id: str
    field: str
    observed_rank: int
    hypothetical_rank: int
    delta: int
    gini_observed: float
    emptied: bool

    @property
    def sign(self) -> str:
        return "+" if self.delta > 0 else "-" if self.delta < 0 else "="


@dataclass
class CounterfactualReport:
    field: str
    level: str
    share: float
    units: list[UnitShift]
    spearman_obs_hyp: SpearmanResult | None
    spearman_shift_gini: SpearmanResult | None
    k_classes: int
    observed_classes: dict[str, int] | None
    hypothetical_classes: dict[str, int] | None
    transition: list[list[int]] | None


def _unit_gini(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return gini(values).value


def _safe_spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult | None:
    try:
        return spearman(x, y)
    except UndefinedStatisticError:
        return None


def counterfactual_rankings(
    corpus: Corpus,
    scores: Mapping[str, ResearcherScore],
    selection: TopSelection,
    level: str,
    min_staff: int = DEFAULT_MIN_STAFF,
    k_classes: int = DEFAULT_TRANSITION_CLASSES,
    pstar_mode: str = PSTAR_MEAN_OF_UNITS,
    refit_pstar: bool = False,
) -> dict[str, CounterfactualReport]:
    """Observed vs top-scientists-removed rankings for every field at a level.

    The hypothetical ranking re-ranks exactly the observed roster; a unit
    that loses all staff scores 0 and is flagged. Baselines and national
    averages are frozen at observed values unless refit_pstar is set.
    """
    if selection.scope != SCOPE_UNIT:
        raise ValidationError("counterfactual rankings need a unit-scoped selection")
    if level not in (LEVEL_SDS, LEVEL_UDA):
        raise ValidationError(f"unknown ranking level {level!r}")
    removed = selection.all_selected()

    members: dict[tuple[str, str], list[ResearcherScore]] = defaultdict(list)
    for score in scores.values():
        members[(score.university_id, score.sds)].append(score)

    observed_units = sds_unit_scores(scores)
    surviving: list[SdsUnitScore] = []
    hyp_by_unit: dict[tuple[str, str], tuple[float, int]] = {}
    for unit_key, group in members.items():
        remaining = [s.ss for s in group if s.researcher_id not in removed]
        staff = len(remaining)
        per_capita = sum(remaining) / staff if staff else 0.0
        hyp_by_unit[unit_key] = (per_capita, staff)
        if staff:
            surviving.append(SdsUnitScore(unit_key[0], unit_key[1], per_capita, staff))

    if level == LEVEL_SDS:
        observed_rankings = rank_units(observed_units, LEVEL_SDS, min_staff)
        hyp_scores = dict(hyp_by_unit)
        gini_values = {
            (univ, field): _unit_gini([s.ss for s in group])
            for (univ, field), group in members.items()
        }
    else:
        p_stars = national_averages(observed_units, pstar_mode)
        observed_uda = uda_unit_scores(observed_units, p_stars, corpus.taxonomy)
        observed_rankings = rank_units(observed_uda, LEVEL_UDA, min_staff)
        hyp_pstars = national_averages(surviving, pstar_mode) if refit_pstar else p_stars
        hyp_uda = uda_unit_scores(surviving, hyp_pstars, corpus.taxonomy)
        hyp_scores = {(u.university_id, u.uda): (u.ss_uda, u.staff) for u in hyp_uda}
        area_values: dict[tuple[str, str], list[float]] = defaultdict(list)
        for (univ, sds), group in members.items():
            area_values[(univ, corpus.taxonomy.uda_of(sds))].extend(s.ss for s in group)
        gini_values = {key: _unit_gini(values) for key, values in area_values.items()}

    reports: dict[str, CounterfactualReport] = {}
    for field_code, observed_ranking in sorted(observed_rankings.items()):
        roster = [u.university_id for u in observed_ranking]
        entries = []
        emptied: set[str] = set()
        for univ in roster:
            hyp_score, hyp_staff = hyp_scores.get((univ, field_code), (0.0, 0))
            if hyp_staff == 0:
                emptied.add(univ)
            entries.append((univ, hyp_score, hyp_staff))
        hypothetical_ranking = order_units(entries)
        hyp_rank = {u.university_id: u.rank for u in hypothetical_ranking}

        units = [
            UnitShift(
                university_id=u.university_id,
                field=field_code,
                observed_rank=u.rank,
                hypothetical_rank=hyp_rank[u.university_id],
                delta=u.rank - hyp_rank[u.university_id],
                gini_observed=gini_values.get((u.university_id, field_code), 0.0),
                emptied=u.university_id in emptied,
            )
            for u in observed_ranking
        ]

        obs_ranks = [float(u.observed_rank) for u in units]
        hyp_ranks = [float(u.hypothetical_rank) for u in units]
        deltas = [float(u.delta) for u in units]
        ginis = [u.gini_observed for u in units]

        if len(roster) >= k_classes:
            class_list = classify_quantiles(roster, k_classes)
            observed_classes = {u.university_id: c for u, c in zip(observed_ranking, class_list)}
            hypothetical_classes = {
                u.university_id: c for u, c in zip(hypothetical_ranking, class_list)
            }
            transition = transition_matrix(observed_classes, hypothetical_classes, k_classes)
        else:
            observed_classes = hypothetical_classes = transition = None

        reports[field_code] = CounterfactualReport(
            field=field_code,
            level=level,
            share=selection.share,
            units=units,
            spearman_obs_hyp=_safe_spearman(obs_ranks, hyp_ranks) if len(units) >= 3 else None,
            spearman_shift_gini=_safe_spearman(deltas, ginis) if len(units) >= 3 else None,
            k_classes=k_classes,
            observed_classes=observed_classes,
            hypothetical_classes=hypothetical_classes,
            transition=transition,
        )
    return reports


def transition_matrix(
    observed: Mapping[str, int], hypothetical: Mapping[str, int], k: int
) -> list[list[int]]:
    """Counts of units moving from observed class i to hypothetical class j."""
    if set(observed) != set(hypothetical):
        raise ValidationError("transition matrix needs identical unit sets in both classifications")
    matrix = [[0] * k for _ in range(k)]
    for unit, observed_class in observed.items():
        matrix[observed_class][hypothetical[unit]] += 1
    return matrix


@dataclass(frozen=True)
class ScatterData:
    """Rank-shift vs Gini points with an ordinary-least-squares trend line."""

    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float


def least_squares_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """OLS slope and intercept of y on x; a vertical-free degenerate x gives slope 0."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    sxx = float((dx * dx).sum())
    if sxx == 0.0:
        return 0.0, float(y.mean())
    slope = float((dx * (y - y.mean())).sum() / sxx)
    return slope, float(y.mean() - slope * x.mean())


def shift_gini_scatter(report: CounterfactualReport) -> ScatterData:
    """Per-unit (rank shift, observed Gini) points plus the fitted trend line."""
    if len(report.units) < 5:
        raise UndefinedStatisticError(
            f"scatter needs at least 5 units, field {report.field!r} has {len(report.units)}"
        )
    xs = [float(u.delta) for u in report.units]
    ys = [u.gini_observed for u in report.units]
    slope, intercept = least_squares_line(xs, ys)
    return ScatterData(tuple(zip(xs, ys)), slope, intercept)
