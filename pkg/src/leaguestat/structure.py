"""Attack/defense asymmetry across team-seasons and the promoted-team regression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import LeagueDataset, TeamId
from .variance import VarianceDecomposition


@dataclass(frozen=True)
class TeamSeasonTotals:
    team: TeamId
    season: str
    tier: int
    G_plus: float
    G_minus: float

    @property
    def Delta_G(self) -> float:
        return self.G_plus - self.G_minus

    def elite(self, threshold: float = 150.0) -> bool:
        return self.Delta_G > threshold


def team_season_totals(dataset: LeagueDataset, tier: int | None = 1) -> list[TeamSeasonTotals]:
    out = []
    for season in dataset.seasons:
        for team, view in dataset.team_seasons(season).items():
            t = dataset.tier_of(season, team)
            if tier is not None and t != tier:
                continue
            out.append(
                TeamSeasonTotals(team, season, t, float(view.goals_for.sum()), float(view.goals_against.sum()))
            )
    return out


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and intercept of y on x."""
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0:
        raise ValueError("regressor is constant")
    slope = float(xc @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


@dataclass(frozen=True)
class AttackDefenseSlopes:
    slope_attack: float
    intercept_attack: float
    slope_defense: float
    intercept_defense: float
    n_fitted: int
    # (totals, residual of G+ against attack line, residual of G- against defense line)
    elite: list[tuple[TeamSeasonTotals, float, float]]


def attack_defense_slopes(totals: list[TeamSeasonTotals], elite_threshold: float = 150.0) -> AttackDefenseSlopes:
    """OLS of goals scored and goals conceded on season goal difference.

    Only team-seasons at or below the elite threshold enter the fits; elite
    points are returned with their residuals against both lines.
    """
    regular = [p for p in totals if not p.elite(elite_threshold)]
    if len(regular) < 3:
        raise ValueError(f"need at least 3 non-elite team-seasons, got {len(regular)}")
    dg = np.array([p.Delta_G for p in regular])
    sa, ia = _ols(dg, np.array([p.G_plus for p in regular]))
    sd, id_ = _ols(dg, np.array([p.G_minus for p in regular]))
    elite = [
        (p, p.G_plus - (ia + sa * p.Delta_G), p.G_minus - (id_ + sd * p.Delta_G))
        for p in totals
        if p.elite(elite_threshold)
    ]
    return AttackDefenseSlopes(sa, ia, sd, id_, len(regular), elite)


@dataclass(frozen=True)
class GroupCorrelations:
    n: int
    corr_dg_plus: float
    corr_dg_minus: float
    corr_plus_minus: float
    undersized: bool


def _corr(x, y) -> float:
    if x.std() == 0 or y.std() == 0:
        return math.nan
    return float(np.corrcoef(x, y)[0, 1])


def _group(points) -> GroupCorrelations:
    if len(points) < 3:
        return GroupCorrelations(len(points), math.nan, math.nan, math.nan, True)
    dg = np.array([p.Delta_G for p in points])
    gp = np.array([p.G_plus for p in points])
    gm = np.array([p.G_minus for p in points])
    return GroupCorrelations(len(points), _corr(dg, gp), _corr(dg, gm), _corr(gp, gm), False)


def split_correlations(totals: list[TeamSeasonTotals]) -> dict[str, GroupCorrelations]:
    """Pearson correlations pooled over all seasons, for Delta_G >= 0 and < 0."""
    return {
        "positive": _group([p for p in totals if p.Delta_G >= 0]),
        "negative": _group([p for p in totals if p.Delta_G < 0]),
    }


def variance_ratio_attack_defense(plus: VarianceDecomposition | float, minus: VarianceDecomposition | float) -> float:
    s_plus = plus.sigma2_infinity if isinstance(plus, VarianceDecomposition) else float(plus)
    s_minus = minus.sigma2_infinity if isinstance(minus, VarianceDecomposition) else float(minus)
    if s_minus == 0:
        raise ZeroDivisionError("goals-against persistent variance is zero")
    return s_plus / s_minus


@dataclass(frozen=True)
class PromotionPair:
    team: TeamId
    season_second_tier: str
    season_first_tier: str
    Delta_G_second: float
    Delta_G_first: float


@dataclass(frozen=True)
class PromotionRegression:
    slope: float
    intercept: float
    pairs: list[PromotionPair]


def promotion_pairs(dataset: LeagueDataset) -> list[PromotionPair]:
    """Teams in tier 2 in one season and tier 1 in the next listed season."""
    totals = {(p.season, p.team): p for p in team_season_totals(dataset, tier=None)}
    seasons = dataset.seasons
    pairs = []
    for before, after in zip(seasons, seasons[1:]):
        for (season, team), low in totals.items():
            if season != before or low.tier != 2:
                continue
            high = totals.get((after, team))
            if high is not None and high.tier == 1:
                pairs.append(PromotionPair(team, before, after, low.Delta_G, high.Delta_G))
    return pairs


def promotion_regression(pairs: list[PromotionPair]) -> PromotionRegression:
    if len(pairs) < 2:
        raise ValueError(f"need at least 2 promotion pairs, found {len(pairs)}")
    x = np.array([p.Delta_G_second for p in pairs])
    y = np.array([p.Delta_G_first for p in pairs])
    slope, intercept = _ols(x, y)
    return PromotionRegression(slope, intercept, pairs)


def promotion_analysis(dataset: LeagueDataset) -> PromotionRegression:
    return promotion_regression(promotion_pairs(dataset))
