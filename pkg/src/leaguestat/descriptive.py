"""Per-match and per-season descriptive statistics.

All variances use the population convention (divide by N).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .dataset import LeagueDataset, MatchRecord


@dataclass(frozen=True)
class MatchStatistics:
    n_matches: int
    mean_total: float
    mean_home: float
    mean_away: float
    var_total: float
    var_home: float
    var_away: float
    home_advantage: float
    p_home_win: float
    p_away_win: float
    p_draw: float


@dataclass(frozen=True)
class GoalHistogram:
    counts: dict[int, int]
    fitted_mean: float
    fitted_variance: float

    @property
    def n_observations(self) -> int:
        return sum(self.counts.values())

    @property
    def min_observed(self) -> int:
        return min(self.counts)

    @property
    def max_observed(self) -> int:
        return max(self.counts)


@dataclass(frozen=True)
class ExtremeMatches:
    max_total: int
    max_total_matches: tuple[MatchRecord, ...]
    min_total: int
    min_total_matches: tuple[MatchRecord, ...]
    max_abs_diff: int
    max_abs_diff_matches: tuple[MatchRecord, ...]


def _goals(matches) -> tuple[np.ndarray, np.ndarray]:
    home = np.fromiter((m.goals_home for m in matches), dtype=float)
    away = np.fromiter((m.goals_away for m in matches), dtype=float)
    return home, away


def _selected(dataset: LeagueDataset, seasons: Iterable[str] | None):
    if seasons is None:
        return dataset.matches
    wanted = set(seasons)
    return tuple(m for m in dataset if m.season in wanted)


def home_advantage(matches) -> float:
    """Mean home goals minus mean away goals."""
    home, away = _goals(matches)
    if home.size == 0:
        raise ValueError("empty selection")
    return float(home.mean() - away.mean())


def match_statistics(dataset: LeagueDataset, seasons: Iterable[str] | None = None) -> MatchStatistics:
    matches = _selected(dataset, seasons)
    if not matches:
        raise ValueError("empty selection")
    home, away = _goals(matches)
    total = home + away
    n = len(matches)
    mean_home = float(home.mean())
    mean_away = float(away.mean())
    return MatchStatistics(
        n_matches=n,
        mean_total=mean_home + mean_away,
        mean_home=mean_home,
        mean_away=mean_away,
        var_total=float(total.var()),
        var_home=float(home.var()),
        var_away=float(away.var()),
        home_advantage=mean_home - mean_away,
        p_home_win=float(np.count_nonzero(home > away)) / n,
        p_away_win=float(np.count_nonzero(home < away)) / n,
        p_draw=float(np.count_nonzero(home == away)) / n,
    )


def goal_histogram(
    dataset: LeagueDataset, side: Literal["home", "away", "pooled"] = "pooled"
) -> GoalHistogram:
    """Goal-count frequencies with a Gaussian moment fit.

    ``pooled`` counts every match twice, once per side.
    """
    home, away = _goals(dataset.matches)
    if side == "home":
        obs = home
    elif side == "away":
        obs = away
    elif side == "pooled":
        obs = np.concatenate([home, away])
    else:
        raise ValueError(f"unknown side {side!r}")
    if obs.size == 0:
        raise ValueError("empty selection")
    counts = Counter(int(x) for x in obs)
    return GoalHistogram(
        counts=dict(sorted(counts.items())),
        fitted_mean=float(obs.mean()),
        fitted_variance=float(obs.var()),
    )


def team_season_goal_differences(dataset: LeagueDataset, season: str) -> dict:
    """Season goal difference, goals scored and goals conceded per team."""
    return {
        team: (float(v.diffs.sum()), float(v.goals_for.sum()), float(v.goals_against.sum()))
        for team, v in dataset.team_seasons(season).items()
    }


def _positive_share(dataset: LeagueDataset, season: str) -> tuple:
    table = team_season_goal_differences(dataset, season)
    positive = [v for v in table.values() if v[0] > 0]
    scored_positive = sum(v[1] for v in positive)
    scored_all = sum(v[1] for v in table.values())
    return len(positive) / len(table), scored_positive / scored_all, len(table), len(positive), scored_positive, scored_all


SeriesQuantity = Literal["total-goals", "home-advantage", "positive-gd-share", "positive-gd-goal-share"]


def per_season_series(dataset: LeagueDataset, quantity: SeriesQuantity) -> list[tuple[str, float]]:
    """One value per season, in season order.

    ``positive-gd-share`` is the fraction of teams finishing with a positive
    goal difference; ``positive-gd-goal-share`` is the fraction of all goals
    scored by those teams.
    """
    out = []
    for season in dataset.seasons:
        matches = dataset.season_matches(season)
        if quantity == "total-goals":
            home, away = _goals(matches)
            value = float((home + away).mean())
        elif quantity == "home-advantage":
            value = home_advantage(matches)
        elif quantity == "positive-gd-share":
            value = _positive_share(dataset, season)[0]
        elif quantity == "positive-gd-goal-share":
            value = _positive_share(dataset, season)[1]
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
        out.append((season, value))
    return out


def home_advantage_standard_error(matches) -> float:
    home, away = _goals(matches)
    diff = home - away
    return float(diff.std() / np.sqrt(diff.size))


def positive_goal_difference_shares(dataset: LeagueDataset) -> dict[str, float]:
    """Share of teams with positive season goal difference and their share of goals.

    Reported both as the mean of per-season values and pooled over all
    team-seasons, since the two aggregations differ slightly.
    """
    per = [_positive_share(dataset, s) for s in dataset.seasons]
    return {
        "team_share_season_mean": float(np.mean([p[0] for p in per])),
        "goal_share_season_mean": float(np.mean([p[1] for p in per])),
        "team_share_pooled": sum(p[3] for p in per) / sum(p[2] for p in per),
        "goal_share_pooled": sum(p[4] for p in per) / sum(p[5] for p in per),
    }


def extreme_matches(dataset: LeagueDataset) -> ExtremeMatches:
    matches = dataset.matches
    max_total = max(m.total for m in matches)
    min_total = min(m.total for m in matches)
    max_diff = max(abs(m.diff) for m in matches)
    return ExtremeMatches(
        max_total=max_total,
        max_total_matches=tuple(m for m in matches if m.total == max_total),
        min_total=min_total,
        min_total_matches=tuple(m for m in matches if m.total == min_total),
        max_abs_diff=max_diff,
        max_abs_diff_matches=tuple(m for m in matches if abs(m.diff) == max_diff),
    )
