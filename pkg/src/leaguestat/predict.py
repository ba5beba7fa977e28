"""Rolling match-outcome prediction from running average goal differences."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dataset import LeagueDataset, TeamId, season_sort_key

log = logging.getLogger(__name__)

Outcome = Literal["home", "away", "draw"]


@dataclass(frozen=True)
class HomeAdvantageStrategy:
    """``season``: season-to-date mean home minus away goals over earlier days;
    ``prior``: full previous season; ``constant``: a fixed value."""

    kind: Literal["season", "prior", "constant"] = "season"
    value: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "HomeAdvantageStrategy":
        if text in ("season", "prior"):
            return cls(text)
        if text.startswith("constant:"):
            return cls("constant", float(text.split(":", 1)[1]))
        raise ValueError(f"unknown home-advantage strategy {text!r}")

    def __str__(self):
        return f"constant:{self.value}" if self.kind == "constant" else self.kind


@dataclass(frozen=True)
class Prediction:
    season: str
    match_day: int
    home: TeamId
    away: TeamId
    predicted_diff: float
    predicted_winner: Outcome
    actual_diff: int
    home_advantage: float

    @property
    def actual_winner(self) -> Outcome:
        return outcome(self.actual_diff, 0.0)

    @property
    def correct_winner(self) -> bool:
        return self.predicted_winner == self.actual_winner


def outcome(diff: float, draw_band: float) -> Outcome:
    """Winner call for a home-perspective goal difference.

    |diff| < draw_band is a draw; with draw_band = 0 only an exact zero is.
    """
    if draw_band > 0 and abs(diff) < draw_band:
        return "draw"
    if diff > 0:
        return "home"
    if diff < 0:
        return "away"
    return "draw"


def _home_advantage(dataset, season, t, strategy):
    if strategy.kind == "constant":
        return strategy.value
    if strategy.kind == "season":
        earlier = [m.diff for m in dataset.season_matches(season) if m.match_day < t]
        if not earlier:
            log.warning("no matches before day %d of %s; home advantage taken as 0", t, season)
            return 0.0
        return float(np.mean(earlier))
    idx = dataset.seasons.index(season)
    if idx == 0:
        log.warning("no season before %s; using season-to-date home advantage", season)
        return _home_advantage(dataset, season, t, HomeAdvantageStrategy("season"))
    previous = dataset.season_matches(dataset.seasons[idx - 1])
    return float(np.mean([m.diff for m in previous]))


def predict_matchday(
    dataset: LeagueDataset,
    season: str,
    t: int,
    home_adv: HomeAdvantageStrategy = HomeAdvantageStrategy(),
    draw_band: float = 0.5,
) -> list[Prediction]:
    """Predict every fixture of match day ``t`` from days 1..t-1 only.

    The predicted home-perspective difference is the home team's running
    mean goal difference minus the away team's, plus the home advantage.
    """
    if t < 2:
        raise ValueError("no history before match day 2")
    fixtures = dataset.match_day(season, t)
    if not fixtures:
        raise ValueError(f"no fixtures on match day {t} of season {season!r}")
    running = {}
    for team, view in dataset.team_seasons(season).items():
        prior = view.diffs[view.days < t]
        if prior.size:
            running[team] = float(prior.mean())
    ha = _home_advantage(dataset, season, t, home_adv)
    out = []
    for m in fixtures:
        if m.home not in running or m.away not in running:
            log.warning("skipping %s vs %s on day %d: no prior matches", m.home, m.away, t)
            continue
        pred = running[m.home] - running[m.away] + ha
        out.append(
            Prediction(
                season=season,
                match_day=t,
                home=m.home,
                away=m.away,
                predicted_diff=pred,
                predicted_winner=outcome(pred, draw_band),
                actual_diff=m.diff,
                home_advantage=ha,
            )
        )
    return out


@dataclass(frozen=True)
class MatchdayScore:
    t: int
    error_variance: float
    accuracy: float
    n: int


@dataclass(frozen=True)
class PredictionEvaluation:
    per_matchday: list[MatchdayScore]
    overall_accuracy: float
    n_predictions: int
    predictions: list[Prediction]


def evaluate_predictions(
    dataset: LeagueDataset,
    home_adv: HomeAdvantageStrategy = HomeAdvantageStrategy(),
    draw_band: float = 0.5,
) -> PredictionEvaluation:
    """Predict days 2..T of every season and score them per match day.

    Error variance is the mean squared difference between predicted and
    actual goal difference, pooled over seasons for each match day.
    """
    by_day = defaultdict(list)
    everything = []
    for season in sorted(dataset.seasons, key=season_sort_key):
        for t in range(2, dataset.n_match_days(season) + 1):
            if not dataset.match_day(season, t):
                continue
            preds = predict_matchday(dataset, season, t, home_adv, draw_band)
            by_day[t].extend(preds)
            everything.extend(preds)
    if not everything:
        raise ValueError("nothing to predict")
    scores = []
    for t in sorted(by_day):
        preds = by_day[t]
        if not preds:
            continue
        err = np.array([p.predicted_diff - p.actual_diff for p in preds])
        scores.append(
            MatchdayScore(
                t=t,
                error_variance=float(np.mean(err**2)),
                accuracy=float(np.mean([p.correct_winner for p in preds])),
                n=len(preds),
            )
        )
    overall = float(np.mean([p.correct_winner for p in everything]))
    return PredictionEvaluation(scores, overall, len(everything), everything)
