"""Split the variance of t-match averages into a persistent part and a
stochastic part decaying as 1/t, plus the derived ratios.

sigma2(t) = sigma2_inf + A / t is fitted by ordinary least squares of the
observed window-average variance against 1/t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .dataset import LeagueDataset, TeamId
from .descriptive import home_advantage

Quantity = Literal["delta", "plus", "minus"]
QUANTITY_ALIASES = {"delta": "delta", "dg": "delta", "plus": "plus", "g+": "plus", "minus": "minus", "g-": "minus"}

# literature values for German soccer, for the cross-sport transfer only
SOCCER_REFERENCE = {
    "sigma2": {"delta": 0.24, "plus": 0.076, "minus": 0.06},
    "A": {"delta": 3.0, "plus": 1.7, "minus": 1.3},
    "mean_goals": 2.75,
}


@dataclass(frozen=True)
class NeutralizedMatch:
    g_plus: float
    g_minus: float

    @property
    def delta(self) -> float:
        return self.g_plus - self.g_minus


@dataclass(frozen=True)
class NeutralizedSeries:
    team: TeamId
    season: str
    matches: tuple[NeutralizedMatch, ...]

    def values(self, quantity: Quantity) -> np.ndarray:
        q = QUANTITY_ALIASES[quantity]
        if q == "delta":
            return np.array([m.delta for m in self.matches])
        if q == "plus":
            return np.array([m.g_plus for m in self.matches])
        return np.array([m.g_minus for m in self.matches])


def neutralize(dataset: LeagueDataset) -> list[NeutralizedSeries]:
    """Home-advantage-corrected goals for every team-season.

    Half of the season's home advantage is taken from the home side's goals
    and given to the away side's, for and against alike.
    """
    out = []
    for season in dataset.seasons:
        half = home_advantage(dataset.season_matches(season)) / 2.0
        for team, view in dataset.team_seasons(season).items():
            shift = np.where(view.at_home, -half, half)
            matches = tuple(
                NeutralizedMatch(float(gf + s), float(ga - s))
                for gf, ga, s in zip(view.goals_for, view.goals_against, shift)
            )
            out.append(NeutralizedSeries(team, season, matches))
    return out


@dataclass(frozen=True)
class VarianceDecomposition:
    quantity: str
    sigma2_infinity: float
    A: float
    r2: float
    # (t, observed variance of t-match averages, number of windows)
    regression_points: list[tuple[int, float, int]] = field(default_factory=list)
    overlapping: bool = True
    weighted: bool = False

    def predicted(self, t) -> np.ndarray:
        return self.sigma2_infinity + self.A / np.asarray(t, dtype=float)


def _window_means(x: np.ndarray, t: int, overlapping: bool) -> np.ndarray:
    if overlapping:
        c = np.concatenate([[0.0], np.cumsum(x)])
        return (c[t:] - c[:-t]) / t
    n = x.size // t
    return x[: n * t].reshape(n, t).mean(axis=1)


def window_variances(
    series: Iterable[NeutralizedSeries],
    quantity: Quantity,
    t_values: Iterable[int],
    overlapping: bool = True,
) -> list[tuple[int, float, int]]:
    """Variance of t-match means around the global per-match mean, for each t."""
    arrays = [s.values(quantity) for s in series]
    arrays = [a for a in arrays if a.size]
    if not arrays:
        raise ValueError("no matches to decompose")
    mu = float(np.concatenate(arrays).mean())
    shortest = min(a.size for a in arrays)
    points = []
    for t in t_values:
        if t < 1 or t > shortest:
            raise ValueError(f"window length {t} outside 1..{shortest}")
        means = np.concatenate([_window_means(a, t, overlapping) for a in arrays])
        points.append((int(t), float(np.mean((means - mu) ** 2)), int(means.size)))
    return points


def variance_decomposition(
    series: Iterable[NeutralizedSeries],
    quantity: Quantity = "delta",
    t_range: Iterable[int] = range(1, 18),
    overlapping: bool = True,
    weighted: bool = False,
) -> VarianceDecomposition:
    t_values = sorted(set(int(t) for t in t_range))
    if len(t_values) < 2:
        raise ValueError("need at least two distinct window lengths")
    points = window_variances(list(series), quantity, t_values, overlapping)
    x = np.array([1.0 / p[0] for p in points])
    y = np.array([p[1] for p in points])
    w = np.array([p[2] for p in points], dtype=float) if weighted else np.ones_like(x)
    design = np.column_stack([np.ones_like(x), x])
    sw = np.sqrt(w)
    (intercept, slope), *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
    fitted = intercept + slope * x
    ybar = np.average(y, weights=w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    ss_res = float(np.sum(w * (y - fitted) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return VarianceDecomposition(
        quantity=QUANTITY_ALIASES[quantity],
        sigma2_infinity=float(intercept),
        A=float(slope),
        r2=r2,
        regression_points=points,
        overlapping=overlapping,
        weighted=weighted,
    )


def decompose_dataset(dataset: LeagueDataset, quantity: Quantity = "delta", t_max: int | None = None, **kw):
    """Neutralize and decompose in one step; t runs 1..t_max (default half the shortest season)."""
    series = neutralize(dataset)
    if t_max is None:
        t_max = min(dataset.n_match_days(s) for s in dataset.seasons) // 2
    t_max = min(t_max, min(len(s.matches) for s in series))
    return variance_decomposition(series, quantity, range(1, t_max + 1), **kw)


@dataclass(frozen=True)
class StochasticInfluence:
    t: np.ndarray
    share: np.ndarray
    # first t where share / share(t=1) < 1/e
    t_star: int | None
    # first t where the share itself drops below 1/e
    t_star_absolute: int | None


def stochastic_influence_curve(
    decomposition: VarianceDecomposition, t_max: int = 60
) -> StochasticInfluence:
    """Relative weight (A/t) / (sigma2 + A/t) of the stochastic term.

    The crossing time ``t_star`` is the first match count where the share
    has fallen to 1/e of its single-match value.
    """
    t = np.arange(1, t_max + 1, dtype=float)
    s2, A = decomposition.sigma2_infinity, decomposition.A
    share = (A / t) / (s2 + A / t)
    threshold = math.exp(-1.0)

    def first_below(values, level):
        idx = np.nonzero(values < level)[0]
        return int(t[idx[0]]) if idx.size else None

    return StochasticInfluence(
        t=t.astype(int),
        share=share,
        t_star=first_below(share / share[0], threshold),
        t_star_absolute=first_below(share, threshold),
    )


@dataclass(frozen=True)
class TransferComparison:
    goals_ratio: float
    transferred_A: float
    transferred_sigma2: float
    ratio_handball: float
    ratio_soccer_transferred: float


def transfer_comparison(
    handball: VarianceDecomposition | tuple[float, float],
    soccer_constants: tuple[float, float] = (SOCCER_REFERENCE["sigma2"]["delta"], SOCCER_REFERENCE["A"]["delta"]),
    goals_handball: float = 57.19,
    goals_soccer: float = SOCCER_REFERENCE["mean_goals"],
) -> TransferComparison:
    """Rescale the soccer terms to handball goal counts.

    A scales linearly and sigma2 quadratically with the goals-per-match ratio.
    """
    if goals_handball <= 0 or goals_soccer <= 0:
        raise ValueError("mean goal counts must be positive")
    if isinstance(handball, VarianceDecomposition):
        s2_hb, a_hb = handball.sigma2_infinity, handball.A
    else:
        s2_hb, a_hb = handball
    s2_s, a_s = soccer_constants
    ratio = goals_handball / goals_soccer
    t_a = a_s * ratio
    t_s2 = s2_s * ratio**2
    return TransferComparison(
        goals_ratio=ratio,
        transferred_A=t_a,
        transferred_sigma2=t_s2,
        ratio_handball=a_hb / s2_hb,
        ratio_soccer_transferred=t_a / t_s2,
    )


@dataclass(frozen=True)
class BinomialCheck:
    ratio: float
    reference: float = 0.5


def binomial_check(decomposition: VarianceDecomposition | float, mean_goals: float) -> BinomialCheck:
    """A per goal scored; two fair binomial sides give 0.5."""
    A = decomposition.A if isinstance(decomposition, VarianceDecomposition) else float(decomposition)
    if mean_goals <= 0:
        raise ValueError("mean_goals must be positive")
    return BinomialCheck(ratio=A / mean_goals)
