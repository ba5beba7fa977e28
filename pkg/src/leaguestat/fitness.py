"""Team fitness persistence: half-season correlation, match-day
autocorrelation with an exponential decay fit, and season-to-season
autocorrelation of half-season goal differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import LeagueDataset, TeamId, half_season_split
from .descriptive import home_advantage


class FitError(RuntimeError):
    def __init__(self, message: str, best_rss: float):
        self.best_rss = best_rss
        super().__init__(f"{message} (best residual sum of squares {best_rss:.6g})")


@dataclass(frozen=True)
class FitnessSeries:
    team: TeamId
    season: str
    match_days: np.ndarray
    per_match_diff: np.ndarray
    half_sums: tuple[float, float]

    @property
    def season_sum(self) -> float:
        return float(self.per_match_diff.sum())

    @property
    def matches_played(self) -> int:
        return int(self.per_match_diff.size)


def fitness_series(
    dataset: LeagueDataset, season: str, split: int | None = None
) -> dict[TeamId, FitnessSeries]:
    first, _ = half_season_split(dataset, season, split)
    out = {}
    for team, view in dataset.team_seasons(season).items():
        diffs = view.diffs
        in_first = view.days <= first[-1]
        out[team] = FitnessSeries(
            team=team,
            season=season,
            match_days=view.days,
            per_match_diff=diffs,
            half_sums=(float(diffs[in_first].sum()), float(diffs[~in_first].sum())),
        )
    return out


@dataclass(frozen=True)
class HalfSeasonCorrelation:
    r: float
    r2: float
    # (team, season, first-half sum, second-half sum)
    pairs: list[tuple[TeamId, str, float, float]]


def _splittable_seasons(dataset: LeagueDataset) -> list[str]:
    return [s for s in dataset.seasons if dataset.n_match_days(s) % 2 == 0]


def half_season_correlation(dataset: LeagueDataset) -> HalfSeasonCorrelation:
    """Pearson correlation of first- vs second-half goal difference, pooled
    over every team-season of seasons with an even number of match days."""
    pairs = []
    for season in _splittable_seasons(dataset):
        for team, fs in fitness_series(dataset, season).items():
            pairs.append((team, season, *fs.half_sums))
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 team-seasons, got {len(pairs)}")
    x = np.array([p[2] for p in pairs])
    y = np.array([p[3] for p in pairs])
    if x.std() == 0 or y.std() == 0:
        raise ValueError("half-season goal differences have zero variance")
    r = float(np.corrcoef(x, y)[0, 1])
    return HalfSeasonCorrelation(r=r, r2=r * r, pairs=pairs)


@dataclass(frozen=True)
class AutocorrelationCurve:
    lags: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    stderr: np.ndarray
    half_season_lag: int | None = None

    def mean_level(self, exclude_half_season: bool = False) -> tuple[float, float]:
        """Average of h over lags and its standard error.

        Lags without data are skipped. ``exclude_half_season`` drops the
        same-opponent lag from the average.
        """
        keep = self.counts > 0
        if exclude_half_season and self.half_season_lag is not None:
            keep &= self.lags != self.half_season_lag
        vals = self.values[keep]
        if vals.size == 0:
            return math.nan, math.nan
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.nan
        return float(vals.mean()), se

    def restrict(self, max_lag: int) -> "AutocorrelationCurve":
        keep = self.lags <= max_lag
        return AutocorrelationCurve(
            self.lags[keep], self.values[keep], self.counts[keep], self.stderr[keep], self.half_season_lag
        )


def autocorrelation_from_series(series: list[np.ndarray], max_lag: int) -> AutocorrelationCurve:
    """h(lag) = mean over series and start points of x[t0] * x[t0 + lag].

    Each array is indexed by match day; NaN marks an unplayed day and any
    product touching one is skipped.
    """
    lags = np.arange(1, max_lag + 1)
    sums = np.zeros(max_lag)
    sq = np.zeros(max_lag)
    counts = np.zeros(max_lag, dtype=int)
    for x in series:
        for k, lag in enumerate(lags):
            if lag >= x.size:
                break
            prod = x[:-lag] * x[lag:]
            prod = prod[~np.isnan(prod)]
            sums[k] += prod.sum()
            sq[k] += np.square(prod).sum()
            counts[k] += prod.size
    with np.errstate(invalid="ignore", divide="ignore"):
        values = sums / counts
        var = sq / counts - values**2
        stderr = np.sqrt(np.maximum(var, 0.0) / counts)
    return AutocorrelationCurve(lags, values, counts, stderr)


def _day_indexed(view, n_days: int, offset: float = 0.0) -> np.ndarray:
    x = np.full(n_days, np.nan)
    diffs = view.diffs - np.where(view.at_home, offset, -offset)
    x[view.days - 1] = diffs
    return x


def matchday_autocorrelation(
    dataset: LeagueDataset, neutralize: bool = False, max_lag: int | None = None
) -> AutocorrelationCurve:
    """Match-day autocorrelation of each team's per-match goal difference.

    With ``neutralize`` the seasonal home advantage is taken off home results
    and added to away results before multiplying.
    """
    longest = max(dataset.n_match_days(s) for s in dataset.seasons)
    if longest < 2:
        raise ValueError("seasons too short for any lag")
    if max_lag is None:
        max_lag = longest - 1
    if not 1 <= max_lag <= longest - 1:
        raise ValueError(f"max_lag {max_lag} outside 1..{longest - 1}")
    series = []
    half_lags = set()
    for season in dataset.seasons:
        n_days = dataset.n_match_days(season)
        half_lags.add(n_days // 2)
        offset = home_advantage(dataset.season_matches(season)) if neutralize else 0.0
        series.extend(_day_indexed(v, n_days, offset) for v in dataset.team_seasons(season).values())
    curve = autocorrelation_from_series(series, max_lag)
    half = half_lags.pop() if len(half_lags) == 1 else None
    return AutocorrelationCurve(curve.lags, curve.values, curve.counts, curve.stderr, half)


@dataclass(frozen=True)
class ExponentialFit:
    """h(lag) = c1 + c2 * exp(-lag / tau).

    ``tau`` is NaN when the decay is not identifiable (no significant
    amplitude or a singular parameter covariance).
    """

    c1: float
    c2: float
    tau: float
    covariance: np.ndarray
    fit_range: tuple[int, int]
    residuals: np.ndarray
    rss: float
    identifiable: bool = True
    grid_tau: float = field(default=math.nan, repr=False)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.abs(np.diag(self.covariance)))

    def predict(self, lags) -> np.ndarray:
        return self.c1 + self.c2 * np.exp(-np.asarray(lags, dtype=float) / self.tau)


def _linear_at(tau: float, x: np.ndarray, y: np.ndarray):
    basis = np.column_stack([np.ones_like(x), np.exp(-x / tau)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    return coef, float(resid @ resid)


def _jacobian(theta, x):
    c1, c2, tau = theta
    e = np.exp(-x / tau)
    return np.column_stack([np.ones_like(x), e, c2 * e * x / tau**2])


def _model(theta, x):
    return theta[0] + theta[1] * np.exp(-x / theta[2])


def fit_exponential(
    curve: AutocorrelationCurve,
    max_lag: int = 14,
    grid_points: int = 200,
    max_iter: int = 200,
) -> ExponentialFit:
    """Least-squares fit of c1 + c2 exp(-lag/tau) on lags 1..max_lag.

    A grid over tau in [0.5, max_lag] with c1, c2 solved linearly gives the
    start point; damped Gauss-Newton then refines all three parameters with
    tau kept inside the grid interval. Covariance is the residual variance
    times (J^T J)^-1 at the optimum. An optimum on the tau boundary, a
    singular covariance or an amplitude within 2 standard errors of zero
    marks the decay as unidentifiable.
    """
    keep = (curve.lags >= 1) & (curve.lags <= max_lag) & (curve.counts > 0)
    x = curve.lags[keep].astype(float)
    y = curve.values[keep].astype(float)
    if x.size < 4:
        raise ValueError(f"need at least 4 lags in 1..{max_lag}, got {x.size}")

    tau_lo, tau_hi = 0.5, float(max_lag)
    best = None
    for tau in np.linspace(tau_lo, tau_hi, grid_points):
        coef, rss = _linear_at(tau, x, y)
        if best is None or rss < best[1]:
            best = (np.array([coef[0], coef[1], tau]), rss)
    theta, rss = best
    grid_tau = float(theta[2])
    scale = max(float(y @ y), 1e-300)

    lam = 1e-3
    for _ in range(max_iter):
        if rss <= 1e-30 * scale:
            break
        J = _jacobian(theta, x)
        r = y - _model(theta, x)
        JtJ = J.T @ J
        g = J.T @ r
        improved = converged = False
        while lam < 1e12:
            A = JtJ + lam * np.diag(np.maximum(np.diag(JtJ), 1e-12))
            try:
                step = np.linalg.solve(A, g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = theta + step
            trial[2] = min(max(trial[2], tau_lo), tau_hi)
            if np.all(np.isfinite(trial)):
                tr = y - _model(trial, x)
                trial_rss = float(tr @ tr)
                if trial_rss < rss:
                    converged = abs(rss - trial_rss) <= 1e-15 * scale or np.all(
                        np.abs(step) <= 1e-12 * (np.abs(theta) + 1e-12)
                    )
                    theta, rss = trial, trial_rss
                    lam = max(lam / 10, 1e-12)
                    improved = True
                    break
            lam *= 10
        if not improved or converged:
            break
    if not np.all(np.isfinite(theta)) or not math.isfinite(rss):
        raise FitError("exponential fit diverged", best[1])

    J = _jacobian(theta, x)
    resid = y - _model(theta, x)
    dof = x.size - 3
    s2 = rss / dof if dof > 0 else math.nan
    JtJ = J.T @ J
    cond = np.linalg.cond(JtJ)
    if not math.isfinite(cond) or cond > 1e14:
        cov = np.full((3, 3), math.inf)
        identifiable = False
    else:
        cov = s2 * np.linalg.inv(JtJ)
        se_c2 = math.sqrt(abs(cov[1, 1]))
        amp_floor = 1e-9 * (abs(theta[0]) + 1.0)
        on_edge = min(theta[2] - tau_lo, tau_hi - theta[2]) <= 1e-9 * tau_hi
        identifiable = not on_edge and abs(theta[1]) > max(2.0 * se_c2, amp_floor)
    tau = float(theta[2]) if identifiable else math.nan
    return ExponentialFit(
        c1=float(theta[0]),
        c2=float(theta[1]),
        tau=tau,
        covariance=cov,
        fit_range=(int(x.min()), int(x.max())),
        residuals=resid,
        rss=float(rss),
        identifiable=identifiable,
        grid_tau=grid_tau,
    )


@dataclass(frozen=True)
class SeasonalAutocorrelation:
    lags: np.ndarray
    values: np.ndarray
    pair_counts: np.ndarray
    normalization: float


def seasonal_autocorrelation(dataset: LeagueDataset) -> SeasonalAutocorrelation:
    """Correlation of half-season goal-difference sums across seasons.

    For a season gap of zero only the first-half x second-half product of the
    same season is used, which is also the normalization. For larger gaps
    all four half combinations of the two seasons are averaged; only teams
    present in both seasons contribute.
    """
    seasons = _splittable_seasons(dataset)
    if len(seasons) < 2:
        raise ValueError("need at least two seasons with an even number of match days")
    halves = []
    for season in seasons:
        halves.append({t: fs.half_sums for t, fs in fitness_series(dataset, season).items()})

    same = [a * b for table in halves for a, b in table.values()]
    norm = float(np.mean(same))
    if norm == 0:
        raise ValueError("zero first/second-half product; normalization undefined")

    n = len(seasons)
    values = [1.0]
    counts = [len(same)]
    for gap in range(1, n):
        products = []
        for n0 in range(n - gap):
            a, b = halves[n0], halves[n0 + gap]
            for team in a.keys() & b.keys():
                products.extend(x * y for x in a[team] for y in b[team])
        counts.append(len(products))
        values.append(float(np.mean(products)) / norm if products else math.nan)
    if sum(counts[1:]) == 0:
        raise ValueError("no team persists across any pair of seasons")
    return SeasonalAutocorrelation(
        lags=np.arange(n), values=np.array(values), pair_counts=np.array(counts), normalization=norm
    )
