import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset
from leaguestat import SimulationConfig, schedule_round_robin, simulate_league
from leaguestat.fitness import (
    AutocorrelationCurve,
    fit_exponential,
    fitness_series,
    half_season_correlation,
    matchday_autocorrelation,
    seasonal_autocorrelation,
)


def _curve(values, lags=None):
    lags = np.arange(1, len(values) + 1) if lags is None else np.asarray(lags)
    values = np.asarray(values, dtype=float)
    return AutocorrelationCurve(lags, values, np.ones(lags.size, dtype=int), np.zeros(lags.size))


def _model(c1, c2, tau, lags):
    return c1 + c2 * np.exp(-np.asarray(lags, dtype=float) / tau)


def _margin_league(margins, n_seasons=1):
    """Deterministic league: each match ends with the margin difference."""
    names = list(margins)
    rows = []
    for s in range(n_seasons):
        for d, day in enumerate(schedule_round_robin(len(names)), start=1):
            for h, a in day:
                diff = margins[names[h]] - margins[names[a]]
                rows.append((s + 1, d, names[h], names[a], 30 + diff, 30))
    return make_dataset(rows)


def test_series_direct():
    ds = make_dataset([(1, 1, "A", "B", 30, 25), (1, 2, "B", "A", 28, 20)])
    fs = fitness_series(ds, "1")
    a = fs[next(t for t in fs if t.key == "a")]
    assert list(a.per_match_diff) == [5, -8]
    assert a.season_sum == -3 and a.half_sums == (5.0, -8.0)
    assert a.matches_played == 2
    with pytest.raises(KeyError):
        fitness_series(ds, "7")


def test_series_conservation(handball_scale_league):
    ds, _ = handball_scale_league
    for season in ds.seasons:
        fs = fitness_series(ds, season)
        assert sum(f.season_sum for f in fs.values()) == 0
        for f in fs.values():
            assert sum(f.half_sums) == f.season_sum
        # every match day sums to zero across teams
        for day in range(1, 35):
            per_team = [f.per_match_diff[f.match_days == day].sum() for f in fs.values()]
            assert sum(per_team) == 0


def test_series_fitness_ground_truth():
    cfg = SimulationConfig(n_teams=18, n_seasons=1, fitness_sd=4.0, seed=30)
    ds, truth = simulate_league(cfg)
    fs = fitness_series(ds, "1")
    fit = truth.fitness["1"]
    p = 0.5
    for team, f in fs.items():
        # expected season sum: 34 * (own strength - mean opponent strength)
        others = [v for k, v in fit.items() if k != team.name]
        expected = 34 * (fit[team.name] - np.mean(others) * 1.0)
        # per match diff variance 2 * n_a * p(1-p) from two independent binomials
        sigma = math.sqrt(34 * 2 * 55 * p * (1 - p))
        assert abs(f.season_sum - expected) < 3 * sigma + 1e-9


def test_half_season_identical_halves():
    ds = _margin_league({"A": 3, "B": 1, "C": -1, "D": -3})
    assert half_season_correlation(ds).r2 == pytest.approx(1.0)


def test_half_season_independent_teams():
    ds, _ = simulate_league(SimulationConfig(n_seasons=8, seed=13))
    res = half_season_correlation(ds)
    assert len(res.pairs) >= 100
    assert res.r2 < 0.1


def test_half_season_too_few():
    ds = make_dataset([(1, 1, "A", "B", 30, 25), (1, 2, "B", "A", 28, 20)])
    with pytest.raises(ValueError):
        half_season_correlation(ds)


def test_h_matches_direct_products():
    margins = {"A": 4, "B": 2, "C": 0, "D": -1, "E": -2, "F": -3}
    ds = _margin_league(margins)
    curve = matchday_autocorrelation(ds)
    # a team's match difference depends on the opponent, so build the oracle from products directly
    series = {}
    for m in ds:
        series.setdefault(m.home, {})[m.match_day] = m.diff
        series.setdefault(m.away, {})[m.match_day] = -m.diff
    for lag, value in zip(curve.lags, curve.values):
        prods = [s[d] * s[d + lag] for s in series.values() for d in s if d + lag in s]
        assert value == pytest.approx(np.mean(prods))


def test_fixed_margin_every_match():
    # A wins every match by 5, so each team's margin is fixed: h = <m^2> at every lag
    margins = {"A": 5, "B": -5}
    rows = [(1, d, "A", "B", 35, 30) if d % 2 else (1, d, "B", "A", 30, 35) for d in range(1, 3)]
    curve = matchday_autocorrelation(make_dataset(rows))
    assert curve.values.tolist() == [np.mean([m**2 for m in margins.values()])]


def test_relabel_invariance(small_league):
    rename = {t.key: f"X{i}" for i, t in enumerate(reversed(small_league.teams("1")))}
    rows = [
        (m.season, m.match_day, rename[m.home.key], rename[m.away.key], m.goals_home, m.goals_away)
        for m in small_league
    ]
    relabeled = make_dataset(rows)
    for neutral in (False, True):
        a = matchday_autocorrelation(small_league, neutralize=neutral)
        b = matchday_autocorrelation(relabeled, neutralize=neutral)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12)
        assert a.counts.tolist() == b.counts.tolist()


def test_counts_weakly_decreasing(small_league):
    c = matchday_autocorrelation(small_league)
    assert all(np.diff(c.counts) <= 0)
    assert c.half_season_lag == 5


def test_neutralize_removes_home_advantage():
    # all results are pure home advantage of 2: neutral differences vanish
    rows = []
    for d, day in enumerate(schedule_round_robin(4), start=1):
        for h, a in day:
            rows.append((1, d, "ABCD"[h], "ABCD"[a], 32, 30))
    ds = make_dataset(rows)
    assert np.allclose(matchday_autocorrelation(ds, neutralize=True).values, 0.0)
    assert not np.allclose(matchday_autocorrelation(ds).values, 0.0)


def test_lag_range_errors(small_league):
    with pytest.raises(ValueError):
        matchday_autocorrelation(small_league, max_lag=10)


def test_same_opponent_peak(handball_scale_league):
    ds, _ = handball_scale_league
    c = matchday_autocorrelation(ds)
    level, se = c.mean_level()
    assert c.half_season_lag == 17
    assert c.values[16] > level
    excl, _ = c.mean_level(exclude_half_season=True)
    assert excl < level


def test_exact_recovery():
    lags = np.arange(1, 15)
    fit = fit_exponential(_curve(_model(10, 3, 4, lags)))
    assert fit.identifiable
    assert fit.c1 == pytest.approx(10, rel=1e-6)
    assert fit.c2 == pytest.approx(3, rel=1e-6)
    assert fit.tau == pytest.approx(4, rel=1e-6)
    assert fit.fit_range == (1, 14)


@given(
    c1=st.floats(-20, 20),
    c2=st.floats(1, 10),
    tau=st.floats(1.0, 8.0),
    scale=st.sampled_from([0.1, 0.5, 2.0, 7.0]),
)
@settings(max_examples=25, deadline=None)
def test_scale_equivariance(c1, c2, tau, scale):
    lags = np.arange(1, 15)
    base = fit_exponential(_curve(_model(c1, c2, tau, lags)))
    scaled = fit_exponential(_curve(scale * _model(c1, c2, tau, lags)))
    assert scaled.tau == pytest.approx(base.tau, rel=1e-6)
    assert scaled.c2 == pytest.approx(scale * base.c2, rel=1e-6)
    assert scaled.c1 == pytest.approx(scale * base.c1, rel=1e-6, abs=1e-6)


def test_flat_curve_unidentifiable():
    rng = np.random.default_rng(3)
    fit = fit_exponential(_curve(11 + rng.normal(0, 0.3, 14)))
    assert not fit.identifiable and math.isnan(fit.tau)
    exact = fit_exponential(_curve(np.full(14, 11.0)))
    assert not exact.identifiable and math.isnan(exact.tau)
    assert np.allclose(exact.residuals, 0.0, atol=1e-9)


def test_fit_needs_four_lags():
    with pytest.raises(ValueError):
        fit_exponential(_curve([1.0, 2.0, 3.0]))


def test_fit_deterministic():
    lags = np.arange(1, 15)
    y = _model(11.2, 2.8, 3.3, lags) + np.random.default_rng(1).normal(0, 0.2, 14)
    a, b = fit_exponential(_curve(y)), fit_exponential(_curve(y))
    assert (a.c1, a.c2, a.tau) == (b.c1, b.c2, b.tau)
    assert a.covariance.shape == (3, 3)


def test_seasonal_copy_paste():
    ds = _margin_league({"A": 3, "B": 1, "C": -1, "D": -3}, n_seasons=3)
    sa = seasonal_autocorrelation(ds)
    assert sa.values[0] == 1.0
    assert sa.values[1] == pytest.approx(1.0)
    assert sa.values[2] == pytest.approx(1.0)


def test_seasonal_zero_lag_exact(small_league):
    assert seasonal_autocorrelation(small_league).values[0] == 1.0


def test_seasonal_independent_redraw():
    cfg = SimulationConfig(n_seasons=50, fitness_sd=3.0, fitness_redraw="per-season", seed=6)
    ds, _ = simulate_league(cfg)
    sa = seasonal_autocorrelation(ds)
    assert np.all(np.abs(sa.values[1:6]) < 0.1)


def test_seasonal_needs_persistent_teams():
    ds = make_dataset([(1, 1, "A", "B", 3, 1), (1, 2, "B", "A", 2, 2), (2, 1, "C", "D", 1, 0), (2, 2, "D", "C", 0, 1)])
    with pytest.raises(ValueError):
        seasonal_autocorrelation(ds)
