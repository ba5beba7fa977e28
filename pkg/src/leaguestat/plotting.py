"""Matplotlib renderings of the analysis results, written straight to files."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0
STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
}


def new_figure(width: float = 6.0):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, width * GOLDEN))
    return fig, ax


def save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig.tight_layout()
        # fixed metadata keeps reruns byte-identical
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def goal_distribution(hist_home, hist_away, path):
    fig, ax = new_figure()
    for h, label, marker in ((hist_home, "home goals", "o"), (hist_away, "away goals", "s")):
        goals = np.array(list(h.counts))
        freq = np.array(list(h.counts.values())) / h.n_observations
        ax.plot(goals, freq, marker, ms=4, label=label)
        x = np.linspace(goals.min(), goals.max(), 200)
        if h.fitted_variance > 0:
            g = np.exp(-((x - h.fitted_mean) ** 2) / (2 * h.fitted_variance))
            ax.plot(x, g / math.sqrt(2 * math.pi * h.fitted_variance), "-", lw=1)
    ax.set_xlabel("goals per team and match")
    ax.set_ylabel("relative frequency")
    ax.legend()
    return save(fig, path)


def season_series(series, ylabel, path):
    fig, ax = new_figure()
    labels = [s for s, _ in series]
    ax.plot(range(len(series)), [v for _, v in series], "o-")
    ax.set_xticks(range(len(series)), labels, rotation=45 if len(labels) > 8 else 0)
    ax.set_xlabel("season")
    ax.set_ylabel(ylabel)
    return save(fig, path)


def half_season_scatter(correlation, path):
    fig, ax = new_figure(5.0)
    x = np.array([p[2] for p in correlation.pairs])
    y = np.array([p[3] for p in correlation.pairs])
    ax.plot(x, y, "o", ms=3)
    lim = max(np.abs(x).max(), np.abs(y).max()) * 1.05
    ax.plot([-lim, lim], [-lim, lim], "k:", lw=1)
    ax.set_xlabel("goal difference, first half")
    ax.set_ylabel("goal difference, second half")
    ax.set_title(f"$r^2$ = {correlation.r2:.2f}")
    return save(fig, path)


def autocorrelation(curve, fit, path):
    fig, ax = new_figure()
    ok = curve.counts > 0
    ax.errorbar(curve.lags[ok], curve.values[ok], yerr=curve.stderr[ok], fmt="o", ms=3, lw=0.8)
    level, _ = curve.mean_level()
    ax.axhline(level, color="k", lw=1)
    ax.set_xlabel("lag (match days)")
    ax.set_ylabel("h(lag)")
    if fit is not None and fit.identifiable:
        inset = ax.inset_axes([0.55, 0.55, 0.4, 0.4])
        sel = (curve.lags >= fit.fit_range[0]) & (curve.lags <= fit.fit_range[1])
        inset.plot(curve.lags[sel], curve.values[sel], "o", ms=2)
        xs = np.linspace(fit.fit_range[0], fit.fit_range[1], 100)
        inset.plot(xs, fit.predict(xs), "-", lw=1)
        inset.set_title(f"tau = {fit.tau:.2f}", fontsize=8)
        inset.tick_params(labelsize=7)
    return save(fig, path)


def seasonal_autocorrelation(result, path):
    fig, ax = new_figure()
    ok = result.pair_counts > 0
    ax.plot(result.lags[ok], result.values[ok], "o-")
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("season gap")
    ax.set_ylabel("normalized correlation")
    return save(fig, path)


def variance_decay(decomposition, path):
    fig, ax = new_figure()
    t = np.array([p[0] for p in decomposition.regression_points], dtype=float)
    v = np.array([p[1] for p in decomposition.regression_points])
    ax.plot(1 / t, v, "o")
    xs = np.linspace(0, 1, 50)
    ax.plot(xs, decomposition.sigma2_infinity + decomposition.A * xs, "-", lw=1)
    ax.set_xlabel("1 / t")
    ax.set_ylabel(f"variance of t-match mean ({decomposition.quantity})")
    return save(fig, path)


def stochastic_influence(influence, path):
    fig, ax = new_figure()
    ax.plot(influence.t, influence.share, "-")
    if influence.t_star is not None:
        ax.axvline(influence.t_star, color="k", ls=":", lw=1)
    ax.set_xlabel("matches t")
    ax.set_ylabel("stochastic share of variance")
    return save(fig, path)


def prediction_scores(evaluation, path):
    fig, ax = new_figure()
    t = [s.t for s in evaluation.per_matchday]
    ax.plot(t, [s.error_variance for s in evaluation.per_matchday], "o-", ms=3)
    ax.set_xlabel("match day")
    ax.set_ylabel("squared prediction error")
    inset = ax.inset_axes([0.55, 0.55, 0.4, 0.4])
    inset.plot(t, [s.accuracy for s in evaluation.per_matchday], "-", lw=1)
    inset.set_ylim(0, 1)
    inset.set_title(f"winner accuracy {evaluation.overall_accuracy:.2f}", fontsize=8)
    inset.tick_params(labelsize=7)
    return save(fig, path)


def attack_defense(totals, slopes, threshold, path):
    fig, ax = new_figure()
    dg = np.array([p.Delta_G for p in totals])
    gp = np.array([p.G_plus for p in totals])
    gm = np.array([p.G_minus for p in totals])
    elite = dg > threshold
    ax.plot(dg[~elite], gp[~elite], "o", ms=3, label="goals for")
    ax.plot(dg[~elite], gm[~elite], "s", ms=3, label="goals against")
    ax.plot(dg[elite], gp[elite], "^", ms=5, color="C0")
    ax.plot(dg[elite], gm[elite], "^", ms=5, color="C1")
    xs = np.linspace(dg.min(), dg.max(), 50)
    ax.plot(xs, slopes.intercept_attack + slopes.slope_attack * xs, "C0-", lw=1)
    ax.plot(xs, slopes.intercept_defense + slopes.slope_defense * xs, "C1-", lw=1)
    ax.set_xlabel("season goal difference")
    ax.set_ylabel("season goals")
    ax.legend()
    return save(fig, path)


def promotion(regression, path):
    fig, ax = new_figure(5.0)
    x = np.array([p.Delta_G_second for p in regression.pairs])
    y = np.array([p.Delta_G_first for p in regression.pairs])
    ax.plot(x, y, "o")
    xs = np.linspace(x.min(), x.max(), 20)
    ax.plot(xs, regression.intercept + regression.slope * xs, "-", lw=1)
    ax.set_xlabel("goal difference, second tier")
    ax.set_ylabel("goal difference, next season top tier")
    return save(fig, path)
