"""Command-line front end.

Exit codes: 1 usage error, 2 data validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import descriptive, fitness, plotting, predict, structure, variance
from .dataset import DataValidationError, LeagueDataset, parse_dataset, season_sort_key, serialize_dataset
from .fitness import FitError
from .report import SCHEMA_VERSION, csv_text, dumps, write_text
from .simulate import SimulationConfig, SimulationError, simulate_league

log = logging.getLogger("leaguestat")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- analyses
# Each returns (payload for JSON, {table name: (header, rows)}, figure callbacks).


def analyse_describe(ds: LeagueDataset, args):
    stats = descriptive.match_statistics(ds)
    pooled = descriptive.goal_histogram(ds, "pooled")
    home = descriptive.goal_histogram(ds, "home")
    away = descriptive.goal_histogram(ds, "away")
    goals = descriptive.per_season_series(ds, "total-goals")
    adv = descriptive.per_season_series(ds, "home-advantage")
    share = descriptive.per_season_series(ds, "positive-gd-share")
    goal_share = descriptive.per_season_series(ds, "positive-gd-goal-share")
    ext = descriptive.extreme_matches(ds)
    payload = {
        "match_statistics": stats,
        "home_advantage_ratio": stats.home_advantage / stats.mean_total,
        "goal_histogram_pooled": {
            "fitted_mean": pooled.fitted_mean,
            "fitted_variance": pooled.fitted_variance,
            "min_observed": pooled.min_observed,
            "max_observed": pooled.max_observed,
            "n_observations": pooled.n_observations,
        },
        "per_season": [
            {"season": s, "total_goals": g, "home_advantage": a, "positive_gd_share": p, "positive_gd_goal_share": q}
            for (s, g), (_, a), (_, p), (_, q) in zip(goals, adv, share, goal_share)
        ],
        "positive_goal_difference_shares": descriptive.positive_goal_difference_shares(ds),
        "extremes": ext,
    }
    all_goals = sorted(set(pooled.counts))
    tables = {
        "per_season": (
            ["season", "total_goals", "home_advantage", "positive_gd_share", "positive_gd_goal_share"],
            [(s, g, a, p, q) for (s, g), (_, a), (_, p), (_, q) in zip(goals, adv, share, goal_share)],
        ),
        "goal_histogram": (
            ["goals", "home", "away", "pooled"],
            [(g, home.counts.get(g, 0), away.counts.get(g, 0), pooled.counts[g]) for g in all_goals],
        ),
    }
    figures = {
        "goal_distribution": lambda p: plotting.goal_distribution(home, away, p),
        "goals_per_season": lambda p: plotting.season_series(goals, "goals per match", p),
        "home_advantage_per_season": lambda p: plotting.season_series(adv, "home advantage (goals)", p),
    }
    return payload, tables, figures


def analyse_fitness(ds: LeagueDataset, args):
    half = fitness.half_season_correlation(ds)
    curve = fitness.matchday_autocorrelation(ds, neutralize=args.neutralize)
    max_lag = min(args.fit_max_lag, int(curve.lags.max()))
    fit = fitness.fit_exponential(curve, max_lag)
    level, level_se = curve.mean_level()
    level_x, level_x_se = curve.mean_level(exclude_half_season=True)
    payload = {
        "half_season": {"r": half.r, "r2": half.r2, "n_pairs": len(half.pairs)},
        "autocorrelation": {
            "neutralized": args.neutralize,
            "mean_level": level,
            "mean_level_stderr": level_se,
            "mean_level_excluding_half_season_lag": level_x,
            "mean_level_excluding_half_season_lag_stderr": level_x_se,
            "half_season_lag": curve.half_season_lag,
            "lags": curve.lags,
            "values": curve.values,
            "counts": curve.counts,
            "stderr": curve.stderr,
        },
        "exponential_fit": {
            "c1": fit.c1,
            "c2": fit.c2,
            "tau": fit.tau,
            "stderr": fit.stderr,
            "covariance": fit.covariance,
            "fit_range": fit.fit_range,
            "rss": fit.rss,
            "identifiable": fit.identifiable,
        },
    }
    tables = {
        "half_season": (["team", "season", "first_half", "second_half"], half.pairs),
        "autocorrelation": (
            ["lag", "value", "count", "stderr"],
            zip(curve.lags, curve.values, curve.counts, curve.stderr),
        ),
    }
    figures = {
        "half_season_correlation": lambda p: plotting.half_season_scatter(half, p),
        "autocorrelation": lambda p: plotting.autocorrelation(curve, fit, p),
    }
    if len(fitness._splittable_seasons(ds)) >= 2:
        cy = fitness.seasonal_autocorrelation(ds)
        payload["seasonal_autocorrelation"] = {
            "lags": cy.lags,
            "values": cy.values,
            "pair_counts": cy.pair_counts,
            "normalization": cy.normalization,
        }
        tables["seasonal_autocorrelation"] = (["lag", "value", "count"], zip(cy.lags, cy.values, cy.pair_counts))
        figures["seasonal_autocorrelation"] = lambda p: plotting.seasonal_autocorrelation(cy, p)
    return payload, tables, figures


def _decompositions(ds: LeagueDataset, args):
    series = variance.neutralize(ds)
    t_max = min(args.t_max, min(len(s.matches) for s in series))
    t_range = range(1, t_max + 1)
    return {
        q: variance.variance_decomposition(series, q, t_range, overlapping=not args.tiling, weighted=args.weighted)
        for q in ("delta", "plus", "minus")
    }


def analyse_variance(ds: LeagueDataset, args):
    decs = _decompositions(ds, args)
    mean_goals = descriptive.match_statistics(ds).mean_total
    influence = variance.stochastic_influence_curve(decs["delta"])
    transfer = variance.transfer_comparison(decs["delta"], goals_handball=mean_goals)
    payload = {
        "decompositions": {
            q: {
                "quantity": d.quantity,
                "sigma2": d.sigma2_infinity,
                "A": d.A,
                "r2": d.r2,
                "points": [{"t": t, "variance": v, "windows": n} for t, v, n in d.regression_points],
            }
            for q, d in decs.items()
        },
        "stochastic_influence": {
            "t_star": influence.t_star,
            "t_star_absolute": influence.t_star_absolute,
            "share": influence.share,
        },
        "transfer": transfer,
        "soccer_reference": variance.SOCCER_REFERENCE,
        "binomial_check": variance.binomial_check(decs["delta"], mean_goals),
        "mean_goals": mean_goals,
        "attack_defense_variance_ratio": structure.variance_ratio_attack_defense(decs["plus"], decs["minus"]),
    }
    tables = {
        f"variance_{q}": (
            ["t", "variance", "windows", "fitted"],
            [(t, v, n, d.sigma2_infinity + d.A / t) for t, v, n in d.regression_points],
        )
        for q, d in decs.items()
    }
    tables["stochastic_influence"] = (["t", "share"], zip(influence.t, influence.share))
    figures = {
        "variance_decay": lambda p: plotting.variance_decay(decs["delta"], p),
        "stochastic_influence": lambda p: plotting.stochastic_influence(influence, p),
    }
    return payload, tables, figures


def analyse_predict(ds: LeagueDataset, args):
    strategy = args.home_adv
    ev = predict.evaluate_predictions(ds, strategy, args.draw_band)
    alt_band = 0.0 if args.draw_band > 0 else 0.5
    alt = predict.evaluate_predictions(ds, strategy, alt_band)
    payload = {
        "home_advantage_strategy": str(strategy),
        "draw_band": args.draw_band,
        "overall_accuracy": ev.overall_accuracy,
        "n_predictions": ev.n_predictions,
        "accuracy_alternative_convention": {"draw_band": alt_band, "overall_accuracy": alt.overall_accuracy},
        "per_matchday": ev.per_matchday,
    }
    tables = {
        "predict_per_day": (
            ["t", "error_variance", "accuracy", "n"],
            [(s.t, s.error_variance, s.accuracy, s.n) for s in ev.per_matchday],
        )
    }
    figures = {"prediction": lambda p: plotting.prediction_scores(ev, p)}
    return payload, tables, figures


def analyse_structure(ds: LeagueDataset, args, full: LeagueDataset | None = None):
    totals = structure.team_season_totals(ds, tier=None)
    slopes = structure.attack_defense_slopes(totals, args.elite_threshold)
    groups = structure.split_correlations(totals)
    decs = _decompositions(ds, args)
    payload = {
        "elite_threshold": args.elite_threshold,
        "slopes": {
            "attack": slopes.slope_attack,
            "defense": slopes.slope_defense,
            "difference": slopes.slope_attack - slopes.slope_defense,
            "n_fitted": slopes.n_fitted,
            "elite": [
                {"team": p.team, "season": p.season, "Delta_G": p.Delta_G, "residual_attack": ra, "residual_defense": rd}
                for p, ra, rd in slopes.elite
            ],
        },
        "split_correlations": groups,
        "variance_ratio_attack_defense": structure.variance_ratio_attack_defense(decs["plus"], decs["minus"]),
    }
    tables = {
        "team_season_totals": (
            ["team", "season", "G_plus", "G_minus", "Delta_G", "elite"],
            [(p.team, p.season, p.G_plus, p.G_minus, p.Delta_G, int(p.elite(args.elite_threshold))) for p in totals],
        )
    }
    figures = {"attack_defense": lambda p: plotting.attack_defense(totals, slopes, args.elite_threshold, p)}
    pairs = structure.promotion_pairs(full if full is not None else ds)
    if len(pairs) >= 2:
        reg = structure.promotion_regression(pairs)
        payload["promotion"] = {"slope": reg.slope, "intercept": reg.intercept, "pairs": reg.pairs}
        tables["promotion"] = (
            ["team", "season_second_tier", "season_first_tier", "Delta_G_second", "Delta_G_first"],
            [(p.team, p.season_second_tier, p.season_first_tier, p.Delta_G_second, p.Delta_G_first) for p in pairs],
        )
        figures["promotion"] = lambda p: plotting.promotion(reg, p)
    else:
        payload["promotion"] = {"pairs": pairs, "note": "fewer than 2 promotion pairs (needs tier-2 rows)"}
    return payload, tables, figures


ANALYSES = {
    "describe": analyse_describe,
    "fitness": analyse_fitness,
    "variance": analyse_variance,
    "predict": analyse_predict,
    "structure": analyse_structure,
}

PRIMARY_TABLE = {
    "describe": "per_season",
    "fitness": "autocorrelation",
    "variance": "variance_delta",
    "predict": "predict_per_day",
    "structure": "team_season_totals",
}


# ---------------------------------------------------------------- plumbing


def _season_filter(spec: str | None, seasons: tuple[str, ...]) -> list[str]:
    if not spec:
        return list(seasons)
    if ".." in spec:
        lo, hi = spec.split("..", 1)
    else:
        lo = hi = spec
    lo_key = season_sort_key(lo) if lo else None
    hi_key = season_sort_key(hi) if hi else None
    chosen = [
        s
        for s in seasons
        if (lo_key is None or season_sort_key(s) >= lo_key) and (hi_key is None or season_sort_key(s) <= hi_key)
    ]
    if not chosen:
        raise DataValidationError(f"no seasons in range {spec!r}")
    return chosen


def _read_input(path: str | None) -> bytes:
    if path is None:
        raise UsageError("--input is required")
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _metadata(args, raw: bytes | None) -> dict:
    arguments = {
        k: (str(v) if not isinstance(v, (int, float, bool, type(None))) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func",)
    }
    meta = {"schema": SCHEMA_VERSION, "version": __version__, "command": args.command, "arguments": arguments}
    if raw is not None:
        meta["input_sha256"] = hashlib.sha256(raw).hexdigest()
    return meta


def _emit(args, name: str, payload, tables, figures, raw):
    document = {**_metadata(args, raw), "results": payload}
    if args.out is None:
        if args.format == "csv":
            if name not in PRIMARY_TABLE:
                raise UsageError(f"--format csv needs --out for {name}")
            header, rows = tables[PRIMARY_TABLE[name]]
            sys.stdout.write(csv_text(header, rows))
        else:
            sys.stdout.write(dumps(document))
        return
    out = Path(args.out)
    written = [write_text(out / f"{name}.json", dumps(document))]
    for tname, (header, rows) in tables.items():
        written.append(write_text(out / f"{tname}.csv", csv_text(header, rows)))
    if getattr(args, "figures", False):
        for fname, draw in figures.items():
            written.append(draw(out / f"{fname}.png"))
    for path in written:
        log.info("wrote %s", path)


def _load(args):
    raw = _read_input(args.input)
    full = parse_dataset(raw)
    seasons = _season_filter(args.seasons, full.seasons)
    full = full.select(seasons=seasons)
    if 1 not in full.tiers:
        raise DataValidationError("no top-tier (tier 1) matches selected")
    return raw, full, full.select(tier=1)


def cmd_analysis(args):
    raw, full, top = _load(args)
    if args.command == "structure":
        payload, tables, figures = analyse_structure(top, args, full)
    else:
        payload, tables, figures = ANALYSES[args.command](top, args)
    _emit(args, args.command, payload, tables, figures, raw)


def cmd_report(args):
    raw, full, top = _load(args)
    payload, tables, figures = {}, {}, {}
    for name, fn in ANALYSES.items():
        p, t, f = fn(top, args, full) if name == "structure" else fn(top, args)
        payload[name] = p
        tables.update(t)
        figures.update(f)
    if args.out is None and args.format == "csv":
        raise UsageError("report needs --out for csv output")
    _emit(args, "report", payload, tables, figures, raw)


def cmd_simulate(args):
    cfg = SimulationConfig(
        n_teams=args.teams,
        n_seasons=args.n_seasons,
        attacks_per_team=args.attacks,
        base_efficiency=args.efficiency,
        fitness_sd=args.fitness_sd,
        fitness_redraw=args.redraw,
        rho=args.rho,
        home_advantage=args.home_advantage,
        n_tier2_teams=args.tier2_teams,
        tier_offset=args.tier_offset,
        n_promoted=args.promoted,
        seed=args.seed,
        clamp=args.clamp,
        first_season=args.first_season,
    )
    ds, truth = simulate_league(cfg)
    text = serialize_dataset(ds)
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    write_text(out / "league.csv", text)
    write_text(out / "ground_truth.json", dumps(truth))


def _home_adv(text):
    try:
        return predict.HomeAdvantageStrategy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="match CSV path, or - for stdin")
    common.add_argument("--seasons", help="season range A..B (inclusive; either end may be empty)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="directory for JSON, CSV and figure files")
    common.add_argument("--neutralize", action="store_true", help="remove seasonal home advantage in h(lag)")
    common.add_argument("--elite-threshold", type=float, default=150.0)
    common.add_argument("--home-adv", type=_home_adv, default=predict.HomeAdvantageStrategy(),
                        help="season | prior | constant:X")
    common.add_argument("--draw-band", type=float, default=0.5,
                        help="predicted |diff| below this is a draw; 0 forces a winner")
    common.add_argument("--fit-max-lag", type=int, default=14)
    common.add_argument("--t-max", type=int, default=17, help="largest window length in the variance fit")
    common.add_argument("--tiling", action="store_true", help="non-overlapping windows in the variance fit")
    common.add_argument("--weighted", action="store_true", help="weight the variance fit by window count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="leaguestat", description="Model-free statistics of round-robin league results.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in (
        ("describe", "goal means, variances, outcome shares, home advantage, extremes"),
        ("fitness", "half-season correlation, match-day autocorrelation and fit, seasonal autocorrelation"),
        ("variance", "variance decomposition, stochastic share, cross-sport transfer, binomial check"),
        ("predict", "rolling winner prediction and per-day error"),
        ("structure", "attack/defense slopes, split correlations, promotion regression"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=cmd_analysis)

    rep = sub.add_parser("report", parents=[common], help="every analysis, plus figures with --out")
    rep.add_argument("--no-figures", dest="figures", action="store_false")
    rep.set_defaults(func=cmd_report, figures=True)

    sim = sub.add_parser("simulate", parents=[common], help="emit a synthetic league as CSV")
    sim.add_argument("--teams", type=int, default=18)
    sim.add_argument("--n-seasons", type=int, default=10)
    sim.add_argument("--attacks", type=int, default=55)
    sim.add_argument("--efficiency", type=float, default=0.5)
    sim.add_argument("--fitness-sd", type=float, default=0.0)
    sim.add_argument("--redraw", choices=("persistent", "per-season", "ar1"), default="persistent")
    sim.add_argument("--rho", type=float, default=0.0)
    sim.add_argument("--home-advantage", type=float, default=0.0)
    sim.add_argument("--tier2-teams", type=int, default=0)
    sim.add_argument("--tier-offset", type=float, default=0.0)
    sim.add_argument("--promoted", type=int, default=2)
    sim.add_argument("--first-season", type=int, default=1)
    sim.add_argument("--clamp", action="store_true", help="clamp out-of-range probabilities instead of failing")
    sim.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        with np.errstate(all="ignore"):
            args.func(args)
    except UsageError as exc:
        print(f"leaguestat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataValidationError, SimulationError) as exc:
        print(f"leaguestat: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FitError as exc:
        print(f"leaguestat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        print(f"leaguestat: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def main():
    sys.exit(run())
