"""Synthetic leagues from a binomial goal model with known ground truth.

Each side of a fixture converts a fixed number of attacks with a success
probability shifted by the fitness difference and home advantage, so the
expected goal difference of ``home`` vs ``away`` is
``(f_home - f_away) + home_advantage`` goals.

Random streams: ``numpy.random.PCG64`` seeded through
``SeedSequence(seed, spawn_key=...)``. Fitness draws use the key
``(0,)``; the goals of season index ``n`` in tier ``k`` use ``(1, n, k)``.
Every season is therefore reproducible on its own, independent of the order
in which seasons are generated.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .dataset import LeagueDataset, MatchRecord, TeamId

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed, spawn_key); fitness (0,), goals (1, season_index, tier)"

EPS = 1e-9

Redraw = Literal["persistent", "per-season", "ar1"]


class SimulationError(ValueError):
    pass


def schedule_round_robin(n_teams: int) -> list[list[tuple[int, int]]]:
    """Double round-robin by the circle method.

    Returns one list of ``(home, away)`` index pairs per match day. The first
    ``n - 1`` days form a single round robin; the remaining days repeat it
    with venues swapped. An odd team count gets a bye slot, so one team sits
    out each day.
    """
    if n_teams < 2:
        raise ValueError("need at least two teams")
    n = n_teams + (n_teams % 2)
    bye = n - 1 if n != n_teams else None
    fixed = n - 1
    ring = list(range(n - 1))

    first_leg = []
    for r in range(n - 1):
        left, right = ring[: n // 2], ring[n // 2 :]
        # Berger ordering: the fixed team alternates venue, everyone else
        # mostly alternates through the rotation
        day = [(ring[0], fixed) if r % 2 == 0 else (fixed, ring[0])]
        day.extend(zip(left[1:], reversed(right)))
        first_leg.append([p for p in day if bye is None or bye not in p])
        ring = right + left

    second_leg = [[(b, a) for a, b in day] for day in first_leg]
    return first_leg + second_leg


@dataclass
class SimulationConfig:
    n_teams: int = 18
    n_seasons: int = 10
    attacks_per_team: int = 55
    base_efficiency: float = 0.5
    fitness_sd: float = 0.0
    fitness_redraw: Redraw = "persistent"
    rho: float = 0.0
    home_advantage: float = 0.0
    # second-tier league; its teams start with strength lowered by tier_offset
    n_tier2_teams: int = 0
    tier_offset: float = 0.0
    n_promoted: int = 2
    seed: int = 0
    clamp: bool = False
    first_season: int = 1

    def validate(self):
        if self.n_teams < 2:
            raise SimulationError("n_teams must be >= 2")
        if self.n_seasons < 1:
            raise SimulationError("n_seasons must be >= 1")
        if self.attacks_per_team < 1:
            raise SimulationError("attacks_per_team must be >= 1")
        if not 0.0 <= self.base_efficiency <= 1.0:
            raise SimulationError("base_efficiency must lie in [0, 1]")
        if self.fitness_sd < 0:
            raise SimulationError("fitness_sd must be >= 0")
        if self.fitness_redraw not in ("persistent", "per-season", "ar1"):
            raise SimulationError(f"unknown fitness_redraw {self.fitness_redraw!r}")
        if not -1.0 <= self.rho <= 1.0:
            raise SimulationError("rho must lie in [-1, 1]")
        if self.n_tier2_teams and not 0 < self.n_promoted <= min(self.n_teams, self.n_tier2_teams):
            raise SimulationError("n_promoted must be positive and fit both tiers")
        if not 0 <= self.seed < 2**64:
            raise SimulationError("seed must be a 64-bit unsigned integer")


@dataclass
class GroundTruth:
    # season label -> team name -> strength in goals per match
    fitness: dict[str, dict[str, float]]
    sigma_f2: float
    home_advantage: float
    implied_A: float
    tier_offset: float
    clamp_events: int
    rng_algorithm: str = RNG_ALGORITHM
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def implied_stochastic_coefficient(attacks: int, efficiency: float) -> float:
    """Per-match variance of the goal difference for two equal binomial sides."""
    return 2.0 * attacks * efficiency * (1.0 - efficiency)


def _season_labels(cfg: SimulationConfig) -> list[str]:
    return [str(cfg.first_season + k) for k in range(cfg.n_seasons)]


def _fitness_paths(cfg: SimulationConfig, n_total: int) -> np.ndarray:
    """Fitness deviations, shape (n_seasons, n_total)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(0,))))
    z = rng.standard_normal((cfg.n_seasons, n_total))
    sd = cfg.fitness_sd
    if cfg.fitness_redraw == "persistent":
        return np.repeat(z[:1] * sd, cfg.n_seasons, axis=0)
    if cfg.fitness_redraw == "per-season":
        return z * sd
    out = np.empty_like(z)
    out[0] = z[0] * sd
    innovation = np.sqrt(max(0.0, 1.0 - cfg.rho**2))
    for n in range(1, cfg.n_seasons):
        out[n] = cfg.rho * out[n - 1] + innovation * sd * z[n]
    return out


def _probabilities(cfg, strength, fixtures):
    """Home and away conversion probabilities for index pairs."""
    home = np.array([h for h, _ in fixtures])
    away = np.array([a for _, a in fixtures])
    shift = (strength[home] - strength[away] + cfg.home_advantage) / (2.0 * cfg.attacks_per_team)
    return cfg.base_efficiency + shift, cfg.base_efficiency - shift, home, away


def _out_of_range(cfg, p_home, p_away, names, home, away, season):
    """Mask of fixtures whose probabilities leave (0, 1); raises unless clamping."""
    bad = (p_home <= 0) | (p_home >= 1) | (p_away <= 0) | (p_away >= 1)
    # p0 of exactly 0 or 1 with no shift is a legitimate degenerate coin
    if cfg.base_efficiency in (0.0, 1.0):
        bad &= p_home != p_away
    if bad.any() and not cfg.clamp:
        pairs = [
            f"{names[h]} vs {names[a]} (season {season}: p_home={ph:.3f}, p_away={pa:.3f})"
            for h, a, ph, pa, b in zip(home, away, p_home, p_away, bad)
            if b
        ]
        raise SimulationError("conversion probability outside (0, 1) for: " + "; ".join(pairs[:20]))
    return bad


def simulate_league(cfg: SimulationConfig) -> tuple[LeagueDataset, GroundTruth]:
    cfg.validate()
    labels = _season_labels(cfg)
    n1, n2 = cfg.n_teams, cfg.n_tier2_teams
    names = [f"T{i + 1:02d}" for i in range(n1)] + [f"S{i + 1:02d}" for i in range(n2)]
    base = np.concatenate([np.zeros(n1), np.full(n2, -cfg.tier_offset)])
    deviations = _fitness_paths(cfg, n1 + n2)

    members = {1: list(range(n1)), 2: list(range(n1, n1 + n2))}
    schedules = {k: schedule_round_robin(len(v)) for k, v in members.items() if v}
    records = []
    fitness = {}
    clamped = 0

    for n, label in enumerate(labels):
        strength = base + deviations[n]
        fitness[label] = {names[i]: float(strength[i]) for i in members[1] + members[2]}
        season_diff = defaultdict(lambda: [0, 0])
        for tier, schedule in schedules.items():
            roster = members[tier]
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(1, n, tier)))
            )
            for day_no, day in enumerate(schedule, start=1):
                fixtures = [(roster[a], roster[b]) for a, b in day]
                p_home, p_away, home, away = _probabilities(cfg, strength, fixtures)
                bad = _out_of_range(cfg, p_home, p_away, names, home, away, label)
                if bad.any():
                    clamped += int(bad.sum())
                    p_home = np.where(bad, np.clip(p_home, EPS, 1 - EPS), p_home)
                    p_away = np.where(bad, np.clip(p_away, EPS, 1 - EPS), p_away)
                g_home = rng.binomial(cfg.attacks_per_team, p_home)
                g_away = rng.binomial(cfg.attacks_per_team, p_away)
                for h, a, gh, ga in zip(home, away, g_home, g_away):
                    records.append(
                        MatchRecord(
                            season=label,
                            match_day=day_no,
                            home=TeamId.of(names[h]),
                            away=TeamId.of(names[a]),
                            goals_home=int(gh),
                            goals_away=int(ga),
                            tier=tier,
                        )
                    )
                    season_diff[h][0] += int(gh - ga)
                    season_diff[h][1] += int(gh)
                    season_diff[a][0] += int(ga - gh)
                    season_diff[a][1] += int(ga)
        if n2:
            _promote(members, season_diff, cfg.n_promoted, names)

    truth = GroundTruth(
        fitness=fitness,
        sigma_f2=cfg.fitness_sd**2,
        home_advantage=cfg.home_advantage,
        implied_A=implied_stochastic_coefficient(cfg.attacks_per_team, cfg.base_efficiency),
        tier_offset=cfg.tier_offset,
        clamp_events=clamped,
        config=asdict(cfg),
    )
    return LeagueDataset(records), truth


def _promote(members, season_diff, k, names):
    # rank by goal difference, then goals scored, then name for a total order
    def rank(i):
        diff, scored = season_diff[i]
        return (diff, scored, names[i])

    top = sorted(members[1], key=rank)
    bottom2 = sorted(members[2], key=rank)
    relegated = top[:k]
    promoted = bottom2[-k:]
    members[1] = sorted(set(members[1]) - set(relegated) | set(promoted))
    members[2] = sorted(set(members[2]) - set(promoted) | set(relegated))
