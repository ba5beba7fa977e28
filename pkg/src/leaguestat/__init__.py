"""Model-free statistics of round-robin league match results."""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    DataValidationError,
    LeagueDataset,
    MatchRecord,
    SeasonProfile,
    TeamId,
    half_season_split,
    load_dataset,
    parse_dataset,
    season_profile,
    serialize_dataset,
)
from .simulate import GroundTruth, SimulationConfig, schedule_round_robin, simulate_league  # noqa: E402

__all__ = [
    "DataValidationError",
    "GroundTruth",
    "LeagueDataset",
    "MatchRecord",
    "SeasonProfile",
    "SimulationConfig",
    "TeamId",
    "half_season_split",
    "load_dataset",
    "parse_dataset",
    "schedule_round_robin",
    "season_profile",
    "serialize_dataset",
    "simulate_league",
]
