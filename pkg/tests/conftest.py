import pytest

from leaguestat import LeagueDataset, MatchRecord, TeamId, simulate_league, SimulationConfig


def make_dataset(rows, tier=1):
    """rows: (season, day, home, away, goals_home, goals_away[, tier])"""
    return LeagueDataset(
        MatchRecord(str(r[0]), r[1], TeamId.of(r[2]), TeamId.of(r[3]), r[4], r[5], r[6] if len(r) > 6 else tier)
        for r in rows
    )


@pytest.fixture(scope="session")
def handball_scale_league():
    """18 teams x 10 seasons, persistent fitness, home advantage like the handball data."""
    return simulate_league(SimulationConfig(fitness_sd=13.3**0.5, home_advantage=1.87, base_efficiency=0.52, seed=11))


@pytest.fixture(scope="session")
def small_league():
    return simulate_league(SimulationConfig(n_teams=6, n_seasons=3, fitness_sd=2.0, home_advantage=1.0, seed=5))[0]


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def record_acceptance(criterion: str, status: str, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:>2}: {status:<4} {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
