"""Match-result records, CSV ingestion and round-robin season views."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator

import numpy as np

REQUIRED_COLUMNS = ("season", "match_day", "home", "away", "goals_home", "goals_away")
OPTIONAL_COLUMNS = ("tier",)
VALID_TIERS = (1, 2)


class DataValidationError(ValueError):
    """Raised when input rows violate the match-record or schedule rules."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TeamId:
    """Team identity keyed on the case-folded, trimmed name.

    ``name`` keeps the spelling first seen so serialization stays readable;
    it takes no part in equality or hashing.
    """

    key: str
    name: str = field(compare=False)

    @classmethod
    def of(cls, raw: str) -> "TeamId":
        name = raw.strip()
        key = name.casefold()
        if not key:
            raise ValueError("empty team name")
        return cls(key, name)

    def __str__(self) -> str:
        return self.name


def season_sort_key(label: str) -> tuple:
    # integers sort numerically and before free-form labels
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


@dataclass(frozen=True)
class MatchRecord:
    season: str
    match_day: int
    home: TeamId
    away: TeamId
    goals_home: int
    goals_away: int
    tier: int = 1
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.home == self.away:
            raise DataValidationError(f"team {self.home} plays itself", self.line)
        if self.match_day < 1:
            raise DataValidationError(f"match_day must be >= 1, got {self.match_day}", self.line)
        if self.goals_home < 0 or self.goals_away < 0:
            raise DataValidationError("goals must be non-negative", self.line)
        if self.tier not in VALID_TIERS:
            raise DataValidationError(f"tier must be 1 or 2, got {self.tier}", self.line)

    @property
    def total(self) -> int:
        return self.goals_home + self.goals_away

    @property
    def diff(self) -> int:
        """Goal difference from the home side."""
        return self.goals_home - self.goals_away

    def diff_for(self, team: TeamId) -> int:
        if team == self.home:
            return self.diff
        if team == self.away:
            return -self.diff
        raise KeyError(team)

    def involves(self, team: TeamId) -> bool:
        return team == self.home or team == self.away


@dataclass(frozen=True)
class TeamSeason:
    """One team's matches in one season, in match-day order."""

    team: TeamId
    season: str
    days: np.ndarray
    goals_for: np.ndarray
    goals_against: np.ndarray
    at_home: np.ndarray

    @property
    def diffs(self) -> np.ndarray:
        return self.goals_for - self.goals_against


@dataclass(frozen=True)
class SeasonProfile:
    n_teams: int
    n_match_days: int
    complete: bool


class LeagueDataset:
    """Validated, immutable collection of match records.

    Records are stored in canonical order (season, match day, home team).
    Construction checks that no fixture repeats within a season and that
    no team plays twice on one match day.
    """

    def __init__(self, matches: Iterable[MatchRecord]):
        ordered = sorted(matches, key=_canonical_key)
        if not ordered:
            raise DataValidationError("no matches")
        _validate(ordered)
        self._matches = tuple(ordered)

    @property
    def matches(self) -> tuple[MatchRecord, ...]:
        return self._matches

    def __len__(self) -> int:
        return len(self._matches)

    def __iter__(self) -> Iterator[MatchRecord]:
        return iter(self._matches)

    def __eq__(self, other) -> bool:
        return isinstance(other, LeagueDataset) and self._matches == other._matches

    def __hash__(self):
        return hash(self._matches)

    def __repr__(self) -> str:
        return f"LeagueDataset({len(self)} matches, {len(self.seasons)} seasons)"

    @cached_property
    def seasons(self) -> tuple[str, ...]:
        return tuple(sorted({m.season for m in self._matches}, key=season_sort_key))

    @cached_property
    def _by_season(self) -> dict[str, tuple[MatchRecord, ...]]:
        grouped = defaultdict(list)
        for m in self._matches:
            grouped[m.season].append(m)
        return {s: tuple(v) for s, v in grouped.items()}

    def season_matches(self, season: str) -> tuple[MatchRecord, ...]:
        try:
            return self._by_season[season]
        except KeyError:
            raise KeyError(f"unknown season {season!r}") from None

    def teams(self, season: str) -> tuple[TeamId, ...]:
        teams = set()
        for m in self.season_matches(season):
            teams.update((m.home, m.away))
        return tuple(sorted(teams, key=lambda t: t.key))

    def team_seasons(self, season: str) -> dict[TeamId, TeamSeason]:
        """Per-team match sequences for ``season``, keyed by team."""
        cache = self.__dict__.setdefault("_team_cache", {})
        if season not in cache:
            rows = defaultdict(list)
            for m in self.season_matches(season):
                rows[m.home].append((m.match_day, m.goals_home, m.goals_away, True))
                rows[m.away].append((m.match_day, m.goals_away, m.goals_home, False))
            views = {}
            for team in sorted(rows, key=lambda t: t.key):
                arr = sorted(rows[team])
                views[team] = TeamSeason(
                    team=team,
                    season=season,
                    days=np.array([r[0] for r in arr], dtype=int),
                    goals_for=np.array([r[1] for r in arr], dtype=float),
                    goals_against=np.array([r[2] for r in arr], dtype=float),
                    at_home=np.array([r[3] for r in arr], dtype=bool),
                )
            cache[season] = views
        return cache[season]

    def n_match_days(self, season: str) -> int:
        return max(m.match_day for m in self.season_matches(season))

    def match_day(self, season: str, day: int) -> tuple[MatchRecord, ...]:
        return tuple(m for m in self.season_matches(season) if m.match_day == day)

    def tier_of(self, season: str, team: TeamId) -> int:
        for m in self.season_matches(season):
            if m.involves(team):
                return m.tier
        raise KeyError(team)

    @property
    def tiers(self) -> tuple[int, ...]:
        return tuple(sorted({m.tier for m in self._matches}))

    def select(self, seasons: Iterable[str] | None = None, tier: int | None = None) -> "LeagueDataset":
        """Subset by season labels and/or league tier."""
        wanted = None if seasons is None else set(seasons)
        rows = [
            m
            for m in self._matches
            if (wanted is None or m.season in wanted) and (tier is None or m.tier == tier)
        ]
        return LeagueDataset(rows)

    def truncate(self, season: str, last_day: int) -> "LeagueDataset":
        """Drop every match of ``season`` played after ``last_day``."""
        return LeagueDataset(
            m for m in self._matches if m.season != season or m.match_day <= last_day
        )


def _canonical_key(m: MatchRecord):
    return (season_sort_key(m.season), m.match_day, m.home.key, m.tier)


def _validate(matches: Iterable[MatchRecord]) -> None:
    fixtures = set()
    playing = set()
    for m in matches:
        fixture = (m.season, m.home, m.away)
        if fixture in fixtures:
            raise DataValidationError(
                f"duplicate fixture {m.home} vs {m.away} in season {m.season}", m.line
            )
        fixtures.add(fixture)
        for team in (m.home, m.away):
            slot = (m.season, m.match_day, team)
            if slot in playing:
                raise DataValidationError(
                    f"team {team} plays twice on match day {m.match_day} of season {m.season}",
                    m.line,
                )
            playing.add(slot)


def season_profile(dataset: LeagueDataset, season: str) -> SeasonProfile:
    matches = dataset.season_matches(season)
    teams = dataset.teams(season)
    n = len(teams)
    days = dataset.n_match_days(season)
    pairs = {(m.home, m.away) for m in matches}
    complete = (
        n >= 2
        and days == 2 * (n - 1)
        and len(matches) == n * (n - 1)
        and len(pairs) == n * (n - 1)
        and len({m.match_day for m in matches}) == days
        and all(len(dataset.match_day(season, d)) == n // 2 for d in range(1, days + 1))
    )
    return SeasonProfile(n, days, complete)


def half_season_split(
    dataset: LeagueDataset, season: str, split: int | None = None
) -> tuple[range, range]:
    """Match-day ranges of the two half seasons.

    Without an explicit ``split`` the season must have an even number of
    match days, which are divided evenly.
    """
    days = dataset.n_match_days(season)
    if split is None:
        if days % 2:
            raise ValueError(
                f"season {season!r} has {days} match days; pass an explicit split point"
            )
        split = days // 2
    if not 1 <= split < days:
        raise ValueError(f"split point {split} outside 1..{days - 1}")
    return range(1, split + 1), range(split + 1, days + 1)


def _parse_int(value: str, column: str, line: int) -> int:
    try:
        return int(value.strip())
    except (ValueError, AttributeError):
        raise DataValidationError(f"column {column!r}: expected integer, got {value!r}", line) from None


def parse_dataset(source: bytes | str | IO, format: str = "csv") -> LeagueDataset:
    """Parse UTF-8 CSV match rows into a validated dataset.

    ``source`` may be raw bytes, text, or a text/binary file object. Lines
    starting with ``#`` are ignored. Errors carry the 1-based data line.
    """
    if format != "csv":
        raise ValueError(f"unsupported input format {format!r}")
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if source.startswith("\ufeff"):
        source = source[1:]

    lines = [
        (i, ln)
        for i, ln in enumerate(source.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise DataValidationError("no matches")

    header_line, header_text = lines[0]
    header = [h.strip().lower() for h in next(csv.reader([header_text]))]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise DataValidationError(f"missing columns {missing}", header_line)
    idx = {name: header.index(name) for name in header}

    records = []
    data_no = 0
    for (lineno, text), row in zip(lines[1:], csv.reader(ln for _, ln in lines[1:])):
        data_no += 1
        if len(row) < len(REQUIRED_COLUMNS) or len(row) > len(header):
            raise DataValidationError(f"expected {len(header)} fields, got {len(row)}", data_no)
        season = row[idx["season"]].strip()
        if not season:
            raise DataValidationError("empty season label", data_no)
        tier = 1
        if "tier" in idx and idx["tier"] < len(row) and row[idx["tier"]].strip():
            tier = _parse_int(row[idx["tier"]], "tier", data_no)
        try:
            home = TeamId.of(row[idx["home"]])
            away = TeamId.of(row[idx["away"]])
        except ValueError as exc:
            raise DataValidationError(str(exc), data_no) from None
        records.append(
            MatchRecord(
                season=season,
                match_day=_parse_int(row[idx["match_day"]], "match_day", data_no),
                home=home,
                away=away,
                goals_home=_parse_int(row[idx["goals_home"]], "goals_home", data_no),
                goals_away=_parse_int(row[idx["goals_away"]], "goals_away", data_no),
                tier=tier,
                line=data_no,
            )
        )
    if not records:
        raise DataValidationError("no matches")
    return LeagueDataset(records)


def load_dataset(path) -> LeagueDataset:
    with open(path, "rb") as fh:
        return parse_dataset(fh)


def serialize_dataset(dataset: LeagueDataset) -> str:
    """Canonical CSV text; ``parse_dataset`` inverts it exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
    for m in dataset:
        writer.writerow(
            [m.season, m.match_day, m.home.name, m.away.name, m.goals_home, m.goals_away, m.tier]
        )
    return buf.getvalue()
