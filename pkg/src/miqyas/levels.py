"""The 19-level ordinal readability label space and its coarser collapses.

Levels are named after the Abjad letter order (1-alif .. 19-qaf). The
collapse boundaries onto the 7/5/3-level schemes and the school-grade
bands are data files, validated on load; only the single published
anchor (11 -> 4/2/1) is hard requirements here.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

LEVEL_NAMES = (
    "alif", "ba", "jim", "dal", "ha", "waw", "zay", "Ha", "Ta", "ya",
    "kaf", "lam", "mim", "nun", "sin", "ayn", "fa", "sad", "qaf",
)

GRANULARITIES = (19, 7, 5, 3)

READERSHIP_GROUPS = ("Foundational", "Advanced", "Specialized")


class LevelParseError(ValueError):
    """Raised for tokens that do not name a readability level."""


class GranularityError(ValueError):
    """Raised for invalid or inconsistent collapse/band configuration."""


@dataclass(frozen=True, order=True)
class ReadabilityLevel:
    """One of the 19 ordinal readability levels. Ordering follows the index."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or not 1 <= self.index <= 19:
            raise LevelParseError(f"level index out of range 1-19: {self.index!r}")

    @property
    def name(self) -> str:
        return f"{self.index}-{LEVEL_NAMES[self.index - 1]}"

    def __str__(self) -> str:
        return self.name


_CANONICAL = {f"{i}-{n}".lower(): i for i, n in enumerate(LEVEL_NAMES, start=1)}
_BARE_NAMES = {n: i for i, n in enumerate(LEVEL_NAMES, start=1)}


def parse_level(token) -> ReadabilityLevel:
    """Parse an integer 1-19 or a canonical level name like "3-jim".

    Full canonical forms match case-insensitively; a bare abjad name is
    accepted only in its exact canonical casing ("ha" and "Ha" differ).
    """
    if isinstance(token, bool):
        raise LevelParseError(f"not a level token: {token!r}")
    if isinstance(token, int):
        return ReadabilityLevel(token)
    if isinstance(token, float) and token.is_integer():
        return ReadabilityLevel(int(token))
    if isinstance(token, str):
        text = token.strip()
        if text.lstrip("+-").isdigit():
            value = int(text)
            if not 1 <= value <= 19:
                raise LevelParseError(f"level out of range 1-19: {token!r}")
            return ReadabilityLevel(value)
        index = _CANONICAL.get(text.lower())
        if index is None:
            index = _BARE_NAMES.get(text)
        if index is not None:
            return ReadabilityLevel(index)
    raise LevelParseError(f"unknown readability level: {token!r}")


def level_distance(a, b) -> int:
    """Absolute index distance between two levels (e.g. 2-ba vs 4-dal is 2)."""
    ia = a.index if isinstance(a, ReadabilityLevel) else parse_level(a).index
    ib = b.index if isinstance(b, ReadabilityLevel) else parse_level(b).index
    return abs(ia - ib)


class GranularityMap:
    """Total monotone collapse of levels 1..19 onto the 7/5/3-level schemes.

    ``boundaries[g]`` lists the inclusive upper 19-level bound of each coarse
    bucket. Validation enforces: exactly g ascending bounds ending at 19
    (totality + surjectivity + monotonicity), nesting of coarser schemes in
    finer ones, and the published anchor 11 -> (4, 2, 1).
    """

    def __init__(self, boundaries: dict):
        self.boundaries = {}
        for g in (7, 5, 3):
            bounds = boundaries.get(g, boundaries.get(str(g)))
            if bounds is None:
                raise GranularityError(f"missing boundary list for granularity {g}")
            self.boundaries[g] = tuple(int(x) for x in bounds)
        self.boundaries[19] = tuple(range(1, 20))
        self._validate()

    def _validate(self):
        problems = []
        for g in (7, 5, 3):
            bounds = self.boundaries[g]
            if len(bounds) != g:
                problems.append(f"granularity {g}: expected {g} buckets, got {len(bounds)}")
                continue
            if list(bounds) != sorted(set(bounds)):
                problems.append(f"granularity {g}: boundaries must be strictly ascending: {bounds}")
            if bounds and (bounds[0] < 1 or bounds[-1] != 19):
                problems.append(f"granularity {g}: boundaries must end at 19: {bounds}")
        if not problems:
            # coarser buckets must be unions of finer buckets
            if not set(self.boundaries[5]) <= set(self.boundaries[7]):
                problems.append("5-level boundaries are not a subset of 7-level boundaries")
            if not set(self.boundaries[3]) <= set(self.boundaries[5]):
                problems.append("3-level boundaries are not a subset of 5-level boundaries")
            anchor = tuple(self.collapse(11, g) for g in (7, 5, 3))
            if anchor != (4, 2, 1):
                problems.append(f"anchor violated: level 11 maps to {anchor}, expected (4, 2, 1)")
        if problems:
            raise GranularityError("invalid granularity map: " + "; ".join(problems))

    def collapse(self, level, g: int) -> int:
        """Bucket index of ``level`` under granularity ``g`` (identity at 19)."""
        if g not in GRANULARITIES:
            raise GranularityError(f"unsupported granularity: {g!r}")
        index = level.index if isinstance(level, ReadabilityLevel) else int(level)
        if not 1 <= index <= 19:
            raise GranularityError(f"level index out of range 1-19: {level!r}")
        if g == 19:
            return index
        return bisect_left(self.boundaries[g], index) + 1

    def bucket_sizes(self, g: int) -> list:
        bounds = self.boundaries[g]
        return [hi - lo for lo, hi in zip((0,) + bounds[:-1], bounds)]


@dataclass(frozen=True)
class GradeBand:
    low: int
    high: int
    grade: str
    readership: str


class GradeBands:
    """Partition of 1..19 into school-grade bands with readership groups."""

    def __init__(self, bands):
        self.bands = tuple(bands)
        covered = []
        for band in self.bands:
            if band.readership not in READERSHIP_GROUPS:
                raise GranularityError(f"unknown readership group: {band.readership!r}")
            if band.low > band.high:
                raise GranularityError(f"band range inverted: {band}")
            covered.extend(range(band.low, band.high + 1))
        if covered != list(range(1, 20)):
            raise GranularityError("grade bands must partition levels 1..19 in order")
        # Foundational is the early-grade prefix; it may not resume later.
        seen_other = False
        for band in self.bands:
            if band.readership != "Foundational":
                seen_other = True
            elif seen_other:
                raise GranularityError("Foundational bands must form a prefix of the scale")

    def band_for(self, level) -> GradeBand:
        index = level.index if isinstance(level, ReadabilityLevel) else int(level)
        for band in self.bands:
            if band.low <= index <= band.high:
                return band
        raise GranularityError(f"level index out of range 1-19: {level!r}")

    def grade_for(self, level) -> str:
        return self.band_for(level).grade

    def readership_for(self, level) -> str:
        return self.band_for(level).readership


def _data_path(name: str):
    return resources.files("miqyas.data").joinpath(name)


def load_granularity_map(path=None) -> GranularityMap:
    """Load and validate a collapse map, defaulting to the shipped file."""
    source = Path(path) if path else _data_path("granularity_map.json")
    raw = json.loads(source.read_text(encoding="utf-8"))
    if "boundaries" not in raw:
        raise GranularityError(f"no 'boundaries' section in {source}")
    return GranularityMap(raw["boundaries"])


def load_grade_bands(path=None) -> GradeBands:
    source = Path(path) if path else _data_path("grade_bands.json")
    raw = json.loads(source.read_text(encoding="utf-8"))
    bands = [
        GradeBand(low=int(b["levels"][0]), high=int(b["levels"][1]),
                  grade=b["grade"], readership=b["readership"])
        for b in raw.get("bands", [])
    ]
    return GradeBands(bands)
