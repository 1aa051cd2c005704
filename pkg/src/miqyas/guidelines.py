"""The leveling rule engine.

A GuidelineProfile is pure data: word-count ceilings for the levels where
word count applies, per-dimension applicability caps, a detector
inventory, and floor rules keyed on features or thresholds. The engine
computes the minimum admissible level for a sentence (the floor, with a
trace of every fired rule) and validates a human-chosen level against the
constraints. Validation is advisory: annotators can always override.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .levels import ReadabilityLevel
from .text import DEFAULT_DETECTORS, Detector, SentenceFeatures, detect_features

DIMENSIONS = (
    "word_count",
    "orthography_phonology",
    "morphology",
    "syntax",
    "vocabulary",
    "ideas_content",
)

# Highest level at which each dimension may still be consulted (None = uncapped).
DIMENSION_CAPS = {
    "word_count": 11,
    "orthography_phonology": 7,
    "morphology": 13,
    "syntax": 15,
    "vocabulary": None,
    "ideas_content": None,
}

WORD_COUNT_CAP_CEILING = 20  # a level-11 sentence may have at most 20 words


class ProfileError(ValueError):
    """Raised when a guideline profile fails validation; lists all problems."""


class NotLevelableError(ValueError):
    """Raised for sentences with no countable words."""


@dataclass(frozen=True)
class GuidelineRule:
    id: str
    dimension: str
    floor: int
    source: str = "auto"  # auto | asserted
    feature: str | None = None
    min_syllables: int | None = None
    min_words: int | None = None

    def fires(self, features: SentenceFeatures) -> bool:
        if self.feature is not None:
            return features.has_feature(self.feature)
        if self.min_syllables is not None:
            return features.max_syllables is not None and features.max_syllables >= self.min_syllables
        if self.min_words is not None:
            return features.word_count >= self.min_words
        return False


@dataclass
class GuidelineProfile:
    name: str
    caps: dict
    word_count_ceilings: dict  # level -> max words admissible at that level
    rules: list
    detectors: tuple = DEFAULT_DETECTORS
    provisional_levels: tuple = ()
    version: int = 1

    def validate(self):
        problems = []
        for dim, cap in self.caps.items():
            if dim not in DIMENSIONS:
                problems.append(f"unknown dimension in caps: {dim!r}")
            expected = DIMENSION_CAPS.get(dim)
            if dim in DIMENSION_CAPS and cap != expected:
                problems.append(f"cap for {dim} must be {expected}, got {cap}")
        for dim in DIMENSIONS:
            if dim not in self.caps:
                problems.append(f"missing cap entry for dimension {dim}")

        wc_cap = self.caps.get("word_count") or DIMENSION_CAPS["word_count"]
        for level, ceiling in self.word_count_ceilings.items():
            if not 1 <= level <= wc_cap:
                problems.append(f"word-count ceiling for level {level} beyond cap {wc_cap}")
        ceilings = [self.word_count_ceilings.get(l) for l in range(1, wc_cap + 1)]
        if any(c is None for c in ceilings):
            problems.append(f"word-count ceilings must cover levels 1..{wc_cap}")
        elif ceilings != sorted(ceilings):
            problems.append("word-count ceilings must be non-decreasing")
        if self.word_count_ceilings.get(wc_cap) != WORD_COUNT_CAP_CEILING:
            problems.append(
                f"word-count ceiling at level {wc_cap} must be {WORD_COUNT_CAP_CEILING}"
            )

        seen = set()
        known_features = {d.feature for d in self.detectors}
        for rule in self.rules:
            if rule.id in seen:
                problems.append(f"duplicate rule id: {rule.id}")
            seen.add(rule.id)
            if rule.dimension not in DIMENSIONS:
                problems.append(f"rule {rule.id}: unknown dimension {rule.dimension!r}")
            else:
                cap = self.caps.get(rule.dimension)
                if cap is not None and rule.floor > cap:
                    problems.append(
                        f"rule {rule.id}: floor {rule.floor} exceeds {rule.dimension} cap {cap}"
                    )
            if not 1 <= rule.floor <= 19:
                problems.append(f"rule {rule.id}: floor out of range: {rule.floor}")
            if rule.source not in ("auto", "asserted"):
                problems.append(f"rule {rule.id}: bad source {rule.source!r}")
            if rule.source == "auto" and rule.feature is not None \
                    and rule.feature not in known_features:
                problems.append(
                    f"rule {rule.id}: auto feature {rule.feature!r} has no detector"
                )
            predicates = [rule.feature, rule.min_syllables, rule.min_words]
            if sum(p is not None for p in predicates) != 1:
                problems.append(f"rule {rule.id}: exactly one predicate required")
        if problems:
            raise ProfileError("invalid guideline profile: " + "; ".join(problems))
        return self

    def word_count_floor(self, word_count: int) -> int:
        """Lowest level whose ceiling admits the count; one past the cap if none."""
        wc_cap = self.caps.get("word_count") or DIMENSION_CAPS["word_count"]
        for level in range(1, wc_cap + 1):
            if word_count <= self.word_count_ceilings[level]:
                return level
        return wc_cap + 1

    def dimension_applies(self, dimension: str, level: int) -> bool:
        cap = self.caps.get(dimension)
        return cap is None or level <= cap


def _parse_detector(entry: dict) -> Detector:
    return Detector(
        feature=entry["feature"],
        kind=entry["kind"],
        dimension=entry.get("dimension", "vocabulary"),
        pattern=entry.get("pattern", ""),
        suffix=entry.get("suffix", ""),
        min_length=int(entry.get("min_length", 1)),
        exclude=tuple(entry.get("exclude", ())),
    )


def load_profile(path=None) -> GuidelineProfile:
    """Load a profile file (default: the shipped one) and validate it."""
    if path is None:
        source = resources.files("miqyas.data").joinpath("default_profile.json")
    else:
        source = Path(path)
    raw = json.loads(source.read_text(encoding="utf-8"))
    detectors = tuple(_parse_detector(d) for d in raw.get("detectors", []))
    rules = [
        GuidelineRule(
            id=r["id"],
            dimension=r["dimension"],
            floor=int(r["floor"]),
            source=r.get("source", "auto"),
            feature=r.get("feature"),
            min_syllables=r.get("min_syllables"),
            min_words=r.get("min_words"),
        )
        for r in raw.get("rules", [])
    ]
    profile = GuidelineProfile(
        name=raw.get("name", "unnamed"),
        caps={k: v for k, v in raw["caps"].items()},
        word_count_ceilings={int(k): int(v) for k, v in raw["word_count_ceilings"].items()},
        rules=rules,
        detectors=detectors or DEFAULT_DETECTORS,
        provisional_levels=tuple(raw.get("provisional_levels", ())),
        version=int(raw.get("version", 1)),
    )
    return profile.validate()


@dataclass(frozen=True)
class TraceStep:
    rule_id: str
    dimension: str
    rule_floor: int
    floor_after: int

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "dimension": self.dimension,
            "rule_floor": self.rule_floor,
            "floor_after": self.floor_after,
        }


@dataclass(frozen=True)
class Violation:
    kind: str  # below_floor | word_count_ceiling | not_levelable | dimension_info
    severity: str  # advisory | info
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "severity": self.severity, "message": self.message}


@dataclass
class LevelJudgment:
    floor: ReadabilityLevel
    trace: list
    violations: list = field(default_factory=list)

    @property
    def advisories(self) -> list:
        return [v for v in self.violations if v.severity == "advisory"]

    def to_dict(self) -> dict:
        return {
            "floor": self.floor.index,
            "floor_name": self.floor.name,
            "trace": [s.to_dict() for s in self.trace],
            "violations": [v.to_dict() for v in self.violations],
        }


def compute_floor(features: SentenceFeatures, profile: GuidelineProfile) -> LevelJudgment:
    """Minimum admissible level: max of the word-count floor and all fired rules.

    The trace follows the annotation procedure's narrative order: word count
    first, then fired rules sorted by the level they unlock (ties broken by
    dimension order then rule id), each recorded with the running floor.
    """
    if features.word_count <= 0:
        raise NotLevelableError("sentence has no countable words")
    wc_floor = profile.word_count_floor(features.word_count)
    trace = [
        TraceStep(
            rule_id=f"word-count:{features.word_count}",
            dimension="word_count",
            rule_floor=wc_floor,
            floor_after=wc_floor,
        )
    ]
    fired = [r for r in profile.rules if r.fires(features)]
    fired.sort(key=lambda r: (r.floor, DIMENSIONS.index(r.dimension), r.id))
    floor = wc_floor
    for rule in fired:
        floor = max(floor, rule.floor)
        trace.append(
            TraceStep(rule_id=rule.id, dimension=rule.dimension,
                      rule_floor=rule.floor, floor_after=floor)
        )
    return LevelJudgment(floor=ReadabilityLevel(floor), trace=trace)


def validate_choice(candidate, features: SentenceFeatures,
                    profile: GuidelineProfile) -> LevelJudgment:
    """Check a human-chosen level; advisory only.

    Produces: a below-floor advisory citing the rules that forced the floor
    above the candidate, a word-count ceiling advisory when the candidate is
    within the word-count cap, and one informational line per dimension
    stating whether it applies at the candidate level (the live-feedback
    columns of the annotation interface).
    """
    level = candidate if isinstance(candidate, ReadabilityLevel) else ReadabilityLevel(int(candidate))
    violations = []
    if features.word_count <= 0:
        judgment = LevelJudgment(floor=level, trace=[])
        judgment.violations.append(
            Violation("not_levelable", "advisory", "sentence has no countable words")
        )
        return judgment

    judgment = compute_floor(features, profile)
    if level.index < judgment.floor.index:
        culprits = [s for s in judgment.trace if s.floor_after > level.index]
        cited = ", ".join(f"{s.rule_id} ({s.dimension}) -> {s.rule_floor}" for s in culprits)
        violations.append(
            Violation(
                "below_floor",
                "advisory",
                f"candidate {level.name} is below the computed floor "
                f"{judgment.floor.name}; raised by: {cited}",
            )
        )

    if profile.dimension_applies("word_count", level.index):
        ceiling = profile.word_count_ceilings[level.index]
        if features.word_count > ceiling:
            violations.append(
                Violation(
                    "word_count_ceiling",
                    "advisory",
                    f"{features.word_count} words exceed the ceiling of "
                    f"{ceiling} for level {level.name}",
                )
            )

    for dim in DIMENSIONS:
        applies = profile.dimension_applies(dim, level.index)
        cap = profile.caps.get(dim)
        note = "applies" if applies else f"not consulted above level {cap}"
        violations.append(Violation("dimension_info", "info", f"{dim}: {note}"))

    return LevelJudgment(floor=judgment.floor, trace=judgment.trace, violations=violations)


def judge_sentence(sentence: str, profile: GuidelineProfile,
                   asserted=()) -> LevelJudgment:
    """Convenience: detect features then compute the floor."""
    features = detect_features(sentence, profile.detectors)
    features.asserted_features |= set(asserted)
    return compute_floor(features, profile)


def judgments_to_jsonl(judgments) -> str:
    """Audit export: one structured record per judgment."""
    return "\n".join(
        json.dumps(j.to_dict(), ensure_ascii=False, sort_keys=True) for j in judgments
    ) + "\n"
