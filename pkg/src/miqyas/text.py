"""Deterministic Arabic text processing.

Normalization, diacritic stripping, tokenization, guideline-conformant
word counting, pausal (waqf) syllabification, and the automatic feature
detectors that feed the leveling rules. Everything here is a pure
function of its inputs; word counts ignore diacritics and punctuation,
and syllable counts are only reported when the vowel skeleton is fully
recoverable from the written form.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

# Arabic combining marks handled as diacritics: fathatan..sukun plus dagger alif.
FATHATAN, DAMMATAN, KASRATAN = "ً", "ٌ", "ٍ"
FATHA, DAMMA, KASRA = "َ", "ُ", "ِ"
SHADDA, SUKUN = "ّ", "ْ"
DAGGER_ALIF = "ٰ"

DIACRITICS = frozenset(
    [FATHATAN, DAMMATAN, KASRATAN, FATHA, DAMMA, KASRA, SHADDA, SUKUN, DAGGER_ALIF]
)
SHORT_VOWELS = {FATHA: "a", DAMMA: "u", KASRA: "i"}
TANWIN = {FATHATAN: "a", DAMMATAN: "u", KASRATAN: "i"}

ALIF = "ا"
ALIF_MADDA = "آ"
ALIF_HAMZA_ABOVE = "أ"
ALIF_HAMZA_BELOW = "إ"
ALIF_WASLA = "ٱ"
ALIF_MAQSURA = "ى"
WAW = "و"
YA = "ي"
TA_MARBUTA = "ة"

# Bare long-vowel letters and the short vowel quality each one extends.
LONG_VOWEL_LETTERS = {ALIF: "a", ALIF_MAQSURA: "a", WAW: "u", YA: "i"}

_ARABIC_BLOCKS = (
    ("؀", "ۿ"),
    ("ݐ", "ݿ"),
    ("ࢠ", "ࣿ"),
    ("ﭐ", "﷿"),
    ("ﹰ", "﻿"),
)


class AnalysisError(ValueError):
    """Raised for malformed diacritic sequences; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


def normalize(text: str) -> str:
    """Canonical (NFC) composition; applied before any other processing."""
    return unicodedata.normalize("NFC", text)


def is_arabic_char(ch: str) -> bool:
    return any(lo <= ch <= hi for lo, hi in _ARABIC_BLOCKS)


def is_arabic_letter(ch: str) -> bool:
    return is_arabic_char(ch) and unicodedata.category(ch).startswith("L")


def strip_diacritics(text: str) -> str:
    """Remove Arabic combining marks; all other characters pass through."""
    return "".join(ch for ch in normalize(text) if ch not in DIACRITICS)


@dataclass(frozen=True)
class Token:
    surface: str
    surface_bare: str
    is_word: bool
    diacritization: str  # full | partial | none


@dataclass
class SentenceFeatures:
    """Automatically derived plus manually asserted per-sentence features.

    max_syllables is the largest waqf-mode syllable count among the words
    whose skeleton is fully recoverable; None when no word is. Feature
    provenance is preserved: detectors fill auto_features, annotators fill
    asserted_features.
    """

    word_count: int
    max_syllables: int | None = None
    auto_features: set = field(default_factory=set)
    asserted_features: set = field(default_factory=set)

    def has_feature(self, feature_id: str) -> bool:
        if feature_id in self.auto_features or feature_id in self.asserted_features:
            return True
        # asserted ids may carry a "dimension:" tag prefix
        suffix = ":" + feature_id
        return any(f.endswith(suffix) for f in self.asserted_features)


def _word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in ("L", "M", "N")


def tokenize(text: str) -> list:
    """Whitespace segmentation with punctuation split off as non-word tokens.

    Concatenating the token surfaces reproduces the input minus whitespace.
    """
    tokens = []
    for chunk in normalize(text).split():
        runs = []
        current = []
        current_kind = None
        for ch in chunk:
            kind = "w" if _word_char(ch) else "p"
            if kind != current_kind and current:
                runs.append("".join(current))
                current = []
            current_kind = kind
            current.append(ch)
        if current:
            runs.append("".join(current))
        for run in runs:
            bare = strip_diacritics(run)
            is_word = any(unicodedata.category(c).startswith("L") for c in bare)
            tokens.append(
                Token(
                    surface=run,
                    surface_bare=bare,
                    is_word=is_word,
                    diacritization=_diacritization(run) if is_word else "none",
                )
            )
    return tokens


def count_words(text: str) -> int:
    """Number of word tokens; diacritics and punctuation never affect it."""
    return sum(1 for t in tokenize(text) if t.is_word)


# --- syllabification ------------------------------------------------------

@dataclass(frozen=True)
class Syllable:
    onset: str
    nucleus: str
    coda: tuple

    def skeleton(self) -> tuple:
        return (("C", self.onset), ("V", self.nucleus)) + tuple(("C", c) for c in self.coda)


def _units(word: str):
    """Group a word into (letter, marks) units; reject stray/duplicate marks."""
    units = []
    for pos, ch in enumerate(word):
        if ch in DIACRITICS:
            if not units:
                raise AnalysisError(f"diacritic {ch!r} with no preceding letter", pos)
            letter, marks = units[-1]
            vowel_slots = [m for m in marks if m != SHADDA]
            if ch != SHADDA and vowel_slots:
                raise AnalysisError(
                    f"conflicting marks {vowel_slots[0]!r} and {ch!r} on one letter", pos
                )
            if ch == SHADDA and SHADDA in marks:
                raise AnalysisError("doubled shadda", pos)
            marks.append(ch)
        elif is_arabic_letter(ch):
            units.append((ch, []))
        else:
            return None  # non-Arabic letters: skeleton not recoverable
    return units


def _waqf_trim(units):
    """Drop the word-final case/mood diacritic for pausal reading."""
    if not units:
        return units
    letter, marks = units[-1]
    droppable = set(SHORT_VOWELS) | set(TANWIN)
    if any(m in droppable for m in marks):
        units = units[:-1] + [(letter, [m for m in marks if m not in droppable])]
        return units
    # tanwin fath is written on the letter before a final seat alif
    if len(units) >= 2 and letter in (ALIF, ALIF_MAQSURA) and not marks:
        prev_letter, prev_marks = units[-2]
        if FATHATAN in prev_marks:
            trimmed = [m for m in prev_marks if m != FATHATAN]
            return units[:-2] + [(prev_letter, trimmed), (letter, marks)]
    return units


def _segments(units):
    """Expand units into a C/V segment stream, or None if not fully vowelled."""
    expanded = []
    for letter, marks in units:
        if SHADDA in marks:
            expanded.append((letter, [SUKUN]))
            expanded.append((letter, [m for m in marks if m != SHADDA]))
        else:
            expanded.append((letter, list(marks)))

    segments = []
    i = 0
    n = len(expanded)
    while i < n:
        letter, marks = expanded[i]
        vowel = next((m for m in marks if m in SHORT_VOWELS), None)
        tanwin = next((m for m in marks if m in TANWIN), None)

        if letter == ALIF_MADDA and not marks:
            segments.append(("C", "ء"))
            segments.append(("V", "aa"))
            i += 1
            continue

        if not marks:
            if letter in LONG_VOWEL_LETTERS and segments and segments[-1][0] == "V" \
                    and segments[-1][1] == LONG_VOWEL_LETTERS[letter]:
                segments[-1] = ("V", segments[-1][1] * 2)
                i += 1
                continue
            if i + 1 < n:
                nxt_letter, nxt_marks = expanded[i + 1]
                if not nxt_marks and nxt_letter in LONG_VOWEL_LETTERS and letter not in LONG_VOWEL_LETTERS:
                    # defective spelling: bare consonant + bare long-vowel letter
                    segments.append(("C", letter))
                    segments.append(("V", LONG_VOWEL_LETTERS[nxt_letter] * 2))
                    i += 2
                    continue
            if i == n - 1:
                segments.append(("C", letter))  # final consonant, implicit sukun
                i += 1
                continue
            return None

        if SUKUN in marks:
            segments.append(("C", letter))
            i += 1
            continue

        if DAGGER_ALIF in marks:
            segments.append(("C", letter))
            segments.append(("V", "aa"))
            i += 1
            continue

        if vowel is not None:
            segments.append(("C", letter))
            segments.append(("V", SHORT_VOWELS[vowel]))
            i += 1
            continue

        if tanwin is not None:
            segments.append(("C", letter))
            segments.append(("V", TANWIN[tanwin]))
            segments.append(("C", "n"))  # tanwin's phonetic /n/, no letter of its own
            i += 1
            continue

        return None

    return segments


def _assemble(segments):
    """Group a C/V stream into syllables: one-consonant onsets, greedy codas."""
    if not segments or segments[0][0] != "C":
        return None
    nuclei = [idx for idx, (kind, _) in enumerate(segments) if kind == "V"]
    if not nuclei:
        return None
    syllables = []
    for which, v_idx in enumerate(nuclei):
        onset_idx = v_idx - 1
        if onset_idx < 0 or segments[onset_idx][0] != "C":
            return None
        end = nuclei[which + 1] - 1 if which + 1 < len(nuclei) else len(segments)
        coda = tuple(seg[1] for seg in segments[v_idx + 1 : end])
        syllables.append(
            Syllable(onset=segments[onset_idx][1], nucleus=segments[v_idx][1], coda=coda)
        )
        if which == 0 and onset_idx != 0:
            return None  # leading consonants with no nucleus before the first vowel
    return syllables


def syllabify(word: str, waqf: bool = True):
    """Parse a word into syllables, or None when the skeleton is not recoverable.

    Raises AnalysisError for malformed diacritic sequences. The parse
    requires at least one explicit mark: an entirely bare word never counts
    as fully diacritized even if a reading could be guessed.
    """
    word = normalize(word)
    units = _units(word)
    if units is None or not units:
        return None
    if not any(marks for _, marks in units):
        return None
    if waqf:
        units = _waqf_trim(units)
    segments = _segments(units)
    if segments is None:
        return None
    return _assemble(segments)


def count_syllables(word, waqf: bool = True):
    """Waqf-mode syllable count of a word token, or None when unknown."""
    surface = word.surface if isinstance(word, Token) else word
    syllables = syllabify(surface, waqf=waqf)
    return len(syllables) if syllables is not None else None


def _diacritization(word: str) -> str:
    word = normalize(word)
    if not any(ch in DIACRITICS for ch in word):
        return "none"
    try:
        parsed = syllabify(word, waqf=False)
    except AnalysisError:
        return "partial"
    return "full" if parsed is not None else "partial"


# --- feature detection ----------------------------------------------------

@dataclass(frozen=True)
class Detector:
    """One auto-feature detector, instantiated from the guideline profile."""

    feature: str
    kind: str  # word_suffix | word_regex | text_regex | non_arabic
    dimension: str
    pattern: str = ""
    suffix: str = ""
    min_length: int = 1
    exclude: tuple = ()

    def fires(self, tokens, text: str) -> bool:
        words = [t.surface_bare for t in tokens if t.is_word]
        if self.kind == "word_suffix":
            return any(
                w.endswith(self.suffix) and len(w) >= self.min_length and w not in self.exclude
                for w in words
            )
        if self.kind == "word_regex":
            rx = re.compile(self.pattern)
            return any(rx.search(w) for w in words)
        if self.kind == "text_regex":
            return re.search(self.pattern, text) is not None
        if self.kind == "non_arabic":
            return any(
                any(unicodedata.category(c).startswith("L") and not is_arabic_char(c) for c in w)
                for w in words
            )
        raise ValueError(f"unknown detector kind: {self.kind!r}")


DEFAULT_DETECTORS = (
    Detector(
        feature="first_person_clitic",
        kind="word_suffix",
        dimension="morphology",
        suffix=YA,
        min_length=3,
        exclude=("في", "الذي", "التي", "أي", "اللذين", "اللاتي", "اللواتي", "هي"),
    ),
    Detector(feature="hamza_on_line", kind="word_regex", dimension="orthography_phonology",
             pattern="ء"),
    Detector(feature="non_arabic_script", kind="non_arabic", dimension="vocabulary"),
    Detector(feature="has_digits", kind="text_regex", dimension="orthography_phonology",
             pattern="[0-9٠-٩]"),
)


def detect_features(sentence: str, detectors=DEFAULT_DETECTORS) -> SentenceFeatures:
    """Populate the automatic side of SentenceFeatures for one sentence."""
    text = normalize(sentence)
    tokens = tokenize(text)
    counts = []
    for token in tokens:
        if not token.is_word:
            continue
        try:
            n = count_syllables(token)
        except AnalysisError:
            n = None
        if n is not None:
            counts.append(n)
    fired = {d.feature for d in detectors if d.fires(tokens, text)}
    return SentenceFeatures(
        word_count=sum(1 for t in tokens if t.is_word),
        max_syllables=max(counts) if counts else None,
        auto_features=fired,
    )
