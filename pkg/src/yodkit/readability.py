"""Seven readability formulas and their level tables.

Band lookup rules:

* Tables printed as abutting real ranges (FRES) give a shared boundary to
  the upper (easier) band, so 80.0 is "6th grade".
* Tables printed as integer rows with gaps (SMOG, Ateşman, Çetinkaya-Uzun,
  YOD) cover ``[row_low, next_row_low)``; a score belongs to the row holding
  its integer part.
* Gunning fog rounds half-up to the nearest row, ARI rounds up; both clamp.
* Anything outside a table's domain keeps its raw value and is labeled
  ``OUT_OF_RANGE`` with ``level_index == -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from yodkit.text_core import TextStats

Formula = Literal["fres", "gfi", "smog", "ari", "atesman", "cetinkaya_uzun", "yod"]

OUT_OF_RANGE = "out of table range"
MIN_YOD_LEVEL = 1
MAX_YOD_LEVEL = 16
DEFAULT_TOLERANCE = 1.5


@dataclass(frozen=True)
class ReadabilityScore:
    formula: str
    value: float
    level_label: str
    level_index: int


# Flesch reading ease, rows as printed (high score first): (low, high, label).
FRES_TABLE = (
    (90.0, 100.0, "5th grade"),
    (80.0, 90.0, "6th grade"),
    (70.0, 80.0, "7th grade"),
    (60.0, 70.0, "8th & 9th grade"),
    (50.0, 60.0, "10th to 12th grade"),
    (30.0, 50.0, "College"),
    (10.0, 30.0, "College graduate"),
    (0.0, 10.0, "Professional"),
)

# Gunning fog, printed from 17 down to 6.
GFI_TABLE = (
    (17, "College graduate"),
    (16, "College senior"),
    (15, "College junior"),
    (14, "College sophomore"),
    (13, "College freshman"),
    (12, "High school senior"),
    (11, "High school junior"),
    (10, "High school sophomore"),
    (9, "High school freshman"),
    (8, "Eighth grade"),
    (7, "Seventh grade"),
    (6, "Sixth grade"),
)

# SMOG: (first grade of row, label); last row is open-ended (17+).
SMOG_TABLE = (
    (1, "Elementary School"),
    (5, "Middle School"),
    (9, "High School"),
    (13, "Undergraduate"),
    (17, "Graduate"),
)

# ARI: score, age, grade.
ARI_TABLE = (
    (1, "5-6", "Kindergarten"),
    (2, "6-7", "First Grade"),
    (3, "7-8", "Second Grade"),
    (4, "8-9", "Third Grade"),
    (5, "9-10", "Fourth Grade"),
    (6, "10-11", "Fifth Grade"),
    (7, "11-12", "Sixth Grade"),
    (8, "12-13", "Seventh Grade"),
    (9, "13-14", "Eighth Grade"),
    (10, "14-15", "Ninth Grade"),
    (11, "15-16", "Tenth Grade"),
    (12, "16-17", "Eleventh Grade"),
    (13, "17-18", "Twelfth Grade"),
    (14, "18-22", "College Student"),
)

# Ateşman, printed easy first: (low, high, label). Domain is [0, 100];
# scores in [0, 1) fall in the lowest band.
ATESMAN_TABLE = (
    (90, 100, "Very Easy"),
    (70, 89, "Easy"),
    (50, 69, "Moderately Difficult"),
    (30, 49, "Difficult"),
    (1, 29, "Very Difficult"),
)

# Çetinkaya-Uzun: (low, label, grade); last row open-ended (51+).
CETINKAYA_UZUN_TABLE = (
    (0, "Insufficient Reading Level", "10th, 11th, and 12th Grade"),
    (35, "Educational Reading Level", "8th and 9th Grade"),
    (51, "Independent Reading Level", "5th, 6th, and 7th Grade"),
)

# Bezirci-Yılmaz YOD: (first, last, label); last row open-ended. YOD values
# below 1 have no printed row and are reported as elementary.
YOD_TABLE = (
    (1, 8, "Elementary School"),
    (9, 12, "High School"),
    (13, 15, "Undergraduate Level"),
    (16, None, "Academic/Professional Level"),
)

YOD_GROUPS = tuple((lo, hi if hi is not None else MAX_YOD_LEVEL, label) for lo, hi, label in YOD_TABLE)


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _out_of_range(formula: str, value: float) -> ReadabilityScore:
    return ReadabilityScore(formula, value, OUT_OF_RANGE, -1)


def fres_level(value: float) -> tuple[int, str]:
    if not 0.0 <= value <= 100.0:
        return -1, OUT_OF_RANGE
    for idx, (low, _high, label) in enumerate(FRES_TABLE):
        if value >= low:
            return idx, label
    raise AssertionError("unreachable")


def gfi_level(value: float) -> tuple[int, str]:
    grade = min(max(round_half_up(value), 6), 17)
    idx = 17 - grade
    return idx, GFI_TABLE[idx][1]


def smog_level(value: float) -> tuple[int, str]:
    if value < SMOG_TABLE[0][0]:
        return -1, OUT_OF_RANGE
    grade = math.floor(value)
    idx = max(i for i, (low, _) in enumerate(SMOG_TABLE) if grade >= low)
    return idx, SMOG_TABLE[idx][1]


def ari_level(value: float) -> tuple[int, str]:
    row = min(max(math.ceil(value), 1), 14)
    return row - 1, ARI_TABLE[row - 1][2]


def atesman_level(value: float) -> tuple[int, str]:
    if not 0.0 <= value <= 100.0:
        return -1, OUT_OF_RANGE
    score = math.floor(value)
    for idx, (low, _high, label) in enumerate(ATESMAN_TABLE):
        if score >= low:
            return idx, label
    return len(ATESMAN_TABLE) - 1, ATESMAN_TABLE[-1][2]


def cetinkaya_uzun_level(value: float) -> tuple[int, str]:
    if value < 0.0:
        return -1, OUT_OF_RANGE
    score = math.floor(value)
    idx = max(i for i, (low, _, _) in enumerate(CETINKAYA_UZUN_TABLE) if score >= low)
    return idx, CETINKAYA_UZUN_TABLE[idx][1]


def yod_band(value: float) -> tuple[int, str]:
    if value < 0.0:
        return -1, OUT_OF_RANGE
    score = max(math.floor(value), 1)
    idx = max(i for i, (low, _, _) in enumerate(YOD_TABLE) if score >= low)
    return idx, YOD_TABLE[idx][2]


def fres(stats: TextStats) -> ReadabilityScore:
    value = 206.835 - 1.015 * stats.asl - 84.6 * stats.asw
    idx, label = fres_level(value)
    return ReadabilityScore("fres", value, label, idx)


def gunning_fog(stats: TextStats) -> ReadabilityScore:
    value = 0.4 * (stats.asl + 100.0 * stats.phw)
    idx, label = gfi_level(value)
    return ReadabilityScore("gfi", value, label, idx)


def smog(stats: TextStats) -> ReadabilityScore:
    value = 1.0430 * math.sqrt(stats.polysyllable_count * 30.0 / stats.sentence_count) + 3.1291
    idx, label = smog_level(value)
    return ReadabilityScore("smog", value, label, idx)


def ari(stats: TextStats) -> ReadabilityScore:
    value = 4.71 * stats.awl_chars + 0.5 * stats.asl - 21.43
    idx, label = ari_level(value)
    return ReadabilityScore("ari", value, label, idx)


def atesman(stats: TextStats) -> ReadabilityScore:
    value = 198.825 - 40.175 * stats.asw - 2.610 * stats.asl
    idx, label = atesman_level(value)
    return ReadabilityScore("atesman", value, label, idx)


def cetinkaya_uzun(stats: TextStats) -> ReadabilityScore:
    """Çetinkaya-Uzun score with average word length taken in syllables."""
    value = 118.823 - 25.987 * stats.awl_syllables - 0.971 * stats.asl
    idx, label = cetinkaya_uzun_level(value)
    return ReadabilityScore("cetinkaya_uzun", value, label, idx)


def yod_value(oks: float, h3: float, h4: float, h5: float, h6: float) -> float:
    return math.sqrt(oks * (h3 * 0.84 + h4 * 1.5 + h5 * 3.5 + h6 * 26.25))


def yod(stats: TextStats) -> ReadabilityScore:
    """Bezirci-Yılmaz YOD; only words of three or more syllables contribute."""
    value = yod_value(stats.asl, stats.h3, stats.h4, stats.h5, stats.h6)
    idx, label = yod_band(value)
    return ReadabilityScore("yod", value, label, idx)


def yod_to_level(value: float) -> int:
    """Integer YOD level: round half up, then clamp to 1..16."""
    if value < 0:
        raise ValueError(f"YOD value must be non-negative, got {value}")
    return min(max(round_half_up(value), MIN_YOD_LEVEL), MAX_YOD_LEVEL)


def yod_success(achieved: float, target: float, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    return abs(achieved - target) <= tolerance


def yod_group(level: int) -> int:
    """Index of the education group (0..3) holding an integer YOD level."""
    for idx, (lo, hi, _) in enumerate(YOD_GROUPS):
        if lo <= level <= hi:
            return idx
    raise ValueError(f"YOD level out of range: {level}")


FORMULAS: dict[str, Callable[[TextStats], ReadabilityScore]] = {
    "fres": fres,
    "gfi": gunning_fog,
    "smog": smog,
    "ari": ari,
    "atesman": atesman,
    "cetinkaya_uzun": cetinkaya_uzun,
    "yod": yod,
}

ENGLISH_FORMULAS = frozenset({"fres", "gfi", "smog", "ari"})
TURKISH_FORMULAS = frozenset({"atesman", "cetinkaya_uzun", "yod"})


def score(stats: TextStats, formula: str) -> ReadabilityScore:
    try:
        fn = FORMULAS[formula]
    except KeyError:
        raise ValueError(f"unknown formula {formula!r}; choose from {sorted(FORMULAS)}") from None
    return fn(stats)
