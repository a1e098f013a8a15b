"""Per-patient unjust-term rates, population thresholds, and assembly of the
binary analysis dataset.

A patient's rate in a category is the total term count over their notes
divided by their record count, so long ICU stays do not weigh more than
short ones.  A category indicator fires when the rate strictly exceeds the
population threshold: by default 10% of the nearest-rank 90th percentile of
per-patient rates (10% of the maximum as the alternative policy).  The
outcome is the disjunction of the four indicators; a conjunction variant is
available behind ``outcome_combination="and"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .corpus import AgeGroup, Patient, Race
from .dataset import BinaryDataset
from .lexicon import Lexicon, TermCategory, count_matches

__all__ = [
    "CATEGORY_COLUMNS",
    "COARSE_FLAG",
    "FINE_FLAGS",
    "OUTCOME_COLUMN",
    "LabelingResult",
    "PatientRates",
    "ThresholdPolicy",
    "binarize_demographics",
    "build_dataset",
    "category_threshold",
    "coarse_marginalization",
    "coarsen",
    "compute_rates",
    "label_patients",
]

FINE_FLAGS = ("is_marginalized_gender", "is_marginalized_race", "is_marginalized_age")
COARSE_FLAG = "is_marginalized"
OUTCOME_COLUMN = "is_testinj"
CATEGORY_COLUMNS = {
    TermCategory.EVIDENTIAL: "evidentials",
    TermCategory.JUDGEMENTAL: "judgementals",
    TermCategory.NEGATIVE: "negatives",
    TermCategory.STIGMATIZING: "stigmatizing",
}

MARGINALIZED_RACES = frozenset({Race.BLACK, Race.LATINO})


@dataclass(frozen=True)
class ThresholdPolicy:
    """mode is "percentile90" or "maximum"; fraction defaults to 0.10."""

    mode: str = "percentile90"
    fraction: float = 0.10

    def __post_init__(self):
        if self.mode not in ("percentile90", "maximum"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        if not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")


@dataclass(frozen=True)
class PatientRates:
    patient: Patient
    rates: dict  # TermCategory -> terms per record

    def rate(self, category: TermCategory) -> float:
        return self.rates[category]


def compute_rates(patient: Patient, lexicon: Lexicon) -> PatientRates:
    """Average term count per record, per category."""
    totals = {c: 0 for c in TermCategory}
    for note in patient.notes:
        counts = count_matches(note, lexicon)
        for category in TermCategory:
            totals[category] += counts[category]
    rates = {c: totals[c] / patient.record_count for c in TermCategory}
    return PatientRates(patient=patient, rates=rates)


def nearest_rank_percentile(values, q: float) -> float:
    """Nearest-rank percentile: the ceil(q*n)-th smallest value."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("empty population")
    rank = math.ceil(q * len(ordered))
    return ordered[max(rank, 1) - 1]


def category_threshold(all_rates, category: TermCategory, policy: ThresholdPolicy) -> float:
    """Population threshold (terms/record) for one category."""
    values = [pr.rate(category) for pr in all_rates]
    if not values:
        raise ValueError("empty population")
    if policy.mode == "percentile90":
        return policy.fraction * nearest_rank_percentile(values, 0.90)
    return policy.fraction * max(values)


def binarize_demographics(patient: Patient) -> tuple[int, int, int]:
    """(gender, race, age) marginalization flags.

    Female -> 1; black or latino -> 1 (asian and white -> 0); child or
    senior -> 1.
    """
    gender_flag = int(patient.gender == "female")
    race_flag = int(patient.race in MARGINALIZED_RACES)
    age_flag = int(patient.age_group in (AgeGroup.CHILD, AgeGroup.SENIOR))
    return gender_flag, race_flag, age_flag


def coarse_marginalization(flags) -> int:
    """Single coarse flag: the OR of the three fine flags."""
    return int(any(flags))


@dataclass(frozen=True)
class LabelingResult:
    dataset: BinaryDataset
    thresholds: dict  # TermCategory -> float
    rates: tuple  # PatientRates per row

    def thresholds_json(self) -> str:
        payload = {CATEGORY_COLUMNS[c]: self.thresholds[c] for c in TermCategory}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def label_patients(
    patients,
    lexicon: Lexicon,
    policy: ThresholdPolicy = ThresholdPolicy(),
    granularity: str = "fine",
    outcome_combination: str = "or",
) -> LabelingResult:
    """Full labeling pipeline: rates -> thresholds -> binary dataset."""
    patients = list(patients)
    if not patients:
        raise ValueError("empty population")
    if granularity not in ("fine", "coarse"):
        raise ValueError(f"unknown granularity {granularity!r}")
    if outcome_combination not in ("or", "and"):
        raise ValueError(f"unknown outcome combination {outcome_combination!r}")

    all_rates = [compute_rates(p, lexicon) for p in patients]
    thresholds = {c: category_threshold(all_rates, c, policy) for c in TermCategory}

    rows = []
    for pr in all_rates:
        flags = binarize_demographics(pr.patient)
        indicators = [int(pr.rate(c) > thresholds[c]) for c in TermCategory]
        combine = any if outcome_combination == "or" else all
        outcome = int(combine(indicators))
        if granularity == "fine":
            rows.append([*flags, *indicators, outcome])
        else:
            rows.append([coarse_marginalization(flags), *indicators, outcome])

    demo_cols = FINE_FLAGS if granularity == "fine" else (COARSE_FLAG,)
    columns = (*demo_cols, *(CATEGORY_COLUMNS[c] for c in TermCategory), OUTCOME_COLUMN)
    dataset = BinaryDataset(columns, np.array(rows, dtype=np.uint8))
    return LabelingResult(dataset=dataset, thresholds=thresholds, rates=tuple(all_rates))


def build_dataset(
    patients,
    lexicon: Lexicon,
    policy: ThresholdPolicy = ThresholdPolicy(),
    granularity: str = "fine",
    outcome_combination: str = "or",
) -> BinaryDataset:
    return label_patients(patients, lexicon, policy, granularity, outcome_combination).dataset


def coarsen(dataset: BinaryDataset, flag_columns, name: str = COARSE_FLAG) -> BinaryDataset:
    """Replace ``flag_columns`` by their row-wise OR under ``name``,
    keeping every other column."""
    flag_columns = tuple(flag_columns)
    merged = np.zeros(dataset.n, dtype=np.uint8)
    for col in flag_columns:
        merged |= dataset.column(col)
    columns = {}
    inserted = False
    for col in dataset.columns:
        if col in flag_columns:
            if not inserted:
                columns[name] = merged
                inserted = True
            continue
        columns[col] = dataset.column(col)
    if not inserted:
        raise ValueError(f"none of {flag_columns} present in dataset")
    return BinaryDataset.from_columns(columns)


def rates_csv_lines(result: LabelingResult):
    """Diagnostic per-patient rate rows as CSV text lines."""
    import csv
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["patient_id", "gender", "race", "diagnosis", "age_group", "record_count"]
    header += [CATEGORY_COLUMNS[c] for c in TermCategory]
    writer.writerow(header)
    for pr in result.rates:
        p = pr.patient
        writer.writerow(
            [p.patient_id, p.gender, p.race.value, p.diagnosis, p.age_group.value, p.record_count]
            + [repr(pr.rate(c)) for c in TermCategory]
        )
    return buffer.getvalue().splitlines()
