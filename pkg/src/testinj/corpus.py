"""Clinical-record ingestion: CSV reading, ethnicity-to-race coding, age
grouping, newborn filtering, and merging of multi-visit records into
patients keyed by (patient id, gender, race, diagnosis).

Age is deliberately left out of the merge key; a patient returning at 64
and 65 for the same diagnosis stays a single patient, grouped by the age
of their first retained record.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "AgeGroup",
    "CorpusError",
    "Patient",
    "Race",
    "RawRecord",
    "age_group",
    "code_race",
    "filter_records",
    "load_race_prefixes",
    "merge_patients",
    "read_manifest",
    "read_records",
]

REQUIRED_COLUMNS = ("patient_id", "gender", "ethnicity", "age", "diagnosis", "note_text")

NEWBORN_DIAGNOSIS = "newborn"


class CorpusError(ValueError):
    """Raised for malformed input records or record files."""


class Race(enum.Enum):
    ASIAN = "asian"
    BLACK = "black"
    LATINO = "latino"
    WHITE = "white"


class AgeGroup(enum.Enum):
    CHILD = "child"
    ADULT = "adult"
    SENIOR = "senior"


@dataclass(frozen=True)
class RawRecord:
    patient_id: str
    gender: str
    ethnicity: str
    age_years: float
    diagnosis: str
    note_text: str

    def __post_init__(self):
        if not self.patient_id:
            raise CorpusError("record with empty patient_id")


@dataclass(frozen=True)
class Patient:
    patient_id: str
    gender: str
    race: Race
    diagnosis: str
    age_group: AgeGroup
    notes: tuple[str, ...]

    @property
    def record_count(self) -> int:
        return len(self.notes)


def load_race_prefixes(path=None) -> tuple[tuple[str, Race], ...]:
    """Read a ``prefix<TAB>race`` coding table; defaults to the packaged one."""
    if path is None:
        text = resources.files("testinj.data").joinpath("race_prefixes.tsv").read_text("utf-8")
        name = "race_prefixes.tsv"
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        name = str(path)
    by_value = {r.value: r for r in Race}
    prefixes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1].strip().lower() not in by_value:
            raise CorpusError(f"{name}:{lineno}: expected 'prefix<TAB>race', got {line!r}")
        prefixes.append((parts[0].strip().lower(), by_value[parts[1].strip().lower()]))
    if not prefixes:
        raise CorpusError(f"{name}: no prefixes defined")
    return tuple(prefixes)


_DEFAULT_PREFIXES = None


def _default_prefixes():
    global _DEFAULT_PREFIXES
    if _DEFAULT_PREFIXES is None:
        _DEFAULT_PREFIXES = load_race_prefixes()
    return _DEFAULT_PREFIXES


def code_race(ethnicity: str, prefixes=None) -> Race | None:
    """Map a raw ethnicity string to one of the four races, or None.

    Case-insensitive prefix match ("Asian - VIETNAMESE" codes as asian);
    unknown/not-specified, multi-race, declined-to-answer and every other
    unmatched string code to None, meaning the record is excluded.
    """
    if prefixes is None:
        prefixes = _default_prefixes()
    needle = ethnicity.strip().lower()
    for prefix, race in prefixes:
        if needle.startswith(prefix):
            return race
    return None


def age_group(age_years: float) -> AgeGroup:
    """Child (<= 15), adult (16-64), senior (>= 65); raises on negative age."""
    if age_years < 0:
        raise CorpusError(f"negative age {age_years!r}")
    if age_years <= 15:
        return AgeGroup.CHILD
    if age_years < 65:
        return AgeGroup.ADULT
    return AgeGroup.SENIOR


def normalize_gender(gender: str) -> str:
    g = gender.strip().lower()
    if g in ("f", "female"):
        return "female"
    if g in ("m", "male"):
        return "male"
    return g


def filter_records(records, prefixes=None) -> list[RawRecord]:
    """Drop records with uncodable race, then drop every record of patients
    whose only diagnosis is "newborn".  Input order is preserved."""
    if prefixes is None:
        prefixes = _default_prefixes()
    coded = [r for r in records if code_race(r.ethnicity, prefixes) is not None]
    diagnoses_by_patient: dict[str, set[str]] = {}
    for record in coded:
        diagnoses_by_patient.setdefault(record.patient_id, set()).add(record.diagnosis.strip().lower())
    return [
        r
        for r in coded
        if diagnoses_by_patient[r.patient_id] != {NEWBORN_DIAGNOSIS}
    ]


def merge_patients(records, prefixes=None) -> list[Patient]:
    """Group filtered records by (patient id, gender, race, diagnosis).

    Notes are concatenated in input order; the age group is the first
    retained record's.  Patients come out in first-appearance order.
    """
    if prefixes is None:
        prefixes = _default_prefixes()
    groups: dict[tuple, dict] = {}
    for record in records:
        race = code_race(record.ethnicity, prefixes)
        if race is None:
            raise CorpusError(
                f"unfiltered record with uncodable ethnicity {record.ethnicity!r}; run filter_records first"
            )
        key = (record.patient_id, normalize_gender(record.gender), race, record.diagnosis.strip())
        group = groups.get(key)
        if group is None:
            groups[key] = {"age_group": age_group(record.age_years), "notes": [record.note_text]}
        else:
            group["notes"].append(record.note_text)
    return [
        Patient(
            patient_id=key[0],
            gender=key[1],
            race=key[2],
            diagnosis=key[3],
            age_group=group["age_group"],
            notes=tuple(group["notes"]),
        )
        for key, group in groups.items()
    ]


def build_patients(records, prefixes=None) -> list[Patient]:
    return merge_patients(filter_records(records, prefixes), prefixes)


def read_records(path) -> list[RawRecord]:
    """Read one RFC 4180 CSV of raw records (header row required)."""
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CorpusError(f"{path}: empty file")
        fields = {name.strip().lower(): name for name in reader.fieldnames}
        missing = [c for c in REQUIRED_COLUMNS if c not in fields]
        if missing:
            raise CorpusError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            try:
                age = float(row[fields["age"]])
            except (TypeError, ValueError):
                raise CorpusError(f"{path}:{lineno}: malformed age {row.get(fields['age'])!r}")
            if age < 0:
                raise CorpusError(f"{path}:{lineno}: negative age {age}")
            pid = (row[fields["patient_id"]] or "").strip()
            if not pid:
                raise CorpusError(f"{path}:{lineno}: empty patient_id")
            records.append(
                RawRecord(
                    patient_id=pid,
                    gender=row[fields["gender"]] or "",
                    ethnicity=row[fields["ethnicity"]] or "",
                    age_years=age,
                    diagnosis=row[fields["diagnosis"]] or "",
                    note_text=row[fields["note_text"]] or "",
                )
            )
    if not records:
        raise CorpusError(f"{path}: no records")
    return records


def read_manifest(path) -> list:
    """A manifest is a text file listing record CSVs, one path per line,
    resolved relative to the manifest's directory."""
    import os

    base = os.path.dirname(os.path.abspath(path))
    paths = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                paths.append(line if os.path.isabs(line) else os.path.join(base, line))
    if not paths:
        raise CorpusError(f"{path}: empty manifest")
    return paths
