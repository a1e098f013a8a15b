"""Labeling walkthrough: raw clinical records -> merged patients ->
per-patient term rates -> threshold rule -> binary analysis dataset.

Run: python demos/02_labeling_pipeline.py
"""

import tempfile
from importlib import resources
from pathlib import Path

from testinj import build_patients, label_patients, load_base_lexicon, read_records
from testinj.labeling import CATEGORY_COLUMNS, ThresholdPolicy
from testinj.lexicon import TermCategory

RECORDS = """patient_id,gender,ethnicity,age,diagnosis,note_text
101,F,BLACK/AFRICAN AMERICAN,67,sepsis,"Patient complains of pain. Apparently adamant about leaving."
101,F,BLACK/AFRICAN AMERICAN,67,sepsis,"Combative overnight. Refuses meds."
102,M,WHITE,45,bronchitis,"Reports wheezing. States improvement."
103,F,HISPANIC OR LATINO,12,asthma,"Tells me she feels fine. Notes taken."
104,M,ASIAN - CHINESE,80,sepsis,"Quiet night. No events."
105,F,WHITE,33,migraine,"Insists on imaging. Exaggerates symptoms blatantly."
106,M,UNKNOWN/NOT SPECIFIED,50,sepsis,"dropped: ethnicity cannot be coded"
107,M,WHITE,0.5,NEWBORN,"dropped: newborn-only diagnosis"
"""


def main():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "records.csv"
        path.write_text(RECORDS)
        records = read_records(path)
    print(f"{len(records)} raw records")

    patients = build_patients(records)
    print(f"{len(patients)} patients after race coding, newborn filtering and merging:")
    for p in patients:
        print(
            f"  id={p.patient_id} {p.gender}/{p.race.value}/{p.age_group.value} "
            f"dx={p.diagnosis!r} records={p.record_count}"
        )

    with resources.files("testinj.data").joinpath("base_lexicon.tsv").open("r") as fh:
        lexicon = load_base_lexicon(fh)

    result = label_patients(patients, lexicon, ThresholdPolicy("percentile90", 0.10))
    print("\nper-patient rates (terms per record):")
    for pr in result.rates:
        rates = ", ".join(f"{CATEGORY_COLUMNS[c]}={pr.rate(c):.2f}" for c in TermCategory)
        print(f"  id={pr.patient.patient_id}: {rates}")

    print("\nthresholds (10% of the nearest-rank 90th percentile):")
    for c in TermCategory:
        print(f"  {CATEGORY_COLUMNS[c]}: {result.thresholds[c]:.3f}")

    print("\nbinary dataset:")
    print("  " + ",".join(result.dataset.columns))
    for row in result.dataset.values:
        print("  " + ",".join(str(int(v)) for v in row))


if __name__ == "__main__":
    main()
