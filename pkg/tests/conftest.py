import pytest

from testinj.corpus import AgeGroup, Patient, Race
from testinj.lexicon import load_base_lexicon

from importlib import resources


@pytest.fixture(scope="session")
def base_lexicon():
    with resources.files("testinj.data").joinpath("base_lexicon.tsv").open("r", encoding="utf-8") as fh:
        return load_base_lexicon(fh)


# A small but format-faithful WordNet corpus.  Offsets are the byte offsets
# of the data lines, as in the real files.
_WN_LICENSE = "  1 This is a fixture header line that parsers must skip.\n"


def _data_file(lines):
    # the 8-digit offset field has fixed width, so one pass suffices
    out_lines = [_WN_LICENSE]
    offsets = []
    offset = len(_WN_LICENSE.encode())
    for members, gloss in lines:
        body = f"{offset:08d} 00 {{ss}} {len(members):02x} "
        body += " ".join(f"{m} 0" for m in members)
        body += f" 000 | {gloss}\n"
        offsets.append(offset)
        offset += len(body.encode())
        out_lines.append(body)
    return out_lines, offsets


def write_wordnet_fixture(directory, synsets_by_pos):
    """synsets_by_pos: {"noun": [([members...], gloss), ...], ...}.

    Builds index.* and data.* files; every member of a synset gets an index
    entry listing all synsets (of that pos) it belongs to, in file order.
    """
    ss_type = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}
    for pos, synsets in synsets_by_pos.items():
        lines, offsets = _data_file(synsets)
        data_text = "".join(line.replace("{ss}", ss_type[pos]) for line in lines)
        (directory / f"data.{pos}").write_text(data_text, encoding="utf-8")
        entries = {}
        for (members, _gloss), offset in zip(synsets, offsets):
            for member in members:
                entries.setdefault(member.lower(), []).append(offset)
        index_lines = [_WN_LICENSE]
        for lemma in sorted(entries):
            offs = entries[lemma]
            index_lines.append(
                f"{lemma} {ss_type[pos]} {len(offs)} 0 {len(offs)} 0 "
                + " ".join(f"{o:08d}" for o in offs)
                + "\n"
            )
        (directory / f"index.{pos}").write_text("".join(index_lines), encoding="utf-8")
    index_files = [directory / f"index.{p}" for p in ("noun", "verb", "adj", "adv") if (directory / f"index.{p}").exists()]
    data_files = [directory / f"data.{p}" for p in ("noun", "verb", "adj", "adv") if (directory / f"data.{p}").exists()]
    return index_files, data_files


@pytest.fixture()
def wordnet_dir(tmp_path):
    directory = tmp_path / "wn"
    directory.mkdir()
    write_wordnet_fixture(
        directory,
        {
            "noun": [
                (["dog", "domestic_dog"], "a member of the genus Canis"),
                (["cheat", "chiseller", "gouger"], "someone who leads you to believe something untrue"),
                (["user", "exploiter"], "a person who takes advantage of others"),
                (["habit", "wont"], "an established custom"),
            ],
            "verb": [
                (["fake", "forge", "counterfeit"], "make a copy with intent to deceive"),
                (["fake", "talk_through_one's_hat"], "speak insincerely"),
                (["refuse", "decline", "turn_down", "pass_up"], "show unwillingness towards"),
                (["complain", "kick", "sound_off", "kvetch"], "express complaints"),
                (["insist", "take_a_firm_stand"], "be unyielding"),
            ],
            "adj": [
                (["combative", "pugnacious"], "ready to fight"),
                (["unwilling"], "not disposed"),
            ],
        },
    )
    return directory


def make_patient(
    patient_id="p1",
    gender="female",
    race=Race.BLACK,
    diagnosis="sepsis",
    age_group=AgeGroup.ADULT,
    notes=("",),
):
    return Patient(
        patient_id=patient_id,
        gender=gender,
        race=race,
        diagnosis=diagnosis,
        age_group=age_group,
        notes=tuple(notes),
    )
