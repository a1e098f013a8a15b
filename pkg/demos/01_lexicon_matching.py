"""Lexicon walkthrough: load the base unjust-term lexicon, expand it with
stems and synonyms from WordNet-format files, and count category matches in
note text.

Run: python demos/01_lexicon_matching.py
"""

import tempfile
from importlib import resources
from pathlib import Path

from testinj import count_matches, expand_lexicon, load_base_lexicon, parse_wordnet, stem
from testinj.lexicon import TermCategory

# A tiny WordNet-format corpus (index.* / data.*) built on the fly.  Real
# WordNet 3.x files drop in the same way: parse_wordnet(index_files, data_files).
DATA_VERB = """\
00000000 00 v 03 fake 0 forge 0 counterfeit 0 000 | make a copy with intent to deceive
00000090 00 v 03 refuse 0 decline 0 turn_down 0 000 | show unwillingness
00000180 00 v 02 complain 0 kvetch 0 000 | express complaints
"""
INDEX_VERB = """\
complain v 1 0 1 0 00000180
counterfeit v 1 0 1 0 00000000
decline v 1 0 1 0 00000090
fake v 1 0 1 0 00000000
forge v 1 0 1 0 00000000
kvetch v 1 0 1 0 00000180
refuse v 1 0 1 0 00000090
turn_down v 1 0 1 0 00000090
"""

NOTES = [
    "Patient complains of pain. She insists the pain is real; reports no nausea.",
    "Combative overnight; non-compliant with meds.",
    "They complain about everything.",  # caught only once stems are added
    "Patient may forge signatures.",  # caught only via the synonym of "fake"
    "Pt refuses PT, in denial about substance abuse.",
]


def show(lexicon, label):
    print(f"--- matches against the {label} lexicon ---")
    for note in NOTES:
        counts = count_matches(note, lexicon)
        summary = ", ".join(f"{c.value}={counts[c]}" for c in TermCategory if counts[c])
        print(f"  {note!r:75s} -> {summary or 'no matches'}")
    print()


def main():
    with resources.files("testinj.data").joinpath("base_lexicon.tsv").open("r") as fh:
        base = load_base_lexicon(fh)
    sizes = {c.value: n for c, n in base.size().items()}
    print(f"base lexicon sizes: {sizes}")
    print(f"Porter stems: complains -> {stem('complains')}, faking -> {stem('faking')}\n")

    show(base, "base")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        (tmp / "data.verb").write_text(DATA_VERB)
        (tmp / "index.verb").write_text(INDEX_VERB)
        synonyms = parse_wordnet([tmp / "index.verb"], [tmp / "data.verb"])
    print(f"synonyms('fake') = {synonyms.synonyms('fake')}")

    expanded = expand_lexicon(base, synonyms)
    grown = {c.value: len(expanded.terms(c)) - len(base.terms(c)) for c in TermCategory}
    print(f"terms added per category by expansion: {grown}\n")
    show(expanded, "expanded")


if __name__ == "__main__":
    main()
