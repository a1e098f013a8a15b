"""Parser for WordNet 3.x plain-text database files (``index.*`` / ``data.*``).

Only the pieces needed for synonym lookup are read: the sense offsets from
the index files and the synset member words from the data files.  Pointer
symbols, glosses and verb frames are skipped.
"""

from __future__ import annotations

__all__ = ["SynonymDatabase", "WordNetParseError", "parse_wordnet"]

# ss_type 's' (adjective satellite) shares the adjective data file
_POS_ALIASES = {"s": "a"}


class WordNetParseError(ValueError):
    """Raised for malformed or truncated WordNet database files."""

    def __init__(self, path, byte_offset, message):
        self.path = str(path)
        self.byte_offset = byte_offset
        super().__init__(f"{self.path} @ byte {byte_offset}: {message}")


class SynonymDatabase:
    """Lemma -> ordered synonym list, built from parsed index/data files.

    Ordering is deterministic: senses in index-file order, members in
    synset order, duplicates and the lemma itself removed.
    """

    def __init__(self, synonyms):
        self._synonyms = dict(synonyms)
        for lemma, syns in self._synonyms.items():
            if lemma in syns:
                raise ValueError(f"lemma {lemma!r} maps to itself")

    def synonyms(self, lemma: str) -> tuple[str, ...]:
        """Synonyms of ``lemma`` (underscores for spaces), empty if unknown."""
        return self._synonyms.get(lemma.lower().replace(" ", "_"), ())

    def lemmas(self) -> tuple[str, ...]:
        return tuple(sorted(self._synonyms))

    def __len__(self):
        return len(self._synonyms)


def _iter_lines(path):
    """Yield (byte_offset, text) per line, skipping the license header lines
    that WordNet marks with leading spaces."""
    with open(path, "rb") as fh:
        blob = fh.read()
    offset = 0
    for raw in blob.splitlines(keepends=True):
        stripped = raw.rstrip(b"\r\n")
        if stripped and not stripped.startswith(b" "):
            try:
                yield offset, stripped.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise WordNetParseError(path, offset, f"undecodable line: {exc}")
        offset += len(raw)


def _clean_word(word):
    # data-file words may carry an adjective position marker, e.g. "galore(ip)"
    marker = word.find("(")
    if marker >= 0:
        word = word[:marker]
    return word.lower()


def _parse_data_file(path):
    """Return {synset_offset: (member, ...)} plus the ss_type keys seen."""
    synsets = {}
    pos_seen = set()
    for byte_offset, line in _iter_lines(path):
        fields = line.split()
        if len(fields) < 4:
            raise WordNetParseError(path, byte_offset, "truncated synset line")
        try:
            synset_offset = int(fields[0])
        except ValueError:
            raise WordNetParseError(path, byte_offset, f"malformed synset offset {fields[0]!r}")
        ss_type = fields[2]
        pos_seen.add(_POS_ALIASES.get(ss_type, ss_type))
        try:
            w_cnt = int(fields[3], 16)
        except ValueError:
            raise WordNetParseError(path, byte_offset, f"malformed word count {fields[3]!r}")
        if w_cnt < 1 or len(fields) < 4 + 2 * w_cnt:
            raise WordNetParseError(path, byte_offset, "truncated word list")
        members = tuple(_clean_word(fields[4 + 2 * i]) for i in range(w_cnt))
        synsets[synset_offset] = members
    return synsets, pos_seen


def _parse_index_file(path):
    """Yield (byte_offset, lemma, pos, sense_offsets) per index entry."""
    for byte_offset, line in _iter_lines(path):
        fields = line.split()
        if len(fields) < 4:
            raise WordNetParseError(path, byte_offset, "truncated index line")
        lemma = fields[0].lower()
        pos = _POS_ALIASES.get(fields[1], fields[1])
        try:
            synset_cnt = int(fields[2])
            p_cnt = int(fields[3])
        except ValueError:
            raise WordNetParseError(path, byte_offset, "malformed sense/pointer count")
        tail = fields[4 + p_cnt :]
        # tail = sense_cnt tagsense_cnt followed by synset_cnt offsets
        if len(tail) < 2 + synset_cnt:
            raise WordNetParseError(path, byte_offset, "truncated index line")
        try:
            offsets = tuple(int(off) for off in tail[2 : 2 + synset_cnt])
        except ValueError:
            raise WordNetParseError(path, byte_offset, "malformed synset offset")
        yield byte_offset, lemma, pos, offsets


def parse_wordnet(index_files, data_files) -> SynonymDatabase:
    """Build a :class:`SynonymDatabase` from WordNet index and data files.

    ``index_files`` and ``data_files`` are sequences of paths; their order
    fixes the sense order for lemmas listed in more than one index.
    """
    synsets_by_pos = {}
    for path in data_files:
        synsets, pos_seen = _parse_data_file(path)
        for pos in pos_seen:
            synsets_by_pos.setdefault(pos, {}).update(synsets)

    synonyms: dict[str, list[str]] = {}
    for path in index_files:
        for byte_offset, lemma, pos, offsets in _parse_index_file(path):
            table = synsets_by_pos.get(pos, {})
            acc = synonyms.setdefault(lemma, [])
            for off in offsets:
                if off not in table:
                    raise WordNetParseError(
                        path, byte_offset, f"synset offset {off} not found in any data file for pos {pos!r}"
                    )
                for member in table[off]:
                    if member != lemma and member not in acc:
                        acc.append(member)
    return SynonymDatabase({lemma: tuple(syns) for lemma, syns in synonyms.items()})
