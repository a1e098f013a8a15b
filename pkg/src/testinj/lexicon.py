"""Unjust-term lexicon: four term categories, TSV loading, stem/synonym
expansion, and exact n-gram matching against note text.

Terms are short token sequences (one to three tokens).  Matching is
token-based, never substring-based, so "user" does not fire inside
"abuser"; it is greedy longest-first and non-overlapping within a
category, while different categories may match the same tokens.
"""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass

from .stemming import stem
from .wordnet import SynonymDatabase

__all__ = [
    "LexiconParseError",
    "Term",
    "TermCategory",
    "Lexicon",
    "tokenize",
    "count_matches",
    "expand_lexicon",
    "load_base_lexicon",
    "save_lexicon",
]

MAX_TERM_TOKENS = 3

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")
_SPLIT_RE = re.compile(r"[^a-z0-9-]+")


class LexiconParseError(ValueError):
    """Raised for malformed lexicon source text."""


class TermCategory(enum.Enum):
    """The four unjust-term categories, in stable output order."""

    EVIDENTIAL = "evidential"
    JUDGEMENTAL = "judgemental"
    NEGATIVE = "negative"
    STIGMATIZING = "stigmatizing"


@dataclass(frozen=True, order=True)
class Term:
    """An ordered sequence of 1-3 lowercase tokens."""

    tokens: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= len(self.tokens) <= MAX_TERM_TOKENS:
            raise ValueError(f"term must have 1..{MAX_TERM_TOKENS} tokens: {self.tokens!r}")
        for token in self.tokens:
            if not _TOKEN_RE.fullmatch(token):
                raise ValueError(f"invalid term token {token!r}")

    @classmethod
    def from_text(cls, text: str) -> "Term":
        return cls(tuple(text.split()))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _term_from_lemma(lemma: str) -> Term | None:
    """Turn a synonym lemma (underscores for spaces) into a Term, or None if
    it cannot form a valid one."""
    tokens = tuple(t for t in lemma.lower().split("_") if t)
    if not 1 <= len(tokens) <= MAX_TERM_TOKENS:
        return None
    if any(not _TOKEN_RE.fullmatch(t) for t in tokens):
        return None
    return Term(tokens)


class Lexicon:
    """Immutable mapping from category to a set of terms.

    All four categories are always present; ones not supplied are empty.
    """

    def __init__(self, categories):
        cats = {}
        for category in TermCategory:
            terms = frozenset(categories.get(category, ()))
            if not all(isinstance(t, Term) for t in terms):
                raise TypeError("lexicon entries must be Term instances")
            cats[category] = terms
        self._categories = cats
        # per-category match index: token-tuple set plus descending ngram lengths
        self._index = {}
        for category, terms in cats.items():
            grams = {t.tokens for t in terms}
            lengths = tuple(sorted({len(g) for g in grams}, reverse=True))
            self._index[category] = (lengths, grams)

    @property
    def categories(self):
        return dict(self._categories)

    def terms(self, category: TermCategory) -> frozenset[Term]:
        return self._categories[category]

    def __contains__(self, item):
        term, category = item
        return term in self._categories[category]

    def __eq__(self, other):
        return isinstance(other, Lexicon) and self._categories == other._categories

    def size(self) -> dict[TermCategory, int]:
        return {c: len(t) for c, t in self._categories.items()}


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter, digit or hyphen.

    Hyphens survive inside tokens ("non-compliant" stays whole) but are
    stripped from token edges; empty tokens are dropped.
    """
    out = []
    for part in _SPLIT_RE.split(text.lower()):
        part = part.strip("-")
        if part:
            out.append(part)
    return out


def count_matches(text: str, lexicon: Lexicon) -> dict[TermCategory, int]:
    """Count term occurrences per category in ``text``.

    Each category is matched independently over the token stream with a
    greedy longest-match, left-to-right, non-overlapping scan.
    """
    tokens = tuple(tokenize(text))
    counts = {}
    for category in TermCategory:
        lengths, grams = lexicon._index[category]
        count = 0
        i = 0
        n = len(tokens)
        while i < n:
            for length in lengths:
                if i + length <= n and tokens[i : i + length] in grams:
                    count += 1
                    i += length
                    break
            else:
                i += 1
        counts[category] = count
    return counts


def expand_lexicon(lexicon: Lexicon, synonyms: SynonymDatabase) -> Lexicon:
    """Grow the lexicon with Porter stems and up to five synonyms per term.

    Single-token terms gain their stem plus the first five synonyms from the
    database that can themselves form valid terms.  Multiword terms gain only
    their token-wise stemmed variant.  Original terms are always kept, so the
    result is a superset of the input.
    """
    out = {}
    for category in TermCategory:
        terms = set(lexicon.terms(category))
        for term in sorted(lexicon.terms(category)):
            if len(term.tokens) == 1:
                token = term.tokens[0]
                terms.add(Term((stem(token),)))
                added = 0
                for lemma in synonyms.synonyms(token):
                    candidate = _term_from_lemma(lemma)
                    if candidate is None:
                        continue
                    terms.add(candidate)
                    added += 1
                    if added == 5:
                        break
            else:
                terms.add(Term(tuple(stem(t) for t in term.tokens)))
        out[category] = terms
    return Lexicon(out)


def _open_source(source):
    if hasattr(source, "read"):
        return io.StringIO(source.read()), getattr(source, "name", "<lexicon>")
    return open(source, "r", encoding="utf-8"), str(source)


def load_base_lexicon(source) -> Lexicon:
    """Load a ``category<TAB>term`` lexicon file (``#`` comments allowed).

    Every category must end up non-empty; an empty or malformed source is a
    :class:`LexiconParseError` naming the offending line.
    """
    by_value = {c.value: c for c in TermCategory}
    categories: dict[TermCategory, set[Term]] = {c: set() for c in TermCategory}
    fh, name = _open_source(source)
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconParseError(f"{name}:{lineno}: expected 'category<TAB>term', got {line!r}")
            cat_name, term_text = parts[0].strip().lower(), parts[1].strip().lower()
            if cat_name not in by_value:
                raise LexiconParseError(f"{name}:{lineno}: unknown category {parts[0]!r}")
            try:
                term = Term.from_text(term_text)
            except ValueError as exc:
                raise LexiconParseError(f"{name}:{lineno}: {exc}")
            categories[by_value[cat_name]].add(term)
    for category, terms in categories.items():
        if not terms:
            raise LexiconParseError(f"{name}: category {category.value!r} has no terms")
    return Lexicon(categories)


def save_lexicon(lexicon: Lexicon, path) -> None:
    """Write the TSV form, sorted by (category, term) for reproducible diffs."""
    with open(path, "w", encoding="utf-8") as fh:
        for category in TermCategory:
            for term in sorted(lexicon.terms(category)):
                fh.write(f"{category.value}\t{term.text}\n")
