"""Tokenization, sentence splitting, and the shared stoplist.

All higher layers (indexing, ranking, summarizing, recognizer simulation)
normalize text through this module so that term statistics line up no
matter which path produced them.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

# Fixed list of ~100 common English function words.  Versioned with the
# package: changing it changes every index built from the same bytes.
DEFAULT_STOPLIST: frozenset[str] = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can did do does doing down
    during each few for from further had has have having he her here hers
    herself him himself his how i if in into is it its itself just me more
    most my myself no nor not now of off on once only or other our ours
    ourselves out over own s same she should so some such t than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why will with you your yours yourself yourselves
    """.split()
)


@dataclass(frozen=True)
class Token:
    """A single word occurrence.

    ``surface`` is the word as written (leading/trailing punctuation
    stripped); ``term`` is the normalized form used for indexing:
    case-folded with all punctuation removed, so "U.S." becomes "us".
    """

    surface: str
    term: str


def normalize_term(chunk: str) -> str:
    """Case-fold and drop every non-alphanumeric character."""
    return "".join(ch for ch in chunk.casefold() if ch.isalnum())


def tokenize(text: str, stoplist: frozenset[str] | None = None) -> list[Token]:
    """Split ``text`` into Tokens in text order.

    Tokens whose normalized term is empty (pure punctuation) are dropped.
    When ``stoplist`` is given, tokens whose term is on it are dropped as
    well; pass ``None`` to keep every word (e.g. for simulating what a
    recognizer hears).
    """
    tokens: list[Token] = []
    for chunk in text.split():
        surface = chunk.strip(string.punctuation)
        if not surface:
            continue
        term = normalize_term(surface)
        if not term:
            continue
        if stoplist is not None and term in stoplist:
            continue
        tokens.append(Token(surface=surface, term=term))
    return tokens


# Tokens that end with "." but do not close a sentence.  Compared after
# case-folding, with interior dots kept ("u.s" covers "U.S.").
ABBREVIATIONS: frozenset[str] = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "rev", "gen", "sen", "rep",
        "st", "jr", "sr", "inc", "ltd", "co", "corp", "vs", "etc",
        "e.g", "i.e", "u.s", "u.k", "u.n", "no", "fig", "vol",
    }
)

_TERMINATORS = ".!?"


def _preceding_word(text: str, dot: int) -> str:
    start = dot
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] == "."):
        start -= 1
    return text[start:dot].casefold()


def split_sentences(text: str) -> list[str]:
    """Split text into sentences, preserving order and losing no words.

    A boundary is a ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter, unless the word before a ``.`` is a known
    abbreviation.  Whitespace runs inside each sentence are collapsed to
    single spaces.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j > i + 1 and j < n and text[j].isupper():
                if not (ch == "." and _preceding_word(text, i) in ABBREVIATIONS):
                    piece = " ".join(text[start : i + 1].split())
                    if piece:
                        sentences.append(piece)
                    start = j
                    i = j
                    continue
        i += 1
    tail = " ".join(text[start:].split())
    if tail:
        sentences.append(tail)
    return sentences
