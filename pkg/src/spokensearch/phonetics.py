"""Approximate word matching: Soundex codes and edit-distance similarity."""

from __future__ import annotations

_SOUNDEX_DIGITS = {
    "b": "1", "f": "1", "p": "1", "v": "1",
    "c": "2", "g": "2", "j": "2", "k": "2", "q": "2", "s": "2", "x": "2", "z": "2",
    "d": "3", "t": "3",
    "l": "4",
    "m": "5", "n": "5",
    "r": "6",
}

_TRANSPARENT = {"h", "w"}


def soundex(word: str) -> str:
    """American Soundex code: first letter plus three digits.

    Adjacent letters with the same digit collapse to one; ``h`` and ``w``
    are transparent for that adjacency; vowels reset it.  Raises
    ``ValueError`` if the word contains no letters.
    """
    letters = [ch for ch in word.casefold() if "a" <= ch <= "z"]
    if not letters:
        raise ValueError(f"cannot compute soundex of {word!r}: no letters")
    first = letters[0]
    code = [first.upper()]
    prev = _SOUNDEX_DIGITS.get(first)
    for ch in letters[1:]:
        if ch in _TRANSPARENT:
            continue
        digit = _SOUNDEX_DIGITS.get(ch)
        if digit is None:
            prev = None
            continue
        if digit != prev:
            code.append(digit)
            if len(code) == 4:
                break
        prev = digit
    return "".join(code).ljust(4, "0")


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (unit costs) between two strings."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[-1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """Edit distance rescaled to [0, 1]: 1 − dist / max(len)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _has_letter(word: str) -> bool:
    return any("a" <= ch <= "z" for ch in word.casefold())


def similarity(a: str, b: str) -> float:
    """Spelling-or-sound similarity in [0, 1].

    The normalized edit similarity of the case-folded strings, floored at
    1.0 when the two words share a Soundex code (sound-alikes count as
    fully similar).
    """
    a = a.casefold()
    b = b.casefold()
    sim = levenshtein_similarity(a, b)
    if _has_letter(a) and _has_letter(b) and soundex(a) == soundex(b):
        return 1.0
    return sim
