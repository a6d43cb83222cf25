"""Simulated speech recognition: parametric word corruption, transcript
merging across recognizers, and word-accuracy measurement.

The corruption model recognizes each word correctly with a configurable
probability and otherwise substitutes, deletes, or inserts.  Substitutes
are drawn in proportion to spelling/sound similarity, so confusions look
like real recognizer confusions rather than uniform noise.  Everything is
deterministic given the inputs and a seed.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate

from .phonetics import levenshtein_similarity, soundex
from .text import tokenize


def derive_seed(seed: int, *parts: object) -> int:
    """Stable sub-seed from a base seed and any hashable context parts."""
    key = "/".join(str(p) for p in (seed, *parts))
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _check_interval(name: str, interval: tuple[float, float]) -> None:
    lo, hi = interval
    if not (0.0 <= lo <= hi <= 1.0):
        raise ValueError(f"{name} interval {interval} must satisfy 0 <= lo <= hi <= 1")


@dataclass(frozen=True)
class ErrorModel:
    """Statistical word-recognition error model.

    ``accuracy`` is the probability a word is recognized cleanly;
    ``error_mix`` splits the remaining mass between substitution,
    deletion, and insertion.  Confidences for clean words are drawn
    uniformly from ``conf_correct``, for error-event words from
    ``conf_error``; the intervals overlap on purpose so confidence alone
    never separates them perfectly.
    """

    accuracy: float = 0.8
    error_mix: tuple[float, float, float] = (0.70, 0.20, 0.10)
    conf_correct: tuple[float, float] = (0.7, 1.0)
    conf_error: tuple[float, float] = (0.2, 0.8)
    vocabulary: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy {self.accuracy} outside [0, 1]")
        sub, dele, ins = self.error_mix
        if min(sub, dele, ins) < 0 or abs(sub + dele + ins - 1.0) > 1e-9:
            raise ValueError(f"error_mix {self.error_mix} must be nonnegative and sum to 1")
        _check_interval("conf_correct", self.conf_correct)
        _check_interval("conf_error", self.conf_error)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "error_mix": list(self.error_mix),
            "conf_correct": list(self.conf_correct),
            "conf_error": list(self.conf_error),
            "vocabulary": sorted(self.vocabulary),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ErrorModel":
        kwargs = {}
        for key in ("accuracy",):
            if key in data:
                kwargs[key] = data[key]
        for key in ("error_mix", "conf_correct", "conf_error"):
            if key in data:
                kwargs[key] = tuple(data[key])
        if "vocabulary" in data:
            kwargs["vocabulary"] = frozenset(data["vocabulary"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TranscriptWord:
    """One emitted word.

    ``correct`` is simulation bookkeeping: True only when the word came
    from a clean recognition event.  ``source_index`` points back at the
    spoken word that produced it (None for inserted junk).  Retrieval
    never reads either field.
    """

    surface: str
    confidence: float
    correct: bool
    source_index: int | None


@dataclass(frozen=True)
class Transcript:
    words: tuple[TranscriptWord, ...]
    recognizer_id: str = "rec0"

    def surfaces(self) -> list[str]:
        return [w.surface for w in self.words]


@dataclass(frozen=True)
class MergedWord:
    surface: str
    confidence: float
    agreement: float
    source_index: int | None


@dataclass(frozen=True)
class MergedTranscript:
    words: tuple[MergedWord, ...]
    source_count: int

    def surfaces(self) -> list[str]:
        return [w.surface for w in self.words]


@lru_cache(maxsize=4096)
def _substitution_table(vocab: tuple[str, ...], word: str) -> tuple[tuple[str, ...], tuple[float, ...]]:
    """Candidates and cumulative similarity weights for substituting ``word``."""
    candidates = tuple(v for v in vocab if v != word)
    if not candidates:
        return (word,), (1.0,)
    try:
        code = soundex(word)
    except ValueError:
        code = None
    weights = []
    for cand in candidates:
        w = levenshtein_similarity(word, cand)
        if code is not None:
            try:
                if soundex(cand) == code:
                    w += 1.0
            except ValueError:
                pass
        weights.append(w)
    if sum(weights) <= 0.0:
        weights = [1.0] * len(candidates)
    return candidates, tuple(accumulate(weights))


@lru_cache(maxsize=64)
def _sorted_vocab(vocabulary: frozenset[str]) -> tuple[str, ...]:
    return tuple(sorted(vocabulary))


def corrupt(true_words: list[str], model: ErrorModel, seed: int) -> Transcript:
    """Corrupt a spoken word sequence according to the error model.

    Each word independently draws a clean event with probability
    ``model.accuracy``; otherwise the error type follows ``error_mix``.
    Substitutions pick a vocabulary word in proportion to similarity,
    deletions emit nothing, insertions keep the word and append a
    uniformly drawn vocabulary word.  Deterministic given (inputs, seed).
    """
    if not true_words:
        raise ValueError("cannot corrupt an empty word sequence")
    sub_p, del_p, ins_p = model.error_mix
    vocab = _sorted_vocab(model.vocabulary)
    if not vocab and (model.accuracy < 1.0 and (sub_p > 0 or ins_p > 0)):
        raise ValueError("error model needs a vocabulary to draw substitutions/insertions from")

    rng = random.Random(seed)
    out: list[TranscriptWord] = []
    for i, word in enumerate(true_words):
        if rng.random() < model.accuracy:
            out.append(
                TranscriptWord(word, rng.uniform(*model.conf_correct), True, i)
            )
            continue
        kind = rng.random()
        if kind < sub_p:
            candidates, cum = _substitution_table(vocab, word)
            substitute = rng.choices(candidates, cum_weights=cum)[0]
            out.append(
                TranscriptWord(substitute, rng.uniform(*model.conf_error), False, i)
            )
        elif kind < sub_p + del_p:
            continue
        else:
            out.append(TranscriptWord(word, rng.uniform(*model.conf_error), False, i))
            junk = rng.choice(vocab)
            out.append(TranscriptWord(junk, rng.uniform(*model.conf_error), False, None))
    return Transcript(words=tuple(out), recognizer_id="rec0")


def _match_cost(a: str, b: str) -> float:
    if a == b:
        return 0.0
    try:
        if soundex(a) == soundex(b):
            return 0.5
    except ValueError:
        pass
    return 1.0


_GAP = 1.0


def _align(column_surfaces: list[str], words: list[str]) -> list[tuple[int | None, int | None]]:
    """Minimal-cost word alignment; returns (column_index, word_index) ops.

    Ties prefer diagonal moves, then skipping a column, so the trace is
    deterministic.
    """
    m, k = len(column_surfaces), len(words)
    dp = [[0.0] * (k + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i * _GAP
    for j in range(1, k + 1):
        dp[0][j] = j * _GAP
    for i in range(1, m + 1):
        for j in range(1, k + 1):
            dp[i][j] = min(
                dp[i - 1][j - 1] + _match_cost(column_surfaces[i - 1], words[j - 1]),
                dp[i - 1][j] + _GAP,
                dp[i][j - 1] + _GAP,
            )
    ops: list[tuple[int | None, int | None]] = []
    i, j = m, k
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + _match_cost(
            column_surfaces[i - 1], words[j - 1]
        ):
            ops.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + _GAP:
            ops.append((i - 1, None))
            i -= 1
        else:
            ops.append((None, j - 1))
            j -= 1
    ops.reverse()
    return ops


class _Column:
    __slots__ = ("votes",)

    def __init__(self) -> None:
        # recognizer index -> emitted word
        self.votes: dict[int, TranscriptWord] = {}

    def winner(self) -> tuple[str, list[int]]:
        by_surface: dict[str, list[int]] = {}
        for rec, word in self.votes.items():
            by_surface.setdefault(word.surface, []).append(rec)
        ranked = sorted(
            by_surface.items(),
            key=lambda item: (
                -len(item[1]),
                -sum(self.votes[rec].confidence for rec in item[1]),
                item[0],
            ),
        )
        surface, recs = ranked[0]
        return surface, sorted(recs)

    def consensus_surface(self) -> str:
        return self.winner()[0]


def merge_transcripts(transcripts: list[Transcript]) -> MergedTranscript:
    """Merge recognizer outputs by progressive alignment and voting.

    The first transcript seeds the column sequence; each later transcript
    is aligned against the current columns (exact surface matches first,
    then Soundex matches), adding new columns for its insertions.  At each
    column the plurality surface wins, ties resolved by summed confidence
    then lexicographically; columns where most recognizers emitted nothing
    are dropped.  The winner's combined confidence is the sum of its
    voters' confidences divided by the recognizer count.
    """
    n = len(transcripts)
    if n == 0:
        raise ValueError("cannot merge zero transcripts")

    columns: list[_Column] = []
    for word in transcripts[0].words:
        col = _Column()
        col.votes[0] = word
        columns.append(col)

    for rec in range(1, n):
        words = list(transcripts[rec].words)
        ops = _align([c.consensus_surface() for c in columns], [w.surface for w in words])
        rebuilt: list[_Column] = []
        for col_idx, word_idx in ops:
            if col_idx is not None and word_idx is not None:
                col = columns[col_idx]
                col.votes[rec] = words[word_idx]
                rebuilt.append(col)
            elif col_idx is not None:
                rebuilt.append(columns[col_idx])
            else:
                col = _Column()
                col.votes[rec] = words[word_idx]
                rebuilt.append(col)
        columns = rebuilt

    merged: list[MergedWord] = []
    for col in columns:
        emitted = len(col.votes)
        if 2 * emitted < n:
            continue
        surface, voters = col.winner()
        combined = sum(col.votes[rec].confidence for rec in voters) / n
        source_index = col.votes[voters[0]].source_index
        merged.append(
            MergedWord(
                surface=surface,
                confidence=combined,
                agreement=len(voters) / n,
                source_index=source_index,
            )
        )
    return MergedTranscript(words=tuple(merged), source_count=n)


@dataclass(frozen=True)
class AlignmentCounts:
    """Word-error tally of a hypothesis against a reference."""

    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def wer(self) -> float:
        return (self.substitutions + self.deletions + self.insertions) / self.reference_length

    @property
    def accuracy(self) -> float:
        return 1.0 - self.wer


def word_accuracy(reference: list[str], hypothesis: list[str]) -> tuple[float, AlignmentCounts]:
    """Word error rate via optimal Levenshtein word alignment.

    Returns (wer, counts); wer is reference-normalized so the arguments
    are not interchangeable.
    """
    if not reference:
        raise ValueError("word accuracy needs a nonempty reference")
    m, k = len(reference), len(hypothesis)
    dp = [[0] * (k + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i
    for j in range(1, k + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, k + 1):
            cost = 0 if reference[i - 1] == hypothesis[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j - 1] + cost, dp[i - 1][j] + 1, dp[i][j - 1] + 1)
    subs = dels = ins = 0
    i, j = m, k
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (
            0 if reference[i - 1] == hypothesis[j - 1] else 1
        ):
            if reference[i - 1] != hypothesis[j - 1]:
                subs += 1
            i -= 1
            j -= 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    counts = AlignmentCounts(subs, dels, ins, m)
    return counts.wer, counts


def transcribe_query(
    true_query: str,
    n_recognizers: int,
    model: ErrorModel,
    seed: int,
) -> tuple[MergedTranscript, list[Transcript]]:
    """Simulate ``n_recognizers`` hearing the query, then merge them.

    Each recognizer corrupts the tokenized query with its own sub-seed
    derived from (seed, recognizer index).  Returns the merged transcript
    plus the raw per-recognizer transcripts for inspection.
    """
    if n_recognizers < 1:
        raise ValueError("need at least one recognizer")
    words = [t.term for t in tokenize(true_query, stoplist=None)]
    transcripts = []
    for i in range(n_recognizers):
        raw = corrupt(words, model, derive_seed(seed, i))
        transcripts.append(Transcript(words=raw.words, recognizer_id=f"rec{i}"))
    return merge_transcripts(transcripts), transcripts


def transcript_lines(words) -> str:
    """Serialize (surface, confidence) pairs as `surface TAB confidence` lines."""
    return "\n".join(f"{w.surface}\t{w.confidence:.6f}" for w in words)


def parse_transcript_lines(text: str) -> list[tuple[str, float]]:
    pairs: list[tuple[str, float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            surface, conf = line.split("\t")
            pairs.append((surface, float(conf)))
        except ValueError as exc:
            raise ValueError(f"bad transcript line {lineno}: {line!r}") from exc
    return pairs
