"""Probabilistic ranking of documents against confidence-weighted queries.

Scoring is Okapi BM25 with the positive (+1 inside the log) idf variant,
multiplied per term by the recognizer's confidence in that word, so a
dubiously recognized word contributes proportionally less.  Relevance
feedback boosts confidences of confirmed words, expands the query, and
flags query words that look misrecognized: absent from every relevant
document while a similarly spelled or sounding word is present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .corpus import InvertedIndex
from .phonetics import similarity

TYPED = "typed"
SPOKEN_SIMULATED = "spoken-simulated"
FEEDBACK_REFINED = "feedback-refined"


class DocumentNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class QueryTerm:
    term: str
    surface: str
    weight: float = 1.0
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.weight < 0.0:
            raise ValueError(f"negative weight {self.weight}")


@dataclass(frozen=True)
class WeightedQuery:
    terms: tuple[QueryTerm, ...]
    origin: str = TYPED

    def __post_init__(self) -> None:
        if not self.terms and self.origin != TYPED:
            raise ValueError(f"empty query not allowed for origin {self.origin!r}")

    @classmethod
    def from_terms(cls, terms: list[QueryTerm] | tuple[QueryTerm, ...], origin: str = TYPED) -> "WeightedQuery":
        return cls(terms=tuple(terms), origin=origin)

    def term_strings(self) -> set[str]:
        return {t.term for t in self.terms}


@dataclass(frozen=True)
class RankedList:
    """Scored documents, best first; ties broken by ascending doc id."""

    entries: tuple[tuple[str, float], ...]
    threshold: float

    @property
    def surely_relevant(self) -> tuple[tuple[str, float], ...]:
        """Maximal prefix of entries whose score meets the threshold."""
        cut = 0
        for doc_id, score in self.entries:
            if score < self.threshold:
                break
            cut += 1
        return self.entries[:cut]

    @property
    def surely_relevant_count(self) -> int:
        return len(self.surely_relevant)

    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.entries]


@dataclass(frozen=True)
class MisrecognitionSuggestion:
    original: QueryTerm
    candidate: str
    similarity: float
    support: int


@dataclass(frozen=True)
class RankingParams:
    """Knobs for scoring, feedback and misrecognition detection.

    Serializable as flat key-value pairs in the service config file.
    """

    k1: float = 1.2
    b: float = 0.75
    alpha: float = 0.5
    beta: float = 0.5
    k_expansion: int = 5
    sim_threshold: float = 0.75
    default_threshold: float = 0.0

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "b": self.b,
            "alpha": self.alpha,
            "beta": self.beta,
            "k_expansion": self.k_expansion,
            "sim_threshold": self.sim_threshold,
            "default_threshold": self.default_threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankingParams":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        return cls(**known)


def idf(term: str, index: InvertedIndex) -> float:
    df = index.df(term)
    n = index.doc_count
    return math.log((n - df + 0.5) / (df + 0.5) + 1.0)


def _tf_saturation(tf: int, doc_length: int, index: InvertedIndex, params: RankingParams) -> float:
    ratio = doc_length / index.avg_doc_length if index.avg_doc_length > 0 else 0.0
    return tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * ratio))


def score(
    query: WeightedQuery,
    doc_id: str,
    index: InvertedIndex,
    params: RankingParams = RankingParams(),
) -> float:
    """Estimated-relevance score of one document for the query.

    Each query term contributes confidence × weight × idf × saturated tf;
    terms outside the index vocabulary contribute nothing.
    """
    if doc_id not in index:
        raise DocumentNotFoundError(doc_id)
    doc_length = index.doc_lengths[doc_id]
    total = 0.0
    for qt in query.terms:
        tf = index.tf(qt.term, doc_id)
        if tf == 0:
            continue
        total += qt.confidence * qt.weight * idf(qt.term, index) * _tf_saturation(
            tf, doc_length, index, params
        )
    return total


def rank(
    query: WeightedQuery,
    index: InvertedIndex,
    params: RankingParams = RankingParams(),
    threshold: float | None = None,
) -> RankedList:
    """Rank every document with a positive score, best first."""
    if threshold is None:
        threshold = params.default_threshold
    candidates: set[str] = set()
    for qt in query.terms:
        candidates.update(doc_id for doc_id, _ in index.postings.get(qt.term, ()))
    scored = [
        (doc_id, s)
        for doc_id in candidates
        if (s := score(query, doc_id, index, params)) > 0.0
    ]
    scored.sort(key=lambda entry: (-entry[1], entry[0]))
    return RankedList(entries=tuple(scored), threshold=threshold)


def _marked_occurrence_counts(
    terms: set[str] | None, marked: list[str], index: InvertedIndex
) -> dict[str, int]:
    """How many marked documents contain each term (restricted to ``terms``)."""
    marked_set = set(marked)
    counts: dict[str, int] = {}
    universe = terms if terms is not None else index.postings.keys()
    for term in universe:
        r = sum(1 for doc_id, _ in index.postings.get(term, ()) if doc_id in marked_set)
        if r:
            counts[term] = r
    return counts


def relevance_feedback(
    query: WeightedQuery,
    marked: list[str],
    index: InvertedIndex,
    params: RankingParams = RankingParams(),
) -> WeightedQuery:
    """Refine the query from documents the user marked relevant.

    Confidences of query words found in r marked documents rise to
    1 − (1 − confidence)·(1 − alpha)^r; the k_expansion best non-query
    terms by r·idf are appended at weight beta and full confidence.
    """
    if not marked:
        raise ValueError("relevance feedback requires at least one marked document")
    for doc_id in marked:
        if doc_id not in index:
            raise DocumentNotFoundError(doc_id)

    query_terms = query.term_strings()
    counts = _marked_occurrence_counts(None, marked, index)

    boosted: list[QueryTerm] = []
    for qt in query.terms:
        r = counts.get(qt.term, 0)
        if r > 0:
            confidence = 1.0 - (1.0 - qt.confidence) * (1.0 - params.alpha) ** r
            boosted.append(replace(qt, confidence=confidence))
        else:
            boosted.append(qt)

    offers = [
        (r * idf(term, index), term)
        for term, r in counts.items()
        if term not in query_terms
    ]
    offers.sort(key=lambda pair: (-pair[0], pair[1]))
    expansion = [
        QueryTerm(term=term, surface=term, weight=params.beta, confidence=1.0)
        for _, term in offers[: params.k_expansion]
    ]
    return WeightedQuery(terms=tuple(boosted + expansion), origin=FEEDBACK_REFINED)


def detect_misrecognitions(
    query: WeightedQuery,
    marked: list[str],
    index: InvertedIndex,
    sim_threshold: float = 0.75,
) -> list[MisrecognitionSuggestion]:
    """Suggest replacements for query words that look misrecognized.

    A query word absent from every marked document is suspect; every term
    that does occur in a marked document and is similar enough to it
    (edit-distance similarity, or an identical Soundex code) becomes a
    suggestion.  Best-supported, most-similar suggestions come first.
    """
    if not marked:
        raise ValueError("misrecognition detection requires at least one marked document")
    counts = _marked_occurrence_counts(None, marked, index)
    query_terms = query.term_strings()

    suggestions: list[MisrecognitionSuggestion] = []
    for qt in query.terms:
        if qt.term in counts:
            continue
        word = qt.surface or qt.term
        for candidate, support in counts.items():
            if candidate in query_terms:
                continue
            sim = similarity(word, candidate)
            if sim >= sim_threshold:
                suggestions.append(
                    MisrecognitionSuggestion(
                        original=qt, candidate=candidate, similarity=sim, support=support
                    )
                )
    suggestions.sort(
        key=lambda s: (-s.support, -s.similarity, s.candidate, s.original.term)
    )
    return suggestions
