"""Query-biased sentence-extraction summaries.

Each sentence is scored on title overlap, leading position, within-document
term frequency, and query overlap; the top scorers are emitted in original
order.  Summary length is 15% of the sentence count, capped at five
sentences and floored at one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Document
from .ranking import WeightedQuery
from .text import DEFAULT_STOPLIST, split_sentences, tokenize

__all__ = [
    "SummaryWeights",
    "SentenceScore",
    "Summary",
    "split_sentences",
    "score_sentence",
    "summarize",
    "summary_length",
]

MAX_SENTENCES = 5
LENGTH_FRACTION = 0.15


@dataclass(frozen=True)
class SummaryWeights:
    title: float = 1.0
    location: float = 1.0
    tf: float = 1.0
    query: float = 2.0

    def to_dict(self) -> dict:
        return {"title": self.title, "location": self.location, "tf": self.tf, "query": self.query}

    @classmethod
    def from_dict(cls, data: dict) -> "SummaryWeights":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        return cls(**known)


@dataclass(frozen=True)
class SentenceScore:
    sentence_index: int
    title_score: float
    location_score: float
    tf_score: float
    query_score: float
    total: float


@dataclass(frozen=True)
class Summary:
    doc_id: str
    selected: tuple[int, ...]
    text: str


def summary_length(sentence_count: int) -> int:
    return max(1, min(MAX_SENTENCES, math.ceil(LENGTH_FRACTION * sentence_count)))


def _doc_tf(doc: Document, stoplist: frozenset[str]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for token in doc.body_tokens(stoplist=stoplist):
        counts[token.term] = counts.get(token.term, 0) + 1
    return counts


def score_sentence(
    sentence_index: int,
    doc: Document,
    query: WeightedQuery | None,
    weights: SummaryWeights = SummaryWeights(),
    stoplist: frozenset[str] = DEFAULT_STOPLIST,
    _doc_tf_cache: dict[str, int] | None = None,
) -> SentenceScore:
    """Score one sentence of ``doc`` against the query.

    Components: fraction of title terms present; 1.0 for the first two
    body sentences; mean document-wide tf of the sentence's terms scaled
    by the document's peak tf; and squared query-term overlap divided by
    the query length.
    """
    if not 0 <= sentence_index < len(doc.sentences):
        raise IndexError(f"sentence {sentence_index} not in document {doc.doc_id!r}")
    sentence = doc.sentences[sentence_index]
    tokens = tokenize(sentence, stoplist=stoplist)
    terms = [t.term for t in tokens]
    term_set = set(terms)

    title_terms = {t.term for t in tokenize(doc.title, stoplist=stoplist)}
    title_score = len(term_set & title_terms) / len(title_terms) if title_terms else 0.0

    location_score = 1.0 if sentence_index < 2 else 0.0

    doc_tf = _doc_tf_cache if _doc_tf_cache is not None else _doc_tf(doc, stoplist)
    max_tf = max(doc_tf.values(), default=0)
    if terms and max_tf > 0:
        tf_score = sum(doc_tf.get(t, 0) for t in terms) / (len(terms) * max_tf)
    else:
        tf_score = 0.0

    if query is not None and query.terms:
        present = len({qt.term for qt in query.terms} & term_set)
        query_score = present * present / len(query.terms)
    else:
        query_score = 0.0

    total = (
        weights.title * title_score
        + weights.location * location_score
        + weights.tf * tf_score
        + weights.query * query_score
    )
    return SentenceScore(
        sentence_index=sentence_index,
        title_score=title_score,
        location_score=location_score,
        tf_score=tf_score,
        query_score=query_score,
        total=total,
    )


def summarize(
    doc: Document,
    query: WeightedQuery | None = None,
    weights: SummaryWeights = SummaryWeights(),
    stoplist: frozenset[str] = DEFAULT_STOPLIST,
) -> Summary:
    """Extract the top-scoring sentences of ``doc``, in original order.

    Ties go to the earlier sentence.  Raises ``ValueError`` for a document
    with no sentences.
    """
    if not doc.sentences:
        raise ValueError(f"document {doc.doc_id!r} has no sentences to summarize")
    doc_tf = _doc_tf(doc, stoplist)
    scores = [
        score_sentence(i, doc, query, weights, stoplist, _doc_tf_cache=doc_tf)
        for i in range(len(doc.sentences))
    ]
    budget = summary_length(len(doc.sentences))
    ranked = sorted(scores, key=lambda s: (-s.total, s.sentence_index))
    selected = tuple(sorted(s.sentence_index for s in ranked[:budget]))
    text = " ".join(doc.sentences[i] for i in selected)
    return Summary(doc_id=doc.doc_id, selected=selected, text=text)
