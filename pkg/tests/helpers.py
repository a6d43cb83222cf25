"""Independent oracles and generators shared across the test suite.

The brute-force ranker recomputes every collection statistic by scanning
the documents directly, so it shares no data path with the inverted-index
implementation it checks.
"""

from __future__ import annotations

import math
import random
from collections import Counter

from spokensearch.corpus import Document
from spokensearch.ranking import QueryTerm, RankingParams, WeightedQuery
from spokensearch.text import DEFAULT_STOPLIST, tokenize


def brute_force_rank(
    query: WeightedQuery,
    docs: list[Document],
    params: RankingParams = RankingParams(),
    stoplist: frozenset[str] = DEFAULT_STOPLIST,
) -> list[tuple[str, float]]:
    """Score every document by direct token counting, then sort."""
    n = len(docs)
    lengths = {
        d.doc_id: sum(len(tokenize(s, stoplist=None)) for s in d.sentences) for d in docs
    }
    avg = sum(lengths.values()) / n if n else 0.0
    tfs = {
        d.doc_id: Counter(t.term for s in d.sentences for t in tokenize(s, stoplist))
        for d in docs
    }
    df: Counter = Counter()
    for counts in tfs.values():
        for term in counts:
            df[term] += 1

    scored = []
    for d in docs:
        total = 0.0
        for qt in query.terms:
            tf = tfs[d.doc_id].get(qt.term, 0)
            if tf == 0:
                continue
            idf = math.log((n - df[qt.term] + 0.5) / (df[qt.term] + 0.5) + 1.0)
            ratio = lengths[d.doc_id] / avg if avg > 0 else 0.0
            sat = tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * ratio))
            total += qt.confidence * qt.weight * idf * sat
        if total > 0.0:
            scored.append((d.doc_id, total))
    scored.sort(key=lambda e: (-e[1], e[0]))
    return scored


def brute_force_average_precision(retrieved: list[str], relevant: set[str]) -> float:
    """AP by literal definition: average precision@k over relevant ranks."""
    if not relevant:
        return 0.0
    total = 0.0
    for k in range(1, len(retrieved) + 1):
        if retrieved[k - 1] in relevant:
            prefix = retrieved[:k]
            hits = len([d for d in prefix if d in relevant])
            total += hits / k
    return total / len(relevant)


_WORDS = [
    "alpha", "bravo", "carbon", "delta", "ember", "falcon", "garden", "harbor",
    "indigo", "jasper", "kestrel", "lantern", "meadow", "nickel", "orchid",
    "pepper", "quarry", "russet", "saffron", "timber", "umber", "velvet",
    "walnut", "yonder", "zephyr", "basil", "cobalt", "drift", "elm", "fennel",
]


def random_document(rng: random.Random, doc_id: str, max_sentences: int = 6) -> Document:
    n_sent = rng.randint(1, max_sentences)
    sentences = []
    for _ in range(n_sent):
        words = [rng.choice(_WORDS) for _ in range(rng.randint(3, 9))]
        sentences.append((" ".join(words) + ".").capitalize())
    title = " ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 4)))
    return Document.make(doc_id, title, sentences)


def random_corpus(rng: random.Random, max_docs: int = 50) -> list[Document]:
    return [random_document(rng, f"R{i:03d}") for i in range(rng.randint(1, max_docs))]


def random_query(rng: random.Random, max_terms: int = 8) -> WeightedQuery:
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        word = rng.choice(_WORDS + ["xylophone", "quixotic"])
        terms.append(
            QueryTerm(
                term=word,
                surface=word,
                weight=rng.choice([0.5, 1.0, 2.0]),
                confidence=rng.choice([0.0, 0.3, 0.7, 1.0]),
            )
        )
    return WeightedQuery.from_terms(terms)
