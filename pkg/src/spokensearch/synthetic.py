"""Deterministic desk-scale synthetic collection for experiments.

500 short documents over a Zipf-distributed vocabulary of pronounceable
nonsense words, with 20 topical queries and matching qrels.  Twenty topics
get four distinctive terms each; topic documents mix those terms into
background text, so the queries have a meaningful notion of relevance.
Every topic term also gets a vowel-swapped "sound-alike" planted once in
the background, giving the misrecognition machinery realistic confusable
pairs to find.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import accumulate

from .corpus import Document

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"

DEFAULT_SEED = 745_201

N_DOCS = 500
N_TOPICS = 20
TERMS_PER_TOPIC = 4
DOCS_PER_TOPIC = 12
QUERY_LENGTH = 3
VOCAB_SIZE = 900
ZIPF_EXPONENT = 1.1


@dataclass(frozen=True)
class SyntheticCollection:
    docs: tuple[Document, ...]
    queries: dict[str, list[str]]
    qrels: dict[str, set[str]]
    topic_terms: dict[str, list[str]]
    sound_alikes: dict[str, str]  # topic term -> planted confusable


def _make_word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))


def _vowel_swap(word: str, rng: random.Random) -> str:
    out = []
    changed = False
    for ch in word:
        if ch in _VOWELS:
            alternatives = [v for v in _VOWELS if v != ch]
            out.append(rng.choice(alternatives))
            changed = True
        else:
            out.append(ch)
    if not changed:
        out.append(rng.choice(_VOWELS))
    return "".join(out)


def _distinct_words(rng: random.Random, count: int, taken: set[str], syllables=(2, 3)) -> list[str]:
    words = []
    while len(words) < count:
        word = _make_word(rng, rng.choice(syllables))
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


class _ZipfSampler:
    def __init__(self, population: list[str], exponent: float):
        self.population = population
        weights = [1.0 / (rank + 1) ** exponent for rank in range(len(population))]
        self.cum_weights = list(accumulate(weights))

    def draw(self, rng: random.Random) -> str:
        return rng.choices(self.population, cum_weights=self.cum_weights)[0]


def _sentences_from_tokens(tokens: list[str], rng: random.Random) -> list[str]:
    sentences = []
    i = 0
    while i < len(tokens):
        n = min(rng.randint(7, 10), len(tokens) - i)
        chunk = tokens[i : i + n]
        sentences.append((" ".join(chunk) + ".").capitalize())
        i += n
    return sentences


def synthetic_collection(seed: int = DEFAULT_SEED) -> SyntheticCollection:
    """Build the full deterministic collection for a given seed."""
    rng = random.Random(seed)
    taken: set[str] = set()

    background = _distinct_words(rng, VOCAB_SIZE, taken)
    sampler = _ZipfSampler(background, ZIPF_EXPONENT)

    topic_terms: dict[str, list[str]] = {}
    sound_alikes: dict[str, str] = {}
    for t in range(N_TOPICS):
        terms = _distinct_words(rng, TERMS_PER_TOPIC, taken, syllables=(3,))
        topic_terms[f"t{t:02d}"] = terms
        for term in terms:
            while True:
                alike = _vowel_swap(term, rng)
                if alike not in taken:
                    taken.add(alike)
                    sound_alikes[term] = alike
                    break

    # Each topic document carries exactly two of its topic's four terms, one
    # occurrence each: losing a query word then visibly reorders the list.
    specs: list[tuple[str | None, list[str]]] = []  # (topic id or None, injected terms)
    for topic_id, terms in topic_terms.items():
        for _ in range(DOCS_PER_TOPIC):
            specs.append((topic_id, rng.sample(terms, k=2)))
    while len(specs) < N_DOCS:
        specs.append((None, []))
    rng.shuffle(specs)

    # Guarantee each topic term occurs in at least two of its topic's docs.
    placed: dict[str, set[int]] = {}
    for i, (topic_id, injected) in enumerate(specs):
        for term in set(injected):
            placed.setdefault(term, set()).add(i)
    for topic_id, terms in topic_terms.items():
        doc_slots = [i for i, (tid, _) in enumerate(specs) if tid == topic_id]
        for term in terms:
            have = placed.get(term, set())
            while len(have) < 2:
                slot = rng.choice(doc_slots)
                if slot not in have:
                    specs[slot][1].append(term)
                    have.add(slot)
            placed[term] = have

    # Plant each sound-alike word once in a background document.
    background_slots = [i for i, (tid, _) in enumerate(specs) if tid is None]
    for alike in sound_alikes.values():
        specs[rng.choice(background_slots)][1].append(alike)

    docs: list[Document] = []
    topic_of_doc: dict[str, str | None] = {}
    for i, (topic_id, injected) in enumerate(specs):
        doc_id = f"S{i + 1:04d}"
        length = rng.randint(40, 60)
        tokens = list(injected)
        while len(tokens) < length:
            tokens.append(sampler.draw(rng))
        rng.shuffle(tokens)
        title = " ".join(rng.sample(tokens, k=min(3, len(tokens))))
        docs.append(Document.make(doc_id, title, _sentences_from_tokens(tokens, rng)))
        topic_of_doc[doc_id] = topic_id

    queries: dict[str, list[str]] = {}
    qrels: dict[str, set[str]] = {}
    for t, (topic_id, terms) in enumerate(topic_terms.items()):
        query_id = f"q{t + 1:02d}"
        queries[query_id] = rng.sample(terms, k=QUERY_LENGTH)
        qrels[query_id] = {
            doc_id for doc_id, tid in topic_of_doc.items() if tid == topic_id
        }

    return SyntheticCollection(
        docs=tuple(docs),
        queries=queries,
        qrels=qrels,
        topic_terms=topic_terms,
        sound_alikes=sound_alikes,
    )
