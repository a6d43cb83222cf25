"""Seeded simulation experiments over the synthetic collection.

Covers three phenomena: merging several recognizers' transcripts improves
word accuracy; a single misrecognized rare word wrecks ranked retrieval
far more than a missing word does; and confidence weighting softens that
damage.  All runs are reproducible bit-for-bit from their seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .corpus import InvertedIndex
from .evaluation import average_precision
from .ranking import QueryTerm, RankingParams, WeightedQuery, rank
from .recognizer import ErrorModel, derive_seed, transcribe_query, word_accuracy
from .synthetic import SyntheticCollection
from .text import normalize_term


@dataclass(frozen=True)
class MergeExperimentRow:
    accuracy: float
    n_recognizers: int
    mean_wer: float
    mean_map: float  # retrieval with merged confidences
    mean_map_unweighted: float  # same transcripts, confidences forced to 1.0
    trials: int


def _flat_query(terms: list[str]) -> WeightedQuery:
    return WeightedQuery.from_terms(
        [QueryTerm(term=t, surface=t) for t in terms], origin="typed"
    )


def _map_for_query(query: WeightedQuery, index: InvertedIndex, params: RankingParams, relevant: set[str]) -> float:
    ranked = rank(query, index, params)
    return average_precision(ranked.doc_ids(), relevant)


def clean_map(
    collection: SyntheticCollection,
    index: InvertedIndex,
    params: RankingParams | None = None,
) -> float:
    """MAP of the uncorrupted queries at full confidence."""
    params = params or RankingParams()
    total = 0.0
    for query_id in sorted(collection.queries):
        query = _flat_query(collection.queries[query_id])
        total += _map_for_query(query, index, params, collection.qrels[query_id])
    return total / len(collection.queries)


def run_merge_experiment(
    collection: SyntheticCollection,
    index: InvertedIndex,
    accuracies: list[float],
    recognizer_counts: list[int],
    trials: int,
    seed: int,
    base_model: ErrorModel | None = None,
    params: RankingParams | None = None,
) -> list[MergeExperimentRow]:
    """Corrupt-merge-retrieve each query repeatedly per (accuracy, n) cell."""
    params = params or RankingParams()
    model_base = base_model or ErrorModel()
    if not model_base.vocabulary:
        model_base = replace(model_base, vocabulary=index.vocabulary)

    query_ids = sorted(collection.queries)
    rows: list[MergeExperimentRow] = []
    for accuracy in accuracies:
        model = replace(model_base, accuracy=accuracy)
        for n in recognizer_counts:
            wers: list[float] = []
            maps_weighted: list[float] = []
            maps_flat: list[float] = []
            for trial in range(trials):
                for query_id in query_ids:
                    terms = collection.queries[query_id]
                    relevant = collection.qrels[query_id]
                    sub_seed = derive_seed(seed, accuracy, n, trial, query_id)
                    merged, _ = transcribe_query(" ".join(terms), n, model, sub_seed)
                    wer, _ = word_accuracy(terms, merged.surfaces())
                    wers.append(wer)

                    recognized = [
                        (normalize_term(w.surface), w.confidence)
                        for w in merged.words
                        if normalize_term(w.surface)
                    ]
                    if recognized:
                        weighted = WeightedQuery.from_terms(
                            [QueryTerm(term=t, surface=t, confidence=c) for t, c in recognized],
                            origin="typed",
                        )
                        flat = WeightedQuery.from_terms(
                            [QueryTerm(term=t, surface=t) for t, _ in recognized],
                            origin="typed",
                        )
                        maps_weighted.append(_map_for_query(weighted, index, params, relevant))
                        maps_flat.append(_map_for_query(flat, index, params, relevant))
                    else:
                        maps_weighted.append(0.0)
                        maps_flat.append(0.0)
            count = len(wers)
            rows.append(
                MergeExperimentRow(
                    accuracy=accuracy,
                    n_recognizers=n,
                    mean_wer=sum(wers) / count,
                    mean_map=sum(maps_weighted) / count,
                    mean_map_unweighted=sum(maps_flat) / count,
                    trials=trials,
                )
            )
    return rows


def merge_rows_csv(rows: list[MergeExperimentRow]) -> str:
    lines = ["accuracy,n_recognizers,trials,mean_wer,mean_map,mean_map_unweighted"]
    for r in rows:
        lines.append(
            f"{r.accuracy:.4f},{r.n_recognizers},{r.trials},"
            f"{r.mean_wer:.6f},{r.mean_map:.6f},{r.mean_map_unweighted:.6f}"
        )
    return "\n".join(lines) + "\n"


def format_merge_table(rows: list[MergeExperimentRow]) -> str:
    header = (
        f"{'accuracy':>9}{'n':>4}{'trials':>8}{'mean WER':>11}"
        f"{'MAP conf':>11}{'MAP flat':>11}"
    )
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.accuracy:>9.2f}{r.n_recognizers:>4}{r.trials:>8}"
            f"{r.mean_wer:>11.4f}{r.mean_map:>11.4f}{r.mean_map_unweighted:>11.4f}"
        )
    return "\n".join(lines)


def merging_word_accuracy(
    accuracy: float,
    recognizer_counts: list[int],
    trials: int,
    seed: int,
    vocabulary: frozenset[str],
    words_per_utterance: int = 8,
    base_model: ErrorModel | None = None,
) -> dict[int, float]:
    """Mean word accuracy of merged transcripts per recognizer count.

    Each trial draws one utterance; every recognizer count transcribes the
    same utterance so the comparison is paired.
    """
    model = replace(base_model or ErrorModel(), accuracy=accuracy, vocabulary=vocabulary)
    vocab_list = sorted(vocabulary)
    sums = {n: 0.0 for n in recognizer_counts}
    for trial in range(trials):
        rng = random.Random(derive_seed(seed, "utterance", trial))
        words = [rng.choice(vocab_list) for _ in range(words_per_utterance)]
        for n in recognizer_counts:
            merged, _ = transcribe_query(" ".join(words), n, model, derive_seed(seed, trial, n))
            _, counts = word_accuracy(words, merged.surfaces())
            sums[n] += counts.accuracy
    return {n: total / trials for n, total in sums.items()}


@dataclass(frozen=True)
class DamageTrial:
    """Per-trial MAPs for the forced rare-word substitution experiment."""

    map_substituted_flat: float
    map_substituted_weighted: float
    map_deleted: float


def rare_word_damage_trials(
    collection: SyntheticCollection,
    index: InvertedIndex,
    trials: int,
    seed: int,
    params: RankingParams | None = None,
    max_df: int = 2,
    conf_correct: tuple[float, float] = (0.7, 1.0),
    conf_error: tuple[float, float] = (0.2, 0.8),
) -> list[DamageTrial]:
    """Force one query word into a rare junk word, per query, per trial.

    Three variants are retrieved per query: the damaged query at flat
    confidence, the damaged query with the junk word's confidence drawn
    from the error interval (true words from the correct interval), and
    the query with the word simply deleted.
    """
    params = params or RankingParams()
    rare_terms = [t for t in sorted(index.vocabulary) if 1 <= index.df(t) <= max_df]
    if not rare_terms:
        raise ValueError(f"no vocabulary terms with df <= {max_df}")
    query_ids = sorted(collection.queries)

    out: list[DamageTrial] = []
    for trial in range(trials):
        rng = random.Random(derive_seed(seed, "damage", trial))
        sub_flat_total = sub_weighted_total = deleted_total = 0.0
        for query_id in query_ids:
            terms = collection.queries[query_id]
            relevant = collection.qrels[query_id]
            victim = rng.randrange(len(terms))
            junk = rng.choice([t for t in rare_terms if t not in terms])
            true_confs = [rng.uniform(*conf_correct) for _ in terms]
            junk_conf = rng.uniform(*conf_error)

            substituted = [junk if i == victim else t for i, t in enumerate(terms)]
            sub_flat_total += _map_for_query(_flat_query(substituted), index, params, relevant)

            weighted_terms = [
                QueryTerm(term=t, surface=t, confidence=junk_conf if i == victim else true_confs[i])
                for i, t in enumerate(substituted)
            ]
            sub_weighted_total += _map_for_query(
                WeightedQuery.from_terms(weighted_terms, origin="typed"), index, params, relevant
            )

            deleted = [t for i, t in enumerate(terms) if i != victim]
            deleted_total += _map_for_query(_flat_query(deleted), index, params, relevant)
        n = len(query_ids)
        out.append(
            DamageTrial(
                map_substituted_flat=sub_flat_total / n,
                map_substituted_weighted=sub_weighted_total / n,
                map_deleted=deleted_total / n,
            )
        )
    return out
