"""Retrieval effectiveness metrics and report formatting.

Run files are tab-separated (query_id, doc_id, rank); qrels files are
(query_id, doc_id).  Precision and recall are set measures over the run;
average precision is the rank-based standard, added because set measures
cannot see ranked-list degradation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalResult:
    query_id: str
    precision: float
    recall: float
    average_precision: float


def precision_recall(retrieved: list[str], relevant: set[str]) -> tuple[float, float]:
    if not retrieved:
        return 0.0, 0.0
    hits = sum(1 for doc in retrieved if doc in relevant)
    precision = hits / len(retrieved)
    recall = hits / len(relevant) if relevant else 0.0
    return precision, recall


def average_precision(retrieved: list[str], relevant: set[str]) -> float:
    if not relevant:
        return 0.0
    hits = 0
    total = 0.0
    for i, doc in enumerate(retrieved, start=1):
        if doc in relevant:
            hits += 1
            total += hits / i
    return total / len(relevant)


def evaluate_query(query_id: str, retrieved: list[str], relevant: set[str]) -> EvalResult:
    p, r = precision_recall(retrieved, relevant)
    return EvalResult(
        query_id=query_id,
        precision=p,
        recall=r,
        average_precision=average_precision(retrieved, relevant),
    )


def evaluate_run(run: dict[str, list[str]], qrels: dict[str, set[str]]) -> list[EvalResult]:
    """Per-query results, in run order.  Queries missing from the qrels are
    scored against zero relevant documents (with a warning)."""
    results = []
    for query_id, retrieved in run.items():
        relevant = qrels.get(query_id)
        if relevant is None:
            logger.warning("query %s missing from qrels; counting zero relevant", query_id)
            relevant = set()
        results.append(evaluate_query(query_id, retrieved, relevant))
    return results


def mean_result(results: list[EvalResult]) -> EvalResult:
    if not results:
        return EvalResult("mean", 0.0, 0.0, 0.0)
    n = len(results)
    return EvalResult(
        query_id="mean",
        precision=sum(r.precision for r in results) / n,
        recall=sum(r.recall for r in results) / n,
        average_precision=sum(r.average_precision for r in results) / n,
    )


def load_run(path: str | Path) -> dict[str, list[str]]:
    """Parse `query_id TAB doc_id TAB rank` lines into ranked lists."""
    rows: dict[str, list[tuple[int, str]]] = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            query_id, doc_id, rank_s = line.split("\t")
            rank_no = int(rank_s)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad run line {line!r}") from exc
        rows.setdefault(query_id, []).append((rank_no, doc_id))
    return {
        query_id: [doc_id for _, doc_id in sorted(pairs)]
        for query_id, pairs in rows.items()
    }


def load_qrels(path: str | Path) -> dict[str, set[str]]:
    """Parse `query_id TAB doc_id` lines into relevance sets."""
    qrels: dict[str, set[str]] = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            query_id, doc_id = line.split("\t")
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad qrels line {line!r}") from exc
        qrels.setdefault(query_id, set()).add(doc_id)
    return qrels


def format_results_table(results: list[EvalResult]) -> str:
    """Aligned per-query table with a trailing mean row (values in %)."""
    rows = results + [mean_result(results)]
    header = f"{'query':<12}{'P %':>10}{'R %':>10}{'AP %':>10}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.query_id:<12}{r.precision * 100:>10.2f}{r.recall * 100:>10.2f}"
            f"{r.average_precision * 100:>10.2f}"
        )
    return "\n".join(lines)


def format_conditions_table(
    labels: list[str],
    rows: list[tuple[str, list[float]]],
) -> str:
    """Condition-style report: one column per labeled condition, one row
    per metric, aligned for a fixed-width terminal."""
    width = max(8, max((len(label) for label in labels), default=8) + 2)
    row_label_width = max(len(name) for name, _ in rows) + 2 if rows else 16
    lines = [" " * row_label_width + "".join(f"{label:>{width}}" for label in labels)]
    for name, values in rows:
        cells = "".join(f"{v:>{width}.2f}" for v in values)
        lines.append(f"{name:<{row_label_width}}{cells}")
    return "\n".join(lines)
