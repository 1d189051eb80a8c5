"""Ranked-retrieval quality metrics against graded relevance judgments.

Grades are integers in [0, 3]; a document counts as relevant for P/R/MRR
when its grade is >= 1. nDCG uses DCG = sum (2^grade - 1) / log2(rank + 1)
with the ideal ordering by grade descending. Macro-averages skip (and count)
queries that have no relevant documents at all.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyRun, ParseError

MAX_GRADE = 3


def load_qrels(path: str | Path) -> dict[tuple[str, str], int]:
    """TREC-style TSV: query_id<TAB>artifact_id<TAB>grade."""
    entries: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 3 tab-separated columns")
        query_id, artifact_id, raw_grade = parts
        try:
            grade = int(raw_grade)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad grade {raw_grade!r}") from exc
        if not 0 <= grade <= MAX_GRADE:
            raise ParseError(f"{path}:{lineno}: grade {grade} outside [0, {MAX_GRADE}]")
        key = (query_id, artifact_id)
        if key in entries:
            raise ParseError(f"{path}:{lineno}: duplicate judgment for {key}")
        entries[key] = grade
    return entries


def load_queries(path: str | Path) -> dict[str, str]:
    """TSV of query_id<TAB>query text, in file order."""
    queries: dict[str, str] = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        query_id, sep, text = stripped.partition("\t")
        if not sep or not text.strip():
            raise ParseError(f"{path}:{lineno}: expected query_id<TAB>text")
        queries[query_id.strip()] = text.strip()
    return queries


def _grades_for(judgments: dict[tuple[str, str], int], query_id: str) -> dict[str, int]:
    return {
        artifact_id: grade
        for (qid, artifact_id), grade in judgments.items()
        if qid == query_id
    }


def precision_at_k(ranked: list[str], relevant: set[str], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    top = ranked[:k]
    return sum(1 for doc in top if doc in relevant) / k


def recall_at_k(ranked: list[str], relevant: set[str], k: int) -> float:
    if not relevant:
        return 0.0
    return sum(1 for doc in ranked[:k] if doc in relevant) / len(relevant)


def reciprocal_rank(ranked: list[str], relevant: set[str]) -> float:
    for position, doc in enumerate(ranked, 1):
        if doc in relevant:
            return 1.0 / position
    return 0.0


def dcg_at_k(grades_in_rank_order: list[int], k: int) -> float:
    return sum(
        (2.0**grade - 1.0) / math.log2(position + 1)
        for position, grade in enumerate(grades_in_rank_order[:k], 1)
    )


def ndcg_at_k(ranked: list[str], grades: dict[str, int], k: int) -> float:
    ideal = dcg_at_k(sorted(grades.values(), reverse=True), k)
    if ideal == 0.0:
        return 0.0
    actual = dcg_at_k([grades.get(doc, 0) for doc in ranked], k)
    return actual / ideal


@dataclass
class EvalReport:
    k: int
    per_query: dict[str, dict[str, float]] = field(default_factory=dict)
    macro: dict[str, float] = field(default_factory=dict)
    skipped_queries: list[str] = field(default_factory=list)

    def metric_names(self) -> list[str]:
        return [f"P@{self.k}", f"R@{self.k}", "MRR", f"nDCG@{self.k}"]


def evaluate_run(
    run: dict[str, list[str]],
    judgments: dict[tuple[str, str], int],
    k: int,
) -> EvalReport:
    """Compute all metrics per query plus macro-averages.

    run maps query_id -> ranked artifact ids (duplicate-free). Queries with
    no relevant judged documents are skipped in the macro-average and listed
    in skipped_queries.
    """
    if not run:
        raise EmptyRun("run contains no queries")
    report = EvalReport(k=k)
    names = report.metric_names()
    sums = {name: 0.0 for name in names}
    counted = 0
    for query_id, ranked in run.items():
        if len(set(ranked)) != len(ranked):
            raise ValueError(f"run for query {query_id!r} contains duplicates")
        grades = _grades_for(judgments, query_id)
        relevant = {doc for doc, grade in grades.items() if grade >= 1}
        if not relevant:
            report.skipped_queries.append(query_id)
            continue
        values = {
            names[0]: precision_at_k(ranked, relevant, k),
            names[1]: recall_at_k(ranked, relevant, k),
            "MRR": reciprocal_rank(ranked, relevant),
            names[3]: ndcg_at_k(ranked, grades, k),
        }
        report.per_query[query_id] = values
        for name in names:
            sums[name] += values[name]
        counted += 1
    report.macro = {
        name: (sums[name] / counted if counted else 0.0) for name in names
    }
    return report
