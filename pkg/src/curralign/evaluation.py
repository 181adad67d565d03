"""Recall@K evaluation, recall distributions, and method comparisons.

Aggregate recall is the macro average: every document weighs equally.
A micro average (pooled hits over pooled gold labels) is reported as a
secondary column.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .lexical import RankedClassification

GoldClassification = dict[str, set[str]]


class EvaluationError(ValueError):
    """Inputs do not allow a well-defined evaluation."""


def load_gold(path: str | Path) -> GoldClassification:
    """Read the {document_id: [category_id, ...]} gold labels file."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise EvaluationError("gold labels file must be a JSON object")
    return {doc_id: set(category_ids) for doc_id, category_ids in raw.items()}


def recall_at_k(ranked: RankedClassification, gold: set[str], k: int) -> float:
    """Fraction of gold categories found in the top min(k, len) entries."""
    if not gold:
        raise EvaluationError(f"empty gold set for document {ranked.document_id!r}")
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    top = {category_id for category_id, _ in ranked.entries[:k]}
    return len(top & gold) / len(gold)


@dataclass
class HistogramBin:
    low: int
    high: int
    count: int


@dataclass
class GoldSizeHistogram:
    bin_width: int
    bins: list[HistogramBin]
    mean: float

    def to_dict(self) -> dict:
        return {
            "bin_width": self.bin_width,
            "bins": [[b.low, b.high, b.count] for b in self.bins],
            "mean": self.mean,
        }


def gold_size_histogram(gold: GoldClassification, bin_width: int = 5) -> GoldSizeHistogram:
    """Binned counts of gold-set sizes; bin i covers [i*w, (i+1)*w - 1]."""
    if bin_width < 1:
        raise EvaluationError("bin_width must be >= 1")
    sizes = [len(categories) for categories in gold.values()]
    mean = sum(sizes) / len(sizes) if sizes else 0.0
    bins: list[HistogramBin] = []
    if sizes:
        top_bin = max(sizes) // bin_width
        counts = [0] * (top_bin + 1)
        for size in sizes:
            counts[size // bin_width] += 1
        bins = [
            HistogramBin(low=i * bin_width, high=(i + 1) * bin_width - 1, count=n)
            for i, n in enumerate(counts)
        ]
    return GoldSizeHistogram(bin_width=bin_width, bins=bins, mean=mean)


@dataclass
class EvaluationReport:
    """Self-contained evaluation of one method over a corpus."""

    method: str
    k: int
    per_document_recall: dict[str, float]
    mean_recall: float
    micro_recall: float
    gold_sizes: GoldSizeHistogram
    failed_documents: list[str] = field(default_factory=list)
    query_stats: dict | None = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "per_document_recall": self.per_document_recall,
            "mean_recall": self.mean_recall,
            "micro_recall": self.micro_recall,
            "gold_sizes": self.gold_sizes.to_dict(),
            "failed_documents": self.failed_documents,
            "query_stats": self.query_stats,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def evaluate_corpus(
    results: Iterable[RankedClassification],
    gold: GoldClassification,
    k: int,
    method: str = "",
    failed_ids: Iterable[str] = (),
    query_stats: dict | None = None,
) -> EvaluationReport:
    """Per-document and aggregate recall for one method.

    Documents whose classification run failed count as recall 0 and are
    flagged, never silently dropped.
    """
    results = list(results)
    failed = sorted(set(failed_ids))
    if not results and not failed:
        raise EvaluationError("no results to evaluate")
    per_document: dict[str, float] = {}
    hits = 0
    gold_total = 0
    for ranked in results:
        if ranked.document_id not in gold:
            raise EvaluationError(f"no gold labels for document {ranked.document_id!r}")
        gold_set = gold[ranked.document_id]
        per_document[ranked.document_id] = recall_at_k(ranked, gold_set, k)
        hits += len({cid for cid, _ in ranked.entries[:k]} & gold_set)
        gold_total += len(gold_set)
    for doc_id in failed:
        if doc_id not in gold:
            raise EvaluationError(f"no gold labels for failed document {doc_id!r}")
        per_document[doc_id] = 0.0
        gold_total += len(gold[doc_id])
    mean = sum(per_document.values()) / len(per_document)
    micro = hits / gold_total if gold_total else 0.0
    evaluated_gold = {doc_id: gold[doc_id] for doc_id in per_document}
    return EvaluationReport(
        method=method or (results[0].method if results else ""),
        k=k,
        per_document_recall=per_document,
        mean_recall=mean,
        micro_recall=micro,
        gold_sizes=gold_size_histogram(evaluated_gold),
        failed_documents=failed,
        query_stats=query_stats,
    )


@dataclass
class DifferenceDistribution:
    """Per-document recall differences (a minus b), sorted ascending."""

    method_a: str
    method_b: str
    differences: list[float]
    share_negative: float
    share_zero: float
    share_positive: float

    def cdf_points(self) -> list[tuple[float, float]]:
        n = len(self.differences)
        return [(d, (i + 1) / n) for i, d in enumerate(self.differences)]


def recall_difference_distribution(
    a: EvaluationReport, b: EvaluationReport
) -> DifferenceDistribution:
    """Distribution of recall(a) - recall(b) over the shared document set."""
    if set(a.per_document_recall) != set(b.per_document_recall):
        only_a = sorted(set(a.per_document_recall) - set(b.per_document_recall))
        only_b = sorted(set(b.per_document_recall) - set(a.per_document_recall))
        raise EvaluationError(f"document sets differ (only in a: {only_a}, only in b: {only_b})")
    if not a.per_document_recall:
        raise EvaluationError("no documents to compare")
    differences = sorted(
        a.per_document_recall[doc_id] - b.per_document_recall[doc_id]
        for doc_id in a.per_document_recall
    )
    n = len(differences)
    negative = sum(1 for d in differences if d < 0)
    zero = sum(1 for d in differences if d == 0)
    return DifferenceDistribution(
        method_a=a.method,
        method_b=b.method,
        differences=differences,
        share_negative=negative / n,
        share_zero=zero / n,
        share_positive=(n - negative - zero) / n,
    )


def write_histogram_csv(histogram: GoldSizeHistogram, path: str | Path) -> None:
    """(bin low edge, count) pairs, one per row, for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gold_size_bin_low", "documents"])
        for histogram_bin in histogram.bins:
            writer.writerow([histogram_bin.low, histogram_bin.count])


def write_cdf_csv(distribution: DifferenceDistribution, path: str | Path) -> None:
    """(recall difference, cumulative share) pairs for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["recall_difference", "cumulative_share"])
        for x, y in distribution.cdf_points():
            writer.writerow([x, y])
