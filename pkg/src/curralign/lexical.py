"""Exact phrase matching: count-unweighted and count-weighted scoring.

Matching is exact equality of phrase keys over the document's extracted
phrase multiset, never raw substring search; a longer maximal phrase does
not match its inner sub-phrases.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

from .ontology import Guideline, rank_order, rateable_categories
from .phrase import PosTagger, text_phrases

Scores = dict[str, float]


@dataclass(frozen=True)
class CategoryPhraseIndex:
    """Per-category phrase sets plus each phrase's category document frequency.

    Phrase tuples are deduplicated but keep first-extraction order, which is
    the tie-break order for best-match scoring.
    """

    phrases_by_category: dict[str, tuple[str, ...]]
    df: dict[str, int]


@dataclass
class RankedClassification:
    """Ordered top-K suggestions for one document under one method."""

    document_id: str
    method: str
    entries: list[tuple[str, float]] = field(default_factory=list)

    @property
    def category_ids(self) -> list[str]:
        return [category_id for category_id, _ in self.entries]


def build_index(guideline: Guideline, tagger: PosTagger | None = None) -> CategoryPhraseIndex:
    """Extract the phrase set of every rateable category.

    df counts categories containing a phrase (set semantics): a phrase
    repeated inside one category still counts that category once.
    """
    phrases_by_category: dict[str, tuple[str, ...]] = {}
    df: Counter[str] = Counter()
    for category in rateable_categories(guideline):
        ordered = tuple(dict.fromkeys(text_phrases(category.text, tagger)))
        phrases_by_category[category.id] = ordered
        df.update(ordered)
    return CategoryPhraseIndex(phrases_by_category=phrases_by_category, df=dict(df))


def score_count(
    doc_phrases: Mapping[str, int],
    index: CategoryPhraseIndex,
    weighted: bool = False,
) -> Scores:
    """Sum document occurrence counts of each category's phrases.

    Weighted scoring divides each phrase's count by its category document
    frequency, so guideline-wide phrases contribute less than rare ones.
    """
    scores: Scores = {}
    for category_id, phrases in index.phrases_by_category.items():
        total = 0.0
        for phrase in phrases:
            count = doc_phrases.get(phrase, 0)
            if not count:
                continue
            total += count / index.df[phrase] if weighted else count
        if total:
            scores[category_id] = total
    return scores


def rank_top_k(
    scores: Mapping[str, float],
    guideline: Guideline,
    k: int,
    document_id: str = "",
    method: str = "",
) -> RankedClassification:
    """Top-k categories by score, ties broken by guideline traversal order.

    Zero-score categories are never emitted.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    order = rank_order(guideline)
    positive = [(cid, s) for cid, s in scores.items() if s > 0]
    positive.sort(key=lambda item: (-item[1], order[item[0]]))
    return RankedClassification(document_id=document_id, method=method, entries=positive[:k])
