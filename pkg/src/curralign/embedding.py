"""Semantic phrase matching through a pretrained word-embedding table.

A phrase is represented by the mean vector of its in-vocabulary words and
two phrases match when 1 - |cosine| is at or below the distance threshold
(default 0.3). Out-of-vocabulary words are ignored; fully out-of-vocabulary
phrases never match anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .lexical import CategoryPhraseIndex, Scores

DEFAULT_THRESHOLD = 0.3


class EmbeddingFormatError(ValueError):
    """The table file breaks the one-word-per-line numeric format."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class PhraseVector:
    vector: np.ndarray
    covered_words: int


def load_embedding_table(stream: Iterable[str] | IO[str]) -> EmbeddingTable:
    """Load "word v1 v2 ... vD" lines; dimension comes from the first line."""
    dimension: int | None = None
    vectors: dict[str, np.ndarray] = {}
    line_number = 0
    for line_number, line in enumerate(stream, start=1):
        parts = line.split()
        if not parts:
            continue
        word, components = parts[0].lower(), parts[1:]
        if dimension is None:
            if not components:
                raise EmbeddingFormatError("no vector components on first entry", line_number)
            dimension = len(components)
        elif len(components) != dimension:
            raise EmbeddingFormatError(
                f"expected {dimension} components, got {len(components)}", line_number
            )
        try:
            vector = np.asarray([float(x) for x in components], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFormatError(f"non-numeric component: {exc}", line_number) from exc
        vectors.setdefault(word, vector)
    if dimension is None:
        raise EmbeddingFormatError("empty stream: cannot infer dimension")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def load_embedding_file(path: str | Path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        return load_embedding_table(fh)


def embed_phrase(phrase: str, table: EmbeddingTable) -> PhraseVector | None:
    """Mean vector over the phrase's in-vocabulary words.

    Returns None when no word is covered, or when the mean is the zero
    vector (which has no direction to compare against).
    """
    hits = [table.vectors[w] for w in phrase.split() if w in table.vectors]
    if not hits:
        return None
    mean = np.mean(hits, axis=0)
    if not np.any(mean):
        return None
    return PhraseVector(vector=mean, covered_words=len(hits))


def phrase_distance(a: PhraseVector, b: PhraseVector) -> float:
    """1 - |cosine|, clipped into [0, 1] against rounding."""
    va, vb = a.vector, b.vector
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    cosine = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
    return float(min(1.0, max(0.0, 1.0 - abs(cosine))))


class EmbeddingScorer:
    """Index phrases embedded once, reusable across documents.

    Scoring behaves exactly as if every phrase vector were recomputed; the
    cache is pure.
    """

    def __init__(self, index: CategoryPhraseIndex, table: EmbeddingTable):
        self.index = index
        self.table = table
        rows: list[np.ndarray] = []
        meta: list[tuple[str, str]] = []  # (category id, phrase)
        for category_id, phrases in index.phrases_by_category.items():
            for phrase in phrases:
                embedded = embed_phrase(phrase, table)
                if embedded is None:
                    continue
                rows.append(embedded.vector / np.linalg.norm(embedded.vector))
                meta.append((category_id, phrase))
        self._matrix = np.vstack(rows) if rows else np.zeros((0, table.dimension))
        self._meta = meta

    def score(
        self,
        doc_phrases: Mapping[str, int],
        weighted: bool = False,
        mode: str = "all",
        threshold: float = DEFAULT_THRESHOLD,
    ) -> Scores:
        if mode not in ("all", "best"):
            raise ValueError(f"mode must be 'all' or 'best', got {mode!r}")
        scores: Scores = {}
        if not self._meta:
            return scores
        df = self.index.df
        for phrase, count in doc_phrases.items():
            embedded = embed_phrase(phrase, self.table)
            if embedded is None:
                continue
            unit = embedded.vector / np.linalg.norm(embedded.vector)
            distances = 1.0 - np.abs(self._matrix @ unit)
            np.clip(distances, 0.0, 1.0, out=distances)
            if mode == "all":
                for row in np.flatnonzero(distances <= threshold):
                    category_id, cat_phrase = self._meta[row]
                    weight = 1.0 / df[cat_phrase] if weighted else 1.0
                    scores[category_id] = scores.get(category_id, 0.0) + count * weight
            else:
                # Best match per (document phrase, category); earlier phrase
                # wins distance ties because rows keep extraction order.
                best: dict[str, tuple[float, str]] = {}
                for row in np.flatnonzero(distances <= threshold):
                    category_id, cat_phrase = self._meta[row]
                    distance = float(distances[row])
                    current = best.get(category_id)
                    if current is None or distance < current[0]:
                        best[category_id] = (distance, cat_phrase)
                for category_id, (_, cat_phrase) in best.items():
                    weight = 1.0 / df[cat_phrase] if weighted else 1.0
                    scores[category_id] = scores.get(category_id, 0.0) + count * weight
        return {cid: s for cid, s in scores.items() if s > 0}


def score_embedding(
    doc_phrases: Mapping[str, int],
    index: CategoryPhraseIndex,
    table: EmbeddingTable,
    weighted: bool = False,
    mode: str = "all",
    threshold: float = DEFAULT_THRESHOLD,
) -> Scores:
    """One-shot scoring; build an :class:`EmbeddingScorer` to amortize over a corpus."""
    return EmbeddingScorer(index, table).score(
        doc_phrases, weighted=weighted, mode=mode, threshold=threshold
    )
