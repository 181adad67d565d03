"""Rank curriculum-guideline categories for course documents.

Pipeline: ingest a document (PDF or plain text), extract base noun
phrases, score every guideline category with lexical, embedding, or LLM
methods, rank the top K, and serve the suggestions to a human review UI.
"""

from .embedding import (
    EmbeddingScorer,
    EmbeddingTable,
    embed_phrase,
    load_embedding_file,
    load_embedding_table,
    phrase_distance,
    score_embedding,
)
from .evaluation import (
    EvaluationReport,
    evaluate_corpus,
    gold_size_histogram,
    load_gold,
    recall_at_k,
    recall_difference_distribution,
)
from .ingest import Document, Extractor, extract_text, ingest_document, normalize_ligatures
from .lexical import (
    CategoryPhraseIndex,
    RankedClassification,
    build_index,
    rank_top_k,
    score_count,
)
from .llm import LlmEndpoint, MockTransport, QueryLog
from .methods import (
    classify_binary,
    rate_categories,
    run_method,
    summarize_unit,
    summarize_units,
)
from .ontology import (
    Category,
    Guideline,
    KnowledgeArea,
    KnowledgeUnit,
    context_of,
    load_guideline,
    parse_guideline,
    rateable_categories,
)
from .phrase import RuleTagger, Token, extract_bnps, pos_tag, text_phrases, tokenize

__version__ = "0.1.0"

__all__ = [
    "Category",
    "CategoryPhraseIndex",
    "Document",
    "EmbeddingScorer",
    "EmbeddingTable",
    "EvaluationReport",
    "Extractor",
    "Guideline",
    "KnowledgeArea",
    "KnowledgeUnit",
    "LlmEndpoint",
    "MockTransport",
    "QueryLog",
    "RankedClassification",
    "RuleTagger",
    "Token",
    "build_index",
    "classify_binary",
    "context_of",
    "embed_phrase",
    "evaluate_corpus",
    "extract_bnps",
    "extract_text",
    "gold_size_histogram",
    "ingest_document",
    "load_embedding_file",
    "load_embedding_table",
    "load_gold",
    "load_guideline",
    "normalize_ligatures",
    "parse_guideline",
    "phrase_distance",
    "pos_tag",
    "rank_top_k",
    "rate_categories",
    "rateable_categories",
    "recall_at_k",
    "recall_difference_distribution",
    "run_method",
    "score_count",
    "score_embedding",
    "summarize_unit",
    "summarize_units",
    "text_phrases",
    "tokenize",
]
