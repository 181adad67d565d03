"""Batch classification runs and the results-file schema.

Every method writes the same JSON record per document, so evaluation and
the review service stay method-agnostic::

    {"document_id", "method", "k", "entries": [{"category_id", "score", "rank"}],
     "query_log"?, "failed"?}

Lexical and embedding runs are bit-reproducible: identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .embedding import DEFAULT_THRESHOLD, EmbeddingScorer, load_embedding_file
from .ingest import Document, Extractor, ingest_document
from .lexical import RankedClassification, build_index, rank_top_k, score_count
from .llm import LlmEndpoint, QueryLog, Transport
from .methods import LLM_METHODS, run_method
from .ontology import apply_unit_summaries, load_guideline
from .phrase import text_phrases

logger = logging.getLogger(__name__)

LEXICAL_METHODS = ("count-unweighted", "count-weighted")
EMBEDDING_METHODS = (
    "embedding-unweighted-all",
    "embedding-unweighted-best",
    "embedding-weighted-all",
    "embedding-weighted-best",
)
ALL_METHODS = LEXICAL_METHODS + EMBEDDING_METHODS + LLM_METHODS

RUN_REPORT_NAME = "run_report.json"


class ConfigError(ValueError):
    """The run configuration cannot work; nothing has been started."""


@dataclass
class RunConfig:
    guideline_path: str
    corpus_dir: str
    methods: list[str]
    out_dir: str
    k: int = 20
    extractor: str = Extractor.PDF_BACKEND_A.value
    embeddings_path: str | None = None
    threshold: float = DEFAULT_THRESHOLD
    summaries_path: str | None = None
    endpoint: LlmEndpoint | None = None

    def validate(self) -> None:
        unknown = [m for m in self.methods if m not in ALL_METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; valid: {', '.join(ALL_METHODS)}")
        if not self.methods:
            raise ConfigError("no methods selected")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if any(m in EMBEDDING_METHODS for m in self.methods) and not self.embeddings_path:
            raise ConfigError("embedding methods need --embeddings <table file>")
        if any(m in LLM_METHODS for m in self.methods) and self.endpoint is None:
            raise ConfigError("LLM methods need an endpoint (LLM_BASE_URL or --llm-url)")
        if "llm-prune-5pointcontext" in self.methods and not self.summaries_path:
            raise ConfigError("the prune method needs --summaries from summarize-units")


def result_filename(document_id: str, method: str) -> str:
    safe = document_id.replace("/", "_").replace("\\", "_")
    return f"{safe}__{method}.json"


def result_to_dict(ranked: RankedClassification, k: int, query_log: QueryLog | None = None) -> dict:
    record = {
        "document_id": ranked.document_id,
        "method": ranked.method,
        "k": k,
        "entries": [
            {"category_id": category_id, "score": score, "rank": rank}
            for rank, (category_id, score) in enumerate(ranked.entries, start=1)
        ],
    }
    if query_log is not None:
        record["query_log"] = query_log.to_dict()
    return record


def save_result(
    out_dir: str | Path,
    ranked: RankedClassification,
    k: int,
    query_log: QueryLog | None = None,
) -> Path:
    path = Path(out_dir) / result_filename(ranked.document_id, ranked.method)
    record = result_to_dict(ranked, k, query_log)
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_result(path: str | Path) -> RankedClassification:
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = [(e["category_id"], float(e["score"])) for e in record["entries"]]
    return RankedClassification(
        document_id=record["document_id"], method=record["method"], entries=entries
    )


def _is_result_record(record: object) -> bool:
    return isinstance(record, dict) and {"document_id", "method", "entries"} <= set(record)


def load_results_dir(results_dir: str | Path) -> dict[str, list[RankedClassification]]:
    """All result records grouped by method, in document order.

    Other JSON files in the directory (run report, evaluation reports) are
    skipped, so evaluating into the results directory stays harmless.
    """
    by_method: dict[str, list[RankedClassification]] = {}
    for path in sorted(Path(results_dir).glob("*.json")):
        if not _is_result_record(json.loads(path.read_text(encoding="utf-8"))):
            continue
        ranked = load_result(path)
        by_method.setdefault(ranked.method, []).append(ranked)
    return by_method


def load_run_report(results_dir: str | Path) -> dict:
    path = Path(results_dir) / RUN_REPORT_NAME
    if not path.exists():
        return {"failures": {}}
    return json.loads(path.read_text(encoding="utf-8"))


def ingest_corpus(corpus_dir: str | Path, extractor: str) -> list[Document]:
    """Ingest every .txt and .pdf file, sorted by name for reproducibility."""
    corpus = Path(corpus_dir)
    if not corpus.is_dir():
        raise ConfigError(f"corpus directory {corpus} does not exist")
    documents = []
    for path in sorted(corpus.iterdir()):
        if path.suffix == ".txt":
            documents.append(ingest_document(path, Extractor.PLAIN_TEXT))
        elif path.suffix == ".pdf":
            if extractor == Extractor.PLAIN_TEXT.value:
                raise ConfigError(f"{path.name}: PDF input needs --extractor a or b")
            documents.append(ingest_document(path, extractor))
    if not documents:
        raise ConfigError(f"no .txt or .pdf documents in {corpus}")
    return documents


def run_classify(config: RunConfig, transport: Transport | None = None) -> dict:
    """Classify the whole corpus with every selected method.

    Per-document failures are recorded in the run report and the run
    continues; configuration problems abort before any work.
    """
    config.validate()
    guideline = load_guideline(config.guideline_path)
    if config.summaries_path:
        summaries = json.loads(Path(config.summaries_path).read_text(encoding="utf-8"))
        apply_unit_summaries(guideline, summaries)

    scorer = None
    if any(m in EMBEDDING_METHODS for m in config.methods):
        table = load_embedding_file(config.embeddings_path)
    index = None
    if any(m in LEXICAL_METHODS or m in EMBEDDING_METHODS for m in config.methods):
        index = build_index(guideline)
        if any(m in EMBEDDING_METHODS for m in config.methods):
            scorer = EmbeddingScorer(index, table)

    documents = ingest_corpus(config.corpus_dir, config.extractor)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures: dict[str, dict[str, str]] = {}
    written = 0
    for document in documents:
        phrases = text_phrases(document.normalized_text)
        for method in config.methods:
            try:
                if method in LEXICAL_METHODS:
                    scores = score_count(phrases, index, weighted=method == "count-weighted")
                    ranked = rank_top_k(
                        scores, guideline, config.k, document_id=document.id, method=method
                    )
                    save_result(out_dir, ranked, config.k)
                elif method in EMBEDDING_METHODS:
                    _, variant, mode = method.split("-")
                    scores = scorer.score(
                        phrases,
                        weighted=variant == "weighted",
                        mode=mode,
                        threshold=config.threshold,
                    )
                    ranked = rank_top_k(
                        scores, guideline, config.k, document_id=document.id, method=method
                    )
                    save_result(out_dir, ranked, config.k)
                else:
                    if not document.normalized_text:
                        # No text, no signal: an empty classification, not a failure.
                        ranked = RankedClassification(document.id, method, [])
                        save_result(out_dir, ranked, config.k, QueryLog())
                    else:
                        ranked, query_log = run_method(
                            document,
                            guideline,
                            method,
                            config.endpoint,
                            config.k,
                            transport=transport,
                        )
                        save_result(out_dir, ranked, config.k, query_log)
                written += 1
            except Exception as exc:
                logger.error("%s on %s failed: %s", method, document.id, exc)
                failures.setdefault(method, {})[document.id] = str(exc)

    report = {
        "documents": [d.id for d in documents],
        "methods": list(config.methods),
        "k": config.k,
        "results_written": written,
        "failures": failures,
    }
    (out_dir / RUN_REPORT_NAME).write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return report
