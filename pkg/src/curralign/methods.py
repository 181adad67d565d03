"""The five LLM classification methods and their orchestration.

Per document, queries are issued concurrently up to the endpoint's
``max_in_flight`` cap; scores are assembled only after every response for
the document has arrived. Knowledge-unit summaries are generated in a
separate serial initialization phase and reused across documents.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
from dataclasses import dataclass

from .ingest import Document
from .lexical import RankedClassification, rank_top_k
from .llm import (
    BoundedClient,
    LlmEndpoint,
    ParseExhausted,
    QueryError,
    QueryLog,
    ResponseParseError,
    Transport,
    gather_all,
    load_template,
    parse_scores,
    parse_yes_no,
    render_template,
    truncate_document,
)
from .ontology import (
    Category,
    Guideline,
    KnowledgeUnit,
    context_of,
    guideline_to_dict,
    rateable_categories,
)

logger = logging.getLogger(__name__)

LLM_METHODS = (
    "llm-binary",
    "llm-5point",
    "llm-5pointbatch",
    "llm-5pointcontext",
    "llm-prune-5pointcontext",
)

BATCH_SIZE = 5


class PromptBudgetError(RuntimeError):
    """The assembled prompt exceeds the endpoint's configured budget."""


@dataclass(frozen=True)
class CategoryRating:
    category_id: str
    score: int
    raw_response: str


def _numbered_list(categories: list[Category]) -> str:
    return "\n".join(f"{i}) {c.text}" for i, c in enumerate(categories, start=1))


def _binary_prompt(doc_text: str, category: Category) -> str:
    return render_template(load_template("binary"), document=doc_text, category_text=category.text)


def _rating_prompt(doc_text: str, categories: list[Category], ctx: tuple[str, str] | None) -> str:
    if len(categories) == 1:
        if ctx is None:
            return render_template(
                load_template("five_point"), document=doc_text, category_text=categories[0].text
            )
        return render_template(
            load_template("five_point_context"),
            document=doc_text,
            category_text=categories[0].text,
            ka_title=ctx[0],
            ku_title=ctx[1],
        )
    return render_template(
        load_template("five_point_batch"),
        document=doc_text,
        numbered_category_list=_numbered_list(categories),
    )


async def classify_binary(
    doc_text: str,
    category: Category,
    endpoint: LlmEndpoint,
    transport: Transport | None = None,
    client: BoundedClient | None = None,
) -> bool:
    """Yes/no coverage decision for one category. Unparseable means no."""
    if not doc_text:
        raise ValueError("document text is empty")
    client = client or BoundedClient(endpoint, transport)
    prompt = _binary_prompt(truncate_document(doc_text, endpoint.max_document_chars), category)
    try:
        return await client.query(prompt, parse_yes_no)
    except ParseExhausted as exc:
        logger.warning(
            "category %s: unparseable yes/no %r treated as no", category.id, exc.last_response[:80]
        )
        return False


async def rate_categories(
    doc_text: str,
    categories: list[Category],
    ctx: tuple[str, str] | None,
    endpoint: LlmEndpoint,
    transport: Transport | None = None,
    client: BoundedClient | None = None,
) -> list[CategoryRating]:
    """0..5 ratings for up to five categories, parsed positionally.

    A response with the wrong arity (after retries) scores every listed
    category 0.
    """
    if not 1 <= len(categories) <= BATCH_SIZE:
        raise ValueError(f"rate_categories takes 1..{BATCH_SIZE} categories, got {len(categories)}")
    if not doc_text:
        raise ValueError("document text is empty")
    client = client or BoundedClient(endpoint, transport)
    prompt = _rating_prompt(
        truncate_document(doc_text, endpoint.max_document_chars), categories, ctx
    )
    try:
        scores, raw = await client.query(
            prompt, lambda text: (parse_scores(text, len(categories)), text)
        )
    except ParseExhausted as exc:
        logger.warning(
            "categories %s: unparseable ratings %r scored 0",
            [c.id for c in categories],
            exc.last_response[:80],
        )
        scores, raw = [0] * len(categories), exc.last_response
    return [
        CategoryRating(category_id=c.id, score=s, raw_response=raw)
        for c, s in zip(categories, scores)
    ]


async def summarize_unit(
    unit: KnowledgeUnit,
    endpoint: LlmEndpoint,
    transport: Transport | None = None,
    client: BoundedClient | None = None,
) -> str:
    """Few-sentence summary of a unit, from its topics and outcomes."""
    if not unit.categories:
        raise ValueError(f"unit {unit.id!r} has no categories to summarize")
    client = client or BoundedClient(endpoint, transport)
    prompt = render_template(
        load_template("unit_summary"),
        ku_title=unit.title,
        numbered_category_list=_numbered_list(unit.categories),
    )

    def non_empty(text: str) -> str:
        stripped = text.strip()
        if not stripped:
            raise ResponseParseError("empty summary")
        return stripped

    try:
        return await client.query(prompt, non_empty)
    except (QueryError, ParseExhausted) as exc:
        raise QueryError(f"summarizing unit {unit.id!r} failed: {exc}") from exc


async def summarize_units(
    guideline: Guideline,
    endpoint: LlmEndpoint,
    transport: Transport | None = None,
) -> dict[str, str]:
    """Serial initialization pass: one summary per unit that has categories."""
    client = BoundedClient(endpoint, transport)
    summaries: dict[str, str] = {}
    for unit in guideline.units:
        if unit.categories:
            summaries[unit.id] = await summarize_unit(unit, endpoint, client=client)
    return summaries


async def prune_gate(
    doc_text: str,
    unit: KnowledgeUnit,
    area_title: str,
    endpoint: LlmEndpoint,
    transport: Transport | None = None,
    client: BoundedClient | None = None,
) -> bool:
    """Should this unit's categories be rated at all? Fails open on garbage.

    Pruning is a recall optimization; an unparseable answer must not
    silently drop a whole unit.
    """
    if not unit.summary:
        raise ValueError(f"unit {unit.id!r} has no summary; run summarize-units first")
    client = client or BoundedClient(endpoint, transport)
    prompt = render_template(
        load_template("prune_gate"),
        document=truncate_document(doc_text, endpoint.max_document_chars),
        ka_title=area_title,
        ku_title=unit.title,
        summary=unit.summary,
    )
    try:
        return await client.query(prompt, parse_yes_no)
    except ParseExhausted as exc:
        logger.warning(
            "unit %s: unparseable gate answer %r, rating the unit anyway",
            unit.id,
            exc.last_response[:80],
        )
        return True


async def run_method_async(
    document: Document,
    guideline: Guideline,
    method: str,
    endpoint: LlmEndpoint,
    k: int = 20,
    transport: Transport | None = None,
    prune_batch_size: int = 1,
) -> tuple[RankedClassification, QueryLog]:
    """Run one LLM method end to end for one document.

    ``prune_batch_size`` > 1 groups the surviving categories of an open unit
    into one rating query; the default of 1 rates them one at a time.
    """
    if method not in LLM_METHODS:
        raise ValueError(f"unknown LLM method {method!r}")
    if not document.normalized_text:
        raise ValueError(f"document {document.id!r} has no text")
    if not 1 <= prune_batch_size <= BATCH_SIZE:
        raise ValueError(f"prune_batch_size must be 1..{BATCH_SIZE}")

    doc_text = truncate_document(document.normalized_text, endpoint.max_document_chars)
    client = BoundedClient(endpoint, transport)
    categories = rateable_categories(guideline)
    started = time.perf_counter()
    pruned_units = 0
    scores: dict[str, float] = {}

    if method == "llm-binary":
        flags = await gather_all(
            [classify_binary(doc_text, c, endpoint, client=client) for c in categories]
        )
        scores = {c.id: 1.0 for c, flag in zip(categories, flags) if flag}
    elif method == "llm-5point":
        ratings = await gather_all(
            [rate_categories(doc_text, [c], None, endpoint, client=client) for c in categories]
        )
        scores = _scores_from_ratings(r for batch in ratings for r in batch)
    elif method == "llm-5pointbatch":
        chunks = [categories[i : i + BATCH_SIZE] for i in range(0, len(categories), BATCH_SIZE)]
        ratings = await gather_all(
            [rate_categories(doc_text, chunk, None, endpoint, client=client) for chunk in chunks]
        )
        scores = _scores_from_ratings(r for batch in ratings for r in batch)
    elif method == "llm-5pointcontext":
        ratings = await gather_all(
            [
                rate_categories(doc_text, [c], context_of(guideline, c.id), endpoint, client=client)
                for c in categories
            ]
        )
        scores = _scores_from_ratings(r for batch in ratings for r in batch)
    else:  # llm-prune-5pointcontext
        scores, pruned_units = await _run_pruned(
            doc_text, guideline, endpoint, client, prune_batch_size
        )

    log = QueryLog(
        queries_issued=client.queries_issued,
        max_observed_in_flight=client.max_observed_in_flight,
        pruned_unit_count=pruned_units,
        duration_seconds=time.perf_counter() - started,
    )
    ranked = rank_top_k(scores, guideline, k, document_id=document.id, method=method)
    return ranked, log


async def _run_pruned(
    doc_text: str,
    guideline: Guideline,
    endpoint: LlmEndpoint,
    client: BoundedClient,
    prune_batch_size: int,
) -> tuple[dict[str, float], int]:
    gated_units = []
    for area in guideline.areas:
        for unit in area.units:
            if not unit.categories:
                continue
            if not unit.summary:
                raise ValueError(f"unit {unit.id!r} has no summary; run summarize-units first")
            gated_units.append((area, unit))

    gates = await gather_all(
        [
            prune_gate(doc_text, unit, area.title, endpoint, client=client)
            for area, unit in gated_units
        ]
    )
    rating_jobs = []
    for (area, unit), keep in zip(gated_units, gates):
        if not keep:
            continue
        ctx = (area.title, unit.title)
        for i in range(0, len(unit.categories), prune_batch_size):
            chunk = list(unit.categories[i : i + prune_batch_size])
            rating_jobs.append(rate_categories(doc_text, chunk, ctx, endpoint, client=client))
    ratings = await gather_all(rating_jobs)
    scores = _scores_from_ratings(r for batch in ratings for r in batch)
    pruned = sum(1 for keep in gates if not keep)
    return scores, pruned


def _scores_from_ratings(ratings) -> dict[str, float]:
    return {r.category_id: float(r.score) for r in ratings if r.score > 0}


def run_method(
    document: Document,
    guideline: Guideline,
    method: str,
    endpoint: LlmEndpoint,
    k: int = 20,
    transport: Transport | None = None,
    prune_batch_size: int = 1,
) -> tuple[RankedClassification, QueryLog]:
    """Synchronous wrapper around :func:`run_method_async`."""
    return asyncio.run(
        run_method_async(
            document,
            guideline,
            method,
            endpoint,
            k,
            transport=transport,
            prune_batch_size=prune_batch_size,
        )
    )


def whole_guideline_prompt(document: Document, guideline: Guideline) -> str:
    """The single everything-in-one-query prompt. Usually too large to send."""
    return render_template(
        load_template("whole_guideline"),
        document=document.normalized_text,
        guideline_json=json.dumps(guideline_to_dict(guideline), indent=1),
    )


async def classify_whole_async(
    document: Document,
    guideline: Guideline,
    endpoint: LlmEndpoint,
    k: int = 20,
    transport: Transport | None = None,
) -> tuple[RankedClassification, QueryLog]:
    """Experimental: whole document + whole guideline in one query.

    Refuses outright when the prompt exceeds the endpoint's prompt budget
    instead of silently truncating either side.
    """
    if not document.normalized_text:
        raise ValueError(f"document {document.id!r} has no text")
    prompt = whole_guideline_prompt(document, guideline)
    if len(prompt) > endpoint.max_prompt_chars:
        raise PromptBudgetError(
            f"prompt is {len(prompt)} characters, over the budget of "
            f"{endpoint.max_prompt_chars}; use a per-category method instead"
        )
    client = BoundedClient(endpoint, transport)
    started = time.perf_counter()
    known = {c.id for c in rateable_categories(guideline)}

    def parse_ids(text: str) -> list[str]:
        found = [line.strip() for line in text.splitlines()]
        return [category_id for category_id in found if category_id in known]

    try:
        matched = await client.query(prompt, parse_ids)
    except ParseExhausted:  # pragma: no cover - parse_ids never raises
        matched = []
    scores = {category_id: 1.0 for category_id in matched}
    log = QueryLog(
        queries_issued=client.queries_issued,
        max_observed_in_flight=client.max_observed_in_flight,
        duration_seconds=time.perf_counter() - started,
    )
    return (
        rank_top_k(scores, guideline, k, document_id=document.id, method="llm-whole-guideline"),
        log,
    )


def classify_whole(
    document: Document,
    guideline: Guideline,
    endpoint: LlmEndpoint,
    k: int = 20,
    transport: Transport | None = None,
) -> tuple[RankedClassification, QueryLog]:
    return asyncio.run(classify_whole_async(document, guideline, endpoint, k, transport=transport))
