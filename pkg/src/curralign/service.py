"""HTTP service feeding the review UI.

Read-only over classification results; the only writable state is the
append-only decision log (JSON lines, one decision per line). Replaying
the log reconstructs the export exactly: the last decision per
(document, category) pair wins, and the export contains accepted and
added pairs, never rejected ones.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .lexical import RankedClassification
from .ontology import (
    Guideline,
    UnknownIdError,
    context_of,
    guideline_to_dict,
)
from .pipeline import load_results_dir

VERDICTS = ("accepted", "rejected", "added")

DECISIONS_FILENAME = "decisions.jsonl"


class DecisionIn(BaseModel):
    category_id: str
    verdict: str


class DecisionLog:
    """Append-only decision store; appends are serialized through one lock."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, document_id: str, category_id: str, verdict: str) -> dict:
        decision = {
            "document_id": document_id,
            "category_id": category_id,
            "verdict": verdict,
            "timestamp": time.time(),
        }
        line = json.dumps(decision, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        return decision

    def replay(self) -> dict[tuple[str, str], str]:
        """(document, category) -> last verdict."""
        state: dict[tuple[str, str], str] = {}
        if not self.path.exists():
            return state
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                decision = json.loads(line)
                state[(decision["document_id"], decision["category_id"])] = decision["verdict"]
        return state

    def export(self) -> dict[str, list[str]]:
        """Final classification: accepted and added pairs, gold-file schema."""
        exported: dict[str, list[str]] = {}
        for (document_id, category_id), verdict in sorted(self.replay().items()):
            if verdict in ("accepted", "added"):
                exported.setdefault(document_id, []).append(category_id)
        return exported


def create_app(
    results_dir: str | Path,
    guideline: Guideline,
    decisions_path: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    results_dir = Path(results_dir)
    by_method = load_results_dir(results_dir)
    by_doc: dict[str, dict[str, RankedClassification]] = {}
    for method, ranked_list in by_method.items():
        for ranked in ranked_list:
            by_doc.setdefault(ranked.document_id, {})[method] = ranked

    log = DecisionLog(Path(decisions_path or results_dir / DECISIONS_FILENAME))
    app = FastAPI(title="curralign review service")

    def category_context(category_id: str) -> dict:
        try:
            category = guideline.category(category_id)
            ka_title, ku_title = context_of(guideline, category_id)
        except (UnknownIdError, ValueError) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {
            "category_id": category.id,
            "text": category.text,
            "kind": category.kind.value,
            "ka_title": ka_title,
            "ku_title": ku_title,
        }

    @app.get("/api/documents")
    def list_documents() -> list[dict]:
        return [
            {
                "document_id": doc_id,
                "methods": {method: len(r.entries) for method, r in sorted(methods.items())},
            }
            for doc_id, methods in sorted(by_doc.items())
        ]

    @app.get("/api/documents/{document_id}/suggestions")
    def suggestions(document_id: str, method: str | None = None) -> dict:
        methods = by_doc.get(document_id)
        if not methods:
            raise HTTPException(status_code=404, detail=f"unknown document {document_id!r}")
        if method is None:
            method = sorted(methods)[0]
        ranked = methods.get(method)
        if ranked is None:
            raise HTTPException(
                status_code=404, detail=f"no results for method {method!r} on {document_id!r}"
            )
        decided = log.replay()
        entries = []
        for rank, (category_id, score) in enumerate(ranked.entries, start=1):
            entry = category_context(category_id)
            entry.update(
                score=score,
                rank=rank,
                decision=decided.get((document_id, category_id), "undecided"),
            )
            entries.append(entry)
        return {"document_id": document_id, "method": method, "entries": entries}

    # ids may contain slashes, so the parameter takes the rest of the path
    @app.get("/api/categories/{category_id:path}/context")
    def get_category_context(category_id: str) -> dict:
        return category_context(category_id)

    @app.get("/api/guideline")
    def get_guideline() -> dict:
        return guideline_to_dict(guideline)

    @app.post("/api/documents/{document_id}/decisions")
    def post_decision(document_id: str, decision: DecisionIn) -> dict:
        if decision.verdict not in VERDICTS:
            raise HTTPException(
                status_code=422, detail=f"verdict must be one of {', '.join(VERDICTS)}"
            )
        if document_id not in by_doc:
            raise HTTPException(status_code=404, detail=f"unknown document {document_id!r}")
        try:
            guideline.category(decision.category_id)
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return log.append(document_id, decision.category_id, decision.verdict)

    @app.get("/api/export")
    def export() -> dict[str, list[str]]:
        return log.export()

    @app.exception_handler(HTTPException)
    async def error_payload(request, exc: HTTPException):
        return JSONResponse(status_code=exc.status_code, content={"error": exc.detail})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
