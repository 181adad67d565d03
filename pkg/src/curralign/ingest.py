"""Turn an input document (PDF or plain text) into normalized text.

Two PDF backends are selectable so extraction differences can be compared:
backend ``a`` is the bundled content-stream decoder, backend ``b`` adapts a
third-party PDF library when one is importable. Plain text is the canonical
backend for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path


class Extractor(str, Enum):
    PDF_BACKEND_A = "a"
    PDF_BACKEND_B = "b"
    PLAIN_TEXT = "text"


class ExtractionError(RuntimeError):
    """The file could not be read or decoded by the selected backend."""


class ExtractorUnavailableError(RuntimeError):
    """The selected backend is not installed or not usable here."""


# The seven Latin ligature code points and their ASCII expansions. PDF text
# extraction leaves these in the text; phrase matching needs them expanded.
LIGATURES = {
    "ﬀ": "ff",
    "ﬁ": "fi",
    "ﬂ": "fl",
    "ﬃ": "ffi",
    "ﬄ": "ffl",
    "ﬅ": "ft",
    "ﬆ": "st",
}

_LIGATURE_TABLE = str.maketrans(LIGATURES)


@dataclass(frozen=True)
class Document:
    """An ingested material. ``raw_text`` is kept unmodified for audit."""

    id: str
    source_path: str
    raw_text: str
    normalized_text: str
    extractor: Extractor


def normalize_ligatures(text: str) -> str:
    """Replace ligature code points with their ASCII expansions. Idempotent."""
    return text.translate(_LIGATURE_TABLE)


def extract_text(path: str | Path, extractor: Extractor | str = Extractor.PLAIN_TEXT) -> str:
    """Best-effort linear text of ``path``. Empty text is a legal result."""
    extractor = Extractor(extractor)
    path = Path(path)
    if extractor is Extractor.PLAIN_TEXT:
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ExtractionError(f"cannot read {path}: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise ExtractionError(f"{path} is not UTF-8 text: {exc}") from exc

    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ExtractionError(f"cannot read {path}: {exc}") from exc

    if extractor is Extractor.PDF_BACKEND_A:
        from . import pdftext

        try:
            return pdftext.extract_pdf_text(data)
        except ValueError as exc:
            raise ExtractionError(f"{path}: {exc}") from exc
    return _extract_with_library(path, data)


def _extract_with_library(path: Path, data: bytes) -> str:
    try:
        import fitz  # pymupdf
    except ImportError:
        fitz = None
    if fitz is not None:
        try:
            with fitz.open(stream=data, filetype="pdf") as doc:
                return "\n".join(page.get_text() for page in doc)
        except Exception as exc:
            raise ExtractionError(f"{path}: {exc}") from exc

    try:
        import pypdf
    except ImportError:
        raise ExtractorUnavailableError(
            "PDF backend 'b' needs pymupdf or pypdf installed; "
            "use backend 'a' or install one of them"
        ) from None
    try:
        reader = pypdf.PdfReader(path)
        return "\n".join(page.extract_text() or "" for page in reader.pages)
    except Exception as exc:
        raise ExtractionError(f"{path}: {exc}") from exc


def ingest_document(
    path: str | Path,
    extractor: Extractor | str = Extractor.PLAIN_TEXT,
    doc_id: str | None = None,
) -> Document:
    """Extract and normalize one document. The id defaults to the file stem."""
    path = Path(path)
    extractor = Extractor(extractor)
    raw = extract_text(path, extractor)
    return Document(
        id=doc_id if doc_id is not None else path.stem,
        source_path=str(path),
        raw_text=raw,
        normalized_text=normalize_ligatures(raw),
        extractor=extractor,
    )
