"""Minimal text extraction from PDF content streams, stdlib only.

Handles uncompressed, Flate-compressed, and ASCII85-wrapped streams and
the common text-showing operators (Tj, TJ, ', "). Layout is approximated:
every text positioning operator becomes a line break. Good enough for
linear text; documents with figures or columns will come out mangled.
"""

from __future__ import annotations

import base64
import re
import zlib

_STREAM_RE = re.compile(rb"stream\r?\n(.*?)\r?\n?endstream", re.DOTALL)
_SHOW_OPS = (b"Tj", b"'", b'"')
_BREAK_OPS = (b"Td", b"TD", b"T*", b"ET", b"BT")

_ESCAPES = {
    b"n": b"\n",
    b"r": b"\r",
    b"t": b"\t",
    b"b": b"\b",
    b"f": b"\f",
    b"(": b"(",
    b")": b")",
    b"\\": b"\\",
}


def extract_pdf_text(data: bytes) -> str:
    """Best-effort linear text of a PDF byte string. Empty result is legal."""
    if not data.lstrip()[:5].startswith(b"%PDF-"):
        raise ValueError("missing %PDF header")
    pieces = []
    for match in _STREAM_RE.finditer(data):
        body = _decode_stream(match.group(1))
        if b"BT" not in body:
            continue
        text = _content_stream_text(body)
        if text:
            pieces.append(text)
    return "\n".join(pieces)


def _decode_stream(body: bytes) -> bytes:
    """First filter combination that yields a text-bearing content stream."""
    for candidate in _decode_candidates(body):
        if b"BT" in candidate:
            return candidate
    return b""


def _decode_candidates(body: bytes):
    yield body
    try:
        yield zlib.decompress(body)
    except zlib.error:
        pass
    stripped = body.strip()
    if not stripped.endswith(b"~>"):
        return
    stripped = stripped[:-2]
    if stripped.startswith(b"<~"):
        stripped = stripped[2:]
    try:
        raw = base64.a85decode(stripped)
    except ValueError:
        return
    yield raw
    try:
        yield zlib.decompress(raw)
    except zlib.error:
        pass


def _content_stream_text(body: bytes) -> str:
    lines: list[bytes] = [b""]
    pending: list[bytes] = []
    i, n = 0, len(body)
    while i < n:
        c = body[i : i + 1]
        if c == b"(":
            raw, i = _read_paren_string(body, i)
            pending.append(raw)
        elif c == b"<" and body[i : i + 2] != b"<<":
            raw, i = _read_hex_string(body, i)
            pending.append(raw)
        elif c == b"<":
            i += 2
        elif c == b"%":
            i = _skip_line(body, i)
        elif c.isalpha() or c in (b"'", b'"'):
            op, i = _read_operator(body, i)
            if op in _SHOW_OPS:
                if op != b"Tj":
                    lines.append(b"")
                lines[-1] += b"".join(pending)
            elif op == b"TJ":
                lines[-1] += b"".join(pending)
            elif op in _BREAK_OPS or op == b"T":
                lines.append(b"")
            pending.clear()
        elif c == b"*" :
            lines.append(b"")
            i += 1
        else:
            i += 1
    decoded = [_decode_string(line).strip() for line in lines]
    return "\n".join(line for line in decoded if line)


def _read_operator(body: bytes, i: int) -> tuple[bytes, int]:
    j = i
    while j < len(body) and body[j : j + 1] in b"'\"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz":
        j += 1
    return body[i:j], j


def _skip_line(body: bytes, i: int) -> int:
    while i < len(body) and body[i : i + 1] not in (b"\r", b"\n"):
        i += 1
    return i


def _read_paren_string(body: bytes, i: int) -> tuple[bytes, int]:
    assert body[i : i + 1] == b"("
    out = bytearray()
    depth = 1
    i += 1
    n = len(body)
    while i < n and depth > 0:
        c = body[i : i + 1]
        if c == b"\\":
            nxt = body[i + 1 : i + 2]
            if nxt in _ESCAPES:
                out += _ESCAPES[nxt]
                i += 2
            elif nxt.isdigit():
                j = i + 1
                while j < min(i + 4, n) and body[j : j + 1].isdigit():
                    j += 1
                out.append(int(body[i + 1 : j], 8) & 0xFF)
                i = j
            else:
                i += 2  # line continuation or unknown escape: drop
        elif c == b"(":
            depth += 1
            out += c
            i += 1
        elif c == b")":
            depth -= 1
            if depth > 0:
                out += c
            i += 1
        else:
            out += c
            i += 1
    return bytes(out), i


def _read_hex_string(body: bytes, i: int) -> tuple[bytes, int]:
    end = body.find(b">", i)
    if end < 0:
        return b"", len(body)
    digits = re.sub(rb"[^0-9a-fA-F]", b"", body[i + 1 : end])
    if len(digits) % 2:
        digits += b"0"
    return bytes.fromhex(digits.decode("ascii")), end + 1


def _decode_string(raw: bytes) -> str:
    if raw.startswith(b"\xfe\xff"):
        return raw[2:].decode("utf-16-be", errors="replace")
    return raw.decode("latin-1", errors="replace")
