"""Minimal streaming WARC 1.0 reader (plain or gzip) yielding HTML responses."""

from __future__ import annotations

import gzip
import io
import logging
import re
import zlib
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Optional
from uuid import UUID, uuid5

log = logging.getLogger(__name__)

HTML_TYPES = ("text/html", "application/xhtml+xml")
_CHARSET = re.compile(r"charset\s*=\s*[\"']?([\w.:-]+)", re.IGNORECASE)


class MalformedWarc(Exception):
    pass


@dataclass
class WarcStats:
    records: int = 0
    html: int = 0
    non_html: int = 0
    skipped: int = 0


@contextmanager
def _open(path) -> Iterator[BinaryIO]:
    with open(path, "rb") as raw:
        if raw.peek(2)[:2] == b"\x1f\x8b":
            with gzip.GzipFile(fileobj=raw) as fh:
                yield fh
        else:
            yield raw


def _parse_headers(lines: list[bytes]) -> dict[str, str]:
    headers: dict[str, str] = {}
    last = None
    for line in lines:
        text = line.decode("utf-8", errors="replace").rstrip("\r\n")
        if text[:1] in (" ", "\t") and last is not None:
            headers[last] += " " + text.strip()
            continue
        name, sep, value = text.partition(":")
        if not sep:
            raise MalformedWarc(f"bad header line {text!r}")
        last = name.strip().lower()
        headers[last] = value.strip()
    return headers


def _dechunk(body: bytes) -> bytes:
    out = io.BytesIO()
    stream = io.BytesIO(body)
    while True:
        size_line = stream.readline()
        if not size_line:
            break
        size = int(size_line.split(b";")[0].strip() or b"0", 16)
        if size == 0:
            break
        out.write(stream.read(size))
        stream.readline()
    return out.getvalue()


def parse_http_response(block: bytes) -> tuple[dict[str, str], bytes]:
    """Split an HTTP response block into lower-cased headers and decoded body bytes."""
    for sep in (b"\r\n\r\n", b"\n\n"):
        head, found, body = block.partition(sep)
        if found:
            break
    else:
        head, body = block, b""
    lines = head.split(b"\n")
    if not lines or not lines[0].startswith(b"HTTP/"):
        raise MalformedWarc("response block is not an HTTP response")
    headers = _parse_headers([ln for ln in lines[1:] if ln.strip()])
    if "chunked" in headers.get("transfer-encoding", "").lower():
        body = _dechunk(body)
    encoding = headers.get("content-encoding", "").lower()
    if encoding in ("gzip", "x-gzip"):
        body = zlib.decompress(body, 16 + zlib.MAX_WBITS)
    elif encoding == "deflate":
        body = zlib.decompress(body)
    return headers, body


def decode_body(body: bytes, content_type: str) -> str:
    match = _CHARSET.search(content_type)
    charset = match.group(1) if match else "utf-8"
    try:
        return body.decode(charset, errors="replace")
    except LookupError:
        return body.decode("utf-8", errors="replace")


class WarcReader:
    """Iterate ``(url, html)`` over the HTML response records of one WARC file.

    A truncated final record is counted in ``stats.skipped`` and ends iteration;
    a record whose WARC header cannot be parsed aborts with :class:`MalformedWarc`.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.stats = WarcStats()

    def _records(self, fh: BinaryIO) -> Iterator[tuple[dict[str, str], bytes]]:
        while True:
            line = fh.readline()
            while line in (b"\r\n", b"\n"):
                line = fh.readline()
            if not line:
                return
            if not line.startswith(b"WARC/"):
                raise MalformedWarc(f"{self.path}: expected WARC version line, got {line[:40]!r}")
            header_lines = []
            while True:
                line = fh.readline()
                if not line:
                    self.stats.skipped += 1
                    log.warning("%s: truncated record header", self.path)
                    return
                if line in (b"\r\n", b"\n"):
                    break
                header_lines.append(line)
            headers = _parse_headers(header_lines)
            try:
                length = int(headers["content-length"])
            except (KeyError, ValueError) as exc:
                raise MalformedWarc(f"{self.path}: missing or bad Content-Length") from exc
            block = fh.read(length)
            if len(block) < length:
                self.stats.skipped += 1
                log.warning("%s: truncated record block", self.path)
                return
            self.stats.records += 1
            yield headers, block

    def __iter__(self) -> Iterator[tuple[str, str]]:
        with _open(self.path) as fh:
            records = self._records(fh)
            while True:
                try:
                    headers, block = next(records)
                except StopIteration:
                    return
                except (EOFError, zlib.error, gzip.BadGzipFile):
                    self.stats.skipped += 1
                    log.warning("%s: compressed stream ends early", self.path)
                    return
                if headers.get("warc-type") != "response":
                    self.stats.non_html += 1
                    continue
                try:
                    http_headers, body = parse_http_response(block)
                except (MalformedWarc, ValueError, zlib.error):
                    self.stats.skipped += 1
                    continue
                content_type = http_headers.get("content-type", "")
                if not content_type.lower().startswith(HTML_TYPES):
                    self.stats.non_html += 1
                    continue
                self.stats.html += 1
                yield headers.get("warc-target-uri", ""), decode_body(body, content_type)


def iter_warc(path, stats: Optional[WarcStats] = None) -> Iterator[tuple[str, str]]:
    reader = WarcReader(path)
    if stats is not None:
        reader.stats = stats
    yield from reader


# ---------------------------------------------------------------------------
# writing, used to build fixtures


def http_response(body: bytes | str, content_type: str = "text/html; charset=utf-8", status: int = 200) -> bytes:
    if isinstance(body, str):
        body = body.encode("utf-8")
    head = (
        f"HTTP/1.1 {status} OK\r\n"
        f"Content-Type: {content_type}\r\n"
        f"Content-Length: {len(body)}\r\n\r\n"
    )
    return head.encode("ascii") + body


def warc_record(
    url: str,
    block: bytes,
    warc_type: str = "response",
    content_type: str = "application/http; msgtype=response",
) -> bytes:
    record_id = uuid5(UUID(int=0), f"{warc_type}:{url}:{len(block)}")
    date = datetime(2019, 4, 1, tzinfo=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    head = (
        "WARC/1.0\r\n"
        f"WARC-Type: {warc_type}\r\n"
        f"WARC-Record-ID: <urn:uuid:{record_id}>\r\n"
        f"WARC-Date: {date}\r\n"
        f"WARC-Target-URI: {url}\r\n"
        f"Content-Type: {content_type}\r\n"
        f"Content-Length: {len(block)}\r\n\r\n"
    )
    return head.encode("utf-8") + block + b"\r\n\r\n"


def write_warc(path, records: Iterable[bytes], compress: bool = False) -> Path:
    """Write pre-built records; with ``compress`` each record is its own gzip member."""
    path = Path(path)
    with open(path, "wb") as fh:
        for rec in records:
            fh.write(gzip.compress(rec, mtime=0) if compress else rec)
    return path
