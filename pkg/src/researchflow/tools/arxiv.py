"""arXiv search and full-text retrieval.

The live client speaks the public Atom query API with polite rate limiting;
the fixture client replays recorded responses for offline runs. Both share
the same interface so callers never know which one they hold.
"""

from __future__ import annotations

import re
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Protocol

from ..errors import NetworkError, NotFoundError, RateLimitedError
from ..gateway import truncate_text
from .fixtures import FixtureStore

# new-style (2308.11483, optionally versioned) or old-style (cs.AI/0301001)
ARXIV_ID_RE = re.compile(
    r"^(\d{4}\.\d{4,5}(v\d+)?|[a-z\-]+(\.[A-Za-z\-]+)?/\d{7}(v\d+)?)$")

SEARCH_RETRY_CAP = 5  # total tries a caller may spend on failing/empty searches

_ATOM = "{http://www.w3.org/2005/Atom}"


@dataclass(frozen=True)
class PaperSummary:
    arxiv_id: str
    title: str
    abstract: str

    def __post_init__(self):
        if not ARXIV_ID_RE.match(self.arxiv_id):
            raise ValueError(f"not an arXiv identifier: {self.arxiv_id!r}")


class ArxivClient(Protocol):
    def search(self, query: str, max_results: int = 20) -> list[PaperSummary]: ...
    def full_text(self, arxiv_id: str) -> str: ...


def _search_descriptor(query: str, max_results: int) -> str:
    return f"arxiv-search|{query}|{max_results}"


def _full_text_descriptor(arxiv_id: str) -> str:
    return f"arxiv-fulltext|{arxiv_id}"


class FixtureArxivClient:
    """Replays recorded search results and paper texts from a directory.

    An unrecorded search is an empty (successful) result; an unrecorded
    full-text request is NotFound, mirroring the live behaviors callers
    must already handle.
    """

    def __init__(self, root: str | Path, text_budget: int = 100_000):
        self._store = FixtureStore(root)
        self._text_budget = text_budget

    def search(self, query: str, max_results: int = 20) -> list[PaperSummary]:
        if not query.strip():
            raise ValueError("query must be non-empty")
        payload = self._store.load(_search_descriptor(query, max_results))
        if payload is None:
            return []
        entries = [PaperSummary(**entry) for entry in payload]
        return entries[:max_results]

    def full_text(self, arxiv_id: str) -> str:
        payload = self._store.load(_full_text_descriptor(arxiv_id))
        if payload is None:
            raise NotFoundError(f"no recorded text for {arxiv_id}")
        return truncate_text(payload["text"], self._text_budget)

    # recording helpers, used by tests and fixture tooling
    def record_search(self, query: str, results: list[PaperSummary],
                      max_results: int = 20) -> None:
        self._store.store(
            _search_descriptor(query, max_results),
            [{"arxiv_id": r.arxiv_id, "title": r.title, "abstract": r.abstract}
             for r in results])

    def record_full_text(self, arxiv_id: str, text: str) -> None:
        self._store.store(_full_text_descriptor(arxiv_id), {"text": text})


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__()
        self._chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in ("script", "style"):
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in ("script", "style") and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data):
        if not self._skip_depth and data.strip():
            self._chunks.append(data.strip())

    def text(self) -> str:
        return "\n".join(self._chunks)


class HttpArxivClient:
    """Live client for the public query API. Thread-safe, rate limited."""

    def __init__(self, *, base_url: str = "https://export.arxiv.org/api/query",
                 abs_url: str = "https://arxiv.org/abs",
                 min_interval: float = 3.0, timeout: float = 30.0,
                 text_budget: int = 100_000):
        self._base_url = base_url
        self._abs_url = abs_url.rstrip("/")
        self._min_interval = min_interval
        self._timeout = timeout
        self._text_budget = text_budget
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _throttle(self):
        with self._lock:
            wait = self._min_interval - (time.monotonic() - self._last_request)
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _get(self, url: str, params: dict | None = None):
        import requests

        self._throttle()
        try:
            resp = requests.get(url, params=params, timeout=self._timeout)
        except requests.RequestException as exc:
            raise NetworkError(f"arXiv request failed: {exc}") from exc
        if resp.status_code in (429, 503):
            raise RateLimitedError(f"arXiv rate limited (HTTP {resp.status_code})")
        return resp

    def search(self, query: str, max_results: int = 20) -> list[PaperSummary]:
        if not query.strip():
            raise ValueError("query must be non-empty")
        resp = self._get(self._base_url, params={
            "search_query": f"all:{query}",
            "start": 0,
            "max_results": max_results,
        })
        if resp.status_code != 200:
            raise NetworkError(f"arXiv search HTTP {resp.status_code}")
        return parse_atom_feed(resp.text)[:max_results]

    def full_text(self, arxiv_id: str) -> str:
        resp = self._get(f"{self._abs_url}/{arxiv_id}")
        if resp.status_code == 404:
            raise NotFoundError(f"arXiv id not found: {arxiv_id}")
        if resp.status_code != 200:
            raise NetworkError(f"arXiv full text HTTP {resp.status_code}")
        extractor = _TextExtractor()
        extractor.feed(resp.text)
        return truncate_text(extractor.text(), self._text_budget)


def parse_atom_feed(xml_text: str) -> list[PaperSummary]:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise NetworkError(f"malformed arXiv feed: {exc}") from exc
    results = []
    for entry in root.findall(f"{_ATOM}entry"):
        raw_id = (entry.findtext(f"{_ATOM}id") or "").rsplit("/", 1)[-1]
        title = " ".join((entry.findtext(f"{_ATOM}title") or "").split())
        abstract = " ".join((entry.findtext(f"{_ATOM}summary") or "").split())
        if not raw_id:
            continue
        try:
            results.append(PaperSummary(raw_id, title, abstract))
        except ValueError:
            continue
    return results


def format_summaries(summaries: list[PaperSummary]) -> str:
    """Render search results the way agents see them in feedback."""
    if not summaries:
        return "No papers were found for that query."
    blocks = [
        f"arXiv ID: {s.arxiv_id}\nTitle: {s.title}\nSummary: {s.abstract}"
        for s in summaries
    ]
    return "\n\n".join(blocks)
