"""Dataset-hub search (live HTTP client plus recorded-fixture client)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from ..errors import NetworkError, RateLimitedError
from .fixtures import FixtureStore


@dataclass(frozen=True)
class DatasetDescription:
    dataset_id: str
    description: str

    def __post_init__(self):
        if not self.dataset_id:
            raise ValueError("dataset_id must be non-empty")


class HubClient(Protocol):
    def search(self, query: str) -> list[DatasetDescription]: ...


def _descriptor(query: str) -> str:
    return f"hub-search|{query}"


class FixtureHubClient:
    def __init__(self, root: str | Path):
        self._store = FixtureStore(root)

    def search(self, query: str) -> list[DatasetDescription]:
        payload = self._store.load(_descriptor(query))
        if payload is None:
            return []
        return [DatasetDescription(**entry) for entry in payload]

    def record_search(self, query: str,
                      results: list[DatasetDescription]) -> None:
        self._store.store(_descriptor(query), [
            {"dataset_id": r.dataset_id, "description": r.description}
            for r in results
        ])


class HttpHubClient:
    def __init__(self, *, base_url: str = "https://huggingface.co/api/datasets",
                 timeout: float = 30.0, limit: int = 10):
        self._base_url = base_url
        self._timeout = timeout
        self._limit = limit

    def search(self, query: str) -> list[DatasetDescription]:
        import requests

        try:
            resp = requests.get(self._base_url, params={
                "search": query, "limit": self._limit, "full": "true",
            }, timeout=self._timeout)
        except requests.RequestException as exc:
            raise NetworkError(f"hub request failed: {exc}") from exc
        if resp.status_code == 429:
            raise RateLimitedError("hub rate limited")
        if resp.status_code != 200:
            raise NetworkError(f"hub search HTTP {resp.status_code}")
        results = []
        for entry in resp.json():
            dataset_id = entry.get("id") or ""
            if not dataset_id:
                continue
            description = entry.get("description") or entry.get(
                "cardData", {}).get("pretty_name") or ""
            results.append(DatasetDescription(dataset_id, str(description)))
        return results


def format_datasets(results: list[DatasetDescription]) -> str:
    if not results:
        return "No datasets were found for that query."
    return "\n\n".join(
        f"Dataset ID: {d.dataset_id}\nDescription: {d.description}"
        for d in results
    )
