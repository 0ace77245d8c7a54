"""Recorded-response store for the remote tool clients.

One JSON file per request, named by a hash of the request descriptor, so
tests and offline runs replay real traffic without touching the network.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


class FixtureStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    @staticmethod
    def key(descriptor: str) -> str:
        return hashlib.sha256(descriptor.encode()).hexdigest()[:16] + ".json"

    def path_for(self, descriptor: str) -> Path:
        return self.root / self.key(descriptor)

    def load(self, descriptor: str):
        path = self.path_for(descriptor)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def store(self, descriptor: str, payload) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.path_for(descriptor)
        path.write_text(json.dumps(payload, indent=2))
        return path
