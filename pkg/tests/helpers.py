"""Shared test scaffolding: fences, scripted gateways, tiny configs."""

import json
from pathlib import Path

from researchflow.core import Config
from researchflow.demo import SCAFFOLD_SOURCE, fence
from researchflow.gateway import Gateway, MockGateway, PriceTable, UsageLedger

FIXTURES = Path(__file__).parent / "fixtures"

__all__ = ["SCAFFOLD_SOURCE", "fence"]


def make_gateway(responses: list) -> Gateway:
    return Gateway(client=MockGateway(responses),
                   ledger=UsageLedger(PriceTable.default()))


class CapturingClient:
    """Wraps a client and keeps every request for prompt assertions."""

    def __init__(self, inner):
        self.inner = inner
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        return self.inner.complete(request)


def make_capturing_gateway(responses: list) -> tuple[Gateway, CapturingClient]:
    client = CapturingClient(MockGateway(responses))
    gateway = Gateway(client=client, ledger=UsageLedger(PriceTable.default()))
    return gateway, client


def small_config(**overrides) -> Config:
    defaults = dict(solver_steps=1, comparison_trials=1, papersolver_steps=1,
                    lit_review_paper_target=2)
    defaults.update(overrides)
    return Config(**defaults)


def example_review_json() -> str:
    return (FIXTURES / "review_example.json").read_text()


def review_response(overall: int = 7) -> str:
    data = json.loads(example_review_json())
    data["Overall"] = overall
    return ("THOUGHT:\nA focused empirical study.\n\nREVIEW JSON:\n"
            + fence("json", json.dumps(data)))
