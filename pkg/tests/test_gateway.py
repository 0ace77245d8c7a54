from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from researchflow.errors import (AuthError, ProviderError,
                                 ScriptExhaustedError, UnknownModelError)
from researchflow.gateway import (ChatRequest, Gateway, MockGateway,
                                  ModelPrice, OpenAIStyleClient, PriceTable,
                                  TRUNCATION_MARKER, Usage, UsageLedger,
                                  account_cost, truncate_text)


def _request(**kw):
    defaults = dict(model_id="mock", system="sys", user="hi",
                    temperature=0.8)
    defaults.update(kw)
    return ChatRequest(**defaults)


def test_mock_passthrough():
    mock = MockGateway([{"text": "```DIALOGUE\nhi\n```",
                         "prompt_tokens": 7, "completion_tokens": 3}])
    response = mock.complete(_request())
    assert response.text == "```DIALOGUE\nhi\n```"
    assert response.usage == Usage(7, 3)


def test_mock_exhaustion_and_seek():
    mock = MockGateway(["a", "b"])
    assert mock.complete(_request()).text == "a"
    mock.seek(2)
    with pytest.raises(ScriptExhaustedError):
        mock.complete(_request())
    mock.seek(1)
    assert mock.complete(_request()).text == "b"


class _FakeTransport:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = 0

    def __call__(self, url, headers, payload, timeout):
        self.calls += 1
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


_OK_BODY = {"choices": [{"message": {"content": "ok"}}],
            "usage": {"prompt_tokens": 5, "completion_tokens": 2}}


def test_retry_on_429_then_success(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "k")
    transport = _FakeTransport([(429, {}), (429, {}), (200, _OK_BODY)])
    client = OpenAIStyleClient(transport=transport, sleep=lambda s: None)
    response = client.complete(_request(model_id="gpt-4o"))
    assert response.text == "ok"
    assert client.attempts_made == 3
    assert transport.calls == 3


def test_auth_error_no_retry(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "bad")
    transport = _FakeTransport([(401, {})])
    client = OpenAIStyleClient(transport=transport, sleep=lambda s: None)
    with pytest.raises(AuthError):
        client.complete(_request(model_id="gpt-4o"))
    assert transport.calls == 1


def test_missing_key_is_auth_error(monkeypatch):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    client = OpenAIStyleClient(transport=_FakeTransport([]),
                               sleep=lambda s: None)
    with pytest.raises(AuthError):
        client.complete(_request())


def test_retries_exhausted(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "k")
    transport = _FakeTransport([(500, {})] * 5)
    client = OpenAIStyleClient(transport=transport, sleep=lambda s: None,
                               max_attempts=5)
    with pytest.raises(ProviderError):
        client.complete(_request(model_id="gpt-4o"))
    assert transport.calls == 5


def test_backoff_schedule(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "k")
    delays = []
    transport = _FakeTransport([(429, {})] * 4 + [(200, _OK_BODY)])
    client = OpenAIStyleClient(transport=transport, sleep=delays.append)
    client.complete(_request(model_id="gpt-4o"))
    assert delays == [1.0, 2.0, 4.0, 8.0]


def _per_million(usd):
    return Decimal(usd) / Decimal(1_000_000)


def test_account_cost_zero():
    assert account_cost(Usage(0, 0), "mock", PriceTable.default()) == 0


def test_account_cost_unit_arithmetic():
    prices = PriceTable({"m": ModelPrice(_per_million("2.50"),
                                         _per_million("10.00"))})
    assert account_cost(Usage(1_000_000, 0), "m", prices) == Decimal("2.50")
    # 200k in at 2.50/M is 0.50 plus 100k out at 10.00/M is 1.00
    assert account_cost(Usage(200_000, 100_000), "m", prices) == Decimal("1.50")


def test_unknown_model():
    with pytest.raises(UnknownModelError):
        account_cost(Usage(1, 1), "nope", PriceTable.default())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**7), st.integers(0, 10**7),
       st.integers(0, 10**7), st.integers(0, 10**7))
def test_cost_is_linear(p1, c1, p2, c2):
    prices = PriceTable.default()
    a, b = Usage(p1, c1), Usage(p2, c2)
    assert (account_cost(a, "mock", prices) + account_cost(b, "mock", prices)
            == account_cost(a + b, "mock", prices))


def test_ledger_total_equals_sum_of_entries():
    ledger = UsageLedger(PriceTable.default())
    gateway = Gateway(client=MockGateway(["x", "y", "z"]), ledger=ledger)
    for _ in range(3):
        gateway.complete(_request())
    assert ledger.total_cost() == sum((e.cost for e in ledger.entries),
                                      Decimal(0))
    assert len(ledger) == 3
    assert gateway.call_count == 3


def test_gateway_truncates_oversize_responses():
    big = "a" * 500
    gateway = Gateway(client=MockGateway([big]),
                      ledger=UsageLedger(PriceTable.default()),
                      text_budget=100)
    text = gateway.complete(_request())
    assert len(text) <= 100
    assert text.endswith(TRUNCATION_MARKER)


def test_truncate_text_noop_within_budget():
    assert truncate_text("short", 100) == "short"


def test_price_table_file_roundtrip(tmp_path):
    path = tmp_path / "prices.json"
    path.write_text('{"m": {"input_price_per_token": 0.0000025,'
                    ' "output_price_per_token": 0.00001}}')
    prices = PriceTable.from_file(path)
    assert account_cost(Usage(1_000_000, 0), "m", prices) == Decimal("2.5E-6") * 1_000_000
