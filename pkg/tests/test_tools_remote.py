import pytest

from researchflow.errors import NotFoundError
from researchflow.gateway import TRUNCATION_MARKER
from researchflow.tools import (ARXIV_ID_RE, DatasetDescription,
                                FixtureArxivClient, FixtureHubClient,
                                PaperSummary, format_datasets,
                                format_summaries, parse_atom_feed)


@pytest.fixture
def arxiv(tmp_path):
    return FixtureArxivClient(tmp_path / "fixtures")


def _summaries(n):
    return [PaperSummary(f"2301.{10000 + i}", f"Paper {i}", f"Abstract {i}")
            for i in range(n)]


def test_search_returns_recorded_entries_in_order(arxiv):
    recorded = _summaries(20)
    arxiv.record_search("attention", recorded)
    assert arxiv.search("attention") == recorded


def test_search_respects_max_results(arxiv):
    arxiv.record_search("attention", _summaries(20))
    assert len(arxiv.search("attention", max_results=20)) == 20


def test_unrecorded_query_is_empty_success(arxiv):
    assert arxiv.search("nothing recorded") == []


def test_empty_query_rejected(arxiv):
    with pytest.raises(ValueError):
        arxiv.search("   ")


def test_full_text_passthrough_and_not_found(arxiv):
    arxiv.record_full_text("2301.10000", "the full text")
    assert arxiv.full_text("2301.10000") == "the full text"
    with pytest.raises(NotFoundError):
        arxiv.full_text("2301.99999")


def test_oversize_full_text_truncated_with_marker(tmp_path):
    client = FixtureArxivClient(tmp_path, text_budget=100_000)
    client.record_full_text("2301.10000", "x" * 400_000)
    text = client.full_text("2301.10000")
    assert len(text) <= 100_000
    assert text.endswith(TRUNCATION_MARKER)


@pytest.mark.parametrize("good", ["2308.11483", "2308.11483v1", "cs/0301001",
                                  "math.GT/0309136"])
def test_id_pattern_accepts(good):
    assert ARXIV_ID_RE.match(good)


@pytest.mark.parametrize("bad", ["", "not-an-id", "23.11483", "2308.1"])
def test_id_pattern_rejects(bad):
    assert not ARXIV_ID_RE.match(bad)


ATOM = """<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <entry>
    <id>http://arxiv.org/abs/2308.11483v1</id>
    <title>Word  Order\n Sensitivity</title>
    <summary>How order matters.</summary>
  </entry>
  <entry>
    <id>http://arxiv.org/abs/1706.03762v7</id>
    <title>Attention Is All You Need</title>
    <summary>Transformers.</summary>
  </entry>
</feed>
"""


def test_atom_feed_parsing():
    results = parse_atom_feed(ATOM)
    assert [r.arxiv_id for r in results] == ["2308.11483v1", "1706.03762v7"]
    assert results[0].title == "Word Order Sensitivity"


def test_format_summaries_contains_ids_and_abstracts():
    text = format_summaries(_summaries(2))
    assert "arXiv ID: 2301.10000" in text
    assert "Abstract 1" in text


def test_hub_fixture_roundtrip(tmp_path):
    hub = FixtureHubClient(tmp_path)
    datasets = [DatasetDescription("mnist", "handwritten digits"),
                DatasetDescription("medqa", "medical questions")]
    hub.record_search("medical qa", datasets)
    assert hub.search("medical qa") == datasets
    assert hub.search("unknown") == []
    rendered = format_datasets(datasets)
    assert "Dataset ID: mnist" in rendered
    assert "handwritten digits" in rendered
