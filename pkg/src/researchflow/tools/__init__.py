from .arxiv import (ARXIV_ID_RE, SEARCH_RETRY_CAP, ArxivClient,
                    FixtureArxivClient, HttpArxivClient, PaperSummary,
                    format_summaries, parse_atom_feed)
from .fixtures import FixtureStore
from .hub import (DatasetDescription, FixtureHubClient, HttpHubClient,
                  HubClient, format_datasets)
from .latex import CompileResult, compile_latex
from .sandbox import (BLOCKLIST, ExecutionResult, Sandbox, sanitize_code,
                      truncate_stdout)

__all__ = [
    "ARXIV_ID_RE",
    "BLOCKLIST",
    "ArxivClient",
    "CompileResult",
    "DatasetDescription",
    "ExecutionResult",
    "FixtureArxivClient",
    "FixtureHubClient",
    "FixtureStore",
    "HttpArxivClient",
    "HttpHubClient",
    "HubClient",
    "PaperSummary",
    "SEARCH_RETRY_CAP",
    "Sandbox",
    "compile_latex",
    "format_datasets",
    "format_summaries",
    "parse_atom_feed",
    "sanitize_code",
    "truncate_stdout",
]
