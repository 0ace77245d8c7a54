"""Exception hierarchy shared across the pipeline."""


class ResearchFlowError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ResearchFlowError):
    """Invalid configuration value or unknown config key."""


# --- command grammar ---

class NoCommandError(ResearchFlowError):
    """No well-formed fenced command found in a model response."""


class MalformedEditError(ResearchFlowError):
    """An EDIT keyword line did not carry two integer line indices."""


# --- gateway ---

class ProviderError(ResearchFlowError):
    """Chat provider failed after retries were exhausted."""


class AuthError(ProviderError):
    """Credentials rejected by the provider; never retried."""


class UnknownModelError(ResearchFlowError):
    """Model id missing from the price table."""


class ScriptExhaustedError(ProviderError):
    """Scripted mock gateway ran out of canned responses."""


# --- tools ---

class NetworkError(ResearchFlowError):
    """Transport-level failure talking to an external service."""


class RateLimitedError(NetworkError):
    """Remote service asked us to back off."""


class NotFoundError(ResearchFlowError):
    """Requested remote resource does not exist."""


class SandboxSpawnError(ResearchFlowError):
    """The sandbox child process could not be started at all."""


class CompilerMissingError(ResearchFlowError):
    """An explicitly configured document compiler is not installed."""


# --- solvers / phases ---

class PhaseFailedError(ResearchFlowError):
    """A pipeline phase ran out of steps without a terminal command."""

    def __init__(self, phase, message):
        super().__init__(message)
        self.phase = phase


class RangeError(ResearchFlowError):
    """Line-edit range outside the document or inverted."""


class RepairExhaustedError(ResearchFlowError):
    """Code repair gave up after the configured number of attempts."""


class ExperimentsFailedError(ResearchFlowError):
    """No experiment candidate ever compiled."""


class ScaffoldFailedError(ResearchFlowError):
    """Could not generate a compilable report scaffold."""


class SectionFailedError(ResearchFlowError):
    """Could not generate a compilable body for a report section."""


class CompileRejectedError(ResearchFlowError):
    """A document edit was rejected because the result does not compile."""


class ReviewUnavailableError(ResearchFlowError):
    """A reviewer failed to produce a valid review after re-asks."""


class ReportFailedError(ResearchFlowError):
    """No compiling report document exists at the end of report writing."""


class StructureError(ResearchFlowError):
    """Report document does not have the required section structure."""


# --- orchestration ---

class CorruptStateError(ResearchFlowError):
    """A persisted run state file cannot be parsed; files are preserved."""


class RunNotFoundError(ResearchFlowError):
    """Unknown run id."""


class ConflictError(ResearchFlowError):
    """Gate decision posted for a phase that is not awaiting one."""
