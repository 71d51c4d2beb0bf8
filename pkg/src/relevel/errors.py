"""Exception hierarchy shared across the harness.

The CLI maps these onto exit codes: domain failures exit 1, usage and
configuration problems exit 2, transport problems exit 3.
"""


class RelevelError(Exception):
    """Base class for all harness errors."""


class DomainError(RelevelError):
    """Input violates an operation's precondition or domain."""


class EmptyInputError(DomainError):
    """Text was empty or whitespace-only."""


class UnsupportedGradeError(DomainError):
    """Target grade outside the supported {4, 6, 8} set."""


class ParseError(DomainError):
    """Malformed input file (JSON syntax, bad structure)."""


class SchemaError(DomainError):
    """Structurally valid input that violates the corpus schema."""


class ChainingError(DomainError):
    """Prompt-chaining stage 2 cannot be rendered (empty stage-1 response)."""


class SelectorFormatError(DomainError):
    """Selector agent produced unparseable output twice in a row."""


class DegenerateSampleError(DomainError):
    """Statistic undefined for the sample (n < 2 or zero variance)."""


class JoinError(DomainError):
    """A generated row references a passage missing from the corpus."""


class ConfigurationError(RelevelError):
    """Missing credentials, bad config file, or invalid option combination."""


class TransportError(RelevelError):
    """Network or provider failure after retries were exhausted."""


class CassetteMissError(RelevelError):
    """Replay-mode request whose fingerprint is not in the cassette."""

    def __init__(self, fingerprint: str):
        super().__init__(f"no cassette entry for fingerprint {fingerprint}")
        self.fingerprint = fingerprint
