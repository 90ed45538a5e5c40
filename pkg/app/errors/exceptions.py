"""Exception types shared by the numeric modules, the HTTP layer and the CLI."""

from dataclasses import asdict, dataclass


class ConfigError(ValueError):
    """Invalid configuration or arguments."""


class SchemaError(ValueError):
    """Data that does not conform to its declared schema."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ProtocolError(RuntimeError):
    """Master/worker protocol violation or lost connection."""


@dataclass(frozen=True)
class Condition:
    """One evaluated inequality ``lhs <relation> rhs``."""
    name: str
    lhs: float
    rhs: float
    relation: str
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


class ConditionError(ValueError):
    """A bound was requested outside the region where it is valid."""

    def __init__(self, message: str, diagnostics: list[Condition] | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])

    def failed(self) -> list[str]:
        return [c.name for c in self.diagnostics if not c.holds]
