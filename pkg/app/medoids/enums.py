from enum import Enum, auto


class ColumnKind(Enum):
    NUMERIC = auto()
    CATEGORICAL = auto()


class MetricKind(Enum):
    L1 = auto()
    L2 = auto()
    SQUARED_L2 = auto()
    GOWER = auto()

    @classmethod
    def parse(cls, name: str) -> "MetricKind":
        key = name.strip().upper().replace('-', '_')
        aliases = {'SQUAREDL2': 'SQUARED_L2', 'SQL2': 'SQUARED_L2', 'MANHATTAN': 'L1', 'EUCLIDEAN': 'L2'}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"Unknown metric: {name}") from None


class Algorithm(Enum):
    MCPAM = auto()
    PAM = auto()
    EXHAUSTIVE = auto()

    @classmethod
    def parse(cls, name: str) -> "Algorithm":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"Unknown algorithm: {name}") from None


class RoundOutcome(Enum):
    """How one inner sampling round of the swap search ended."""
    NO_IMPROVEMENT = auto()
    SWAP = auto()
    GROW = auto()
    N_MAX = auto()
