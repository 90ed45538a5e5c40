from enum import Enum, auto


class ArmKind(Enum):
    GAUSSIAN = auto()
    NONCENTRAL_CHISQ1 = auto()

    @classmethod
    def parse(cls, name: str) -> "ArmKind":
        key = name.strip().upper().replace('-', '_')
        aliases = {'NORMAL': 'GAUSSIAN', 'CHI2': 'NONCENTRAL_CHISQ1', 'CHISQ': 'NONCENTRAL_CHISQ1'}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"Unknown arm kind: {name}") from None


class BoundKind(Enum):
    """Which bound a verification run is judged against."""
    UB3_GEN = auto()
    UB5 = auto()
