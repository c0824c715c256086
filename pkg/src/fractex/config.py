"""Run configuration with defaults, file round-trip, and validation."""

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .dilation import DEFAULT_MEMORY_BUDGET
from .classify import DEFAULT_RIDGE

METHODS = ("bm", "mld")


@dataclass(frozen=True)
class RunConfig:
    r_max: int = 10
    levels: int = 3
    min_cell_side: int = 32
    holdout: float = 0.5
    ridge: float = DEFAULT_RIDGE
    seed: int = 0
    method: str = "bm"
    memory_budget: int = DEFAULT_MEMORY_BUDGET  # bytes of voxel storage
    workers: int = 1

    def validate(self):
        if self.r_max < 1:
            raise ValueError(f"r_max must be >= 1, got {self.r_max}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.min_cell_side < 1:
            raise ValueError(f"min_cell_side must be >= 1, got {self.min_cell_side}")
        if not 0.0 < self.holdout < 1.0:
            raise ValueError(f"holdout must be in (0, 1), got {self.holdout}")
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.memory_budget < 1:
            raise ValueError(f"memory_budget must be positive, got {self.memory_budget}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        return self

    def with_overrides(self, **overrides):
        """Apply non-None overrides and re-validate."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes).validate()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data).validate()

    def to_file(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data)
