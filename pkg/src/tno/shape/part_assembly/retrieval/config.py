"""
Configuration of the pose fitting and of the candidate preselection.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any


@dataclass(frozen=True)
class FitConfig:
    """
    Multi-start pose fitting of library parts and the size of the candidate set.

    `candidate_frac` is the fraction of the library that is pose-fitted per
    segment; 1.0 scans the whole library.
    """

    restarts: int = 8
    steps: int = 100
    lr: float = 0.01
    candidate_frac: float = 1.0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.steps < 0 or self.lr < 0:
            raise ValueError(f"steps and lr must be non-negative, got {self.steps} and {self.lr}")
        if not 0.0 < self.candidate_frac <= 1.0:
            raise ValueError(f"candidate_frac must lie in (0, 1], got {self.candidate_frac}")

    def candidate_count(self, library_size: int) -> int:
        """
        :param library_size: number of library parts
        :return: number of candidates to fit, at least one
        """
        return min(library_size, max(1, math.ceil(self.candidate_frac * library_size - 1e-9)))

    @classmethod
    def preset(cls, name: str) -> FitConfig:
        """
        Candidate set presets: "all", "25%" or "5%" of the library.

        :param name: preset name
        :raise ValueError: for unknown presets
        :return: the configuration
        """
        fractions = {"all": 1.0, "25%": 0.25, "5%": 0.05}
        if name not in fractions:
            raise ValueError(f"unknown preset {name!r}, expected one of {sorted(fractions)}")
        return cls(candidate_frac=fractions[name])

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FitConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        return cls(**data)
