"""
Configuration of the three-phase decomposition schedule.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any

from tno.shape.part_assembly.geom import SymmetryConfig


@dataclass(frozen=True)
class ScheduleConfig:
    """
    Step counts, thresholds and phase toggles of the decomposition schedule.

    One schedule runs `n3` borrow rounds; every borrow round runs `n2` shift
    rounds of `n1` gradient steps followed by a part shift. A final gradient
    run of `final_n1` steps (by default `n1`) closes the schedule.
    """

    n1: int = 200
    n2: int = 4
    n3: int = 2
    lr: float = 0.008
    tau_overlap: float = 0.1
    p_filter: float = 0.3
    tau_cc: float = 0.05
    swap_frac: float = 0.15
    worst_frac: float = 0.6
    """Fraction of targets, by error, that try to borrow."""
    accept_frac: float = 0.1
    """Error quantile a borrowed state has to reach."""
    neighbors: int = 5
    phase2: bool = True
    phase3: bool = True
    global_filter: bool = False
    """Filter the best covered points over the whole target instead of per segment."""
    final_n1: int | None = None
    symmetry: SymmetryConfig = field(default_factory=SymmetryConfig)

    def __post_init__(self) -> None:
        if isinstance(self.symmetry, dict):
            object.__setattr__(self, "symmetry", SymmetryConfig.from_dict(self.symmetry))
        if min(self.n1, self.n2, self.n3, self.neighbors) < 1:
            raise ValueError(f"step and round counts must be at least 1: {self.n1}, {self.n2}, {self.n3}")
        if self.final_n1 is not None and self.final_n1 < 0:
            raise ValueError(f"final_n1 must be non-negative, got {self.final_n1}")
        if self.lr < 0 or self.tau_overlap <= 0 or self.tau_cc <= 0:
            raise ValueError(f"invalid lr or thresholds: {self.lr}, {self.tau_overlap}, {self.tau_cc}")
        for name in ("p_filter", "swap_frac", "worst_frac", "accept_frac"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")

    @property
    def final_steps(self) -> int:
        """
        :return: number of gradient steps of the closing run
        """
        return self.n1 if self.final_n1 is None else self.final_n1

    @classmethod
    def desk(cls, **overrides: Any) -> ScheduleConfig:
        """
        Shorter schedule for desk-scale runs.

        :param overrides: further field values
        :return: the configuration
        """
        return replace(cls(n1=60, n2=3, n3=2), **overrides)

    def phase_one_only(self) -> ScheduleConfig:
        """
        :return: the same schedule with part shift and borrowing disabled
        """
        return replace(self, phase2=False, phase3=False)

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ScheduleConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        data = dict(data)
        if "symmetry" in data:
            data["symmetry"] = SymmetryConfig.from_dict(data["symmetry"])
        return cls(**data)
