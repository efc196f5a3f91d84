"""
The configuration of a complete run and its hash.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.partvae import VaeConfig, VaeTrainConfig
from tno.shape.part_assembly.pipeline.dataset import TARGET_POINTS
from tno.shape.part_assembly.retrieval import DEFAULT_ALPHA, DEFAULT_K_SET, FitConfig


@dataclass(frozen=True)
class RunConfig:
    """
    Everything that determines the outcome of a run.

    `short_n1` is the number of gradient steps of amortized inference and
    defaults to a third of `schedule.n1`.
    """

    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    k_set: tuple[int, ...] = DEFAULT_K_SET
    alpha: float = DEFAULT_ALPHA
    target_points: int = TARGET_POINTS
    vae: VaeConfig = field(default_factory=VaeConfig)
    train: VaeTrainConfig = field(default_factory=VaeTrainConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    workers: int = 1
    seed: int = 0
    symmetry: bool = True
    output_format: str = "segment"
    short_n1: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_set", tuple(int(k) for k in self.k_set))
        if not self.k_set or min(self.k_set) < 1 or len(set(self.k_set)) != len(self.k_set):
            raise ValueError(f"k_set must hold distinct positive part counts, got {self.k_set}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.workers < 1 or self.target_points < 1:
            raise ValueError(f"workers and target_points must be positive, got {self.workers}, {self.target_points}")
        if self.output_format not in ("segment", "direct"):
            raise ValueError(f"output_format must be 'segment' or 'direct', got {self.output_format!r}")
        if self.short_n1 is not None and self.short_n1 < 1:
            raise ValueError(f"short_n1 must be at least 1, got {self.short_n1}")

    @property
    def short_steps(self) -> int:
        """
        :return: number of gradient steps of amortized inference
        """
        return self.short_n1 if self.short_n1 is not None else max(1, self.schedule.n1 // 3)

    @classmethod
    def desk(cls, **overrides: Any) -> RunConfig:
        """
        Desk-scale run: the short schedule, the reduced autoencoder and fewer part counts.

        :param overrides: further field values
        :return: the configuration
        """
        base = cls(
            schedule=ScheduleConfig.desk(),
            k_set=(2, 4),
            vae=VaeConfig.reduced(),
            train=VaeTrainConfig(epochs=60, batch_size=8, lr=3e-3, log_every=20),
            fit=FitConfig(restarts=4, steps=40),
        )
        return replace(base, **overrides)

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        data = asdict(self)
        data["schedule"] = self.schedule.to_dict()
        data["vae"] = self.vae.to_dict()
        data["train"] = self.train.to_dict()
        data["fit"] = self.fit.to_dict()
        data["k_set"] = list(self.k_set)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        data = dict(data)
        kinds: dict[str, Any] = {
            "schedule": ScheduleConfig,
            "vae": VaeConfig,
            "train": VaeTrainConfig,
            "fit": FitConfig,
        }
        for name, kind in kinds.items():
            if name in data:
                data[name] = kind.from_dict(data[name])
        return cls(**data)

    def config_hash(self) -> str:
        """
        The number of workers does not change results and is left out.

        :return: the first 16 hex characters of the SHA-256 of the canonical JSON representation
        """
        data = self.to_dict()
        del data["workers"]
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def save(self, path: str | os.PathLike[str]) -> Path:
        """
        :param path: destination JSON file
        :return: the path written
        """
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> RunConfig:
        """
        :param path: a file written by `save`
        :return: the configuration
        """
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
