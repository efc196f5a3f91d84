"""
Configuration of the part autoencoder architecture and of its training.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any


@dataclass(frozen=True)
class VaeConfig:
    """
    Layer sizes of the part autoencoder.

    The encoder is a stack of pointwise dense layers followed by a max-pool
    over points and two parallel dense heads (mean and log-variance). The
    decoder is a stack of dense layers whose last layer emits the flattened
    cloud.
    """

    n_points: int = 512
    latent_dim: int = 64
    encoder_widths: tuple[int, ...] = (32, 64, 64, 64)
    decoder_widths: tuple[int, ...] = (512, 512, 1024, 1024)
    leaky_slope: float = 0.01
    bn_momentum: float = 0.1
    bn_eps: float = 1e-5

    def __post_init__(self) -> None:
        object.__setattr__(self, "encoder_widths", tuple(int(width) for width in self.encoder_widths))
        object.__setattr__(self, "decoder_widths", tuple(int(width) for width in self.decoder_widths))
        if self.n_points < 2 or self.latent_dim < 1:
            raise ValueError(f"invalid sizes: n_points={self.n_points}, latent_dim={self.latent_dim}")
        if not self.encoder_widths or not self.decoder_widths:
            raise ValueError("encoder and decoder need at least one hidden layer")
        if min(self.encoder_widths + self.decoder_widths) < 1:
            raise ValueError("layer widths must be positive")
        if not 0.0 < self.bn_momentum <= 1.0 or self.bn_eps <= 0:
            raise ValueError(f"invalid batch normalization settings: {self.bn_momentum}, {self.bn_eps}")

    @property
    def output_dim(self) -> int:
        """
        :return: size of the flattened decoder output
        """
        return 3 * self.n_points

    @classmethod
    def reduced(cls) -> VaeConfig:
        """
        Small build for tests and desk-scale demonstrations.

        :return: the configuration
        """
        return cls(n_points=64, latent_dim=8, encoder_widths=(16, 32), decoder_widths=(64, 128))

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        data = asdict(self)
        data["encoder_widths"] = list(self.encoder_widths)
        data["decoder_widths"] = list(self.decoder_widths)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VaeConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        return cls(**data)


@dataclass(frozen=True)
class VaeTrainConfig:
    """
    Optimization settings of autoencoder training.
    """

    epochs: int = 500
    batch_size: int = 32
    beta: float = 1e-3
    """Weight of the KL term."""
    lr: float = 1e-3
    log_every: int = 25

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.batch_size < 2:
            raise ValueError(f"need epochs >= 1 and batch_size >= 2, got {self.epochs} and {self.batch_size}")
        if self.beta < 0 or self.lr <= 0:
            raise ValueError(f"need beta >= 0 and lr > 0, got {self.beta} and {self.lr}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be positive, got {self.log_every}")

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VaeTrainConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        return cls(**data)
