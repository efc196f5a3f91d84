"""
Encoder and decoder of the part autoencoder, expressed as computation graphs.
"""

from __future__ import annotations

import hashlib
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from tno.shape.part_assembly.numcore import (
    BatchNorm,
    Graph,
    LeakyRelu,
    Linear,
    MaxPool,
    PointwiseLinear,
    Reshape,
    Tensor,
    as_tensor,
)
from tno.shape.part_assembly.partvae.config import VaeConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VaeParams:
    """
    Weights and batch-normalization running statistics of the autoencoder.

    Frozen parameters are read-only: their mappings cannot be updated and their
    arrays cannot be written.
    """

    config: VaeConfig
    weights: Mapping[str, Tensor]
    stats: Mapping[str, Tensor]
    frozen: bool = False
    history: tuple[float, ...] = field(default=())
    """Mean training loss per epoch."""

    def freeze(self) -> VaeParams:
        """
        Return a read-only copy.

        :return: the frozen parameters
        """
        return VaeParams(self.config, _read_only(self.weights), _read_only(self.stats), True, self.history)

    def thaw(self) -> VaeParams:
        """
        Return a mutable copy, for example to resume training.

        :return: the unfrozen parameters
        """
        return VaeParams(
            self.config,
            {name: value.copy() for name, value in self.weights.items()},
            {name: value.copy() for name, value in self.stats.items()},
            False,
            self.history,
        )

    def checksum(self) -> str:
        """
        SHA-256 over the configuration, all tensor names, shapes and values.

        :return: hexadecimal digest
        """
        digest = hashlib.sha256(repr(sorted(self.config.to_dict().items())).encode())
        for group in (self.weights, self.stats):
            for name in sorted(group):
                value = np.ascontiguousarray(group[name], dtype="<f8")
                digest.update(name.encode())
                digest.update(repr(value.shape).encode())
                digest.update(value.tobytes())
        return digest.hexdigest()


def _read_only(tensors: Mapping[str, Tensor]) -> Mapping[str, Tensor]:
    copies = {}
    for name, value in tensors.items():
        copy = np.array(value, dtype=np.float64)
        copy.flags.writeable = False
        copies[name] = copy
    return MappingProxyType(copies)


def encoder_layers(config: VaeConfig) -> list[tuple[str, int, int]]:
    """
    Dense layers of the encoder as (prefix, fan in, fan out).

    :param config: the architecture
    :return: the layers, in evaluation order
    """
    widths = (3, *config.encoder_widths)
    layers = [(f"encoder.conv{index}", widths[index], widths[index + 1]) for index in range(len(widths) - 1)]
    layers.append(("encoder.fc_mu", widths[-1], config.latent_dim))
    layers.append(("encoder.fc_logvar", widths[-1], config.latent_dim))
    return layers


def decoder_layers(config: VaeConfig) -> list[tuple[str, int, int]]:
    """
    Dense layers of the decoder as (prefix, fan in, fan out).

    :param config: the architecture
    :return: the layers, in evaluation order
    """
    widths = (config.latent_dim, *config.decoder_widths)
    layers = [(f"decoder.fc{index}", widths[index], widths[index + 1]) for index in range(len(widths) - 1)]
    layers.append(("decoder.out", widths[-1], config.output_dim))
    return layers


def _norm_names(config: VaeConfig) -> list[tuple[str, int]]:
    return [(f"encoder.bn{index}", width) for index, width in enumerate(config.encoder_widths)] + [
        (f"decoder.bn{index}", width) for index, width in enumerate(config.decoder_widths)
    ]


def init_params(config: VaeConfig, seed: int | np.random.SeedSequence = 0) -> VaeParams:
    """
    Initialize weights and biases uniformly in +-1/sqrt(fan in), batch
    normalization scales to one and shifts to zero.

    :param config: the architecture
    :param seed: seed of the initialization
    :return: fresh, unfrozen parameters
    """
    rng = np.random.default_rng(seed)
    weights: dict[str, Tensor] = {}
    for prefix, fan_in, fan_out in encoder_layers(config) + decoder_layers(config):
        bound = 1.0 / math.sqrt(fan_in)
        weights[f"{prefix}.weight"] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        weights[f"{prefix}.bias"] = rng.uniform(-bound, bound, size=fan_out)
    stats: dict[str, Tensor] = {}
    for prefix, width in _norm_names(config):
        weights[f"{prefix}.gamma"] = np.ones(width)
        weights[f"{prefix}.beta"] = np.zeros(width)
        stats[f"{prefix}.running_mean"] = np.zeros(width)
        stats[f"{prefix}.running_var"] = np.ones(width)
    return VaeParams(config, weights, stats)


def _dense(graph: Graph, node: int, prefix: str, pointwise: bool = False) -> int:
    op = PointwiseLinear() if pointwise else Linear()
    return graph.apply(op, node, graph.parameter(f"{prefix}.weight"), graph.parameter(f"{prefix}.bias"), name=prefix)


def _norm_act(graph: Graph, params: VaeParams, node: int, prefix: str) -> int:
    config = params.config
    norm = BatchNorm(
        params.stats,  # type: ignore[arg-type]
        f"{prefix}.running_mean",
        f"{prefix}.running_var",
        config.bn_momentum,
        config.bn_eps,
    )
    normed = graph.apply(norm, node, graph.parameter(f"{prefix}.gamma"), graph.parameter(f"{prefix}.beta"), name=prefix)
    return graph.apply(LeakyRelu(config.leaky_slope), normed)


def build_encoder(graph: Graph, params: VaeParams, clouds: int) -> tuple[int, int]:
    """
    Append the encoder to a graph.

    :param graph: graph whose parameters are `params.weights`
    :param params: the autoencoder parameters
    :param clouds: node of shape (batch, points, 3)
    :return: nodes of the mean and log-variance, each of shape (batch, latent)
    """
    node = clouds
    for index in range(len(params.config.encoder_widths)):
        node = _dense(graph, node, f"encoder.conv{index}", pointwise=True)
        node = _norm_act(graph, params, node, f"encoder.bn{index}")
    pooled = graph.apply(MaxPool(), node)
    return _dense(graph, pooled, "encoder.fc_mu"), _dense(graph, pooled, "encoder.fc_logvar")


def build_decoder(graph: Graph, params: VaeParams, codes: int) -> int:
    """
    Append the decoder to a graph.

    :param graph: graph whose parameters are `params.weights`
    :param params: the autoencoder parameters
    :param codes: node of shape (batch, latent)
    :return: node of the decoded clouds, shape (batch, points, 3)
    """
    node = codes
    for index in range(len(params.config.decoder_widths)):
        node = _dense(graph, node, f"decoder.fc{index}")
        node = _norm_act(graph, params, node, f"decoder.bn{index}")
    flat = _dense(graph, node, "decoder.out")
    return graph.apply(Reshape((-1, params.config.n_points, 3)), flat)


def encode_batch(params: VaeParams, clouds: Tensor) -> tuple[Tensor, Tensor]:
    """
    Encode a batch of canonical clouds in evaluation mode.

    :param params: the autoencoder parameters
    :param clouds: array of shape (batch, points, 3)
    :raise ValueError: if the clouds do not have the configured number of points
    :return: means and log-variances, each of shape (batch, latent)
    """
    clouds = as_tensor(clouds)
    expected = (params.config.n_points, 3)
    if clouds.ndim != 3 or clouds.shape[1:] != expected:
        raise ValueError(f"expected clouds of shape (batch, {expected[0]}, 3), got {clouds.shape}")
    graph = Graph(params.weights, trainable=False)
    mean, logvar = build_encoder(graph, params, graph.input("clouds", (None, *expected)))
    graph.output("mu", mean)
    graph.output("logvar", logvar)
    result = graph.forward({"clouds": clouds})
    return result["mu"], result["logvar"]


def encode(params: VaeParams, points: Tensor) -> tuple[Tensor, Tensor]:
    """
    Encode one canonical cloud in evaluation mode.

    :param params: the autoencoder parameters
    :param points: array of shape (points, 3)
    :raise ValueError: if the cloud does not have the configured shape
    :return: the mean code and the log-variance
    """
    points = as_tensor(points)
    if points.shape != (params.config.n_points, 3):
        raise ValueError(f"expected a cloud of shape ({params.config.n_points}, 3), got {points.shape}")
    mean, logvar = encode_batch(params, points[None])
    return mean[0], logvar[0]


def decode_batch(params: VaeParams, codes: Tensor) -> Tensor:
    """
    Decode a batch of latent codes in evaluation mode.

    :param params: the autoencoder parameters
    :param codes: array of shape (batch, latent)
    :return: clouds of shape (batch, points, 3)
    """
    codes = as_tensor(codes)
    if codes.ndim != 2 or codes.shape[1] != params.config.latent_dim:
        raise ValueError(f"expected codes of shape (batch, {params.config.latent_dim}), got {codes.shape}")
    graph = Graph(params.weights, trainable=False)
    graph.output("clouds", build_decoder(graph, params, graph.input("codes", (None, params.config.latent_dim))))
    return graph.forward({"codes": codes})["clouds"]


def decode(params: VaeParams, code: Tensor) -> Tensor:
    """
    Decode one latent code in evaluation mode.

    :param params: the autoencoder parameters
    :param code: vector of shape (latent,)
    :return: the cloud, shape (points, 3)
    """
    code = as_tensor(code)
    if code.shape != (params.config.latent_dim,):
        raise ValueError(f"expected a code of shape ({params.config.latent_dim},), got {code.shape}")
    return decode_batch(params, code[None])[0]
