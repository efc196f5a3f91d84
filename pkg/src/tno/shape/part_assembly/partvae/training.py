"""
Training of the part autoencoder with a Chamfer reconstruction loss and a
weighted KL term.
"""

from __future__ import annotations

import logging

import numpy as np

from tno.shape.part_assembly.geom import chamfer
from tno.shape.part_assembly.numcore import (
    Adam,
    Add,
    Chamfer,
    Exp,
    Graph,
    Mean,
    Mul,
    Scale,
    Shift,
    Square,
    Sub,
    Tensor,
    as_tensor,
)
from tno.shape.part_assembly.partvae.config import VaeConfig, VaeTrainConfig
from tno.shape.part_assembly.partvae.exceptions import VaeDivergenceError
from tno.shape.part_assembly.partvae.library import PartLibrary
from tno.shape.part_assembly.partvae.network import (
    VaeParams,
    build_decoder,
    build_encoder,
    decode_batch,
    encode_batch,
    init_params,
)

logger = logging.getLogger(__name__)


def kl_divergence(mu: Tensor, logvar: Tensor) -> float:
    """
    KL divergence of N(mu, diag exp(logvar)) from the standard normal.

    :param mu: mean vector
    :param logvar: log-variance vector
    :return: 0.5 * sum(mu^2 + exp(logvar) - logvar - 1)
    """
    mu, logvar = as_tensor(mu), as_tensor(logvar)
    return float(0.5 * np.sum(mu * mu + np.exp(logvar) - logvar - 1.0))


def vae_loss(points: Tensor, recon: Tensor, mu: Tensor, logvar: Tensor, beta: float) -> float:
    """
    Reconstruction loss of one part plus the weighted KL term.

    :param points: the input cloud
    :param recon: the decoded cloud
    :param mu: latent mean
    :param logvar: latent log-variance
    :param beta: weight of the KL term
    :return: chamfer(recon, points) + beta * KL
    """
    if np.shape(mu) != np.shape(logvar):
        raise ValueError(f"mean and log-variance shapes differ: {np.shape(mu)} and {np.shape(logvar)}")
    return chamfer(recon, points) + beta * kl_divergence(mu, logvar)


def _batches(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    # a batch of one has no batch statistics; fold it into its predecessor
    batches = [order[start : start + batch_size] for start in range(0, len(order), batch_size)]
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate([batches[-2], batches.pop()])
    return batches


def build_training_graph(params: VaeParams, beta: float) -> Graph:
    """
    Graph of the training loss with the reparameterization trick.

    Inputs are `clouds` (batch, points, 3) and the standard normal draw `eps`
    (batch, latent); the scalar output `loss` is the batch mean of the Chamfer
    reconstruction loss plus `beta` times the batch mean of the KL term.

    :param params: unfrozen parameters, read from `graph.parameters`
    :param beta: weight of the KL term
    :return: the graph
    """
    config = params.config
    graph = Graph(params.weights)
    clouds = graph.input("clouds", (None, config.n_points, 3))
    eps = graph.input("eps", (None, config.latent_dim))
    mu, logvar = build_encoder(graph, params, clouds)
    std = graph.apply(Exp(), graph.apply(Scale(0.5), logvar))
    codes = graph.apply(Add(), mu, graph.apply(Mul(), std, eps), name="z")
    recon = build_decoder(graph, params, codes)
    reconstruction = graph.apply(Chamfer(), recon, clouds, name="reconstruction")
    terms = graph.apply(Sub(), graph.apply(Add(), graph.apply(Square(), mu), graph.apply(Exp(), logvar)), logvar)
    # mean over all entries times the latent size is the batch mean of the per-sample sum
    kl = graph.apply(Scale(0.5 * beta * config.latent_dim), graph.apply(Mean(), graph.apply(Shift(-1.0), terms)))
    graph.output("loss", graph.apply(Add(), reconstruction, kl, name="loss"))
    return graph


def evaluate_loss(params: VaeParams, clouds: Tensor, beta: float, seed: int = 0) -> float:
    """
    Mean training loss over a set of clouds, with batch normalization in evaluation mode.

    :param params: the autoencoder parameters
    :param clouds: array of shape (count, points, 3)
    :param beta: weight of the KL term
    :param seed: seed of the reparameterization draw
    :return: the loss
    """
    clouds = as_tensor(clouds)
    graph = build_training_graph(params, beta)
    eps = np.random.default_rng(seed).standard_normal((len(clouds), params.config.latent_dim))
    return float(graph.forward({"clouds": clouds, "eps": eps})["loss"])


def train_vae(
    library: PartLibrary,
    train_config: VaeTrainConfig | None = None,
    vae_config: VaeConfig | None = None,
    seed: int = 0,
    initial: VaeParams | None = None,
) -> VaeParams:
    """
    Train the autoencoder on the canonical clouds of a library.

    Every epoch visits the parts in a seeded random order. The returned
    parameters are frozen and carry the mean loss of every epoch.

    :param library: the training parts
    :param train_config: optimization settings
    :param vae_config: architecture, ignored when `initial` is given
    :param seed: seed of the initialization, the shuffling and the reparameterization draws
    :param initial: parameters to resume from
    :raise ValueError: if the library has fewer than two parts or the wrong point count
    :raise VaeDivergenceError: if the loss becomes non-finite
    :return: the trained, frozen parameters
    """
    train_config = train_config if train_config is not None else VaeTrainConfig()
    if len(library) < 2:
        raise ValueError(f"training needs at least two parts, got {len(library)}")
    init_seq, shuffle_seq, noise_seq = np.random.SeedSequence(seed).spawn(3)
    if initial is not None:
        params = initial.thaw()
    else:
        params = init_params(vae_config if vae_config is not None else VaeConfig(), init_seq)
    config = params.config
    clouds = library.stack()
    if clouds.shape[1] != config.n_points:
        raise ValueError(f"library parts have {clouds.shape[1]} points, the network expects {config.n_points}")
    weights: dict[str, Tensor] = dict(params.weights)
    stats = params.stats
    assert isinstance(stats, dict)
    graph = build_training_graph(params, train_config.beta)
    optimizer = Adam(train_config.lr)
    shuffle_rng = np.random.default_rng(shuffle_seq)
    noise_rng = np.random.default_rng(noise_seq)
    history = list(params.history)
    step = 0
    logger.info(
        "Training part autoencoder on %d parts for %d epochs (batch %d).",
        len(library),
        train_config.epochs,
        train_config.batch_size,
    )
    for epoch in range(1, train_config.epochs + 1):
        losses = []
        for batch in _batches(shuffle_rng.permutation(len(clouds)), train_config.batch_size):
            step += 1
            saved_stats = {name: value.copy() for name, value in stats.items()}
            eps = noise_rng.standard_normal((len(batch), config.latent_dim))
            loss = float(graph.forward({"clouds": clouds[batch], "eps": eps}, training=True)["loss"])
            if not np.isfinite(loss):
                stats.clear()
                stats.update(saved_stats)
                checkpoint = VaeParams(config, weights, stats, history=tuple(history)).freeze()
                raise VaeDivergenceError(epoch, step, checkpoint)
            grads = graph.backward("loss")
            weights = optimizer.step(weights, grads)
            graph.parameters = weights
            losses.append(loss * len(batch))
        history.append(float(sum(losses) / len(clouds)))
        if epoch % train_config.log_every == 0 or epoch == train_config.epochs:
            logger.info("Epoch %d/%d: loss %.6f", epoch, train_config.epochs, history[-1])
        else:
            logger.debug("Epoch %d/%d: loss %.6f", epoch, train_config.epochs, history[-1])
    return VaeParams(config, weights, stats, history=tuple(history)).freeze()


def round_trip_errors(params: VaeParams, library: PartLibrary) -> dict[str, float]:
    """
    Chamfer distance between every part and its decoded mean code.

    :param params: the autoencoder parameters
    :param library: the parts
    :return: error per part id
    """
    clouds = library.stack()
    mu, _ = encode_batch(params, clouds)
    decoded = decode_batch(params, mu)
    return {part_id: chamfer(decoded[index], clouds[index]) for index, part_id in enumerate(library.ids)}

