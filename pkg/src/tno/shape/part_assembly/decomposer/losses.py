"""
The gradient-phase objective: volumetric Chamfer reconstruction plus a
pairwise overlap penalty between posed parts.
"""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np
from scipy.spatial.distance import cdist

from tno.shape.part_assembly.decomposer.exceptions import NonFiniteLossError
from tno.shape.part_assembly.decomposer.state import DecompositionState
from tno.shape.part_assembly.geom import PointCloud, SymmetryPlane, validate_cloud
from tno.shape.part_assembly.numcore import (
    Add,
    Affine,
    Chamfer,
    Concat,
    Graph,
    Overlap,
    Reshape,
    RigidTransform,
    Take,
    Tensor,
)
from tno.shape.part_assembly.partvae import VaeParams, build_decoder

logger = logging.getLogger(__name__)


def overlap_penalty(first: PointCloud, second: PointCloud, tau: float) -> float:
    """
    Mean hinge `max(0, tau - |p - q|)` over all cross pairs of two clouds.

    :param first: first cloud
    :param second: second cloud
    :param tau: contact distance
    :return: the penalty
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    distances = cdist(validate_cloud(first, "first"), validate_cloud(second, "second"))
    return float(np.maximum(0.0, tau - distances).mean())


def overlap_pairs(k: int, mirrored: tuple[int, ...]) -> list[tuple[int, int]]:
    """
    Unordered pairs of posed parts that are checked for overlap.

    Posed parts are the k free parts followed by the mirrors of `mirrored`; a
    free part and its own mirror are never paired.

    :param k: number of free parts
    :param mirrored: free parts that have a mirror
    :return: the pairs
    """
    total = k + len(mirrored)
    excluded = {(index, k + position) for position, index in enumerate(mirrored)}
    return [(a, b) for a in range(total) for b in range(a + 1, total) if (a, b) not in excluded]


class Phase1Objective:
    """
    Differentiable objective of one state layout (part count, mirrored parts
    and symmetry plane).

    The inputs `codes`, `translations` and `yaws` are differentiable; the
    decoder weights are fixed. Outputs are `loss`, `recon`, `overlap` and the
    stack of posed clouds `stack`.
    """

    def __init__(
        self,
        params: VaeParams,
        k: int,
        tau: float,
        plane: SymmetryPlane | None = None,
        mirrored: tuple[int, ...] = (),
    ) -> None:
        """
        Build the graph of the objective.

        :param params: frozen autoencoder parameters
        :param k: number of free parts
        :param tau: contact distance of the overlap penalty
        :param plane: symmetry plane, required when `mirrored` is non-empty
        :param mirrored: free parts that get a mirrored duplicate
        """
        if mirrored and plane is None:
            raise ValueError("mirrored parts need a symmetry plane")
        self.k = k
        self.mirrored = tuple(mirrored)
        latent = params.config.latent_dim
        graph = Graph(params.weights, trainable=False)
        codes = graph.input("codes", (k, latent), differentiable=True)
        translations = graph.input("translations", (k, 3), differentiable=True)
        yaws = graph.input("yaws", (k,), differentiable=True)
        target = graph.input("target", (None, 3))
        posed = graph.apply(RigidTransform(), build_decoder(graph, params, codes), translations, yaws, name="posed")
        stack = posed
        if self.mirrored:
            assert plane is not None
            matrix, offset = plane.reflection()
            mirrors = graph.apply(Affine(matrix, offset), graph.apply(Take(self.mirrored), posed), name="mirrors")
            stack = graph.apply(Concat(), posed, mirrors, name="stack")
        recon = graph.apply(Chamfer(), graph.apply(Reshape((-1, 3)), stack), target, name="recon")
        overlap = graph.apply(Overlap(overlap_pairs(k, self.mirrored), tau), stack, name="overlap")
        graph.output("loss", graph.apply(Add(), recon, overlap, name="loss"))
        graph.output("recon", recon)
        graph.output("overlap", overlap)
        graph.output("stack", stack)
        self.graph = graph

    @classmethod
    def for_state(cls, state: DecompositionState, params: VaeParams, tau: float) -> Phase1Objective:
        """
        :param state: the state whose layout is used
        :param params: frozen autoencoder parameters
        :param tau: contact distance of the overlap penalty
        :return: the objective
        """
        return cls(params, state.k, tau, state.symmetry, state.mirrored)

    def evaluate(self, variables: dict[str, Tensor], target: PointCloud) -> dict[str, Tensor]:
        """
        :param variables: codes, translations and yaws
        :param target: the target cloud
        :return: all outputs
        """
        return self.graph.forward({**variables, "target": target})

    def gradients(self) -> dict[str, Tensor]:
        """
        :return: gradients of the loss of the last evaluation per variable
        """
        return self.graph.backward("loss")

    def owner(self, position: int) -> int:
        """
        :param position: index in the stack of posed clouds
        :return: the free part that produced it
        """
        return position if position < self.k else self.mirrored[position - self.k]


def check_finite(state: DecompositionState, objective: Phase1Objective, outputs: dict[str, Tensor]) -> None:
    """
    Raise if the loss is not finite, naming the first part with a non-finite cloud.

    :param state: the evaluated state
    :param objective: its objective
    :param outputs: outputs of the evaluation
    :raise NonFiniteLossError: if the loss is not finite
    """
    if np.isfinite(outputs["loss"]):
        return
    for position, cloud in enumerate(outputs["stack"]):
        if not np.all(np.isfinite(cloud)):
            raise NonFiniteLossError(state.target_id, objective.owner(position), "the decoded cloud is not finite")
    raise NonFiniteLossError(state.target_id, None, f"loss is {float(outputs['loss'])}")


def phase1_loss(
    state: DecompositionState, params: VaeParams, tau: float, objective: Phase1Objective | None = None
) -> tuple[float, list[PointCloud]]:
    """
    Evaluate the objective of a state.

    :param state: the state
    :param params: frozen autoencoder parameters
    :param tau: contact distance of the overlap penalty
    :param objective: prebuilt objective of the state's layout
    :raise NonFiniteLossError: if the loss is not finite
    :return: the loss and the posed clouds, free parts first
    """
    objective = objective if objective is not None else Phase1Objective.for_state(state, params, tau)
    outputs = objective.evaluate(state.variables(), state.target)
    check_finite(state, objective, outputs)
    return float(outputs["loss"]), list(outputs["stack"])


def refresh(state: DecompositionState, params: VaeParams, tau: float) -> DecompositionState:
    """
    Recompute the decoded cache, the loss and the reconstruction error.

    :param state: the state
    :param params: frozen autoencoder parameters
    :param tau: contact distance of the overlap penalty
    :raise NonFiniteLossError: if the loss is not finite
    :return: the refreshed state
    """
    objective = Phase1Objective.for_state(state, params, tau)
    outputs = objective.evaluate(state.variables(), state.target)
    check_finite(state, objective, outputs)
    return replace(
        state,
        decoded=tuple(np.array(cloud) for cloud in outputs["stack"]),
        loss=float(outputs["loss"]),
        recon=float(outputs["recon"]),
    )
