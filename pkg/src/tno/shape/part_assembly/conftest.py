"""
Fixtures shared by the tests of all sub-packages: a reduced autoencoder build
and a small library of box-shaped parts.
"""

from __future__ import annotations

import numpy as np
import pytest

from tno.shape.part_assembly.partvae import (
    PartLibrary,
    VaeConfig,
    VaeParams,
    VaeTrainConfig,
    canonicalize_part,
    init_params,
    train_vae,
)

REDUCED_POINTS = 64


def box_cloud(extents: tuple[float, float, float], count: int, seed: int) -> np.ndarray:
    """
    Points uniform in an axis-aligned box centered at the origin.

    :param extents: side lengths of the box
    :param count: number of points
    :param seed: random seed
    :return: the cloud
    """
    half = np.asarray(extents) / 2
    return np.random.default_rng(seed).uniform(-half, half, size=(count, 3))


@pytest.fixture(name="reduced_config", scope="session")
def fixture_reduced_config() -> VaeConfig:
    """
    The reduced 64-point architecture.

    :return: the configuration
    """
    return VaeConfig.reduced()


@pytest.fixture(name="reduced_params", scope="session")
def fixture_reduced_params(reduced_config: VaeConfig) -> VaeParams:
    """
    Freshly initialized, frozen parameters of the reduced architecture.

    :param reduced_config: the reduced architecture
    :return: the parameters
    """
    return init_params(reduced_config, seed=0).freeze()


@pytest.fixture(name="box_library", scope="session")
def fixture_box_library() -> PartLibrary:
    """
    Twelve canonical box parts of the reduced point count.

    :return: the library
    """
    rng = np.random.default_rng(11)
    entries = []
    for index in range(12):
        extents = tuple(rng.uniform(0.1, 0.5, size=3))
        raw = box_cloud(extents, 4 * REDUCED_POINTS, seed=100 + index)
        entries.append(canonicalize_part(raw, f"box-{index:02d}", "test", REDUCED_POINTS, seed=index))
    return PartLibrary(entries)


@pytest.fixture(name="trained_params", scope="session")
def fixture_trained_params(box_library: PartLibrary, reduced_config: VaeConfig) -> VaeParams:
    """
    The reduced autoencoder after a short training run on the box library.

    :param box_library: the training parts
    :param reduced_config: the reduced architecture
    :return: frozen, trained parameters
    """
    return train_vae(
        box_library,
        VaeTrainConfig(epochs=40, batch_size=6, lr=3e-3, log_every=10),
        reduced_config,
        seed=0,
    )
