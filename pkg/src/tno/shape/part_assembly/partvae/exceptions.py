"""
Exceptions raised by the part autoencoder.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from tno.shape.part_assembly.partvae.network import VaeParams


class DegeneratePartError(ValueError):
    """
    Exception raised when a part cloud has no spatial extent.
    """

    def __init__(self, part_id: str) -> None:
        """
        Initialize the exception for the offending part.

        :param part_id: identifier of the part
        """
        self.part_id = part_id
        super().__init__(f"Part {part_id!r} is degenerate: all of its points coincide.")


class VaeDivergenceError(ArithmeticError):
    """
    Exception raised when the training loss of the autoencoder is no longer finite.

    The parameters of the last finite step are available as `checkpoint`.
    """

    def __init__(self, epoch: int, step: int, checkpoint: VaeParams) -> None:
        """
        Initialize the exception with the position of the divergence and the last good parameters.

        :param epoch: epoch in which the loss diverged
        :param step: global optimizer step in which the loss diverged
        :param checkpoint: parameters before the diverging step
        """
        self.epoch = epoch
        self.step = step
        self.checkpoint = checkpoint
        general_tip = "Lower the learning rate or the KL weight and resume from `checkpoint`."
        super().__init__(f"Training loss became non-finite in epoch {epoch} (step {step}). {general_tip}")


class WeightFileError(ValueError):
    """
    Exception raised when a weight file cannot be read.
    """

    def __init__(self, path: str, specific_reason: str) -> None:
        """
        Initialize the exception for the offending file.

        :param path: the weight file
        :param specific_reason: what is wrong with the file
        """
        self.path = path
        super().__init__(f"Cannot read weight file {path}: {specific_reason}")
