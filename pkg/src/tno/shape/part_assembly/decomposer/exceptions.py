"""
Exceptions raised by the part decomposition optimizer.
"""

from __future__ import annotations


class NonFiniteLossError(ArithmeticError):
    """
    Exception raised when the decomposition loss of a target is not finite.
    """

    def __init__(self, target_id: str, part: int | None, specific_reason: str) -> None:
        """
        Initialize the exception with the target, the offending part and a reason.

        :param target_id: identifier of the target being decomposed
        :param part: index of the part whose cloud is not finite, None if every part is finite
        :param specific_reason: what was found to be non-finite
        """
        self.target_id = target_id
        self.part = part
        location = f"part {part}" if part is not None else "the pooled loss"
        general_tip = "Lower the learning rate or check the autoencoder weights."
        super().__init__(f"Target {target_id!r}, {location}: {specific_reason}. {general_tip}")


class CheckpointError(ValueError):
    """
    Exception raised when a decomposition checkpoint cannot be read.
    """

    def __init__(self, path: str, specific_reason: str) -> None:
        """
        Initialize the exception for the offending file.

        :param path: the checkpoint file
        :param specific_reason: what is wrong with the file
        """
        self.path = path
        super().__init__(f"Cannot read checkpoint {path}: {specific_reason}")
