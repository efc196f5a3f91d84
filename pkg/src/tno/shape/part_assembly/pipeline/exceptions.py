"""
Exceptions raised while ingesting data and managing training banks.
"""

from __future__ import annotations


class IngestError(ValueError):
    """
    Exception raised when an input file cannot be turned into a point cloud.
    """

    def __init__(self, path: str, specific_reason: str) -> None:
        """
        Initialize the exception for the offending file.

        :param path: the input file
        :param specific_reason: what is wrong with the file
        """
        self.path = path
        general_tip = "Inputs must be point-cloud files or watertight meshes."
        super().__init__(f"Cannot ingest {path}: {specific_reason}. {general_tip}")


class BankError(ValueError):
    """
    Exception raised when a training bank is missing, empty or inconsistent.
    """

    def __init__(self, specific_reason: str) -> None:
        """
        Initialize the exception with a reason.

        :param specific_reason: what is wrong with the bank
        """
        general_tip = "Run the collection optimization to build a training bank."
        super().__init__(f"{specific_reason}. {general_tip}")
