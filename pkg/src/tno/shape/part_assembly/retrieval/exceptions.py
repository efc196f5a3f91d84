"""
Exceptions raised during part retrieval.
"""

from __future__ import annotations


class EmptyLibraryError(ValueError):
    """
    Exception raised when parts are retrieved from an empty library.
    """

    def __init__(self, specific_reason: str = "the part library is empty") -> None:
        """
        Initialize the exception with a reason.

        :param specific_reason: what was attempted on the empty library
        """
        general_tip = "Ingest or generate a part library first."
        super().__init__(f"{specific_reason}. {general_tip}")


class EmptyCandidateListError(ValueError):
    """
    Exception raised when the part count is selected among no candidates.
    """

    def __init__(self) -> None:
        """
        Initialize the exception.
        """
        super().__init__("No part-count candidates to select from. Every decomposition of the target failed.")
