"""
Exceptions raised by the point-cloud kernels.
"""


class EmptyPointCloudError(ValueError):
    """
    Exception raised when an operation receives a point cloud without points.
    """

    def __init__(self, what: str) -> None:
        """
        Initialize the exception for the offending argument.

        :param what: name of the empty argument
        """
        super().__init__(f"The point cloud `{what}` is empty; at least one point is required.")


class MeshSamplingError(RuntimeError):
    """
    Exception raised when the interior of a mesh cannot be sampled.
    """

    def __init__(self, specific_reason: str) -> None:
        """
        Initialize the exception with a specific reason and a general tip.

        :param specific_reason: the specific reason why sampling failed
        """
        general_tip = "Interior sampling requires a closed, consistently oriented (watertight) mesh."
        super().__init__(f"{specific_reason} {general_tip}")
