"""
Exceptions raised by the reverse-mode differentiation engine.
"""


class GraphStructureError(Exception):
    """
    Exception raised when the operands of a graph node have inconsistent shapes.
    """

    def __init__(self, node: str, specific_reason: str) -> None:
        """
        Initialize the exception with the offending node and the reason.

        :param node: description of the node whose operands are inconsistent
        :param specific_reason: the specific reason why the shapes are inconsistent
        """
        self.node = node
        super().__init__(f"Node {node}: {specific_reason}")


class GraphUsageError(Exception):
    """
    Exception raised when the graph is used in the wrong order.
    """

    def __init__(self, specific_reason: str) -> None:
        """
        Initialize the exception with a specific reason and a general usage tip.

        :param specific_reason: the specific reason why the call is not allowed
        """
        general_tip = "Call `Graph.forward(...)` before `Graph.backward(...)`."
        super().__init__(f"{specific_reason} {general_tip}")


class NonFiniteError(ArithmeticError):
    """
    Exception raised when a function that must be finite is not.
    """
