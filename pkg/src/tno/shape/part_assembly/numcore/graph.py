"""
Fixed computation graphs with forward evaluation and reverse-mode
differentiation.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from tno.shape.part_assembly.numcore.base import Operation
from tno.shape.part_assembly.numcore.exceptions import (
    GraphStructureError,
    GraphUsageError,
    NonFiniteError,
)
from tno.shape.part_assembly.numcore.utils import (
    DeclaredShape,
    Shape,
    Tensor,
    all_finite,
    as_tensor,
    shape_matches,
)

logger = logging.getLogger(__name__)


@dataclass
class Node:
    """
    A node of a computation graph: a graph input, a parameter or an operation.
    """

    index: int
    name: str
    op: Operation | None = None
    operands: tuple[int, ...] = ()
    declared_shape: DeclaredShape | None = None
    requires_grad: bool = False
    source: str = field(default="op")

    def __str__(self) -> str:
        label = self.name if self.op is None else f"{self.name} [{self.op}]"
        return f"#{self.index} {label}"


class Graph:
    """
    A directed acyclic computation graph over dense float64 tensors.

    Nodes are appended in topological order: every operation refers only to
    nodes that already exist. Parameters are looked up by name in the
    `parameters` mapping at forward time, so the graph can be reused after the
    parameters are updated. Gradients are returned for every trainable
    parameter and for every input that was declared differentiable.
    """

    def __init__(self, parameters: Mapping[str, Tensor] | None = None, trainable: bool = True) -> None:
        """
        Create an empty graph.

        :param parameters: named parameter tensors used by `parameter` nodes
        :param trainable: whether backward returns gradients for the parameters
        """
        self.parameters: Mapping[str, Tensor] = parameters if parameters is not None else {}
        self.trainable = trainable
        self._nodes: list[Node] = []
        self._outputs: dict[str, int] = {}
        self._values: list[Tensor] | None = None

    @property
    def nodes(self) -> tuple[Node, ...]:
        """
        Return the nodes in topological order.

        :return: the nodes of the graph
        """
        return tuple(self._nodes)

    def _add(self, node: Node) -> int:
        self._nodes.append(node)
        self._values = None
        return node.index

    def input(self, name: str, shape: DeclaredShape, differentiable: bool = False) -> int:
        """
        Declare a graph input.

        :param name: name under which the value is supplied to `forward`
        :param shape: declared shape, `None` for dimensions known only at forward time
        :param differentiable: whether backward returns a gradient for this input
        :return: the index of the new node
        """
        if any(node.name == name and node.source == "input" for node in self._nodes):
            raise ValueError(f"input {name!r} is declared twice")
        return self._add(
            Node(
                index=len(self._nodes),
                name=name,
                declared_shape=tuple(shape),
                requires_grad=differentiable,
                source="input",
            )
        )

    def parameter(self, name: str) -> int:
        """
        Declare a node that reads a named parameter.

        :param name: name of the parameter in `self.parameters`
        :raise KeyError: if the parameter does not exist
        :return: the index of the new node
        """
        if name not in self.parameters:
            raise KeyError(f"unknown parameter {name!r}")
        return self._add(Node(index=len(self._nodes), name=name, requires_grad=self.trainable, source="parameter"))

    def apply(self, op: Operation, *operands: int, name: str | None = None) -> int:
        """
        Append an operation node.

        :param op: the operation, owned by this node from now on
        :param operands: indices of the operand nodes
        :param name: optional node name used in error messages
        :raise IndexError: if an operand does not exist yet
        :raise ValueError: if the number of operands does not match the operation
        :return: the index of the new node
        """
        for operand in operands:
            if not 0 <= operand < len(self._nodes):
                raise IndexError(f"operand {operand} does not refer to an existing node")
        op.check_arity(len(operands))
        return self._add(
            Node(
                index=len(self._nodes),
                name=name or op.kind,
                op=op,
                operands=tuple(operands),
                requires_grad=any(self._nodes[operand].requires_grad for operand in operands),
            )
        )

    def output(self, name: str, node: int) -> None:
        """
        Mark a node as a named output.

        :param name: output name
        :param node: index of the node
        """
        if not 0 <= node < len(self._nodes):
            raise IndexError(f"node {node} does not exist")
        self._outputs[name] = node

    def forward(
        self, inputs: Mapping[str, Tensor], training: bool = False, check_finite: bool = False
    ) -> dict[str, Tensor]:
        """
        Evaluate the graph.

        Operand shapes are checked node by node before each operation runs.

        :param inputs: values of all declared inputs
        :param training: evaluate in training mode (batch statistics in batch normalization)
        :param check_finite: raise if a node produces a non-finite value
        :raise GraphStructureError: if an input or operand shape is inconsistent
        :raise NonFiniteError: if `check_finite` is set and a value is not finite
        :return: the values of all named outputs
        """
        values: list[Tensor] = []
        shapes: list[Shape] = []
        for node in self._nodes:
            if node.source == "input":
                if node.name not in inputs:
                    raise GraphStructureError(str(node), "no value supplied for this input")
                value = as_tensor(inputs[node.name])
                assert node.declared_shape is not None
                if not shape_matches(value.shape, node.declared_shape):
                    raise GraphStructureError(
                        str(node), f"expected shape {node.declared_shape}, got {value.shape}"
                    )
            elif node.source == "parameter":
                value = self.parameters[node.name]
            else:
                assert node.op is not None
                operand_shapes = tuple(shapes[operand] for operand in node.operands)
                try:
                    node.op.output_shape(*operand_shapes)
                except ValueError as error:
                    raise GraphStructureError(str(node), str(error)) from error
                node.op.training = training
                value = np.asarray(node.op.forward(*(values[operand] for operand in node.operands)))
            if check_finite and not all_finite(value):
                raise NonFiniteError(f"Node {node} produced a non-finite value.")
            values.append(value)
            shapes.append(value.shape)
        self._values = values
        return {name: values[index] for name, index in self._outputs.items()}

    def value(self, node: int) -> Tensor:
        """
        Return the value a node took in the last forward pass.

        :param node: index of the node
        :raise GraphUsageError: if the graph has not been evaluated
        :return: the value of the node
        """
        if self._values is None:
            raise GraphUsageError("The graph has no values.")
        return self._values[node]

    def backward(self, seed: str) -> dict[str, Tensor]:
        """
        Differentiate a scalar output with respect to all parameters and
        differentiable inputs.

        :param seed: name of the scalar output to differentiate
        :raise GraphUsageError: if forward has not been run on this graph
        :raise ValueError: if the seed is not a scalar output
        :return: gradients keyed by parameter or input name
        """
        if self._values is None:
            raise GraphUsageError("Backward was called before forward.")
        if seed not in self._outputs:
            raise KeyError(f"unknown output {seed!r}")
        values = self._values
        seed_index = self._outputs[seed]
        if values[seed_index].shape != ():
            raise ValueError(f"seed must be a scalar, got shape {values[seed_index].shape}")
        grads: dict[int, Tensor] = {seed_index: np.asarray(1.0)}
        for node in reversed(self._nodes[: seed_index + 1]):
            grad = grads.get(node.index)
            if grad is None or node.op is None or not node.requires_grad:
                continue
            operand_grads = node.op.backward(grad, *(values[operand] for operand in node.operands))
            for operand, operand_grad in zip(node.operands, operand_grads):
                if operand_grad is None or not self._nodes[operand].requires_grad:
                    continue
                if operand in grads:
                    grads[operand] = grads[operand] + operand_grad
                else:
                    grads[operand] = np.asarray(operand_grad)
        result: dict[str, Tensor] = {}
        for node in self._nodes:
            if node.source == "op" or not node.requires_grad:
                continue
            grad = grads.get(node.index, np.zeros_like(values[node.index]))
            result[node.name] = result[node.name] + grad if node.name in result else grad
        return result
