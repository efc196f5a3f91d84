"""
Reverse-mode differentiation over a fixed set of operations, the Adam
optimizer and a finite-difference gradient oracle.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.numcore.base import Operation as Operation
from tno.shape.part_assembly.numcore.exceptions import (
    GraphStructureError as GraphStructureError,
)
from tno.shape.part_assembly.numcore.exceptions import (
    GraphUsageError as GraphUsageError,
)
from tno.shape.part_assembly.numcore.exceptions import NonFiniteError as NonFiniteError
from tno.shape.part_assembly.numcore.geometric import Chamfer as Chamfer
from tno.shape.part_assembly.numcore.geometric import Overlap as Overlap
from tno.shape.part_assembly.numcore.geometric import RigidTransform as RigidTransform
from tno.shape.part_assembly.numcore.gradcheck import (
    finite_diff_gradient as finite_diff_gradient,
)
from tno.shape.part_assembly.numcore.gradcheck import relative_error as relative_error
from tno.shape.part_assembly.numcore.graph import Graph as Graph
from tno.shape.part_assembly.numcore.kernels import nearest as nearest
from tno.shape.part_assembly.numcore.linear import Add as Add
from tno.shape.part_assembly.numcore.linear import Affine as Affine
from tno.shape.part_assembly.numcore.linear import Concat as Concat
from tno.shape.part_assembly.numcore.linear import Linear as Linear
from tno.shape.part_assembly.numcore.linear import Mean as Mean
from tno.shape.part_assembly.numcore.linear import PointwiseLinear as PointwiseLinear
from tno.shape.part_assembly.numcore.linear import Reshape as Reshape
from tno.shape.part_assembly.numcore.linear import Scale as Scale
from tno.shape.part_assembly.numcore.linear import Shift as Shift
from tno.shape.part_assembly.numcore.linear import Sub as Sub
from tno.shape.part_assembly.numcore.linear import Sum as Sum
from tno.shape.part_assembly.numcore.linear import Take as Take
from tno.shape.part_assembly.numcore.nonlinear import BatchNorm as BatchNorm
from tno.shape.part_assembly.numcore.nonlinear import Exp as Exp
from tno.shape.part_assembly.numcore.nonlinear import LeakyRelu as LeakyRelu
from tno.shape.part_assembly.numcore.nonlinear import MaxPool as MaxPool
from tno.shape.part_assembly.numcore.nonlinear import Mul as Mul
from tno.shape.part_assembly.numcore.nonlinear import Square as Square
from tno.shape.part_assembly.numcore.optim import Adam as Adam
from tno.shape.part_assembly.numcore.optim import AdamState as AdamState
from tno.shape.part_assembly.numcore.optim import adam_update as adam_update
from tno.shape.part_assembly.numcore.utils import Tensor as Tensor
from tno.shape.part_assembly.numcore.utils import as_tensor as as_tensor
