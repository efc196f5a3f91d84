"""
Point-cloud kernels: Chamfer distance, rigid yaw poses, reflections,
symmetry detection, interior sampling, connected components and yaw-oriented
bounding boxes.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.geom.components import (
    component_sizes as component_sizes,
)
from tno.shape.part_assembly.geom.components import (
    connected_components as connected_components,
)
from tno.shape.part_assembly.geom.distance import chamfer as chamfer
from tno.shape.part_assembly.geom.distance import one_sided_chamfer as one_sided_chamfer
from tno.shape.part_assembly.geom.distance import (
    pairwise_distances as pairwise_distances,
)
from tno.shape.part_assembly.geom.exceptions import (
    EmptyPointCloudError as EmptyPointCloudError,
)
from tno.shape.part_assembly.geom.exceptions import (
    MeshSamplingError as MeshSamplingError,
)
from tno.shape.part_assembly.geom.obb import yaw_obb as yaw_obb
from tno.shape.part_assembly.geom.sampling import contains as contains
from tno.shape.part_assembly.geom.sampling import (
    sample_mesh_interior as sample_mesh_interior,
)
from tno.shape.part_assembly.geom.symmetry import SymmetryConfig as SymmetryConfig
from tno.shape.part_assembly.geom.symmetry import (
    detect_symmetry_plane as detect_symmetry_plane,
)
from tno.shape.part_assembly.geom.symmetry import (
    detect_with_config as detect_with_config,
)
from tno.shape.part_assembly.geom.symmetry import refine_plane as refine_plane
from tno.shape.part_assembly.geom.transforms import (
    apply_inverse_pose as apply_inverse_pose,
)
from tno.shape.part_assembly.geom.transforms import apply_pose as apply_pose
from tno.shape.part_assembly.geom.transforms import reflect_points as reflect_points
from tno.shape.part_assembly.geom.types import PointCloud as PointCloud
from tno.shape.part_assembly.geom.types import RigidPose as RigidPose
from tno.shape.part_assembly.geom.types import SymmetryPlane as SymmetryPlane
from tno.shape.part_assembly.geom.types import validate_cloud as validate_cloud
from tno.shape.part_assembly.geom.types import yaw_matrix as yaw_matrix
