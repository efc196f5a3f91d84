"""
The three-phase decomposition of a target into latent parts: gradient
optimization, part shift and part borrowing.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.decomposer.checkpoint import (
    load_checkpoint as load_checkpoint,
)
from tno.shape.part_assembly.decomposer.checkpoint import (
    save_checkpoint as save_checkpoint,
)
from tno.shape.part_assembly.decomposer.config import ScheduleConfig as ScheduleConfig
from tno.shape.part_assembly.decomposer.exceptions import (
    CheckpointError as CheckpointError,
)
from tno.shape.part_assembly.decomposer.exceptions import (
    NonFiniteLossError as NonFiniteLossError,
)
from tno.shape.part_assembly.decomposer.losses import (
    Phase1Objective as Phase1Objective,
)
from tno.shape.part_assembly.decomposer.losses import (
    overlap_penalty as overlap_penalty,
)
from tno.shape.part_assembly.decomposer.losses import phase1_loss as phase1_loss
from tno.shape.part_assembly.decomposer.losses import refresh as refresh
from tno.shape.part_assembly.decomposer.phase1 import DETECT as DETECT
from tno.shape.part_assembly.decomposer.phase1 import init_state as init_state
from tno.shape.part_assembly.decomposer.phase1 import phase1_run as phase1_run
from tno.shape.part_assembly.decomposer.phase1 import rerandomize as rerandomize
from tno.shape.part_assembly.decomposer.phase2 import SwapResult as SwapResult
from tno.shape.part_assembly.decomposer.phase2 import (
    farthest_component as farthest_component,
)
from tno.shape.part_assembly.decomposer.phase2 import (
    filter_covered as filter_covered,
)
from tno.shape.part_assembly.decomposer.phase2 import (
    merge_symmetric as merge_symmetric,
)
from tno.shape.part_assembly.decomposer.phase2 import nn_segment as nn_segment
from tno.shape.part_assembly.decomposer.phase2 import phase2_shift as phase2_shift
from tno.shape.part_assembly.decomposer.phase2 import reencode as reencode
from tno.shape.part_assembly.decomposer.phase2 import (
    swap_least_covered as swap_least_covered,
)
from tno.shape.part_assembly.decomposer.phase3 import (
    phase3_borrow as phase3_borrow,
)
from tno.shape.part_assembly.decomposer.phase3 import (
    worst_targets as worst_targets,
)
from tno.shape.part_assembly.decomposer.schedule import (
    ScheduleProgress as ScheduleProgress,
)
from tno.shape.part_assembly.decomposer.schedule import borrow as borrow
from tno.shape.part_assembly.decomposer.schedule import finish as finish
from tno.shape.part_assembly.decomposer.schedule import run_schedule as run_schedule
from tno.shape.part_assembly.decomposer.schedule import (
    shift_rounds as shift_rounds,
)
from tno.shape.part_assembly.decomposer.state import (
    DecompositionState as DecompositionState,
)
from tno.shape.part_assembly.decomposer.state import LatentPart as LatentPart
