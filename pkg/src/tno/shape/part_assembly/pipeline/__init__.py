"""
Orchestration: dataset ingestion, collection-mode optimization with part
borrowing, the training bank, amortized inference and export.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.pipeline.bank import TrainingBank as TrainingBank
from tno.shape.part_assembly.pipeline.bank import (
    load_training_bank as load_training_bank,
)
from tno.shape.part_assembly.pipeline.bank import (
    save_training_bank as save_training_bank,
)
from tno.shape.part_assembly.pipeline.cloudio import load_geometry as load_geometry
from tno.shape.part_assembly.pipeline.cloudio import read_raw as read_raw
from tno.shape.part_assembly.pipeline.cloudio import write_cloud as write_cloud
from tno.shape.part_assembly.pipeline.cloudio import write_ply as write_ply
from tno.shape.part_assembly.pipeline.cloudio import write_raw as write_raw
from tno.shape.part_assembly.pipeline.collection import TargetResult as TargetResult
from tno.shape.part_assembly.pipeline.collection import (
    run_collection as run_collection,
)
from tno.shape.part_assembly.pipeline.collection import (
    run_collection_sync as run_collection_sync,
)
from tno.shape.part_assembly.pipeline.collection import (
    target_distance_matrix as target_distance_matrix,
)
from tno.shape.part_assembly.pipeline.config import RunConfig as RunConfig
from tno.shape.part_assembly.pipeline.dataset import TARGET_POINTS as TARGET_POINTS
from tno.shape.part_assembly.pipeline.dataset import Dataset as Dataset
from tno.shape.part_assembly.pipeline.dataset import IngestConfig as IngestConfig
from tno.shape.part_assembly.pipeline.dataset import ingest as ingest
from tno.shape.part_assembly.pipeline.dataset import stream_seed as stream_seed
from tno.shape.part_assembly.pipeline.exceptions import BankError as BankError
from tno.shape.part_assembly.pipeline.exceptions import IngestError as IngestError
from tno.shape.part_assembly.pipeline.export import export_assembly as export_assembly
from tno.shape.part_assembly.pipeline.inference import (
    InferenceResult as InferenceResult,
)
from tno.shape.part_assembly.pipeline.inference import (
    amortized_infer as amortized_infer,
)
from tno.shape.part_assembly.pipeline.inference import scratch_steps as scratch_steps
