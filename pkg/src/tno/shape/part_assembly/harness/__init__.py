"""
Evaluation harness: synthetic data with ground truth, metrics, the
brute-force baseline and the evaluation studies.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.harness.baseline import bf_baseline as bf_baseline
from tno.shape.part_assembly.harness.baseline import bf_search as bf_search
from tno.shape.part_assembly.harness.baseline import matched_budget as matched_budget
from tno.shape.part_assembly.harness.metrics import CD_SCALE as CD_SCALE
from tno.shape.part_assembly.harness.metrics import crust_surface as crust_surface
from tno.shape.part_assembly.harness.metrics import metrics as metrics
from tno.shape.part_assembly.harness.metrics import segment_purity as segment_purity
from tno.shape.part_assembly.harness.report import EvalCell as EvalCell
from tno.shape.part_assembly.harness.report import EvalReport as EvalReport
from tno.shape.part_assembly.harness.studies import ablation_run as ablation_run
from tno.shape.part_assembly.harness.studies import bank_size_run as bank_size_run
from tno.shape.part_assembly.harness.studies import (
    cluster_library as cluster_library,
)
from tno.shape.part_assembly.harness.studies import (
    library_size_run as library_size_run,
)
from tno.shape.part_assembly.harness.studies import phase_variants as phase_variants
from tno.shape.part_assembly.harness.studies import (
    retrieval_budget_run as retrieval_budget_run,
)
from tno.shape.part_assembly.harness.synthetic import SyntheticSpec as SyntheticSpec
from tno.shape.part_assembly.harness.synthetic import (
    SyntheticTarget as SyntheticTarget,
)
from tno.shape.part_assembly.harness.synthetic import gen_library as gen_library
from tno.shape.part_assembly.harness.synthetic import gen_targets as gen_targets
from tno.shape.part_assembly.harness.synthetic import (
    synthetic_dataset as synthetic_dataset,
)
