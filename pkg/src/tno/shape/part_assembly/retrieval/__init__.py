"""
Retrieval of library parts for an optimized decomposition: final
segmentation, multi-start pose fitting and the choice of the part count.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.retrieval.assembly import DEFAULT_ALPHA as DEFAULT_ALPHA
from tno.shape.part_assembly.retrieval.assembly import DEFAULT_K_SET as DEFAULT_K_SET
from tno.shape.part_assembly.retrieval.assembly import Assembly as Assembly
from tno.shape.part_assembly.retrieval.assembly import KCandidate as KCandidate
from tno.shape.part_assembly.retrieval.assembly import RetrievedPart as RetrievedPart
from tno.shape.part_assembly.retrieval.assembly import select_k as select_k
from tno.shape.part_assembly.retrieval.candidates import (
    chamfer_candidates as chamfer_candidates,
)
from tno.shape.part_assembly.retrieval.candidates import (
    encode_library as encode_library,
)
from tno.shape.part_assembly.retrieval.candidates import (
    latent_candidates as latent_candidates,
)
from tno.shape.part_assembly.retrieval.config import FitConfig as FitConfig
from tno.shape.part_assembly.retrieval.exceptions import (
    EmptyCandidateListError as EmptyCandidateListError,
)
from tno.shape.part_assembly.retrieval.exceptions import (
    EmptyLibraryError as EmptyLibraryError,
)
from tno.shape.part_assembly.retrieval.fitting import (
    fit_part_to_segment as fit_part_to_segment,
)
from tno.shape.part_assembly.retrieval.retrieve import assemble as assemble
from tno.shape.part_assembly.retrieval.retrieve import assemble_async as assemble_async
from tno.shape.part_assembly.retrieval.retrieve import (
    direct_recon_error as direct_recon_error,
)
from tno.shape.part_assembly.retrieval.retrieve import (
    direct_retrieval as direct_retrieval,
)
from tno.shape.part_assembly.retrieval.retrieve import final_segment as final_segment
from tno.shape.part_assembly.retrieval.retrieve import (
    retrieve_for_segment as retrieve_for_segment,
)
from tno.shape.part_assembly.retrieval.retrieve import (
    retrieve_state as retrieve_state,
)
