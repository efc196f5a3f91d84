"""
The part autoencoder: canonical library parts, the encoder and decoder
networks, their training and their weight files.
"""

# Explicit re-export of all functionalities, such that they can be imported properly. Following
# https://www.python.org/dev/peps/pep-0484/#stub-files and
# https://mypy.readthedocs.io/en/stable/command_line.html#cmdoption-mypy-no-implicit-reexport

from tno.shape.part_assembly.partvae.config import VaeConfig as VaeConfig
from tno.shape.part_assembly.partvae.config import VaeTrainConfig as VaeTrainConfig
from tno.shape.part_assembly.partvae.exceptions import (
    DegeneratePartError as DegeneratePartError,
)
from tno.shape.part_assembly.partvae.exceptions import (
    VaeDivergenceError as VaeDivergenceError,
)
from tno.shape.part_assembly.partvae.exceptions import (
    WeightFileError as WeightFileError,
)
from tno.shape.part_assembly.partvae.library import PART_POINTS as PART_POINTS
from tno.shape.part_assembly.partvae.library import PartEntry as PartEntry
from tno.shape.part_assembly.partvae.library import PartLibrary as PartLibrary
from tno.shape.part_assembly.partvae.library import (
    canonicalize_cloud as canonicalize_cloud,
)
from tno.shape.part_assembly.partvae.library import (
    canonicalize_part as canonicalize_part,
)
from tno.shape.part_assembly.partvae.library import (
    farthest_point_sampling as farthest_point_sampling,
)
from tno.shape.part_assembly.partvae.library import resample as resample
from tno.shape.part_assembly.partvae.network import VaeParams as VaeParams
from tno.shape.part_assembly.partvae.network import build_decoder as build_decoder
from tno.shape.part_assembly.partvae.network import build_encoder as build_encoder
from tno.shape.part_assembly.partvae.network import decode as decode
from tno.shape.part_assembly.partvae.network import decode_batch as decode_batch
from tno.shape.part_assembly.partvae.network import encode as encode
from tno.shape.part_assembly.partvae.network import encode_batch as encode_batch
from tno.shape.part_assembly.partvae.network import init_params as init_params
from tno.shape.part_assembly.partvae.training import evaluate_loss as evaluate_loss
from tno.shape.part_assembly.partvae.training import kl_divergence as kl_divergence
from tno.shape.part_assembly.partvae.training import (
    round_trip_errors as round_trip_errors,
)
from tno.shape.part_assembly.partvae.training import train_vae as train_vae
from tno.shape.part_assembly.partvae.training import vae_loss as vae_loss
from tno.shape.part_assembly.partvae.weights import load_weights as load_weights
from tno.shape.part_assembly.partvae.weights import save_weights as save_weights
