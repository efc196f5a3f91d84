"""
Versioned binary checkpoints of a decomposition state.

Layout: the magic bytes, a little-endian u16 format version, a little-endian
u32 length of a UTF-8 JSON header (target id, seed stream, symmetry plane,
merged flags, losses and array shapes) followed by the target, codes,
translations, yaws and loss history as little-endian float64.
"""

from __future__ import annotations

import json
import logging
import math
import os
import struct
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from tno.shape.part_assembly.decomposer.exceptions import CheckpointError
from tno.shape.part_assembly.decomposer.losses import refresh
from tno.shape.part_assembly.decomposer.state import DecompositionState, LatentPart
from tno.shape.part_assembly.geom import SymmetryPlane
from tno.shape.part_assembly.partvae import VaeParams

logger = logging.getLogger(__name__)

MAGIC = b"PADCK\x00"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<HI")
_ARRAYS = ("target", "codes", "translations", "yaws", "history")


def save_checkpoint(state: DecompositionState, path: str | os.PathLike[str]) -> Path:
    """
    Write a state to a checkpoint file. The file is replaced atomically.

    :param state: the state
    :param path: destination file
    :return: the path written
    """
    path = Path(path)
    arrays = {
        "target": state.target,
        "codes": state.codes(),
        "translations": state.translations(),
        "yaws": state.yaws(),
        "history": np.array(state.history, dtype=float),
    }
    header = json.dumps(
        {
            "target_id": state.target_id,
            "seed": state.seed,
            "generation": state.generation,
            "symmetry": None
            if state.symmetry is None
            else {"point": list(state.symmetry.point), "normal": list(state.symmetry.normal)},
            "merged": [part.merged for part in state.parts],
            "loss": state.loss if math.isfinite(state.loss) else None,
            "recon": state.recon if math.isfinite(state.recon) else None,
            "shapes": {name: list(arrays[name].shape) for name in _ARRAYS},
        },
        sort_keys=True,
    ).encode("utf-8")
    with tempfile.NamedTemporaryFile("wb", dir=path.parent, prefix=path.name, suffix=".tmp", delete=False) as handle:
        handle.write(MAGIC)
        handle.write(_PREFIX.pack(FORMAT_VERSION, len(header)))
        handle.write(header)
        for name in _ARRAYS:
            handle.write(np.ascontiguousarray(arrays[name], dtype="<f8").tobytes())
    os.replace(handle.name, path)
    logger.debug("Wrote checkpoint of target %s to %s.", state.target_id, path)
    return path


def load_checkpoint(
    path: str | os.PathLike[str], params: VaeParams | None = None, tau: float = 0.1
) -> DecompositionState:
    """
    Read a state from a checkpoint file.

    :param path: the checkpoint file
    :param params: frozen autoencoder parameters; when given, the decoded cache is rebuilt
    :param tau: contact distance of the overlap penalty used to rebuild the cache
    :raise CheckpointError: if the file is truncated, has the wrong magic or version,
        or is inconsistent
    :return: the state
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as error:
        raise CheckpointError(str(path), str(error)) from error
    if not data.startswith(MAGIC):
        raise CheckpointError(str(path), "not a decomposition checkpoint")
    offset = len(MAGIC)
    if len(data) < offset + _PREFIX.size:
        raise CheckpointError(str(path), "the header is truncated")
    version, header_length = _PREFIX.unpack_from(data, offset)
    if version != FORMAT_VERSION:
        raise CheckpointError(str(path), f"unsupported format version {version}")
    offset += _PREFIX.size
    try:
        header: dict[str, Any] = json.loads(data[offset : offset + header_length].decode("utf-8"))
        shapes = {name: tuple(header["shapes"][name]) for name in _ARRAYS}
    except (ValueError, KeyError, TypeError) as error:
        raise CheckpointError(str(path), f"the header is invalid ({error})") from error
    offset += header_length
    arrays = {}
    for name in _ARRAYS:
        size = 8 * math.prod(shapes[name])
        if offset + size > len(data):
            raise CheckpointError(str(path), f"array {name!r} is truncated")
        arrays[name] = np.frombuffer(data, dtype="<f8", count=size // 8, offset=offset).astype(np.float64)
        arrays[name] = arrays[name].reshape(shapes[name])
        offset += size
    if offset != len(data):
        raise CheckpointError(str(path), f"{len(data) - offset} trailing bytes")
    try:
        plane = header["symmetry"]
        parts = tuple(
            LatentPart(code, translation, float(yaw), bool(merged))
            for code, translation, yaw, merged in zip(
                arrays["codes"], arrays["translations"], arrays["yaws"], header["merged"], strict=True
            )
        )
        state = DecompositionState(
            header["target_id"],
            arrays["target"],
            parts,
            None if plane is None else SymmetryPlane(tuple(plane["point"]), tuple(plane["normal"])),
            seed=int(header["seed"]),
            generation=int(header["generation"]),
            history=tuple(float(value) for value in arrays["history"]),
            loss=math.inf if header["loss"] is None else float(header["loss"]),
            recon=math.inf if header["recon"] is None else float(header["recon"]),
        )
    except (ValueError, KeyError, TypeError) as error:
        raise CheckpointError(str(path), f"the state is inconsistent ({error})") from error
    return refresh(state, params, tau) if params is not None else state
