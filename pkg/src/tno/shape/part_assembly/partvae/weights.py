"""
Versioned binary weight files of the part autoencoder.

Layout: the magic bytes, a little-endian u16 format version, a little-endian
u32 length of a UTF-8 JSON manifest, the manifest itself (architecture,
tensor names and shapes, frozen flag, training history) and finally all
tensors as little-endian float64 in manifest order.
"""

from __future__ import annotations

import json
import logging
import math
import os
import struct
from pathlib import Path
from typing import Any

import numpy as np

from tno.shape.part_assembly.partvae.config import VaeConfig
from tno.shape.part_assembly.partvae.exceptions import WeightFileError
from tno.shape.part_assembly.partvae.network import VaeParams, init_params

logger = logging.getLogger(__name__)

MAGIC = b"PAVAE\x00"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<HI")


def save_weights(params: VaeParams, path: str | os.PathLike[str]) -> Path:
    """
    Write parameters to a weight file.

    :param params: the parameters
    :param path: destination file
    :return: the path written
    """
    path = Path(path)
    tensors: list[dict[str, Any]] = []
    payload: list[bytes] = []
    for kind, group in (("weight", params.weights), ("stat", params.stats)):
        for name in sorted(group):
            value = np.ascontiguousarray(group[name], dtype="<f8")
            tensors.append({"name": name, "shape": list(value.shape), "kind": kind})
            payload.append(value.tobytes())
    manifest = json.dumps(
        {
            "config": params.config.to_dict(),
            "tensors": tensors,
            "frozen": params.frozen,
            "history": list(params.history),
        },
        sort_keys=True,
    ).encode("utf-8")
    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(_PREFIX.pack(FORMAT_VERSION, len(manifest)))
        handle.write(manifest)
        for chunk in payload:
            handle.write(chunk)
    logger.info("Wrote %d tensors to %s.", len(tensors), path)
    return path


def load_weights(path: str | os.PathLike[str]) -> VaeParams:
    """
    Read parameters from a weight file.

    :param path: the weight file
    :raise WeightFileError: if the file is truncated, has the wrong magic or version,
        or does not match its architecture
    :return: the parameters, frozen if they were saved frozen
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as error:
        raise WeightFileError(str(path), str(error)) from error
    if not data.startswith(MAGIC):
        raise WeightFileError(str(path), "not a part autoencoder weight file")
    offset = len(MAGIC)
    if len(data) < offset + _PREFIX.size:
        raise WeightFileError(str(path), "the header is truncated")
    version, manifest_length = _PREFIX.unpack_from(data, offset)
    if version != FORMAT_VERSION:
        raise WeightFileError(str(path), f"unsupported format version {version}")
    offset += _PREFIX.size
    try:
        manifest = json.loads(data[offset : offset + manifest_length].decode("utf-8"))
        config = VaeConfig.from_dict(manifest["config"])
    except (ValueError, KeyError, TypeError) as error:
        raise WeightFileError(str(path), f"the manifest is invalid ({error})") from error
    offset += manifest_length
    groups: dict[str, dict[str, np.ndarray]] = {"weight": {}, "stat": {}}
    for entry in manifest["tensors"]:
        if entry.get("kind") not in groups:
            raise WeightFileError(str(path), f"unknown tensor kind {entry.get('kind')!r}")
        shape = tuple(entry["shape"])
        size = 8 * math.prod(shape)
        if offset + size > len(data):
            raise WeightFileError(str(path), f"tensor {entry['name']!r} is truncated")
        groups[entry["kind"]][entry["name"]] = (
            np.frombuffer(data, dtype="<f8", count=size // 8, offset=offset).astype(np.float64).reshape(shape)
        )
        offset += size
    if offset != len(data):
        raise WeightFileError(str(path), f"{len(data) - offset} trailing bytes")
    params = VaeParams(config, groups["weight"], groups["stat"], history=tuple(manifest.get("history", ())))
    _check_architecture(params, str(path))
    return params.freeze() if manifest.get("frozen", False) else params


def _check_architecture(params: VaeParams, path: str) -> None:
    reference = init_params(params.config)
    for label, actual, expected in (
        ("weights", params.weights, reference.weights),
        ("statistics", params.stats, reference.stats),
    ):
        if set(actual) != set(expected):
            raise WeightFileError(path, f"{label} do not match the architecture")
        for name, value in expected.items():
            if actual[name].shape != value.shape:
                raise WeightFileError(path, f"tensor {name!r} has shape {actual[name].shape}, expected {value.shape}")
