"""Binary container for trained model files.

Layout, all integers little-endian:

    bytes 0..7    magic ``DLGFRGE1``
    bytes 8..11   u32 container version (currently 1)
    bytes 12..15  u32 header length H
    bytes 16..    H bytes of UTF-8 JSON: {"section", "meta", "arrays"}
    then          raw row-major array payloads, in header order

``meta`` holds section-specific JSON (vocabularies, label lists, config).
``arrays`` lists ``{"name", "dtype", "shape"}`` records; payloads follow in
the same order. The header is serialized with sorted keys, so a model
trained twice from the same seed produces byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DLGFRGE1"
VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a model file does not match the documented layout."""


def save_model(
    path: str | Path,
    section: str,
    meta: dict,
    arrays: dict[str, np.ndarray] | None = None,
) -> None:
    arrays = arrays or {}
    index = []
    payloads = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        index.append({"name": name, "dtype": "<f8", "shape": list(arr.shape)})
        payloads.append(arr.astype("<f8").tobytes())
    header = json.dumps(
        {"section": section, "meta": meta, "arrays": index},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header)))
        fh.write(header)
        for payload in payloads:
            fh.write(payload)


def load_model(path: str | Path, expect_section: str | None = None) -> tuple[str, dict, dict[str, np.ndarray]]:
    """Read a container; returns (section, meta, arrays)."""
    blob = Path(path).read_bytes()
    if blob[:8] != MAGIC:
        raise ModelFormatError(f"{path}: bad magic {blob[:8]!r}")
    version, header_len = struct.unpack("<II", blob[8:16])
    if version != VERSION:
        raise ModelFormatError(f"{path}: unsupported container version {version}")
    header = json.loads(blob[16 : 16 + header_len].decode("utf-8"))
    section = header["section"]
    if expect_section is not None and section != expect_section:
        raise ModelFormatError(f"{path}: expected section {expect_section!r}, found {section!r}")
    arrays: dict[str, np.ndarray] = {}
    offset = 16 + header_len
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        arr = np.frombuffer(blob, dtype=entry["dtype"], count=count, offset=offset)
        arrays[entry["name"]] = arr.reshape(shape).copy()
        offset += nbytes
    return section, header["meta"], arrays
