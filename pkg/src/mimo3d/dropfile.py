"""Binary drop files: replay identical channels across runs and tools.

Layout: a 64-byte little-endian header holding the magic "MR3D", a format
version, the tensor dimensions (users, user antennas, transmit antennas,
resource blocks, subcarriers per block) and the generating seed, padded
with zeros; then complex64 entries in (user, subcarrier, row, column)
order.
"""

from __future__ import annotations

import struct

import numpy as np

from .channel import ChannelTensor
from .geometry import ArrayGeometry

MAGIC = b"MR3D"
VERSION = 1

_HEADER = struct.Struct("<4sIIIIIIQ28x")
assert _HEADER.size == 64


def save_drop(tensor: ChannelTensor, path: str) -> None:
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        tensor.n_users,
        tensor.user_antennas,
        tensor.nt,
        tensor.n_rb,
        tensor.n_sc,
        tensor.seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(tensor.h).astype("<c8").tobytes())


def load_drop(path: str, geometry: ArrayGeometry | None = None,
              wavelength_m: float = 0.0) -> ChannelTensor:
    """Read a drop file back. The header carries no array layout, so
    callers that need reconstruction metadata pass ``geometry``; its
    element count must match the stored transmit dimension."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, users, m, nt, n_rb, n_sc, seed = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        count = users * n_rb * n_sc * m * nt
        data = np.frombuffer(fh.read(), dtype="<c8")
    if data.size != count:
        raise ValueError(f"{path}: expected {count} entries, found {data.size}")
    if geometry is not None and geometry.n_elements != nt:
        raise ValueError(
            f"{path}: stored transmit dimension {nt} does not match "
            f"geometry with {geometry.n_elements} elements"
        )
    h = data.astype(np.complex128).reshape(users, n_rb * n_sc, m, nt)
    return ChannelTensor(
        h=h, n_rb=n_rb, n_sc=n_sc, wavelength_m=wavelength_m,
        seed=seed, geometry=geometry,
    )
