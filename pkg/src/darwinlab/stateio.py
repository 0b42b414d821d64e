"""Binary state-file format.

Layout: 5-byte magic ``DPST1``, little-endian uint32 header length, UTF-8
JSON header, then the payload: one little-endian complex128 (interleaved
re, im float64) per component, six components per bin, bins ordered with the
x index fastest.  The header carries the grid, norm, constraint residual,
time stamp, unit record and a CRC32 of the payload, so corruption is detected
before any physics runs.  Writes go through a temp file and rename.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
import zlib

import numpy as np

from . import kgrid
from .kgrid import KGrid
from .state import PhotonState, transversality_residual
from .units import NATURAL, Units

MAGIC = b"DPST1"
FORMAT_VERSION = 1


class StateFileError(Exception):
    """Raised for malformed, truncated or corrupted state files."""


def _payload_bytes(state: PhotonState) -> bytes:
    # (x, y, z, c) -> (z, y, x, c) so that a C-order ravel is x-fastest
    arr = np.moveaxis(state.psi.values, (0, 1, 2), (2, 1, 0))
    return np.ascontiguousarray(arr).astype("<c16").tobytes()


def write_state(
    path,
    state: PhotonState,
    units: Units = NATURAL,
    metadata: dict | None = None,
) -> None:
    payload = _payload_bytes(state)
    header = {
        "format": FORMAT_VERSION,
        "grid": {"n": state.grid.n, "dk": state.grid.dk},
        "norm": state.norm,
        "rqc_residual": state.rqc_residual,
        "energy_sign": state.energy_sign,
        "time": state.time,
        "scale_factor": state.scale_factor,
        "units": units.to_dict(),
        "payload_crc32": zlib.crc32(payload) & 0xFFFFFFFF,
        "metadata": metadata or {},
    }
    blob = json.dumps(header).encode("utf-8")
    out = MAGIC + struct.pack("<I", len(blob)) + blob + payload

    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(out)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_state(path) -> tuple[PhotonState, dict]:
    """Read a state file; returns the state and its full header."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise StateFileError(f"{path}: not a state file (bad magic)")
    (hlen,) = struct.unpack_from("<I", raw, len(MAGIC))
    hstart = len(MAGIC) + 4
    if len(raw) < hstart + hlen:
        raise StateFileError(f"{path}: truncated header")
    try:
        header = json.loads(raw[hstart : hstart + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateFileError(f"{path}: unreadable header ({exc})") from exc

    try:
        n = int(header["grid"]["n"])
        dk = float(header["grid"]["dk"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"{path}: header missing grid description") from exc

    payload = raw[hstart + hlen :]
    expect = n**3 * 6 * 16
    if len(payload) != expect:
        raise StateFileError(
            f"{path}: payload length {len(payload)} != expected {expect} for n={n}"
        )
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    if crc != int(header.get("payload_crc32", -1)):
        raise StateFileError(f"{path}: payload checksum mismatch")

    values = np.frombuffer(payload, dtype="<c16").reshape(n, n, n, 6)
    values = np.moveaxis(values, (0, 1, 2), (2, 1, 0)).copy()
    grid = KGrid(n=n, dk=dk)
    psi = kgrid.momentum_field(values, grid, float(header.get("time", 0.0)))
    state = PhotonState(
        psi=psi,
        norm=float(header.get("norm", kgrid.norm_squared(psi))),
        rqc_residual=float(header.get("rqc_residual", transversality_residual(psi))),
        energy_sign=int(header.get("energy_sign", 1)),
        scale_factor=float(header.get("scale_factor", 1.0)),
    )
    return state, header
