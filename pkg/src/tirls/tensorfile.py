"""Binary tensor file format.

Layout (all little-endian):
  magic   4 bytes  "T3DT"
  version u32      1
  n1, n2, n3  u64 each
  payload n1*n2*n3 IEEE-754 doubles, frontal-slice-major and
          column-major within each slice
"""

import struct

import numpy as np

MAGIC = b"T3DT"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


class TensorFileError(ValueError):
    """Malformed or truncated tensor file."""


def write_tensor(path, A):
    A = np.ascontiguousarray(np.asarray(A, dtype=float))
    if A.ndim != 3:
        raise ValueError(f"tensor must be 3-d, got shape {A.shape}")
    n1, n2, n3 = A.shape
    payload = A.transpose(2, 1, 0).ravel().astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n1, n2, n3))
        fh.write(payload)


def read_tensor(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise TensorFileError(f"{path}: truncated header")
        magic, version, n1, n2, n3 = _HEADER.unpack(head)
        if magic != MAGIC:
            raise TensorFileError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise TensorFileError(f"{path}: unsupported version {version}")
        payload = fh.read()
    expected = n1 * n2 * n3 * 8
    if len(payload) != expected:
        raise TensorFileError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    vals = np.frombuffer(payload, dtype="<f8")
    return vals.reshape(n3, n2, n1).transpose(2, 1, 0).copy()
