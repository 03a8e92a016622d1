"""Persisted solver state for streaming updates.

A session is a directory holding A.t3d, B.t3d, X.t3d and a line-oriented
``key=value`` manifest.  Commits stage every new file with a .tmp suffix
first and only then rename them into place (manifest last), so a crash
before the renames leaves the previous state loadable.  A lock file keeps
out concurrent writers.
"""

import os
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .tensorfile import read_tensor, write_tensor

MANIFEST_NAME = "manifest.txt"
LOCK_NAME = "session.lock"
FORMAT_VERSION = 1


class SessionError(RuntimeError):
    """Corrupt, locked, or otherwise unusable session directory."""


def write_manifest(path, entries):
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key}={value}\n")


def read_manifest(path):
    entries = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise SessionError(f"{path}: malformed manifest line {line!r}")
            key, value = line.split("=", 1)
            entries[key] = value
    return entries


@dataclass
class Session:
    directory: str
    A: np.ndarray
    B: np.ndarray
    X: np.ndarray
    lam: float
    k: int | None
    subsolver: str
    sample_count: int
    seed: int


@contextmanager
def session_lock(directory):
    lock_path = os.path.join(directory, LOCK_NAME)
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise SessionError(f"session {directory} is locked by another writer")
    try:
        os.close(fd)
        yield
    finally:
        os.unlink(lock_path)


def load_session(directory):
    manifest_path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(manifest_path):
        raise SessionError(f"{directory}: no manifest")
    manifest = read_manifest(manifest_path)
    if int(manifest.get("format_version", "-1")) != FORMAT_VERSION:
        raise SessionError(f"{directory}: unsupported format version")
    A = read_tensor(os.path.join(directory, "A.t3d"))
    B = read_tensor(os.path.join(directory, "B.t3d"))
    X = read_tensor(os.path.join(directory, "X.t3d"))
    if A.shape[0] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise SessionError(f"{directory}: A and B shapes disagree")
    if X.shape != (A.shape[1], B.shape[1], A.shape[2]):
        raise SessionError(f"{directory}: X shape disagrees with A and B")
    for key in ("m", "n", "c", "p"):
        if key in manifest:
            expected = {"m": A.shape[0], "n": A.shape[1], "c": B.shape[1], "p": A.shape[2]}
            if int(manifest[key]) != expected[key]:
                raise SessionError(f"{directory}: manifest {key} disagrees with files")
    k = manifest.get("k", "")
    return Session(
        directory=directory,
        A=A,
        B=B,
        X=X,
        lam=float(manifest["lambda"]),
        k=int(k) if k else None,
        subsolver=manifest.get("subsolver", "gkt"),
        sample_count=int(manifest.get("sample_count", "0")),
        seed=int(manifest.get("seed", "0")),
    )


def commit_session(directory, A, B, X, lam, k, subsolver, sample_count, seed):
    """Atomically replace the session state with new tensors and manifest."""
    staged = []
    tensors = {"A.t3d": A, "B.t3d": B, "X.t3d": X}
    for name, tensor in tensors.items():
        tmp = os.path.join(directory, name + ".tmp")
        write_tensor(tmp, tensor)
        staged.append((tmp, os.path.join(directory, name)))
    manifest_tmp = os.path.join(directory, MANIFEST_NAME + ".tmp")
    write_manifest(
        manifest_tmp,
        {
            "format_version": FORMAT_VERSION,
            "lambda": repr(float(lam)),
            "k": "" if k is None else int(k),
            "subsolver": subsolver,
            "sample_count": int(sample_count),
            "seed": int(seed),
            "m": A.shape[0],
            "n": A.shape[1],
            "c": B.shape[1],
            "p": A.shape[2],
        },
    )
    staged.append((manifest_tmp, os.path.join(directory, MANIFEST_NAME)))
    # Manifest renames last: an interruption before this loop leaves the
    # old state untouched; one inside it is detected as corruption on load.
    for tmp, final in staged:
        os.replace(tmp, final)
