"""Tensor Golub-Kahan bidiagonalization with breakdown detection."""

from dataclasses import dataclass

import numpy as np

from . import core
from .core import fro_norm, normalize, tprod, transpose, tube_invertible

# A generated direction whose norm falls below this fraction of ||A||_F is
# treated as numerically zero.  The tube-invertibility test alone cannot
# see this case: a round-off-sized direction still has an O(1) spectral
# min/max ratio.
BREAKDOWN_RTOL = 1e-10


@dataclass
class GkbResult:
    """Bases and bidiagonal tensor from k_eff bidiagonalization steps.

    W:     n x k_eff x p        right basis
    Q:     m x (k_eff+1) x p    left basis
    Pbar:  (k_eff+1) x k_eff x p, lower bidiagonal (diagonal tubes c_i,
           subdiagonal tubes z_{i+1})
    z1:    tube from normalizing b; the projected right-hand side is e1*z1
    """

    W: np.ndarray
    Q: np.ndarray
    Pbar: np.ndarray
    z1: np.ndarray
    k_eff: int
    breakdown: bool


def tgkb(A, b, k, reorth=True, rng=None):
    """Run up to k bidiagonalization steps of A against the slice b.

    Each step checks that the new diagonal tube c_i is invertible and that
    the generated directions have non-negligible norm; on failure the
    process truncates at the last safe step and flags breakdown.  With
    `reorth` the bases are reorthogonalized against all previous members.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n, p = A.shape
    if b.shape != (m, 1, p):
        raise ValueError(f"b must have shape {(m, 1, p)}, got {b.shape}")
    if k < 1 or k > min(m, n):
        raise ValueError(f"step count must satisfy 1 <= k <= {min(m, n)}, got {k}")
    if rng is None:
        rng = np.random.default_rng(0)

    At = transpose(A)
    scale = fro_norm(A)
    if fro_norm(tprod(At, b)) <= 1e-14 * scale * fro_norm(b):
        raise core.ZeroTensorError("A^T * b vanishes; bidiagonalization undefined")

    Q1, z1 = normalize(b, rng)
    if not tube_invertible(z1):
        return GkbResult(
            W=np.zeros((n, 0, p)),
            Q=Q1,
            Pbar=np.zeros((1, 0, p)),
            z1=z1,
            k_eff=0,
            breakdown=True,
        )

    Ws = []
    Qs = [Q1]
    cs = []
    zs = [z1]
    breakdown = False

    for i in range(1, k + 1):
        Wi = tprod(At, Qs[-1])
        if Ws:
            Wi = Wi - tprod(Ws[-1], zs[-1])
        if reorth and Ws:
            Wb = np.concatenate(Ws, axis=1)
            Wi = Wi - tprod(Wb, tprod(transpose(Wb), Wi))
        if fro_norm(Wi) <= BREAKDOWN_RTOL * scale:
            breakdown = True
            break
        Wi, ci = normalize(Wi, rng)
        if not tube_invertible(ci):
            breakdown = True
            break

        Qn = tprod(A, Wi) - tprod(Qs[-1], ci)
        if reorth:
            Qb = np.concatenate(Qs, axis=1)
            Qn = Qn - tprod(Qb, tprod(transpose(Qb), Qn))
        qnorm = fro_norm(Qn)
        if qnorm == 0.0:
            # Exactly zero direction: any unit slice with a zero tube keeps
            # the decomposition identities intact.
            Qn = rng.standard_normal((m, 1, p))
            Qn, _ = normalize(Qn, rng)
            zn = np.zeros((1, 1, p))
        else:
            Qn, zn = normalize(Qn, rng)

        Ws.append(Wi)
        cs.append(ci)
        Qs.append(Qn)
        zs.append(zn)

        if qnorm <= BREAKDOWN_RTOL * scale or not tube_invertible(zn):
            breakdown = True
            break

    k_eff = len(Ws)
    W = np.concatenate(Ws, axis=1) if Ws else np.zeros((n, 0, p))
    Q = np.concatenate(Qs[: k_eff + 1], axis=1)
    Pbar = np.zeros((k_eff + 1, k_eff, p))
    for i in range(k_eff):
        Pbar[i, i, :] = cs[i].ravel()
        Pbar[i + 1, i, :] = zs[i + 1].ravel()
    return GkbResult(W=W, Q=Q, Pbar=Pbar, z1=z1, k_eff=k_eff, breakdown=breakdown)
