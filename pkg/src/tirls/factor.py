"""Slice-wise factorizations and solves in the Fourier domain.

Every routine transforms along tubes, processes the independent spectral
slices 1..n3//2+1, mirrors the conjugate slices, and transforms back.
Dense per-slice work is delegated to numpy/scipy (QR, SVD, triangular and
positive-definite solves); the tensor-level contracts live here.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import core
from .core import half_slices, mirror_spectrum, slice_map, to_real

# Spectral slices with singular-value ratio below this are treated as
# rank-deficient.
RANK_RTOL = 1e-12


class RankDeficientSliceError(np.linalg.LinAlgError):
    """A spectral slice without full column rank."""

    def __init__(self, slice_index, smallest_sv):
        super().__init__(
            f"spectral slice {slice_index} is rank deficient "
            f"(smallest singular value {smallest_sv:.3e})"
        )
        self.slice_index = slice_index
        self.smallest_sv = smallest_sv


class SingularDiagonalError(np.linalg.LinAlgError):
    """An f-upper-triangular tensor with a vanishing spectral diagonal."""

    def __init__(self, slice_index, entry_index, magnitude):
        super().__init__(
            f"triangular spectral slice {slice_index} has near-zero "
            f"diagonal entry {entry_index} (magnitude {magnitude:.3e})"
        )
        self.slice_index = slice_index
        self.entry_index = entry_index


@dataclass
class TQrResult:
    Q: np.ndarray
    R: np.ndarray


@dataclass
class TSvdResult:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def tls_solve(C, D):
    """Minimize ||C*Y - D||_F slice by slice in the Fourier domain.

    Every spectral slice of C must have full column rank; the per-slice
    problem is solved through a QR factorization rather than the normal
    equations to keep the subproblem's conditioning intact.  D may carry
    several lateral slices.
    """
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if C.shape[0] != D.shape[0] or C.shape[2] != D.shape[2]:
        raise ValueError(f"incompatible shapes {C.shape} and {D.shape}")
    n1, n2, n3 = C.shape
    Ch = np.fft.fft(C, axis=2)
    Dh = np.fft.fft(D, axis=2)
    Yh = np.empty((n2, D.shape[1], n3), dtype=complex)

    def solve_slice(j):
        Cj = Ch[:, :, j]
        Q, R = np.linalg.qr(Cj)
        d = np.abs(np.diag(R))
        dmax = float(d.max()) if d.size else 0.0
        if d.size == 0 or dmax == 0.0 or d.min() <= 1e-10 * dmax:
            sv = np.linalg.svd(Cj, compute_uv=False)
            if sv.size == 0 or sv.min() <= RANK_RTOL * sv.max():
                raise RankDeficientSliceError(j, float(sv.min()) if sv.size else 0.0)
        return scipy.linalg.solve_triangular(R, Q.conj().T @ Dh[:, :, j])

    for j, Yj in zip(range(half_slices(n3)), slice_map(solve_slice, half_slices(n3))):
        Yh[:, :, j] = Yj
    mirror_spectrum(Yh)
    return to_real(np.fft.ifft(Yh, axis=2))


def tqr(A, mode="economy"):
    """t-QR factorization A = Q*R with f-upper-triangular R.

    The spectral R slices carry a real nonnegative diagonal, which fixes
    the factorization uniquely on full-rank input.
    """
    if mode not in ("economy", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    A = np.asarray(A, dtype=float)
    n1, n2, n3 = A.shape
    r = min(n1, n2) if mode == "economy" else n1
    Qh = np.empty((n1, r, n3), dtype=complex)
    Rh = np.empty((r, n2, n3), dtype=complex)

    def qr_slice(j):
        Q, R = np.linalg.qr(A_hat[:, :, j], mode="reduced" if mode == "economy" else "complete")
        d = np.diagonal(R).copy()
        phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
        Q = Q.copy()
        R = R.copy()
        for i, ph in enumerate(phases):
            Q[:, i] *= ph
            R[i, :] *= np.conj(ph)
        return Q, R

    A_hat = np.fft.fft(A, axis=2)
    for j, (Qj, Rj) in zip(range(half_slices(n3)), slice_map(qr_slice, half_slices(n3))):
        Qh[:, :, j] = Qj
        Rh[:, :, j] = Rj
    mirror_spectrum(Qh)
    mirror_spectrum(Rh)
    return TQrResult(Q=to_real(np.fft.ifft(Qh, axis=2)), R=to_real(np.fft.ifft(Rh, axis=2)))


def tsvd(A):
    """Economy t-SVD A = U*S*V^T with f-diagonal S of singular tubes."""
    A = np.asarray(A, dtype=float)
    n1, n2, n3 = A.shape
    r = min(n1, n2)
    Uh = np.empty((n1, r, n3), dtype=complex)
    Sh = np.zeros((r, r, n3), dtype=complex)
    Vh = np.empty((n2, r, n3), dtype=complex)

    def svd_slice(j):
        U, s, Wh = np.linalg.svd(A_hat[:, :, j], full_matrices=False)
        return U, s, Wh.conj().T

    A_hat = np.fft.fft(A, axis=2)
    for j, (Uj, sj, Vj) in zip(range(half_slices(n3)), slice_map(svd_slice, half_slices(n3))):
        Uh[:, :, j] = Uj
        Sh[:, :, j] = np.diag(sj)
        Vh[:, :, j] = Vj
    mirror_spectrum(Uh)
    mirror_spectrum(Sh)
    mirror_spectrum(Vh)
    return TSvdResult(
        U=to_real(np.fft.ifft(Uh, axis=2)),
        S=to_real(np.fft.ifft(Sh, axis=2)),
        V=to_real(np.fft.ifft(Vh, axis=2)),
    )


def f_tri_solve(R, X, side):
    """Apply the inverse of an f-upper-triangular tensor without forming it.

    side = "right":          X * R^{-1}
    side = "left":           R^{-1} * X
    side = "left_transpose": R^{-T} * X
    """
    if side not in ("right", "left", "left_transpose"):
        raise ValueError(f"unknown side {side!r}")
    R = np.asarray(R, dtype=float)
    X = np.asarray(X, dtype=float)
    if R.shape[0] != R.shape[1]:
        raise ValueError(f"R must have square slices, got {R.shape}")
    if R.shape[2] != X.shape[2]:
        raise ValueError(f"tube lengths differ: {R.shape} vs {X.shape}")
    inner_ok = X.shape[1] == R.shape[0] if side == "right" else R.shape[1] == X.shape[0]
    if not inner_ok:
        raise ValueError(f"incompatible shapes {R.shape} and {X.shape} for side {side!r}")
    n3 = R.shape[2]
    Rh = np.fft.fft(R, axis=2)
    Xh = np.fft.fft(X, axis=2)
    Yh = np.empty(Xh.shape, dtype=complex)

    def tri_slice(j):
        Rj = np.triu(Rh[:, :, j])
        d = np.abs(np.diagonal(Rj))
        dmax = float(d.max()) if d.size else 0.0
        if dmax == 0.0 or d.min() <= core.TUBE_INVERT_RTOL * dmax:
            i = int(np.argmin(d))
            raise SingularDiagonalError(j, i, float(d[i]))
        if side == "right":
            return scipy.linalg.solve_triangular(Rj.T, Xh[:, :, j].T, lower=True).T
        if side == "left":
            return scipy.linalg.solve_triangular(Rj, Xh[:, :, j])
        return scipy.linalg.solve_triangular(Rj, Xh[:, :, j], trans="C")

    for j, Yj in zip(range(half_slices(n3)), slice_map(tri_slice, half_slices(n3))):
        Yh[:, :, j] = Yj
    mirror_spectrum(Yh)
    return to_real(np.fft.ifft(Yh, axis=2))


def direct_trls(A, B, lam):
    """Exact Tikhonov solution (A^T*A + lam^2 I)^{-1} * A^T * B.

    Each spectral slice solves the regularized normal equations through
    whichever of the two equivalent m x m / n x n forms is smaller.
    Reference solver for tests and small problems.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise ValueError(f"incompatible shapes {A.shape} and {B.shape}")
    m, n, p = A.shape
    Ah = np.fft.fft(A, axis=2)
    Bh = np.fft.fft(B, axis=2)
    Xh = np.empty((n, B.shape[1], p), dtype=complex)

    def solve_slice(j):
        Aj = Ah[:, :, j]
        Bj = Bh[:, :, j]
        if n <= m:
            G = Aj.conj().T @ Aj + lam**2 * np.eye(n)
            return scipy.linalg.solve(G, Aj.conj().T @ Bj, assume_a="pos")
        G = Aj @ Aj.conj().T + lam**2 * np.eye(m)
        return Aj.conj().T @ scipy.linalg.solve(G, Bj, assume_a="pos")

    for j, Xj in zip(range(half_slices(p)), slice_map(solve_slice, half_slices(p))):
        Xh[:, :, j] = Xj
    mirror_spectrum(Xh)
    return to_real(np.fft.ifft(Xh, axis=2))


def min_norm_augmented_ls(A, B, lam):
    """Minimum-norm solution of min ||[A, lam*I] * Xhat - B||_F.

    The augmented operator has full spectral row rank for lam > 0, so the
    minimum-Frobenius-norm solution is A_lam^T * (A_lam * A_lam^T)^{-1} * B.
    Its top n x c x p block must agree with direct_trls; tests rely on it
    as an independent oracle.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise ValueError(f"incompatible shapes {A.shape} and {B.shape}")
    m, n, p = A.shape
    Ah = np.fft.fft(A, axis=2)
    Bh = np.fft.fft(B, axis=2)
    Xh = np.empty((n + m, B.shape[1], p), dtype=complex)

    def solve_slice(j):
        Aj = Ah[:, :, j]
        G = Aj @ Aj.conj().T + lam**2 * np.eye(m)
        Z = scipy.linalg.solve(G, Bh[:, :, j], assume_a="pos")
        return np.vstack([Aj.conj().T @ Z, lam * Z])

    for j, Xj in zip(range(half_slices(p)), slice_map(solve_slice, half_slices(p))):
        Xh[:, :, j] = Xj
    mirror_spectrum(Xh)
    return to_real(np.fft.ifft(Xh, axis=2))
