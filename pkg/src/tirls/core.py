"""Dense third-order tensor algebra under the t-product.

Tensors are plain numpy arrays of shape (n1, n2, n3); frontal slice k is
``A[:, :, k]``.  A tubal scalar is a (1, 1, p) tensor.  All spectral work
happens along axis 2 with the standard unnormalized FFT (1/n3 on the
inverse), so slice-wise products in the Fourier domain need no rescaling.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# Tube invertibility: min spectral magnitude relative to max.
TUBE_INVERT_RTOL = 1e-10
# Max tolerated imaginary residue after an inverse transform.
REAL_ENFORCE_RTOL = 1e-8


class NonRealResultError(ArithmeticError):
    """Inverse transform of data that is not conjugate-symmetric."""


class NonInvertibleTubeError(ArithmeticError):
    """A tubal scalar with a (near-)vanishing DFT coefficient."""

    def __init__(self, message, min_magnitude=None):
        super().__init__(message)
        self.min_magnitude = min_magnitude


class ZeroTensorError(ValueError):
    """An operation that requires nonzero input received zeros."""


def _check3(A, name="tensor"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 3:
        raise ValueError(f"{name} must be 3-d, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def thread_count():
    """Worker count for slice-parallel kernels (TIRLS_THREADS, default 1)."""
    try:
        return max(1, int(os.environ.get("TIRLS_THREADS", "1")))
    except ValueError:
        return 1


def slice_map(fn, count):
    """Apply fn(j) for j in range(count), optionally on a thread pool.

    Results come back in slice order regardless of schedule, so parallel
    runs are bit-identical to sequential ones.
    """
    workers = thread_count()
    if workers == 1 or count <= 1:
        return [fn(j) for j in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def dft_tubes(A):
    """Unnormalized DFT along every tube (mode 3)."""
    return np.fft.fft(_check3(A), axis=2)


def to_real(Xc):
    """Drop imaginary parts after checking they are round-off only."""
    Xc = np.asarray(Xc)
    if Xc.size == 0:
        return np.real(Xc).astype(float)
    imax = float(np.abs(Xc.imag).max()) if np.iscomplexobj(Xc) else 0.0
    bound = REAL_ENFORCE_RTOL * (1.0 + float(np.linalg.norm(Xc.real)))
    if imax > bound:
        raise NonRealResultError(
            f"imaginary residue {imax:.3e} exceeds {bound:.3e}; "
            "input is not conjugate-symmetric"
        )
    return np.ascontiguousarray(Xc.real, dtype=float)


def idft_tubes(S):
    """Inverse of dft_tubes (includes the 1/n3 scaling); enforces real output."""
    S = np.asarray(S, dtype=complex)
    if S.ndim != 3:
        raise ValueError(f"spectral tensor must be 3-d, got shape {S.shape}")
    return to_real(np.fft.ifft(S, axis=2))


def mirror_spectrum(S):
    """Fill slices h..n3-1 of S in place from conjugates of slices 1..h-1."""
    n3 = S.shape[2]
    for j in range(n3 // 2 + 1, n3):
        S[:, :, j] = np.conj(S[:, :, n3 - j])
    return S


def half_slices(n3):
    """Number of independent spectral slices of a real tensor."""
    return n3 // 2 + 1


def unfold(A):
    A = _check3(A)
    n1, n2, n3 = A.shape
    return A.transpose(2, 0, 1).reshape(n1 * n3, n2).copy()


def fold(M, n1, n2, n3):
    M = np.asarray(M, dtype=float)
    if M.shape != (n1 * n3, n2):
        raise ValueError(f"fold expects {(n1 * n3, n2)}, got {M.shape}")
    return M.reshape(n3, n1, n2).transpose(1, 2, 0).copy()


def bcirc(A):
    """Block-circulant matrix of A; test oracle, not hot-path code."""
    A = _check3(A)
    n1, n2, n3 = A.shape
    M = np.zeros((n1 * n3, n2 * n3))
    for i in range(n3):
        for j in range(n3):
            M[i * n1:(i + 1) * n1, j * n2:(j + 1) * n2] = A[:, :, (i - j) % n3]
    return M


def tprod(A, B):
    """t-product A*B, computed slice-wise in the Fourier domain."""
    A = _check3(A, "A")
    B = _check3(B, "B")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions differ: {A.shape} * {B.shape}")
    if A.shape[2] != B.shape[2]:
        raise ValueError(f"tube lengths differ: {A.shape} * {B.shape}")
    Ah = np.fft.fft(A, axis=2)
    Bh = np.fft.fft(B, axis=2)
    Ch = np.moveaxis(np.moveaxis(Ah, 2, 0) @ np.moveaxis(Bh, 2, 0), 0, 2)
    return to_real(np.fft.ifft(Ch, axis=2))


def transpose(A):
    """Tensor transpose: slice 1 transposed, slices 2..n3 reversed."""
    A = _check3(A)
    n1, n2, n3 = A.shape
    out = np.empty((n2, n1, n3))
    out[:, :, 0] = A[:, :, 0].T
    for k in range(1, n3):
        out[:, :, k] = A[:, :, n3 - k].T
    return out


def identity(n, p):
    """Identity tensor: first frontal slice I_n, others zero."""
    if n < 1 or p < 1:
        raise ValueError("identity requires n >= 1 and p >= 1")
    I = np.zeros((n, n, p))
    I[:, :, 0] = np.eye(n)
    return I


def fro_norm(A):
    return float(np.linalg.norm(np.asarray(A, dtype=float).ravel()))


def rel_error(X, Xref):
    X = np.asarray(X, dtype=float)
    Xref = np.asarray(Xref, dtype=float)
    if X.shape != Xref.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Xref.shape}")
    denom = fro_norm(Xref)
    if denom == 0.0:
        raise ZeroTensorError("relative error against a zero reference")
    return fro_norm(X - Xref) / denom


def tube(values):
    """Wrap a 1-d sequence as a 1x1xp tubal scalar."""
    v = np.asarray(values, dtype=float).ravel()
    return v.reshape(1, 1, v.size).copy()


def unit_tube(p):
    """The identity tubal scalar e1 = (1, 0, ..., 0)."""
    e = np.zeros((1, 1, p))
    e[0, 0, 0] = 1.0
    return e


def tube_spectrum_range(a):
    """(min, max) magnitude of a tube's DFT coefficients."""
    ah = np.abs(np.fft.fft(np.asarray(a, dtype=float).ravel()))
    return float(ah.min()), float(ah.max())


def tube_invertible(a, rtol=TUBE_INVERT_RTOL):
    mn, mx = tube_spectrum_range(a)
    return mx > 0.0 and mn > rtol * mx


def tube_inverse(a, rtol=TUBE_INVERT_RTOL):
    """Inverse tubal scalar b with a*b = b*a = e1."""
    a = np.asarray(a, dtype=float)
    p = a.size
    ah = np.fft.fft(a.ravel())
    mags = np.abs(ah)
    mn, mx = float(mags.min()), float(mags.max())
    if mx == 0.0 or mn <= rtol * mx:
        raise NonInvertibleTubeError(
            f"tube is not invertible: min spectral magnitude {mn:.3e} "
            f"vs max {mx:.3e}",
            min_magnitude=mn,
        )
    return to_real(np.fft.ifft(1.0 / ah)).reshape(1, 1, p)


def tube_length(X):
    """Length ||X^T * X||_F / ||X||_F of a nonzero lateral slice."""
    X = _check3(X)
    if X.shape[1] != 1:
        raise ValueError(f"tube_length expects n2 = 1, got shape {X.shape}")
    nrm = fro_norm(X)
    if nrm == 0.0:
        raise ZeroTensorError("tube_length of a zero tensor")
    return fro_norm(tprod(transpose(X), X)) / nrm


def normalize(X, rng=None):
    """Factor a nonzero lateral slice as X = V*a with length(V) = 1.

    Spectral slices with norm below a scale-relative tolerance are replaced
    by a random unit vector and the matching entry of the tube's spectrum
    is zeroed.  The replacement draws from `rng` so runs are reproducible.
    """
    X = _check3(X)
    n, n2, n3 = X.shape
    if n2 != 1:
        raise ValueError(f"normalize expects n2 = 1, got shape {X.shape}")
    if fro_norm(X) == 0.0:
        raise ZeroTensorError("normalize of a zero tensor")
    if rng is None:
        rng = np.random.default_rng(0)

    Xh = np.fft.fft(X, axis=2)
    norms = np.linalg.norm(Xh[:, 0, :], axis=0)
    tol = max(1e-12 * float(norms.max()), 1e-300)

    Vh = np.empty_like(Xh)
    ah = np.zeros(n3)
    for j in range(half_slices(n3)):
        if norms[j] >= tol:
            Vh[:, :, j] = Xh[:, :, j] / norms[j]
            ah[j] = norms[j]
        else:
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            Vh[:, 0, j] = v
            ah[j] = 0.0
    mirror_spectrum(Vh)
    for j in range(half_slices(n3), n3):
        ah[j] = ah[n3 - j]

    V = to_real(np.fft.ifft(Vh, axis=2))
    a = to_real(np.fft.ifft(ah)).reshape(1, 1, n3)
    return V, a
