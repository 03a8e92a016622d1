"""Tikhonov solvers: projected Krylov solve and the incremental update.

`tgkt_solve` projects each lateral slice of the right-hand side onto a
small bidiagonalized subspace and solves a stacked least-squares problem
there.  `irls_update` absorbs one new horizontal sample into an existing
solution by solving a single-lateral-slice subproblem and applying a
rank-style correction through an invertible residual tube, instead of
re-solving the grown system from scratch.
"""

from dataclasses import dataclass, field

import numpy as np

from . import core, factor
from .core import fro_norm, tprod, transpose, tube_inverse
from .factor import direct_trls, f_tri_solve, tls_solve, tqr
from .krylov import tgkb

# ||W||_F below this multiple of the sample scale means the new sample is
# already consistent with the current solution and the correction vanishes.
SHORT_CIRCUIT_RTOL = 1e-13


class BreakdownError(RuntimeError):
    """Bidiagonalization stopped before any usable step."""


class NoInvertibleTubeError(ArithmeticError):
    """No column tube of the residual row passes the invertibility test."""

    def __init__(self, column_min_magnitudes):
        mags = ", ".join(f"{v:.3e}" for v in column_min_magnitudes)
        super().__init__(f"no invertible residual tube; per-column min magnitudes: {mags}")
        self.column_min_magnitudes = column_min_magnitudes


@dataclass
class TrlsProblem:
    """Regularized least-squares data: A (m x n x p), B (m x c x p), lambda."""

    A: np.ndarray
    B: np.ndarray
    lam: float

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        if self.A.ndim != 3 or self.B.ndim != 3:
            raise ValueError("A and B must be third-order tensors")
        if self.A.shape[0] != self.B.shape[0] or self.A.shape[2] != self.B.shape[2]:
            raise ValueError(f"incompatible shapes {self.A.shape} and {self.B.shape}")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class UpdateSample:
    """One new horizontal sample a1 (n x 1 x p) and its response b1 (c x 1 x p)."""

    a1: np.ndarray
    b1: np.ndarray

    def __post_init__(self):
        self.a1 = np.asarray(self.a1, dtype=float)
        self.b1 = np.asarray(self.b1, dtype=float)
        if self.a1.ndim != 3 or self.a1.shape[1] != 1:
            raise ValueError(f"a1 must be n x 1 x p, got {self.a1.shape}")
        if self.b1.ndim != 3 or self.b1.shape[1] != 1:
            raise ValueError(f"b1 must be c x 1 x p, got {self.b1.shape}")
        if self.a1.shape[2] != self.b1.shape[2]:
            raise ValueError("a1 and b1 tube lengths differ")


@dataclass
class UpdateResult:
    """Updated solution plus diagnostics of how it was obtained."""

    X: np.ndarray
    short_circuit: bool = False
    fallback: bool = False
    index: int | None = None
    tube_min_magnitude: float | None = None


def tgkt_solve_slice(A, b, lam, k, reorth=True, rng=None):
    """Solve the t-RLS problem for a single right-hand-side slice b.

    Bidiagonalizes A against b, maps the projected problem through the
    triangular factor of the right basis, solves the small stacked
    least-squares system, and lifts the result back.  If bidiagonalization
    broke down early, the achieved step count is used.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    gkb = tgkb(A, b, k, reorth=reorth, rng=rng)
    if gkb.k_eff == 0:
        raise BreakdownError("bidiagonalization broke down before the first step")
    k_eff = gkb.k_eff
    p = A.shape[2]

    R = tqr(gkb.W, mode="economy").R
    Ptil = f_tri_solve(R, gkb.Pbar, side="right")
    stacked = np.concatenate([Ptil, lam * core.identity(k_eff, p)], axis=0)
    rhs = np.zeros((2 * k_eff + 1, 1, p))
    rhs[0, 0, :] = gkb.z1.ravel()
    Z = tls_solve(stacked, rhs)
    return tprod(gkb.W, f_tri_solve(R, Z, side="left"))


def tgkt_solve(problem, k, reorth=True, rng=None):
    """Solve a multi-slice t-RLS problem, one lateral slice of B at a time."""
    B = problem.B
    X = np.empty((problem.A.shape[1], B.shape[1], B.shape[2]))
    for j in range(B.shape[1]):
        try:
            X[:, j : j + 1, :] = tgkt_solve_slice(
                problem.A, B[:, j : j + 1, :], problem.lam, k, reorth=reorth, rng=rng
            )
        except Exception as exc:
            exc.args = (f"lateral slice {j}: {exc}",)
            raise
    return X


def compute_residual_tube_row(X, sample):
    """Residual row W = b1^T - a1^T * X of the new sample against X."""
    X = np.asarray(X, dtype=float)
    if sample.a1.shape[0] != X.shape[0] or sample.a1.shape[2] != X.shape[2]:
        raise ValueError(f"sample shape {sample.a1.shape} does not match X {X.shape}")
    if sample.b1.shape[0] != X.shape[1]:
        raise ValueError(f"response shape {sample.b1.shape} does not match X {X.shape}")
    return transpose(sample.b1) - tprod(transpose(sample.a1), X)


def choose_invertible_index(W):
    """Pick the residual column whose tube is most safely invertible.

    Returns the (0-based) column maximizing the minimum spectral magnitude
    of its tube, among columns passing the invertibility test; the inverse
    tube amplifies errors by the reciprocal of that minimum.
    """
    W = np.asarray(W, dtype=float)
    if W.shape[0] != 1:
        raise ValueError(f"residual row must be 1 x c x p, got {W.shape}")
    mins = []
    best = None
    best_min = -1.0
    for l in range(W.shape[1]):
        mn, mx = core.tube_spectrum_range(W[:, l, :])
        mins.append(mn)
        if mx > 0.0 and mn > core.TUBE_INVERT_RTOL * mx and mn > best_min:
            best = l
            best_min = mn
    if best is None:
        raise NoInvertibleTubeError(mins)
    return best


def _augmented(problem, sample):
    A_new = np.concatenate([problem.A, transpose(sample.a1)], axis=0)
    B_new = np.concatenate([problem.B, transpose(sample.b1)], axis=0)
    return A_new, B_new


def _solve_single_slice(A, b, lam, sub, k, rng):
    if sub == "direct":
        return direct_trls(A, b, lam)
    if sub == "gkt":
        if k is None:
            raise ValueError("subsolver 'gkt' requires a step count k")
        return tgkt_solve_slice(A, b, lam, k, rng=rng)
    raise ValueError(f"unknown subsolver {sub!r}")


def irls_update(problem, X_star, sample, sub="gkt", k=None, rng=None):
    """Fold one new horizontal sample into the solution X_star.

    Solves the grown problem restricted to a single lateral slice with the
    requested subsolver and propagates the change to every other slice
    through the inverse of the chosen residual tube.  The grown system's
    factorizations are never formed.  If no residual tube is invertible
    the grown problem is re-solved in full and the result flags the
    fallback.
    """
    X_star = np.asarray(X_star, dtype=float)
    W = compute_residual_tube_row(X_star, sample)
    w_scale = fro_norm(sample.b1) + fro_norm(sample.a1) * fro_norm(X_star)
    if fro_norm(W) <= SHORT_CIRCUIT_RTOL * w_scale:
        return UpdateResult(X=X_star.copy(), short_circuit=True)

    A_new, B_new = _augmented(problem, sample)
    try:
        l = choose_invertible_index(W)
    except NoInvertibleTubeError:
        if sub == "direct":
            X = direct_trls(A_new, B_new, problem.lam)
        else:
            X = tgkt_solve(TrlsProblem(A_new, B_new, problem.lam), k, rng=rng)
        return UpdateResult(X=X, fallback=True)

    Wl = W[:, l : l + 1, :]
    b_l = B_new[:, l : l + 1, :]
    Xl_new = _solve_single_slice(A_new, b_l, problem.lam, sub, k, rng)
    correction = tprod(tprod(Xl_new - X_star[:, l : l + 1, :], tube_inverse(Wl)), W)
    mn, _ = core.tube_spectrum_range(Wl)
    return UpdateResult(X=X_star + correction, index=l, tube_min_magnitude=mn)


@dataclass
class StreamResult:
    """Final grown problem and committed solution after streamed samples."""

    problem: TrlsProblem
    X: np.ndarray
    updates: list = field(default_factory=list)


def irls_stream(problem, X_star, samples, sub="gkt", k=None, rng=None):
    """Absorb a sequence of samples one at a time.

    Equivalent to repeated irls_update with the problem growing by one
    horizontal slice per sample.  Aborts on the first unrecoverable
    failure, leaving the returned state at the last committed sample.
    """
    X = np.asarray(X_star, dtype=float)
    current = problem
    updates = []
    for sample in samples:
        result = irls_update(current, X, sample, sub=sub, k=k, rng=rng)
        A_new, B_new = _augmented(current, sample)
        current = TrlsProblem(A_new, B_new, current.lam)
        X = result.X
        updates.append(result)
    return StreamResult(problem=current, X=X, updates=updates)
