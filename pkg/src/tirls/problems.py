"""Reproducible generators for the two benchmark problem families.

Family 1 draws a random tensor and rescales its trailing singular tubes
so the operator has ill-determined tubal rank.  Family 2 builds a
severely ill-conditioned operator from two classical test matrices (a
Fredholm first-kind Galerkin discretization and a prolate Toeplitz
matrix) and adds slice-scaled noise to an exact right-hand side.

All randomness flows through numpy's PCG64 generator seeded from the
instance seed, with a fixed draw order, so instances regenerate
bit-identically from their parameters.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import tprod, transpose
from .factor import tsvd
from .solvers import UpdateSample

PROLATE_ALPHA = 0.46


@dataclass
class ProblemInstance:
    A: np.ndarray
    B: np.ndarray
    sample: UpdateSample
    lambda_default: float
    seed: int
    B_true: np.ndarray | None = None
    X_true: np.ndarray | None = None


def randn_tensor(shape, rng):
    """Standard-normal tensor, filled in storage order.

    Storage order is frontal-slice-major with column-major slices, the
    same layout the on-disk tensor format uses.
    """
    n1, n2, n3 = shape
    vals = rng.standard_normal(n1 * n2 * n3)
    return vals.reshape(n3, n2, n1).transpose(2, 1, 0).copy()


def gen_example1(m, c, seed):
    """Random operator with the trailing three singular tubes shrunk 100x.

    Draw order: A' (m x m x m), B (m x c x m), a1 (m x 1 x m), b1 (c x 1 x m).
    """
    if m < 4:
        raise ValueError("m must be at least 4")
    rng = np.random.default_rng(seed)
    A0 = randn_tensor((m, m, m), rng)
    B = randn_tensor((m, c, m), rng)
    a1 = randn_tensor((m, 1, m), rng)
    b1 = randn_tensor((c, 1, m), rng)

    svd = tsvd(A0)
    S = svd.S.copy()
    S[m - 3 :, m - 3 :, :] *= 1e-2
    A = tprod(tprod(svd.U, S), transpose(svd.V))
    return ProblemInstance(
        A=A,
        B=B,
        sample=UpdateSample(a1=a1, b1=b1),
        lambda_default=1e2,
        seed=seed,
    )


def baart(m):
    """Galerkin matrix of a classical first-kind Fredholm test problem.

    Kernel exp(s*cos(t)) on s in [0, pi/2], t in [0, pi], discretized with
    orthonormal box functions: exact integration in s, Simpson's rule in
    t.  Severely ill-conditioned by construction.  Ported from the
    published reference formulas; locked by golden files in the tests.
    """
    if m < 3:
        raise ValueError("m must be at least 3")
    hs = np.pi / (2 * m)
    ht = np.pi / m
    scale = 1.0 / (3.0 * np.sqrt(2.0))
    s = np.arange(m + 1) * hs

    def edge_integral(co):
        # Integral of exp(s*co) over each s-cell; limit s_{i+1}-s_i at co=0.
        if abs(co) < 1e-14:
            return s[1:] - s[:-1]
        return (np.exp(s[1:] * co) - np.exp(s[:-1] * co)) / co

    A = np.zeros((m, m))
    f3 = edge_integral(1.0)
    for j in range(m):
        f1 = f3
        f2 = edge_integral(np.cos((j + 0.5) * ht))
        f3 = edge_integral(np.cos((j + 1.0) * ht))
        A[:, j] = scale * (f1 + 4.0 * f2 + f3)
    return A


def prolate(m, alpha=PROLATE_ALPHA):
    """Symmetric positive definite ill-conditioned prolate Toeplitz matrix.

    First row: t0 = 2*alpha, t_k = sin(2*pi*alpha*k)/(pi*k).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    k = np.arange(1, m)
    row = np.empty(m)
    row[0] = 2.0 * alpha
    row[1:] = np.sin(2.0 * np.pi * alpha * k) / (np.pi * k)
    return scipy.linalg.toeplitz(row)


def gen_example2(m, c, delta, seed):
    """Ill-posed operator from test matrices, with slice-scaled noise.

    Frontal slice i of A is the i-th first-column entry of the Fredholm
    matrix times the prolate matrix.  The exact solution is the all-ones
    tensor; each lateral slice of B carries relative noise exactly delta.
    Draw order: noise (m x c x m), a1 (m x 1 x m), b1 (c x 1 x m).
    """
    if m < 3:
        raise ValueError("m must be at least 3")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    rng = np.random.default_rng(seed)
    A1 = baart(m)
    A2 = prolate(m)
    A = np.empty((m, m, m))
    for i in range(m):
        A[:, :, i] = A1[i, 0] * A2

    X_true = np.ones((m, c, m))
    B_true = tprod(A, X_true)
    E0 = randn_tensor((m, c, m), rng)
    a1 = randn_tensor((m, 1, m), rng)
    b1 = randn_tensor((c, 1, m), rng)

    if delta == 0:
        B = B_true.copy()
    else:
        B = B_true.copy()
        for j in range(c):
            Ej = E0[:, j, :]
            B[:, j, :] += delta * (Ej / np.linalg.norm(Ej)) * np.linalg.norm(B_true[:, j, :])
    return ProblemInstance(
        A=A,
        B=B,
        sample=UpdateSample(a1=a1, b1=b1),
        lambda_default=1.0 / np.sqrt(3.91e-2),
        seed=seed,
        B_true=B_true,
        X_true=X_true,
    )


def generate(example, m, c, seed, delta=1e-3):
    """Dispatch on the problem family number (1 or 2)."""
    if example == 1:
        return gen_example1(m, c, seed)
    if example == 2:
        return gen_example2(m, c, delta, seed)
    raise ValueError(f"unknown example {example!r}")
