"""Tour of the third-order tensor algebra: products, transposes, factorizations.

Every tensor here is a plain numpy array of shape (n1, n2, n3); the tensor
product multiplies frontal slices after an FFT along the tube fibers, which
is the same thing as a block-circulant matrix product on the unfolded data.
"""

import numpy as np

from tirls import core, factor

rng = np.random.default_rng(0)

# -- the product, two ways -------------------------------------------------
A = rng.standard_normal((4, 3, 5))
B = rng.standard_normal((3, 2, 5))

C_fft = core.tprod(A, B)
C_dense = core.fold(core.bcirc(A) @ core.unfold(B), 4, 2, 5)
print("tprod vs block-circulant route:", core.rel_error(C_fft, C_dense))

# -- identity and transpose ------------------------------------------------
I = core.identity(3, 5)
print("A * I == A:", core.rel_error(core.tprod(A, I), A))
print(
    "(A*B)^T == B^T * A^T:",
    core.fro_norm(core.transpose(C_fft) - core.tprod(core.transpose(B), core.transpose(A))),
)

# -- orthogonal factorizations --------------------------------------------
q = factor.tqr(A)
print("t-QR reconstruction:", core.rel_error(core.tprod(q.Q, q.R), A))
print(
    "Q^T * Q == I:",
    core.fro_norm(core.tprod(core.transpose(q.Q), q.Q) - core.identity(3, 5)),
)

s = factor.tsvd(A)
rec = core.tprod(core.tprod(s.U, s.S), core.transpose(s.V))
print("t-SVD reconstruction:", core.rel_error(rec, A))

# The singular tubes live on the diagonal of S; their spectra are the
# per-slice matrix singular values, sorted and nonnegative.
spectra = np.diagonal(core.dft_tubes(s.S)).real
print("leading singular values per spectral slice:", np.round(spectra[:, 0], 3))
