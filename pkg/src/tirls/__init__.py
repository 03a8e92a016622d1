"""t-product tensor Tikhonov regularization with incremental sample updates."""

from .core import (
    bcirc,
    dft_tubes,
    fold,
    fro_norm,
    identity,
    idft_tubes,
    normalize,
    rel_error,
    tprod,
    transpose,
    tube,
    tube_inverse,
    tube_length,
    unfold,
)
from .factor import (
    TQrResult,
    TSvdResult,
    direct_trls,
    f_tri_solve,
    min_norm_augmented_ls,
    tls_solve,
    tqr,
    tsvd,
)
from .krylov import GkbResult, tgkb
from .problems import ProblemInstance, baart, gen_example1, gen_example2, prolate, randn_tensor
from .solvers import (
    TrlsProblem,
    UpdateResult,
    UpdateSample,
    choose_invertible_index,
    compute_residual_tube_row,
    irls_stream,
    irls_update,
    tgkt_solve,
    tgkt_solve_slice,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
