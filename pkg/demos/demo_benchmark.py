"""Error/timing sweep over the number of right-hand-side slices.

For both benchmark families this times the incremental update against a
from-scratch Krylov solve as c grows.  The update cost is dominated by a
single-slice solve, so its advantage scales roughly linearly with c.
"""

import time

import numpy as np

from tirls import core, problems, solvers
from tirls.factor import direct_trls


def bench(example, m, k, c_values, **kw):
    print(f"-- example {example}, m = {m}, k = {k}")
    print(f"{'c':>5} {'err(update)':>12} {'err(scratch)':>13} {'t(update)':>10} {'t(scratch)':>11} {'speedup':>8}")
    for c in c_values:
        inst = problems.generate(example, m, c, seed=0, **kw)
        lam = inst.lambda_default
        problem = solvers.TrlsProblem(inst.A, inst.B, lam)
        X_star = solvers.tgkt_solve(problem, k)
        A_new = np.concatenate([inst.A, core.transpose(inst.sample.a1)], axis=0)
        B_new = np.concatenate([inst.B, core.transpose(inst.sample.b1)], axis=0)
        X_exact = direct_trls(A_new, B_new, lam)

        t0 = time.perf_counter()
        result = solvers.irls_update(problem, X_star, inst.sample, sub="gkt", k=k)
        t_u = time.perf_counter() - t0
        t0 = time.perf_counter()
        scratch = solvers.tgkt_solve(solvers.TrlsProblem(A_new, B_new, lam), k)
        t_s = time.perf_counter() - t0

        e_u = core.rel_error(result.X, X_exact)
        e_s = core.rel_error(scratch, X_exact)
        print(f"{c:>5} {e_u:>12.2e} {e_s:>13.2e} {t_u:>10.3f} {t_s:>11.3f} {t_s / t_u:>7.1f}x")


bench(1, m=30, k=7, c_values=(10, 30, 100))
bench(2, m=50, k=5, c_values=(10, 30, 50), delta=1e-3)
