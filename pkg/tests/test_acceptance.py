"""Acceptance gate.

Each test prints one pass/fail line for its criterion; tolerances are
fixed and must not be loosened.
"""

import time

import numpy as np

from tirls import core, problems, solvers, verify
from tirls.core import rel_error, transpose
from tirls.factor import direct_trls, min_norm_augmented_ls
from tirls.solvers import TrlsProblem, UpdateSample, irls_update, tgkt_solve


def report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def augmented(problem, sample):
    A = np.concatenate([problem.A, transpose(sample.a1)], axis=0)
    B = np.concatenate([problem.B, transpose(sample.b1)], axis=0)
    return A, B


def random_instance(rng, m_max=12, n_max=12, c_max=6, p_max=8):
    m = int(rng.integers(2, m_max + 1))
    n = int(rng.integers(2, n_max + 1))
    c = int(rng.integers(1, c_max + 1))
    p = int(rng.integers(1, p_max + 1))
    A = rng.standard_normal((m, n, p))
    B = rng.standard_normal((m, c, p))
    sample = UpdateSample(rng.standard_normal((n, 1, p)), rng.standard_normal((c, 1, p)))
    return A, B, sample


def test_criterion_1_update_identity():
    t0 = time.perf_counter()
    lams = [1e-2, 1.0, 1e2]
    worst = 0.0
    for trial in range(200):
        rng = np.random.default_rng([1, trial])
        A, B, sample = random_instance(rng)
        lam = lams[trial % 3]
        problem = TrlsProblem(A, B, lam)
        X_star = direct_trls(A, B, lam)
        result = irls_update(problem, X_star, sample, sub="direct")
        A_new, B_new = augmented(problem, sample)
        worst = max(worst, rel_error(result.X, direct_trls(A_new, B_new, lam)))
    elapsed = time.perf_counter() - t0
    report(
        "criterion 1 (incremental update identity)",
        worst <= 1e-9 and elapsed < 30,
        f"worst rel_error {worst:.3e} <= 1e-9 over 200 instances, {elapsed:.1f}s < 30s",
    )


def test_criterion_2_min_norm_top_block():
    worst = 0.0
    for trial in range(100):
        rng = np.random.default_rng([2, trial])
        A, B, _ = random_instance(rng)
        lam = [1e-2, 1.0, 1e2][trial % 3]
        full = min_norm_augmented_ls(A, B, lam)
        worst = max(worst, rel_error(full[: A.shape[1], :, :], direct_trls(A, B, lam)))
    report(
        "criterion 2 (min-norm augmented top block)",
        worst <= 1e-10,
        f"worst rel_error {worst:.3e} <= 1e-10 over 100 instances",
    )


def _bench_update(instance, lam, k):
    problem = TrlsProblem(instance.A, instance.B, lam)
    X_star = tgkt_solve(problem, k)
    A_new, B_new = augmented(problem, instance.sample)
    X_exact = direct_trls(A_new, B_new, lam)

    t0 = time.perf_counter()
    result = irls_update(problem, X_star, instance.sample, sub="gkt", k=k)
    t_update = time.perf_counter() - t0

    t0 = time.perf_counter()
    scratch = tgkt_solve(TrlsProblem(A_new, B_new, lam), k)
    t_scratch = time.perf_counter() - t0

    return rel_error(result.X, X_exact), rel_error(scratch, X_exact), t_update, t_scratch


def test_criterion_3_example1_trend():
    t0 = time.perf_counter()
    m, lam, k = 30, 1e2, 7
    err_u, err_s, _, _ = _bench_update(problems.gen_example1(m, 10, seed=0), lam, k)
    _, _, t_update, t_scratch = _bench_update(problems.gen_example1(m, 100, seed=0), lam, k)
    elapsed = time.perf_counter() - t0
    ok = err_u <= 1e-3 and err_s <= 1e-3 and t_update <= t_scratch / 5 and elapsed < 120
    report(
        "criterion 3 (example 1 trend, m=30)",
        ok,
        f"c=10 Err {err_u:.2e}/{err_s:.2e} <= 1e-3; c=100 time "
        f"{t_update:.3f}s vs {t_scratch:.3f}s (ratio {t_scratch / t_update:.1f}x >= 5x); "
        f"{elapsed:.1f}s < 120s",
    )


def test_criterion_4_example2_trend():
    t0 = time.perf_counter()
    m, k = 50, 5
    lam = 1.0 / np.sqrt(3.91e-2)
    e10_u, e10_s, _, _ = _bench_update(problems.gen_example2(m, 10, 1e-3, seed=0), lam, k)
    e50_u, e50_s, t_update, t_scratch = _bench_update(
        problems.gen_example2(m, 50, 1e-3, seed=0), lam, k
    )
    elapsed = time.perf_counter() - t0
    errs = [e10_u, e10_s, e50_u, e50_s]
    ok = max(errs) <= 5e-3 and t_scratch / t_update >= 5 and elapsed < 180
    report(
        "criterion 4 (example 2 trend, m=50)",
        ok,
        f"Err c=10 {e10_u:.2e}/{e10_s:.2e}, c=50 {e50_u:.2e}/{e50_s:.2e} <= 5e-3; "
        f"speedup {t_scratch / t_update:.1f}x >= 5x at c=50; {elapsed:.1f}s < 180s",
    )


def test_criterion_5_property_suites():
    results = verify.run_all(seed=0, trials=20)
    failures = [r.name for r in results if not r.ok]
    report(
        "criterion 5 (kernel property suites)",
        not failures,
        f"{len(results)} suites at pinned tolerances"
        + (f"; failed: {failures}" if failures else ""),
    )


def test_criterion_6_determinism(tmp_path):
    from tirls.cli import main

    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["gen", "1", "--m", "8", "--c", "3", "--seed", "42", "--out"]
    main(args + [out1])
    main(args + [out2])
    same_files = all(
        (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        for name in ("A.t3d", "B.t3d", "a1.t3d", "b1.t3d")
    )
    r1 = [(r.name, r.ok, r.detail) for r in verify.run_all(seed=0, trials=5)]
    r2 = [(r.name, r.ok, r.detail) for r in verify.run_all(seed=0, trials=5)]
    report(
        "criterion 6 (determinism)",
        same_files and r1 == r2,
        "generated files byte-identical; verification output identical across runs",
    )


def test_criterion_7_reproducibility_statement():
    # Published absolute CPU seconds and exact error values depend on
    # random instances and hardware and are not reproducible; the gate
    # substitutes ratio and magnitude bounds (criteria 3-4) plus the
    # property suites (criterion 5).
    substitutes = [
        test_criterion_3_example1_trend,
        test_criterion_4_example2_trend,
        test_criterion_5_property_suites,
    ]
    report(
        "criterion 7 (reproducibility scope)",
        all(callable(fn) for fn in substitutes),
        "absolute timings/errors out of scope; ratio and magnitude bounds stand in",
    )
