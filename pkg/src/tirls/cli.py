"""Command-line front end: generate, solve, update, bench, verify.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import core, problems, session as session_mod, solvers
from .factor import direct_trls
from .tensorfile import read_tensor, write_tensor


def _median_time(fn, repeats=3):
    """Median wall time of fn over `repeats` calls; returns (result, seconds)."""
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return result, float(np.median(times))


def cmd_gen(args):
    instance = problems.generate(args.example, args.m, args.c, args.seed, delta=args.delta)
    os.makedirs(args.out, exist_ok=True)
    write_tensor(os.path.join(args.out, "A.t3d"), instance.A)
    write_tensor(os.path.join(args.out, "B.t3d"), instance.B)
    write_tensor(os.path.join(args.out, "a1.t3d"), instance.sample.a1)
    write_tensor(os.path.join(args.out, "b1.t3d"), instance.sample.b1)
    if instance.B_true is not None:
        write_tensor(os.path.join(args.out, "B_true.t3d"), instance.B_true)
    if instance.X_true is not None:
        write_tensor(os.path.join(args.out, "X_true.t3d"), instance.X_true)
    session_mod.write_manifest(
        os.path.join(args.out, session_mod.MANIFEST_NAME),
        {
            "format_version": session_mod.FORMAT_VERSION,
            "lambda": repr(float(instance.lambda_default)),
            "k": "",
            "subsolver": "gkt",
            "sample_count": 0,
            "seed": args.seed,
            "m": instance.A.shape[0],
            "n": instance.A.shape[1],
            "c": instance.B.shape[1],
            "p": instance.A.shape[2],
        },
    )
    print(f"wrote example {args.example} instance (m={args.m}, c={args.c}, seed={args.seed}) to {args.out}")
    return 0


def _solve(A, B, lam, method, k, rng=None):
    if method == "direct":
        return direct_trls(A, B, lam)
    return solvers.tgkt_solve(solvers.TrlsProblem(A, B, lam), k, rng=rng)


def cmd_solve(args):
    A = read_tensor(args.A)
    B = read_tensor(args.B)
    t0 = time.perf_counter()
    X = _solve(A, B, args.lam, args.method, args.k)
    elapsed = time.perf_counter() - t0
    write_tensor(args.out, X)
    residual = core.fro_norm(core.tprod(A, X) - B) / core.fro_norm(B)
    print(f"rel_residual={residual:.6e} wall_seconds={elapsed:.4f}")
    return 0


def cmd_update(args):
    sess = session_mod.load_session(args.session)
    a1 = read_tensor(args.a1)
    b1 = read_tensor(args.b1)
    sample = solvers.UpdateSample(a1=a1, b1=b1)
    problem = solvers.TrlsProblem(sess.A, sess.B, sess.lam)
    k = args.k if args.k is not None else sess.k
    with session_mod.session_lock(args.session):
        t0 = time.perf_counter()
        result = solvers.irls_update(problem, sess.X, sample, sub=args.method, k=k)
        elapsed = time.perf_counter() - t0
        A_new = np.concatenate([sess.A, core.transpose(a1)], axis=0)
        B_new = np.concatenate([sess.B, core.transpose(b1)], axis=0)
        session_mod.commit_session(
            args.session,
            A_new,
            B_new,
            result.X,
            sess.lam,
            k,
            args.method,
            sess.sample_count + 1,
            sess.seed,
        )
    if result.short_circuit:
        print("short-circuit: W=0")
    elif result.fallback:
        print("fallback: no invertible residual tube, re-solved in full")
    else:
        print(f"index_l={result.index} tube_min_magnitude={result.tube_min_magnitude:.6e}")
    print(f"wall_seconds={elapsed:.4f}")
    return 0


def cmd_bench(args):
    c_list = [int(c) for c in args.c_list.split(",") if c.strip()]
    if not c_list:
        raise UsageError("--c-list must name at least one value of c")
    rows = []
    for c in c_list:
        instance = problems.generate(args.example, args.m, c, args.seed, delta=args.delta)
        lam = args.lam if args.lam is not None else instance.lambda_default
        problem = solvers.TrlsProblem(instance.A, instance.B, lam)
        X_star = solvers.tgkt_solve(problem, args.k)
        A_new = np.concatenate([instance.A, core.transpose(instance.sample.a1)], axis=0)
        B_new = np.concatenate([instance.B, core.transpose(instance.sample.b1)], axis=0)
        X_exact = direct_trls(A_new, B_new, lam)

        update_result, t_irls = _median_time(
            lambda: solvers.irls_update(problem, X_star, instance.sample, sub="gkt", k=args.k)
        )
        scratch, t_gkt = _median_time(
            lambda: solvers.tgkt_solve(solvers.TrlsProblem(A_new, B_new, lam), args.k)
        )
        rows.append((c, "t-IRLS", core.rel_error(update_result.X, X_exact), args.k, t_irls))
        rows.append((c, "t-GKT", core.rel_error(scratch, X_exact), args.k, t_gkt))

    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "method", "err", "k", "cpu_seconds"])
        for c, method, err, k, seconds in rows:
            writer.writerow([c, method, f"{err:.6e}", k, f"{seconds:.6f}"])
    for c, method, err, k, seconds in rows:
        print(f"c={c} method={method} err={err:.3e} k={k} cpu_seconds={seconds:.4f}")
    return 0


def cmd_verify(args):
    from . import verify

    results = verify.run_all(seed=args.seed, trials=args.trials)
    failed = False
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        failed = failed or not res.ok
    print(f"{sum(r.ok for r in results)}/{len(results)} suites passed")
    return 1 if failed else 0


class UsageError(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(prog="tirls", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark problem instance")
    p.add_argument("example", type=int, choices=(1, 2))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("solve", help="solve a regularized problem from tensor files")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--method", choices=("gkt", "direct"), default="gkt")
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("update", help="absorb one new sample into a session")
    p.add_argument("session")
    p.add_argument("a1")
    p.add_argument("b1")
    p.add_argument("--method", choices=("gkt", "direct"), default="gkt")
    p.add_argument("--k", type=int)
    p.set_defaults(fn=cmd_update)

    p = sub.add_parser("bench", help="time the incremental update against a full solve")
    p.add_argument("--example", type=int, choices=(1, 2), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c-list", required=True, help="comma-separated values of c")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("verify", help="run all property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "fn", None) is cmd_solve and args.method == "gkt" and args.k is None:
        parser.error("--k is required with --method gkt")
    if getattr(args, "fn", None) is cmd_update and args.method == "gkt" and args.k is None:
        sess_k = None
        try:
            sess_k = session_mod.load_session(args.session).k
        except Exception:
            pass
        if sess_k is None:
            parser.error("--k is required with --method gkt (session has no stored k)")
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
