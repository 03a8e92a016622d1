import csv
import os
import struct

import numpy as np
import pytest

from tirls import core, problems, session, solvers
from tirls.cli import main
from tirls.factor import direct_trls
from tirls.tensorfile import MAGIC, TensorFileError, read_tensor, write_tensor


class TestTensorFile:
    def test_roundtrip_bit_identical(self, tmp_path):
        A = np.random.default_rng(0).standard_normal((4, 3, 5))
        path = tmp_path / "a.t3d"
        write_tensor(path, A)
        assert np.array_equal(read_tensor(path), A)

    def test_payload_layout(self, tmp_path):
        # header then doubles in frontal-slice-major, column-major order
        A = np.arange(12, dtype=float).reshape(2, 3, 2, order="F").copy()
        path = tmp_path / "a.t3d"
        write_tensor(path, A)
        raw = path.read_bytes()
        assert raw[:4] == MAGIC
        payload = np.frombuffer(raw[32:], dtype="<f8")
        assert np.array_equal(payload, A.transpose(2, 1, 0).ravel())

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.t3d"
        path.write_bytes(b"XXXX" + bytes(28))
        with pytest.raises(TensorFileError):
            read_tensor(path)

    def test_rejects_bad_version(self, tmp_path):
        path = tmp_path / "bad.t3d"
        path.write_bytes(struct.pack("<4sIQQQ", MAGIC, 99, 1, 1, 1) + bytes(8))
        with pytest.raises(TensorFileError):
            read_tensor(path)

    def test_rejects_truncated_payload(self, tmp_path):
        A = np.ones((2, 2, 2))
        path = tmp_path / "a.t3d"
        write_tensor(path, A)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(TensorFileError):
            read_tensor(path)


def make_session(directory, seed=0, m=4, n=3, c=2, p=2, lam=0.5):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n, p))
    B = rng.standard_normal((m, c, p))
    X = direct_trls(A, B, lam)
    session.commit_session(directory, A, B, X, lam, None, "direct", 0, seed)
    return A, B, X


class TestSession:
    def test_commit_then_load(self, tmp_path):
        A, B, X = make_session(tmp_path)
        sess = session.load_session(tmp_path)
        assert np.array_equal(sess.A, A)
        assert np.array_equal(sess.B, B)
        assert np.array_equal(sess.X, X)
        assert sess.lam == 0.5
        assert sess.k is None and sess.subsolver == "direct"

    def test_detects_shape_corruption(self, tmp_path):
        make_session(tmp_path)
        write_tensor(os.path.join(tmp_path, "X.t3d"), np.zeros((9, 9, 9)))
        with pytest.raises(session.SessionError):
            session.load_session(tmp_path)

    def test_detects_manifest_mismatch(self, tmp_path):
        make_session(tmp_path)
        manifest = session.read_manifest(os.path.join(tmp_path, session.MANIFEST_NAME))
        manifest["m"] = "99"
        session.write_manifest(os.path.join(tmp_path, session.MANIFEST_NAME), manifest)
        with pytest.raises(session.SessionError):
            session.load_session(tmp_path)

    def test_lock_excludes_second_writer(self, tmp_path):
        make_session(tmp_path)
        with session.session_lock(tmp_path):
            with pytest.raises(session.SessionError):
                with session.session_lock(tmp_path):
                    pass
        # released on exit
        with session.session_lock(tmp_path):
            pass

    def test_crash_before_rename_preserves_state(self, tmp_path):
        A, B, X = make_session(tmp_path)
        # simulate a writer killed after staging: .tmp files exist but the
        # committed state is untouched and still loads
        write_tensor(os.path.join(tmp_path, "A.t3d.tmp"), np.zeros((4, 3, 2)))
        write_tensor(os.path.join(tmp_path, "X.t3d.tmp"), np.zeros((3, 2, 2)))
        sess = session.load_session(tmp_path)
        assert np.array_equal(sess.A, A)
        assert np.array_equal(sess.X, X)


class TestCliGen:
    def test_shapes_on_disk(self, tmp_path):
        out = str(tmp_path / "inst")
        assert main(["gen", "1", "--m", "6", "--c", "2", "--seed", "3", "--out", out]) == 0
        assert read_tensor(os.path.join(out, "A.t3d")).shape == (6, 6, 6)
        assert read_tensor(os.path.join(out, "B.t3d")).shape == (6, 2, 6)
        assert read_tensor(os.path.join(out, "a1.t3d")).shape == (6, 1, 6)
        assert read_tensor(os.path.join(out, "b1.t3d")).shape == (2, 1, 6)

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        args = ["gen", "2", "--m", "6", "--c", "2", "--seed", "5", "--out"]
        assert main(args + [out1]) == 0
        assert main(args + [out2]) == 0
        for name in ("A.t3d", "B.t3d", "a1.t3d", "b1.t3d", "B_true.t3d", "X_true.t3d"):
            with open(os.path.join(out1, name), "rb") as f1, open(
                os.path.join(out2, name), "rb"
            ) as f2:
                assert f1.read() == f2.read()

    def test_example2_noise_level_on_disk(self, tmp_path):
        out = str(tmp_path / "inst")
        delta = 1e-3
        assert (
            main(["gen", "2", "--m", "8", "--c", "2", "--delta", str(delta), "--out", out]) == 0
        )
        B = read_tensor(os.path.join(out, "B.t3d"))
        B_true = read_tensor(os.path.join(out, "B_true.t3d"))
        for j in range(2):
            ratio = np.linalg.norm(B[:, j, :] - B_true[:, j, :]) / np.linalg.norm(
                B_true[:, j, :]
            )
            assert ratio == pytest.approx(delta, rel=1e-12)


class TestCliSolve:
    def test_direct_identity(self, tmp_path, capsys):
        A = core.identity(4, 3)
        B = np.random.default_rng(1).standard_normal((4, 2, 3))
        write_tensor(tmp_path / "A.t3d", A)
        write_tensor(tmp_path / "B.t3d", B)
        out = str(tmp_path / "X.t3d")
        code = main(
            [
                "solve",
                str(tmp_path / "A.t3d"),
                str(tmp_path / "B.t3d"),
                "--lambda",
                "0.7",
                "--method",
                "direct",
                "--out",
                out,
            ]
        )
        assert code == 0
        assert core.rel_error(read_tensor(out), B / (1 + 0.7**2)) <= 1e-12
        assert "rel_residual=" in capsys.readouterr().out

    def test_gkt_matches_direct(self, tmp_path):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((6, 4, 3))
        B = rng.standard_normal((6, 2, 3))
        write_tensor(tmp_path / "A.t3d", A)
        write_tensor(tmp_path / "B.t3d", B)
        common = [str(tmp_path / "A.t3d"), str(tmp_path / "B.t3d"), "--lambda", "0.5"]
        assert main(["solve", *common, "--method", "direct", "--out", str(tmp_path / "Xd.t3d")]) == 0
        assert (
            main(["solve", *common, "--method", "gkt", "--k", "4", "--out", str(tmp_path / "Xg.t3d")])
            == 0
        )
        Xd = read_tensor(tmp_path / "Xd.t3d")
        Xg = read_tensor(tmp_path / "Xg.t3d")
        assert core.rel_error(Xg, Xd) <= 1e-8

    def test_missing_k_is_usage_error(self, tmp_path):
        write_tensor(tmp_path / "A.t3d", np.ones((2, 2, 1)))
        write_tensor(tmp_path / "B.t3d", np.ones((2, 1, 1)))
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "solve",
                    str(tmp_path / "A.t3d"),
                    str(tmp_path / "B.t3d"),
                    "--lambda",
                    "1.0",
                    "--out",
                    str(tmp_path / "X.t3d"),
                ]
            )
        assert exc.value.code == 2


class TestCliUpdate:
    def test_short_circuit_message_and_state(self, tmp_path, capsys):
        A, B, X = make_session(tmp_path)
        rng = np.random.default_rng(9)
        a1 = rng.standard_normal((3, 1, 2))
        b1 = core.transpose(core.tprod(core.transpose(a1), X))
        write_tensor(tmp_path / "a1.t3d", a1)
        write_tensor(tmp_path / "b1.t3d", b1)
        code = main(
            [
                "update",
                str(tmp_path),
                str(tmp_path / "a1.t3d"),
                str(tmp_path / "b1.t3d"),
                "--method",
                "direct",
            ]
        )
        assert code == 0
        assert "short-circuit: W=0" in capsys.readouterr().out
        sess = session.load_session(tmp_path)
        assert sess.A.shape == (5, 3, 2)
        assert np.array_equal(sess.X, X)
        assert sess.sample_count == 1

    def test_direct_update_matches_full_solve(self, tmp_path, capsys):
        A, B, X = make_session(tmp_path, seed=4)
        rng = np.random.default_rng(10)
        a1 = rng.standard_normal((3, 1, 2))
        b1 = rng.standard_normal((2, 1, 2))
        write_tensor(tmp_path / "a1.t3d", a1)
        write_tensor(tmp_path / "b1.t3d", b1)
        code = main(
            [
                "update",
                str(tmp_path),
                str(tmp_path / "a1.t3d"),
                str(tmp_path / "b1.t3d"),
                "--method",
                "direct",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "index_l=" in out and "tube_min_magnitude=" in out
        sess = session.load_session(tmp_path)
        expect = direct_trls(sess.A, sess.B, sess.lam)
        assert core.rel_error(sess.X, expect) <= 1e-9

    def test_locked_session_fails(self, tmp_path, capsys):
        A, B, X = make_session(tmp_path)
        rng = np.random.default_rng(11)
        write_tensor(tmp_path / "a1.t3d", rng.standard_normal((3, 1, 2)))
        write_tensor(tmp_path / "b1.t3d", rng.standard_normal((2, 1, 2)))
        with session.session_lock(tmp_path):
            code = main(
                [
                    "update",
                    str(tmp_path),
                    str(tmp_path / "a1.t3d"),
                    str(tmp_path / "b1.t3d"),
                    "--method",
                    "direct",
                ]
            )
        assert code == 1
        assert "locked" in capsys.readouterr().err


class TestCliBench:
    def test_csv_schema(self, tmp_path, capsys):
        csv_path = str(tmp_path / "bench.csv")
        code = main(
            [
                "bench",
                "--example",
                "1",
                "--m",
                "6",
                "--c-list",
                "1,2",
                "--k",
                "3",
                "--csv",
                csv_path,
            ]
        )
        assert code == 0
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["c", "method", "err", "k", "cpu_seconds"]
        assert len(rows) == 5
        assert {r[1] for r in rows[1:]} == {"t-IRLS", "t-GKT"}
        for r in rows[1:]:
            assert float(r[2]) < 1e-4
            assert float(r[4]) >= 0

    def test_empty_c_list_is_usage_error(self, tmp_path, capsys):
        code = main(
            [
                "bench",
                "--example",
                "1",
                "--m",
                "6",
                "--c-list",
                ",",
                "--k",
                "3",
                "--csv",
                str(tmp_path / "b.csv"),
            ]
        )
        assert code == 2
        assert "usage error" in capsys.readouterr().err


class TestCliVerify:
    def test_all_suites_pass(self, capsys):
        code = main(["verify", "--trials", "3"])
        out = capsys.readouterr().out
        assert code == 0
        assert "[FAIL]" not in out
        assert out.count("[PASS]") >= 5

    def test_fault_injection_caught(self, capsys, monkeypatch):
        real = core.transpose
        monkeypatch.setattr(core, "transpose", lambda A: -real(A))
        code = main(["verify", "--trials", "2"])
        out = capsys.readouterr().out
        assert code == 1
        assert "[FAIL]" in out

    def test_repeated_run_identical_output(self, capsys):
        main(["verify", "--trials", "2"])
        first = capsys.readouterr().out
        main(["verify", "--trials", "2"])
        assert capsys.readouterr().out == first
