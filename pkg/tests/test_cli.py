"""CLI surface: manifests, outputs, determinism, exit codes."""

import pytest

from vqite import build_ucc_lih, run_qite
from vqite.cli import (ManifestError, RunManifest, discontinuity_rs,
                       emit_outputs, main, run_scan)
from vqite.engine import QiteConfig


def manifest(**kwargs):
    defaults = dict(table="lih", ansatz="he", cmf=True,
                    r_selection=(1.4, 1.5), iterations=4, seed=0)
    defaults.update(kwargs)
    return RunManifest(**defaults)


def read(path):
    return path.read_bytes()


def test_scan_writes_expected_files(tmp_path):
    m = manifest(trace=True, out_dir=str(tmp_path))
    points, trajectories, cmf_records = run_scan(m)
    emit_outputs(points, trajectories, tmp_path, m, cmf_records)
    curve = (tmp_path / "curve.csv").read_text().splitlines()
    assert curve[0] == "R,e_qite,e_exact,fidelity,iterations,flags"
    assert len(curve) == 3
    for r in (1.4, 1.5):
        trace = (tmp_path / f"trace_R{r:g}.csv").read_text().splitlines()
        assert trace[0].startswith("iter,theta_1")
        assert len(trace) == 6  # header + 5 records for l = 4
    assert (tmp_path / "manifest.echo").exists()
    assert (tmp_path / "cmf_selection.txt").exists()


def test_scan_deterministic_bytes(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        m = manifest(trace=True, out_dir=str(out),
                     route="hadamard", shots=500, seed=3)
        points, trajectories, cmf_records = run_scan(m)
        emit_outputs(points, trajectories, out, m, cmf_records)
    for name in ("curve.csv", "trace_R1.4.csv", "trace_R1.5.csv",
                 "manifest.echo", "cmf_selection.txt"):
        assert read(out_a / name) == read(out_b / name), name


def test_parallel_matches_serial(tmp_path):
    rs = (1.0, 1.5, 2.0, 3.0)
    out_s, out_p = tmp_path / "serial", tmp_path / "parallel"
    for out, workers in ((out_s, 1), (out_p, 4)):
        m = manifest(r_selection=rs, workers=workers, out_dir=str(out), trace=True)
        points, trajectories, cmf_records = run_scan(m)
        emit_outputs(points, trajectories, out, m, cmf_records)
    for name in ["curve.csv"] + [f"trace_R{r:g}.csv" for r in rs]:
        assert read(out_s / name) == read(out_p / name), name


def test_point_matches_engine(lih_r15):
    m = manifest(ansatz="ucc-lih", cmf=False, r_selection=(1.5,))
    points, trajectories, _ = run_scan(m)
    cfg = QiteConfig(initial_theta=(1.0, 1.0), iterations=4,
                     seed=(0, 1500))
    traj = run_qite(lih_r15, build_ucc_lih, cfg)
    assert points[0].e_qite == pytest.approx(traj.converged_energy, abs=1e-14)
    assert points[0].final_fidelity == pytest.approx(traj.final_fidelity, abs=1e-14)


def test_variational_bound_on_curve():
    points, _, _ = run_scan(manifest(r_selection=(0.5, 1.5, 3.0)))
    for p in points:
        assert p.e_qite >= p.e_exact - 1e-9
        assert "bound-violation" not in p.flags


def test_discontinuity_flags(lih_table):
    assert discontinuity_rs(lih_table) == {4.9, 5.0}
    points, _, _ = run_scan(manifest(r_selection=(4.9,)))
    assert "discontinuity" in points[0].flags
    points, _, _ = run_scan(manifest(r_selection=(1.5,)))
    assert "discontinuity" not in points[0].flags


def test_manifest_validation_errors():
    with pytest.raises(ManifestError):
        run_scan(manifest(ansatz="he", cmf=False))     # 3-qubit table, no CMF
    with pytest.raises(ManifestError):
        run_scan(manifest(ansatz="ucc-h2"))            # needs 2-qubit table
    with pytest.raises(ManifestError):
        run_scan(manifest(r_selection=()))             # empty selection
    with pytest.raises(ManifestError):
        run_scan(manifest(r_selection=(1.23,)))        # not a table row
    with pytest.raises(ManifestError):
        run_scan(manifest(theta0=(0.1, 0.2)))          # wrong arity for he


def test_h2_table_scan():
    m = manifest(table="h2-synthetic", ansatz="ucc-h2", cmf=False,
                 r_selection=(0.7,), theta0=(2.0,))
    points, _, _ = run_scan(m)
    assert points[0].e_qite == pytest.approx(points[0].e_exact, abs=1e-2)
    assert points[0].final_fidelity > 0.99


def test_main_scan_exit_zero(tmp_path, capsys):
    rc = main(["scan", "--table", "lih", "--ansatz", "he", "--cmf",
               "--r", "1.5", "--out", str(tmp_path), "--trace"])
    assert rc == 0
    assert "R=1.5" in capsys.readouterr().out
    assert (tmp_path / "curve.csv").exists()


def test_main_manifest_error_exit_two(capsys):
    rc = main(["scan", "--table", "lih", "--ansatz", "he", "--r", "1.5"])
    assert rc == 2
    assert "manifest error" in capsys.readouterr().err


def test_main_point_requires_single_r(capsys):
    rc = main(["point", "--table", "lih", "--ansatz", "he", "--cmf",
               "--r", "1.4,1.5"])
    assert rc == 2


def test_main_spectrum(capsys):
    rc = main(["spectrum", "--table", "lih", "--r", "1.5"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "eigenvalues:" in out
    assert "-7.954370068" in out


def test_main_excited(capsys):
    rc = main(["excited", "--table", "lih", "--r", "1.5", "--iters", "20"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "first excited (oracle)" in out
    lines = dict(l.split(" = ") for l in out.strip().splitlines())
    dev = float(lines["deviation"])
    assert dev < 1e-2


def test_main_validate(tmp_path, capsys):
    rc = main(["validate", "--table", "lih"])
    assert rc == 0
    assert "rows: 50" in capsys.readouterr().out
    bad = tmp_path / "bad.csv"
    bad.write_text("R,Q\n0.5,1.0\n")
    rc = main(["validate", "--table", str(bad)])
    assert rc == 2


def test_per_point_error_sets_flag_and_exit(tmp_path, monkeypatch, capsys):
    import vqite.cli as cli_mod

    def boom(*args, **kwargs):
        raise RuntimeError("injected failure")

    monkeypatch.setattr(cli_mod, "run_qite", boom)
    rc = main(["scan", "--table", "lih", "--ansatz", "he", "--cmf",
               "--r", "1.5", "--out", str(tmp_path)])
    assert rc == 1
    curve = (tmp_path / "curve.csv").read_text()
    assert "error:" in curve
