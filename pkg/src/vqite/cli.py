"""Command-line driver: table -> (optional CMF) -> QITE per bond distance.

Subcommands:

    scan      potential-energy curve over selected bond distances
    point     one bond distance, summary printed
    spectrum  exact eigenvalues and the Gershgorin bound for one row
    excited   Gershgorin lift of the (reduced) Hamiltonian, then a
              ground-state run that lands on the first excited level
    validate  table lint

Outputs are plain CSV (10 significant digits, Hartree throughout):
curve.csv, one trace_R<value>.csv per point when --trace is set, a
manifest.echo with the resolved configuration, and cmf_selection.txt when
a reduction is active.  Identical manifest and seed give byte-identical
files; bond distances may be processed by a worker pool without changing
the output.  Exit codes: 0 success, 1 point failures, 2 manifest or
validation errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import build_hardware_efficient, build_ucc_h2, build_ucc_lih
from .cmf import CmfPartition, cmf_reduce
from .engine import EnergyMap, QiteConfig, resolve_dtau, run_qite
from .pauli import to_dense_matrix
from .simulator import DensityMatrix
from .spectra import exact_spectrum, gershgorin_emax, lift_ground_state
from .tables import (MoleculeTable, hamiltonian_at, load_h2_synthetic_table,
                     load_lih_table, load_table)

DISCONTINUITY_JUMP = 0.05
ENERGY_FMT = "%.10g"

ANSATZ_BUILDERS = {
    "ucc-h2": build_ucc_h2,
    "ucc-lih": build_ucc_lih,
    "he": build_hardware_efficient,
}

DEFAULT_THETA0 = {
    "ucc-h2": (2.0,),
    "ucc-lih": (1.0, 1.0),
    "he": (0.5,) * 6,
}


class ManifestError(ValueError):
    """Configuration problem; aborts before any work starts (exit 2)."""


@dataclass(frozen=True)
class RunManifest:
    """Resolved configuration of one scan invocation."""

    table: str = "lih"
    ansatz: str = "he"
    cmf: bool = False
    r_selection: tuple[float, ...] | str = "all"
    iterations: int = 4
    dtau: float | str = "auto"
    route: str = "exact"
    shots: int | None = None
    seed: int = 0
    theta0: tuple[float, ...] | None = None
    out_dir: str | None = None
    trace: bool = False
    workers: int = 1

    def echo_lines(self, resolved_rs) -> list[str]:
        pairs = [
            ("table", self.table),
            ("ansatz", self.ansatz),
            ("cmf", self.cmf),
            ("r", ",".join("%g" % r for r in resolved_rs)),
            ("iterations", self.iterations),
            ("dtau", self.dtau),
            ("route", self.route),
            ("shots", self.shots),
            ("seed", self.seed),
            ("theta0", ",".join("%g" % t for t in self.resolved_theta0())),
            ("trace", self.trace),
            ("workers", self.workers),
        ]
        return [f"{k} = {v}" for k, v in pairs]

    def resolved_theta0(self) -> tuple[float, ...]:
        return self.theta0 if self.theta0 is not None else DEFAULT_THETA0[self.ansatz]


@dataclass(frozen=True)
class CurvePoint:
    r: float
    e_qite: float
    e_exact: float
    final_fidelity: float | None
    iterations_used: int
    flags: tuple[str, ...] = field(default=())


def load_manifest_table(manifest: RunManifest) -> MoleculeTable:
    if manifest.table == "lih":
        return load_lih_table()
    if manifest.table == "h2-synthetic":
        return load_h2_synthetic_table()
    try:
        return load_table(manifest.table)
    except OSError as exc:
        raise ManifestError(f"cannot read table: {exc}") from exc


def validate_manifest(manifest: RunManifest, table: MoleculeTable) -> tuple[float, ...]:
    if manifest.ansatz not in ANSATZ_BUILDERS:
        raise ManifestError(f"unknown ansatz '{manifest.ansatz}'")
    if manifest.ansatz == "ucc-h2" and table.n_qubits != 2:
        raise ManifestError("ucc-h2 needs a 2-qubit table")
    if manifest.ansatz == "ucc-lih" and table.n_qubits != 3:
        raise ManifestError("ucc-lih needs a 3-qubit table")
    if manifest.cmf and table.n_qubits != 3:
        raise ManifestError("the CMF reduction is defined for 3-qubit tables")
    if manifest.ansatz == "he" and table.n_qubits == 3 and not manifest.cmf:
        raise ManifestError("the he ansatz needs --cmf on a 3-qubit table")
    if manifest.ansatz == "he" and table.n_qubits not in (2, 3):
        raise ManifestError("the he ansatz needs a 2- or 3-qubit table")
    theta0 = manifest.resolved_theta0()
    expected = {"ucc-h2": 1, "ucc-lih": 2, "he": 6}[manifest.ansatz]
    if len(theta0) != expected:
        raise ManifestError(
            f"theta0 needs {expected} values for {manifest.ansatz}, got {len(theta0)}"
        )
    if manifest.r_selection == "all":
        rs = table.bond_distances
    else:
        rs = tuple(manifest.r_selection)
        if not rs:
            raise ManifestError("empty bond-distance selection")
        known = set(table.bond_distances)
        missing = [r for r in rs if not any(abs(r - k) < 1e-9 for k in known)]
        if missing:
            raise ManifestError(f"bond distances not in table: {missing}")
    if manifest.iterations < 1:
        raise ManifestError("iterations must be >= 1")
    if manifest.workers < 1:
        raise ManifestError("workers must be >= 1")
    return rs


def discontinuity_rs(table: MoleculeTable) -> set[float]:
    """Rows whose coefficients break the trend of the preceding row.

    A row is flagged when any non-identity coefficient moves by more than
    0.05 Hartree against the previous row.  A plain ground-energy-jump
    test cannot isolate the anomalous rows: the physical curve itself is
    steeper than that at short bond distances, and a qubit-relabeling
    anomaly leaves the energy continuous while scrambling the
    coefficients.  The identity label is excluded because it only offsets
    the spectrum.
    """
    coeff_cols = [j for j, lab in enumerate(table.pauli_labels)
                  if set(lab) != {"I"}]
    flagged: set[float] = set()
    prev: tuple[float, ...] | None = None
    for r, coeffs in table.rows:
        if prev is not None and coeff_cols:
            step = max(abs(coeffs[j] - prev[j]) for j in coeff_cols)
            if step > DISCONTINUITY_JUMP:
                flagged.add(r)
        prev = coeffs
    return flagged


def _point_seed(seed: int, r: float):
    return (seed, int(round(r * 1000)))


def _run_point(manifest: RunManifest, table: MoleculeTable, r: float,
               flagged: set[float]):
    h = hamiltonian_at(table, r)
    spectrum = exact_spectrum(h)
    builder = ANSATZ_BUILDERS[manifest.ansatz]
    cmf_record = None
    if manifest.cmf:
        eff = cmf_reduce(h, CmfPartition())
        h_system = eff.h_eff
        energy_map = EnergyMap.from_effective(eff, h)
        cmf_record = (r, eff.provenance)
    else:
        h_system = h
        energy_map = None
    config = QiteConfig(
        initial_theta=manifest.resolved_theta0(),
        iterations=manifest.iterations,
        dtau=manifest.dtau,
        route=manifest.route,
        shots=manifest.shots,
        seed=_point_seed(manifest.seed, r),
        record_intermediate=manifest.trace,
    )
    traj = run_qite(h_system, builder, config, energy_map)
    flags = []
    if traj.stationary:
        flags.append("stationary")
    if traj.ground_degenerate:
        flags.append("degenerate")
    if r in flagged:
        flags.append("discontinuity")
    if traj.converged_energy < spectrum.ground_energy - 1e-9:
        flags.append("bound-violation")
    point = CurvePoint(r, traj.converged_energy, spectrum.ground_energy,
                       traj.final_fidelity, manifest.iterations, tuple(flags))
    return point, traj, cmf_record


def run_scan(manifest: RunManifest):
    """Execute the manifest; returns (points, trajectories, cmf records).

    Results are merged in bond-distance order whatever the worker count,
    and every point's random stream is seeded from (seed, R), so parallel
    and serial runs emit identical data.
    """
    table = load_manifest_table(manifest)
    rs = validate_manifest(manifest, table)
    flagged = discontinuity_rs(table)

    def work(r):
        try:
            return _run_point(manifest, table, r, flagged)
        except Exception as exc:  # per-point failure: recorded, not fatal
            point = CurvePoint(r, float("nan"), float("nan"), None,
                               manifest.iterations, ("error:" + str(exc),))
            return point, None, None

    if manifest.workers > 1:
        with ThreadPoolExecutor(max_workers=manifest.workers) as pool:
            results = list(pool.map(work, rs))
    else:
        results = [work(r) for r in rs]
    results.sort(key=lambda item: item[0].r)
    points = [p for p, _, _ in results]
    trajectories = {p.r: t for p, t, _ in results if t is not None}
    cmf_records = [c for _, _, c in results if c is not None]
    return points, trajectories, cmf_records


def format_number(v) -> str:
    if v is None:
        return ""
    return ENERGY_FMT % v


def emit_outputs(points, trajectories, out_dir, manifest: RunManifest,
                 cmf_records=()) -> list[Path]:
    """Write curve.csv, optional traces, manifest.echo and CMF records."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    curve = out / "curve.csv"
    lines = ["R,e_qite,e_exact,fidelity,iterations,flags"]
    for p in points:
        lines.append(",".join([
            "%g" % p.r,
            format_number(p.e_qite),
            format_number(p.e_exact),
            format_number(p.final_fidelity),
            str(p.iterations_used),
            ";".join(p.flags),
        ]))
    curve.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(curve)

    if manifest.trace:
        for r, traj in sorted(trajectories.items()):
            gamma = traj.records[0].theta.size
            header = ["iter"] + [f"theta_{k + 1}" for k in range(gamma)]
            header += ["energy", "fidelity"]
            rows = [",".join(header)]
            for rec in traj.records:
                cells = [str(rec.iteration)]
                cells += [format_number(t) for t in rec.theta]
                cells += [format_number(rec.energy), format_number(rec.fidelity)]
                rows.append(",".join(cells))
            tf = out / ("trace_R%g.csv" % r)
            tf.write_text("\n".join(rows) + "\n", encoding="utf-8")
            written.append(tf)

    if cmf_records:
        lines = []
        for r, notes in cmf_records:
            lines.append(f"[R={r:g}]")
            lines.extend(notes)
            lines.append("")
        sel = out / "cmf_selection.txt"
        sel.write_text("\n".join(lines), encoding="utf-8")
        written.append(sel)

    echo = out / "manifest.echo"
    echo.write_text("\n".join(manifest.echo_lines([p.r for p in points])) + "\n",
                    encoding="utf-8")
    written.append(echo)
    return written


def _parse_r_selection(text: str):
    if text == "all":
        return "all"
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ManifestError(f"bad --r value '{text}'") from None


def _parse_route(text: str) -> tuple[str, int | None]:
    if text == "exact":
        return "exact", None
    if text.startswith("shots:"):
        try:
            shots = int(text.split(":", 1)[1])
        except ValueError:
            raise ManifestError(f"bad --route value '{text}'") from None
        if shots < 1:
            raise ManifestError("shot count must be >= 1")
        return "hadamard", shots
    raise ManifestError(f"bad --route value '{text}' (use exact or shots:N)")


def _parse_theta0(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ManifestError(f"bad --theta0 value '{text}'") from None


def _manifest_from_args(args) -> RunManifest:
    route, shots = _parse_route(args.route)
    dtau = args.dtau
    if dtau != "auto":
        try:
            dtau = float(dtau)
        except ValueError:
            raise ManifestError(f"bad --dtau value '{args.dtau}'") from None
        if dtau <= 0:
            raise ManifestError("--dtau must be positive")
    return RunManifest(
        table=args.table,
        ansatz=args.ansatz,
        cmf=args.cmf,
        r_selection=_parse_r_selection(args.r),
        iterations=args.iters,
        dtau=dtau,
        route=route,
        shots=shots,
        seed=args.seed,
        theta0=_parse_theta0(args.theta0),
        out_dir=args.out,
        trace=args.trace,
        workers=args.workers,
    )


def _add_run_flags(p, default_r):
    p.add_argument("--table", default="lih",
                   help="table path, or bundled name: lih, h2-synthetic")
    p.add_argument("--ansatz", default="he", choices=sorted(ANSATZ_BUILDERS))
    p.add_argument("--cmf", action="store_true",
                   help="reduce 3-qubit rows to 2 qubits before the run")
    p.add_argument("--r", default=default_r, help="comma list of R values, or 'all'")
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--dtau", default="auto", help="'auto' or a positive value")
    p.add_argument("--route", default="exact", help="exact or shots:N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta0", default=None, help="comma list of initial angles")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--trace", action="store_true",
                   help="write per-iteration trace files")
    p.add_argument("--workers", type=int, default=1)


def _cmd_scan(args) -> int:
    manifest = _manifest_from_args(args)
    points, trajectories, cmf_records = run_scan(manifest)
    if manifest.out_dir:
        emit_outputs(points, trajectories, manifest.out_dir, manifest, cmf_records)
    for p in points:
        print(f"R={p.r:g} e_qite={format_number(p.e_qite)} "
              f"e_exact={format_number(p.e_exact)} "
              f"fidelity={format_number(p.final_fidelity)} "
              f"flags={';'.join(p.flags) or '-'}")
    return 1 if any(f.startswith("error") for p in points for f in p.flags) else 0


def _cmd_point(args) -> int:
    selection = _parse_r_selection(args.r)
    if selection == "all" or len(selection) != 1:
        raise ManifestError("point takes exactly one bond distance via --r")
    return _cmd_scan(args)


def _cmd_spectrum(args) -> int:
    table = load_manifest_table(RunManifest(table=args.table))
    h = hamiltonian_at(table, args.r)
    spec = exact_spectrum(h)
    bound = gershgorin_emax(to_dense_matrix(h))
    print("eigenvalues:", " ".join(format_number(v) for v in spec.eigenvalues))
    print("degenerate levels:",
          ",".join(str(i) for i, f in enumerate(spec.degeneracy_flags) if f) or "none")
    print("gershgorin e_max:", format_number(bound.e_max))
    return 0


def _cmd_excited(args) -> int:
    table = load_manifest_table(RunManifest(table=args.table))
    h = hamiltonian_at(table, args.r)
    if table.n_qubits == 3:
        eff = cmf_reduce(h, CmfPartition())
        h_base = eff.h_eff
    elif table.n_qubits == 2:
        h_base = h
    else:
        print("excited mode needs a 2- or 3-qubit table", file=sys.stderr)
        return 2
    spec = exact_spectrum(h_base)
    ground = DensityMatrix(np.outer(spec.ground_state, spec.ground_state.conj()))
    bound = gershgorin_emax(to_dense_matrix(h_base))
    lifted = lift_ground_state(h_base, ground, bound.e_max)
    # The auto rule ties dtau to the iteration count, keeping the total
    # imaginary time fixed; the lifted spectrum is denser than the original
    # one, so the step size stays at the published 4-iteration rule while
    # --iters extends the total evolution time.
    if args.dtau == "auto":
        dtau = resolve_dtau(QiteConfig((0.0,), iterations=4), h)
    else:
        dtau = float(args.dtau)
    config = QiteConfig(
        initial_theta=DEFAULT_THETA0["he"],
        iterations=args.iters,
        dtau=dtau,
        seed=args.seed,
    )
    traj = run_qite(lifted, build_hardware_efficient, config)
    target = spec.eigenvalues[1]
    print(f"gershgorin e_max = {format_number(bound.e_max)}")
    print(f"first excited (oracle) = {format_number(target)}")
    print(f"qite on lifted hamiltonian = {format_number(traj.converged_energy)}")
    print(f"deviation = {format_number(abs(traj.converged_energy - target))}")
    return 0


def _cmd_validate(args) -> int:
    try:
        table = load_manifest_table(RunManifest(table=args.table))
    except (ManifestError, ValueError) as exc:
        print(f"invalid table: {exc}", file=sys.stderr)
        return 2
    print(f"molecule: {table.molecule_name or '(unnamed)'}")
    print(f"qubits: {table.n_qubits}")
    print(f"labels: {','.join(table.pauli_labels)}")
    print(f"rows: {len(table.rows)} "
          f"(R from {table.bond_distances[0]:g} to {table.bond_distances[-1]:g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqite",
        description="Variational imaginary-time ground-state scans "
                    "over molecular Pauli tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="potential-energy curve")
    _add_run_flags(p_scan, default_r="all")
    p_scan.set_defaults(func=_cmd_scan)

    p_point = sub.add_parser("point", help="single bond distance")
    _add_run_flags(p_point, default_r="1.5")
    p_point.set_defaults(func=_cmd_point)

    p_spec = sub.add_parser("spectrum", help="exact spectrum of one row")
    p_spec.add_argument("--table", default="lih")
    p_spec.add_argument("--r", type=float, required=True)
    p_spec.set_defaults(func=_cmd_spectrum)

    p_exc = sub.add_parser("excited", help="lift the ground level, then solve")
    p_exc.add_argument("--table", default="lih")
    p_exc.add_argument("--r", type=float, required=True)
    p_exc.add_argument("--iters", type=int, default=20)
    p_exc.add_argument("--dtau", default="auto",
                       help="'auto' (the 4-iteration rule) or a positive value")
    p_exc.add_argument("--seed", type=int, default=0)
    p_exc.set_defaults(func=_cmd_excited)

    p_val = sub.add_parser("validate", help="table lint")
    p_val.add_argument("--table", required=True)
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
