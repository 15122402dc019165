"""Configuration parsing, output writers and the command-line driver.

Commands: run, converge, disperse, list-cases.  Exit codes: 0 success,
2 config error, 3 solver failure.  HPR_THREADS caps worker threads (numba
and BLAS) when set before startup.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import math
import os
import sys


def _cap_threads():
    n = os.environ.get("HPR_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "NUMBA_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


_cap_threads()

import numpy as np  # noqa: E402  (thread caps must precede numpy)

from . import ader  # noqa: E402
from . import analysis  # noqa: E402
from . import benchmarks as bm  # noqa: E402
from . import hpr_system as hs  # noqa: E402
from . import material as mat  # noqa: E402
from .errors import ConfigError, HPRError, SolverFailureError  # noqa: E402

SECTIONS = ("case", "scheme", "material", "output")
CASE_KEYS = {"name", "nx", "ny", "t_end", "output_times"}
SCHEME_KEYS = {"kind", "n", "m", "cfl", "picard_tol", "picard_max"}
MATERIAL_KEYS = {"gamma", "cv", "rho0", "cs", "alpha", "t0", "mu", "kappa",
                 "tau1", "tau2", "p0", "c0", "eos"}
OUTPUT_KEYS = {"dir", "formats", "diagnostics_every", "cut_axis",
               "cut_coordinate"}


@dataclasses.dataclass
class RunConfig:
    case: bm.CaseSpec
    scheme: ader.SchemeConfig
    out_dir: str = "out"
    formats: tuple = ("csv",)
    diagnostics_every: int = 10
    cut_axis: str = "x"
    cut_coordinate: float = 0.0


def parse_config(text: str) -> RunConfig:
    """Strict INI-style config with [case], [scheme], [material], [output]."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")

    def section(name):
        return dict(cp.items(name)) if cp.has_section(name) else {}

    case_kv = section("case")
    for key in case_kv:
        if key not in CASE_KEYS:
            raise ConfigError(f"unknown key '{key}' in [case]")
    if "name" not in case_kv:
        raise ConfigError("[case] must name a catalog case")
    case = bm.make_case(case_kv["name"])
    if "nx" in case_kv or "ny" in case_kv:
        case = case.with_grid(int(case_kv.get("nx", case.nx)),
                              int(case_kv.get("ny", case.ny)))
    if "t_end" in case_kv:
        case = dataclasses.replace(case, t_end=float(case_kv["t_end"]))
    if "output_times" in case_kv:
        times = [float(v) for v in case_kv["output_times"].split(",")]
        case = dataclasses.replace(case, output_times=times)

    mat_kv = section("material")
    for key in mat_kv:
        if key not in MATERIAL_KEYS:
            raise ConfigError(f"unknown key '{key}' in [material]")
    if mat_kv and not case.elastic:
        params = case.params
        fields = {}
        for key in ("gamma", "cv", "rho0", "cs", "alpha", "tau1", "tau2",
                    "p0", "c0"):
            if key in mat_kv:
                fields[key] = float(mat_kv[key])
        if "t0" in mat_kv:
            fields["T0"] = float(mat_kv["t0"])
        if "eos" in mat_kv:
            kind = mat_kv["eos"].lower()
            if kind not in ("ideal", "stiffened"):
                raise ConfigError(f"unknown eos '{mat_kv['eos']}'")
            fields["eos_kind"] = (mat.EosKind.IDEAL_GAS if kind == "ideal"
                                  else mat.EosKind.STIFFENED_GAS)
        params = dataclasses.replace(params, **fields)
        # transport overrides recompute the relaxation times
        mu, kappa = mat.transport_from_relaxation(params)
        mu = float(mat_kv.get("mu", mu if math.isfinite(mu) else 0.0))
        kappa = float(mat_kv.get("kappa", kappa if math.isfinite(kappa)
                                 else 0.0))
        if "mu" in mat_kv or "kappa" in mat_kv:
            params = params.with_transport(mu, kappa)
        case = dataclasses.replace(case, params=params)

    sch_kv = section("scheme")
    for key in sch_kv:
        if key not in SCHEME_KEYS:
            raise ConfigError(f"unknown key '{key}' in [scheme]")
    scheme = case.scheme
    changes = {}
    if "kind" in sch_kv:
        kind = sch_kv["kind"].lower()
        M = int(sch_kv.get("m", scheme.M))
        if kind == "dg":
            changes.update(N=M, M=M)
        elif kind == "fv":
            changes.update(N=0, M=M)
        else:
            raise ConfigError(f"unknown scheme kind '{sch_kv['kind']}'")
    elif "m" in sch_kv:
        M = int(sch_kv["m"])
        changes.update(M=M, N=M if scheme.is_dg else 0)
    if "n" in sch_kv:
        changes["N"] = int(sch_kv["n"])
    if "cfl" in sch_kv:
        changes["cfl"] = float(sch_kv["cfl"])
    if "picard_tol" in sch_kv:
        changes["picard_tol"] = float(sch_kv["picard_tol"])
    if "picard_max" in sch_kv:
        changes["picard_max"] = int(sch_kv["picard_max"])
    if changes:
        scheme = dataclasses.replace(scheme, **changes)

    out_kv = section("output")
    for key in out_kv:
        if key not in OUTPUT_KEYS:
            raise ConfigError(f"unknown key '{key}' in [output]")
    formats = tuple(f.strip() for f in out_kv.get("formats", "csv").split(","))
    for f in formats:
        if f not in ("csv", "vtk"):
            raise ConfigError(f"unknown output format '{f}'")
    return RunConfig(
        case=case, scheme=scheme, out_dir=out_kv.get("dir", "out"),
        formats=formats,
        diagnostics_every=int(out_kv.get("diagnostics_every", 10)),
        cut_axis=out_kv.get("cut_axis", "x"),
        cut_coordinate=float(out_kv.get("cut_coordinate", 0.0)))


# ---------------------------------------------------------------------------
# Derived fields and writers
# ---------------------------------------------------------------------------

HPR_FIELD_NAMES = ["rho", "u", "v", "w", "p",
                   "A11", "A12", "A13", "A21", "A22", "A23",
                   "A31", "A32", "A33", "J1", "J2", "J3"]
ELASTIC_FIELD_NAMES = ["sxx", "syy", "sxy", "u", "v"]


def derived_fields(avg, params, grid):
    """Primitive + derived per-cell fields for writers (dict of 2-d arrays)."""
    if avg.shape[0] != hs.NVARS:
        return dict(zip(ELASTIC_FIELD_NAMES, avg))
    prim = hs.cons_to_prim(avg, params)
    out = dict(zip(HPR_FIELD_NAMES, prim))
    rho = prim[0]
    A = hs.tensor_view(prim[hs.A0:hs.A0 + 9])
    J = np.moveaxis(prim[hs.J0:hs.J0 + 3], 0, -1)
    th = mat.Thermo.from_state(params, rho, np.moveaxis(prim[1:4], 0, -1),
                               A, J, prim[4])
    for i in range(3):
        for k in range(i, 3):
            out[f"sigma{i + 1}{k + 1}"] = th.sigma[..., i, k]
    for i in range(3):
        out[f"q{i + 1}"] = th.q[..., i]
    dvdx = np.gradient(prim[2], grid.dx, axis=0)
    dudy = np.gradient(prim[1], grid.dy, axis=1)
    out["vorticity"] = dvdx - dudy
    out["det_residual"] = mat.det3(A) - rho / params.rho0
    out["entropy"] = th.s
    out["entropy_production"] = th.entropy_production(rho)
    return out


def write_vtk(fields: dict, grid, path: str, comment="hpr output"):
    """Legacy ASCII structured-points file, one scalar array per field."""
    nx, ny = grid.nx, grid.ny
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(comment + "\n")
        fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} 1\n")
        fh.write(f"ORIGIN {grid.x0 + grid.dx / 2:.16g} "
                 f"{grid.y0 + grid.dy / 2:.16g} 0\n")
        fh.write(f"SPACING {grid.dx:.16g} {grid.dy:.16g} 1\n")
        fh.write(f"POINT_DATA {nx * ny}\n")
        for name, data in fields.items():
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            # y-major ordering per the structured-points convention
            flat = np.asarray(data).T.reshape(-1)
            fh.write("\n".join(f"{v:.16e}" for v in flat))
            fh.write("\n")


def write_csv_cut(fields: dict, grid, axis: str, coordinate: float,
                  path: str):
    """Cells nearest the cut line, coordinate column plus every field."""
    note = ""
    if axis == "x":
        j = int(np.clip((coordinate - grid.y0) / grid.dy, 0, grid.ny - 1))
        actual = grid.yc()[j]
        coords = grid.xc()
        rows = {name: np.asarray(d)[:, j] for name, d in fields.items()}
        coord_name = "x"
    else:
        i = int(np.clip((coordinate - grid.x0) / grid.dx, 0, grid.nx - 1))
        actual = grid.xc()[i]
        coords = grid.yc()
        rows = {name: np.asarray(d)[i, :] for name, d in fields.items()}
        coord_name = "y"
    if abs(actual - coordinate) > 0.51 * (grid.dy if axis == "x" else grid.dx):
        note = f" (requested {coordinate:.6g}, nearest line used)"
    with open(path, "w") as fh:
        fh.write(f"# cut along {axis} at {actual:.16g}{note}\n")
        fh.write(",".join([coord_name] + list(rows)) + "\n")
        for k, c in enumerate(coords):
            vals = [f"{c:.16e}"] + [f"{rows[name][k]:.16e}" for name in rows]
            fh.write(",".join(vals) + "\n")


def write_csv_field(fields: dict, grid, path: str):
    """Full cell-centred table: x, y followed by every field column."""
    X, Y = grid.centers()
    names = list(fields)
    with open(path, "w") as fh:
        fh.write(",".join(["x", "y"] + names) + "\n")
        for i in range(grid.nx):
            for j in range(grid.ny):
                vals = [f"{X[i, j]:.16e}", f"{Y[i, j]:.16e}"]
                vals += [f"{np.asarray(fields[n])[i, j]:.16e}" for n in names]
                fh.write(",".join(vals) + "\n")


def write_outputs(cfg: RunConfig, out: ader.RunOutput):
    os.makedirs(cfg.out_dir, exist_ok=True)
    st = out.stepper
    grid = st.grid
    written = []
    for t, snap in zip(out.times, out.fields):
        avg = st.cell_averages(snap) if cfg.scheme.is_dg else snap
        fields = derived_fields(avg, cfg.case.params, grid)
        tag = f"{cfg.case.name}_t{t:.6f}".replace(".", "p")
        if "csv" in cfg.formats:
            path = os.path.join(cfg.out_dir, tag + "_cut.csv")
            write_csv_cut(fields, grid, cfg.cut_axis, cfg.cut_coordinate,
                          path)
            written.append(path)
            path = os.path.join(cfg.out_dir, tag + ".csv")
            write_csv_field(fields, grid, path)
            written.append(path)
        if "vtk" in cfg.formats:
            path = os.path.join(cfg.out_dir, tag + ".vtk")
            write_vtk(fields, grid, path, comment=f"{cfg.case.name} t={t}")
            written.append(path)
    if cfg.case.exact is not None and "csv" in cfg.formats:
        t = out.times[-1]
        exact_avg = st.cell_averages(st.initialize(
            lambda x, y: cfg.case.exact(x, y, t))) if cfg.scheme.is_dg else \
            st.interior(st.initialize(lambda x, y: cfg.case.exact(x, y, t)))
        fields = derived_fields(exact_avg, cfg.case.params, grid)
        path = os.path.join(cfg.out_dir, f"{cfg.case.name}_exact_cut.csv")
        write_csv_cut(fields, grid, cfg.cut_axis, cfg.cut_coordinate, path)
        written.append(path)
    if out.probes:
        for (px, py), series in out.probes.items():
            path = os.path.join(
                cfg.out_dir,
                f"{cfg.case.name}_probe_{px:g}_{py:g}.csv".replace("-", "m"))
            with open(path, "w") as fh:
                nvar = len(series[0][1])
                names = (HPR_FIELD_NAMES if nvar == hs.NVARS
                         else ELASTIC_FIELD_NAMES)
                fh.write(",".join(["t"] + names) + "\n")
                for t, state in series:
                    fh.write(",".join(
                        [f"{t:.16e}"] + [f"{v:.16e}" for v in state]) + "\n")
            written.append(path)
    diag_path = os.path.join(cfg.out_dir, f"{cfg.case.name}_diagnostics.csv")
    with open(diag_path, "w") as fh:
        fh.write("t,total_mass,total_mx,total_my,total_energy\n")
        for entry in out.diagnostics:
            tot = entry["totals"]
            fh.write(f"{entry['t']:.16e},{tot[0]:.16e},{tot[1]:.16e},"
                     f"{tot[2]:.16e},{tot[4] if len(tot) > 4 else 0.0:.16e}\n")
    written.append(diag_path)
    return written


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = parse_config(open(args.config).read())
    if args.out:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    scheme = dataclasses.replace(cfg.scheme,
                                 diagnostics_every=cfg.diagnostics_every)
    try:
        out = ader.run(cfg.case, scheme)
    except SolverFailureError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None and partial.fields:
            write_outputs(cfg, partial)
            print(f"solver failed; partial outputs flushed to {cfg.out_dir}",
                  file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    files = write_outputs(cfg, out)
    print(f"{cfg.case.name}: {out.steps} steps to t={out.times[-1]:.6g}; "
          f"wrote {len(files)} files to {cfg.out_dir}")
    return 0


def cmd_converge(args) -> int:
    cfg = parse_config(open(args.config).read())
    if cfg.case.exact is None:
        raise ConfigError(f"case '{cfg.case.name}' has no exact solution")
    grids = [int(v) for v in args.grids.split(",")]
    errs = []
    print(f"{'Nx':>5} {'L1':>13} {'L2':>13} {'Linf':>13} "
          f"{'O(L1)':>6} {'O(L2)':>6} {'O(Linf)':>7}")
    prev = None
    for n in grids:
        case = cfg.case.with_grid(n, n)
        out = ader.run(case, cfg.scheme)
        st = out.stepper
        norms = bm.error_norms(st, out.final(), case.exact, out.times[-1])
        errs.append(norms)
        if prev is None:
            orders = ["", "", ""]
        else:
            orders = [f"{math.log(prev[k] / norms[k]) / math.log(n / prev_n):.2f}"
                      for k in range(3)]
        print(f"{n:>5} {norms[0]:>13.4e} {norms[1]:>13.4e} {norms[2]:>13.4e} "
              f"{orders[0]:>6} {orders[1]:>6} {orders[2]:>7}")
        prev, prev_n = norms, n
    return 0


def cmd_disperse(args) -> int:
    cfg = parse_config(open(args.config).read())
    params = cfg.case.params
    if not (math.isfinite(params.tau1) and params.tau1 > 0):
        raise ConfigError("dispersion sweep needs a finite tau1")
    grid = np.logspace(math.log10(args.omega_min), math.log10(args.omega_max),
                       args.points)
    # rest state of the case: density rho0 and a pressure giving its c0
    rho = params.rho0
    p = getattr(cfg.case, "rest_pressure", 1.0 / params.gamma)
    cols = analysis.sweep(grid, params, rho, p)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "dispersion.csv")
    with open(path, "w") as fh:
        fh.write(",".join(analysis.SWEEP_COLUMNS) + "\n")
        for i in range(grid.size):
            fh.write(",".join(f"{cols[c][i]:.16e}"
                              for c in analysis.SWEEP_COLUMNS) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_list_cases(args) -> int:
    for name in sorted(bm.CASE_FACTORIES):
        case = bm.make_case(name)
        scheme = case.scheme
        kind = "DG" if scheme.is_dg else "FV"
        print(f"{name:18s} {case.nx:>4d}x{case.ny:<4d} {kind} M={scheme.M} "
              f"t_end={case.t_end:g}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="hpr",
                                 description="hyperbolic continuum-mechanics "
                                             "solver (ADER-WENO / ADER-DG)")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a configured case")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_run)
    p = sub.add_parser("converge", help="grid-refinement error table")
    p.add_argument("--config", required=True)
    p.add_argument("--grids", required=True, help="comma list, e.g. 20,40,80")
    p.set_defaults(fn=cmd_converge)
    p = sub.add_parser("disperse", help="phase-velocity/attenuation sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--omega-min", type=float, default=1e2)
    p.add_argument("--omega-max", type=float, default=1e12)
    p.add_argument("--points", type=int, default=121)
    p.set_defaults(fn=cmd_disperse)
    p = sub.add_parser("list-cases", help="show the case catalog")
    p.set_defaults(fn=cmd_list_cases)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverFailureError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except HPRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
