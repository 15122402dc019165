import math
import os
import subprocess
import sys

import numpy as np
import pytest

from hpr import ader
from hpr import benchmarks as bm
from hpr import cli
from hpr import grid as gr
from hpr import hpr_system as hs
from hpr.errors import ConfigError


MINIMAL = """
[case]
name = stokes
nx = 20
ny = 4
t_end = 0.01
"""


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = cli.parse_config(MINIMAL)
        assert cfg.case.name == "stokes"
        assert cfg.case.nx == 20
        assert cfg.case.t_end == 0.01
        assert cfg.formats == ("csv",)

    def test_material_override_recomputes_tau(self):
        cfg = cli.parse_config(MINIMAL + "\n[material]\nmu = 1e-3\n")
        assert cfg.case.params.tau1 == pytest.approx(6e-3, rel=1e-12)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="vicosity"):
            cli.parse_config(MINIMAL + "\n[material]\nvicosity = 1e-3\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="solver"):
            cli.parse_config(MINIMAL + "\n[solver]\nx = 1\n")

    def test_scheme_override(self):
        cfg = cli.parse_config(MINIMAL + "\n[scheme]\nkind = fv\nm = 2\n"
                               "cfl = 0.5\n")
        assert cfg.scheme.N == 0 and cfg.scheme.M == 2
        assert cfg.scheme.cfl == 0.5

    def test_parse_error_has_location(self):
        with pytest.raises(ConfigError, match="parse error"):
            cli.parse_config("[case\nname = x\n")

    def test_unknown_case_listed(self):
        with pytest.raises(Exception, match="unknown case"):
            cli.parse_config("[case]\nname = nope\n")


class TestWriters:
    def uniform_fields(self, grid, value=1.25):
        ones = np.full((grid.nx, grid.ny), value)
        return {"rho": ones, "u": 2 * ones}

    def test_csv_field_uniform_rows(self, tmp_path):
        g = gr.CartesianGrid(2, 2, 0.0, 1.0, 0.0, 1.0, ghost=0)
        path = tmp_path / "f.csv"
        cli.write_csv_field(self.uniform_fields(g), g, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y,rho,u"
        assert len(lines) == 5
        vals = {tuple(line.split(",")[2:]) for line in lines[1:]}
        assert len(vals) == 1  # identical rows for every component

    def test_cut_at_boundary_noted(self, tmp_path):
        g = gr.CartesianGrid(4, 4, 0.0, 1.0, 0.0, 1.0, ghost=0)
        path = tmp_path / "cut.csv"
        cli.write_csv_cut(self.uniform_fields(g), g, "x", 1.7, str(path))
        header = path.read_text().splitlines()[0]
        assert "nearest line used" in header

    def test_vtk_structure(self, tmp_path):
        g = gr.CartesianGrid(3, 2, 0.0, 1.0, 0.0, 1.0, ghost=0)
        path = tmp_path / "f.vtk"
        cli.write_vtk(self.uniform_fields(g), g, str(path))
        text = path.read_text()
        assert "DATASET STRUCTURED_POINTS" in text
        assert "DIMENSIONS 3 2 1" in text
        assert "SCALARS rho double 1" in text
        assert text.count("LOOKUP_TABLE default") == 2

    def test_derived_fields_present(self):
        case = bm.vortex_case(nx=8, scheme=ader.SchemeConfig(N=2, M=2))
        st = ader.Stepper(case.system(), case.grid(case.scheme), case.bcs(),
                          case.scheme)
        u = st.initialize(case.ic)
        fields = cli.derived_fields(st.cell_averages(u), case.params, st.grid)
        for name in ("rho", "u", "p", "A11", "J1", "sigma11", "sigma12",
                     "q1", "vorticity", "entropy", "det_residual"):
            assert name in fields


class TestOrderTable:
    def test_reproduces_published_arithmetic(self):
        errs = [1.7126e-2, 6.0405e-4, 8.3413e-5, 2.1079e-5]
        orders = bm.convergence_orders([10, 20, 30, 40], errs)
        assert np.round(orders, 2).tolist() == [4.83, 4.88, 4.78]


@pytest.mark.slow
class TestEndToEnd:
    def test_run_command_and_determinism(self, tmp_path):
        cfgfile = tmp_path / "run.ini"
        cfgfile.write_text(MINIMAL + "\n[scheme]\nkind = fv\nm = 2\n"
                           "\n[output]\nformats = csv,vtk\n")
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        for out in (out1, out2):
            rc = cli.main(["run", "--config", str(cfgfile), "--out",
                           str(out)])
            assert rc == 0
        for name in sorted(os.listdir(out1)):
            b1 = (out1 / name).read_bytes()
            b2 = (out2 / name).read_bytes()
            assert b1 == b2, f"{name} not bit-identical"

    def test_disperse_command(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfgfile = tmp_path / "d.ini"
        cfgfile.write_text("[case]\nname = heat\n")
        rc = cli.main(["disperse", "--config", str(cfgfile),
                       "--omega-min", "1e0", "--omega-max", "1e6",
                       "--points", "11"])
        assert rc == 0
        assert os.path.exists("out/dispersion.csv")
        data = open("out/dispersion.csv").read().splitlines()
        assert data[0].split(",")[0] == "omega"
        assert len(data) == 12

    def test_exit_code_config_error(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[case]\nname = stokes\n[material]\nvicosity = 1\n")
        rc = cli.main(["run", "--config", str(bad)])
        assert rc == 2

    def test_list_cases(self, capsys):
        rc = cli.main(["list-cases"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "vortex" in text and "lamb" in text
