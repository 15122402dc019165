import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hpr import ader
from hpr import grid as gr
from hpr import hpr_system as hs
from hpr import material as mat
from hpr.errors import ConfigError
from hpr.hpr_system import A0, J0, NVARS
from hpr.material import MaterialParams


def params_with(mu=1e-3, kappa=0.0, cs=1.0, alpha=0.0, **kw):
    base = dict(gamma=1.4, cv=2.5, rho0=1.0, cs=cs, alpha=alpha, T0=1.0)
    base.update(kw)
    p = MaterialParams(**base)
    return p.with_transport(mu, kappa)


def uniform_ic(params, v=(0.3, -0.2, 0.0), rho=1.0, p=1.0 / 1.4):
    def ic(x, y):
        V = np.zeros((NVARS,) + np.shape(x))
        V[0] = rho
        V[1], V[2], V[3] = v
        V[4] = p
        cb = np.cbrt(rho / params.rho0)
        for idx, val in enumerate((np.eye(3) * cb).reshape(9)):
            V[A0 + idx] = val
        return hs.prim_to_cons(V, params)
    return ic


class TestSchemeConfig:
    def test_dg_fv_only(self):
        with pytest.raises(ConfigError):
            ader.SchemeConfig(N=1, M=3)

    def test_cfl_range(self):
        with pytest.raises(ConfigError):
            ader.SchemeConfig(N=0, M=2, cfl=1.5)

    def test_timestep_formula(self):
        # rest gas c0=10, cs=8, alpha=0, h=0.01, d=2, N=0, cfl=0.9
        p = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=8.0, alpha=0.0,
                           tau1=1e-3)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=0, M=2, cfl=0.9)
        g = gr.CartesianGrid(100, 4, 0.0, 1.0, 0.0, 0.04, ghost=2)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
        u = st.initialize(uniform_ic(p, v=(0, 0, 0), p=100.0 / 1.4))
        smax = math.sqrt(100.0 + 4.0 * 64.0 / 3.0)
        assert st.timestep(u) == pytest.approx(0.9 * 0.01 / (2.0 * smax),
                                               rel=1e-12)
        assert st.timestep(u) == pytest.approx(3.305e-4, abs=2e-7)

    def test_dt_scaling(self):
        p = params_with()
        sys = hs.HPRSystem(p)
        dts = []
        for nx in (10, 20):
            cfg = ader.SchemeConfig(N=0, M=2)
            g = gr.CartesianGrid(nx, nx, 0.0, 1.0, 0.0, 1.0, ghost=2)
            st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
            u = st.initialize(uniform_ic(p))
            dts.append(st.timestep(u))
        assert dts[0] / dts[1] == pytest.approx(2.0, rel=1e-12)

    def test_dg_fv_dt_ratio(self):
        p = params_with()
        sys = hs.HPRSystem(p)
        g3 = gr.CartesianGrid(10, 10, 0.0, 1.0, 0.0, 1.0, ghost=1)
        g0 = gr.CartesianGrid(10, 10, 0.0, 1.0, 0.0, 1.0, ghost=3)
        st3 = ader.Stepper(sys, g3, gr.BoundarySet(),
                           ader.SchemeConfig(N=3, M=3))
        st0 = ader.Stepper(sys, g0, gr.BoundarySet(),
                           ader.SchemeConfig(N=0, M=3))
        u3 = st3.initialize(uniform_ic(p))
        u0 = st0.initialize(uniform_ic(p))
        assert st3.timestep(u3) / st0.timestep(u0) == pytest.approx(1 / 7,
                                                                    rel=1e-12)


class TestPredictor:
    def test_uniform_state_converges_immediately(self):
        p = params_with(mu=1e-2)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=2, M=2)
        g = gr.CartesianGrid(4, 4, 0.0, 1.0, 0.0, 1.0, ghost=1)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
        u = st.initialize(uniform_ic(p))
        qh = ader.predict(sys, u, st.timestep(u), g.dx, g.dy, cfg)
        assert np.allclose(qh, u[:, :, :, None], rtol=1e-12, atol=1e-12)

    def test_linear_advection_profile(self):
        # Euler limit, uniform rho/p/v: any passive profile translates
        p = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=0.0, alpha=0.0)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=3, M=3, cfl=0.5)
        g = gr.CartesianGrid(24, 4, 0.0, 1.0, 0.0, 1.0, ghost=1)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)

        def ic(x, y):
            V = np.zeros((NVARS,) + np.shape(x))
            V[0] = 1.0 + 0.1 * np.sin(2 * np.pi * x)
            V[1] = 0.2
            V[4] = 5.0 / 1.4  # c0 big enough that advection is subdominant
            cb = np.cbrt(V[0])
            for idx, val in enumerate(np.eye(3).reshape(9)):
                V[A0 + idx] = val * cb
            return hs.prim_to_cons(V, p)

        u = st.initialize(ic)
        dt = st.timestep(u)
        qh = ader.predict(sys, u, dt, g.dx, g.dy, cfg)
        # the predictor solution at the cell center of mass should follow
        # the PDE locally: compare d rho/dt against -(d rho u/dx)
        ops = ader.predictor_ops(3)
        drho_dt = np.einsum("ab,vxybie->vxyaie", ops["D"],
                            qh)[0] / dt
        dmdx = np.einsum("im,vxyame->vxyaie", ops["D"], qh)[1] / g.dx
        assert np.allclose(drho_dt, -dmdx, rtol=2e-2, atol=2e-4)

    def test_stiff_relaxation_trace_matches_ode_oracle(self):
        # pure relaxation cell: dA/dt = -3/tau1 |A|^{5/3} A devG, J frozen
        tau1 = 0.5
        p = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=1.0, alpha=0.0,
                           tau1=tau1)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=4, M=4, picard_max=60, picard_tol=1e-11)
        g = gr.CartesianGrid(2, 2, 0.0, 1.0, 0.0, 1.0, ghost=1)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
        A_init = np.diag([2.0, 1.0, 1.0])

        def ic(x, y):
            V = np.zeros((NVARS,) + np.shape(x))
            V[0] = 1.0
            V[4] = 1.0 / 1.4
            for idx, val in enumerate(A_init.reshape(9)):
                V[A0 + idx] = val
            return hs.prim_to_cons(V, p)

        u = st.initialize(ic)
        # the nonlinear decay rate at A = diag(2,1,1) is ~20/tau1, so the
        # trace-resolving step must be well below tau1 itself
        dt = 0.005 * tau1
        qh = ader.predict(sys, u, dt, g.dx, g.dy, cfg)

        def rhs(t, a):
            return mat.strain_source(a.reshape(3, 3), tau1).ravel()

        sol = solve_ivp(rhs, (0.0, dt), A_init.ravel(), rtol=1e-12,
                        atol=1e-14, dense_output=True, method="DOP853")
        taus, _ = np.polynomial.legendre.leggauss(5)
        taus = 0.5 * (taus + 1.0)
        for a, tau_node in enumerate(taus):
            got = qh[A0:A0 + 9, 0, 0, a, 0, 0]
            ref = sol.sol(tau_node * dt)
            assert np.abs(got - ref).max() < 1e-6

    def test_strongly_stiff_end_state_near_equilibrium(self):
        # dt >> tau with a perturbed distortion: the implicit predictor must
        # land the end-of-step state on the relaxation manifold
        tau1 = 1e-4
        p = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=1.0, alpha=0.0,
                           tau1=tau1)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=2, M=2, picard_max=40)
        g = gr.CartesianGrid(2, 2, 0.0, 1.0, 0.0, 1.0, ghost=1)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
        Ai = np.diag([1.02, 1.0, 1.0 / 1.02])

        def ic(x, y):
            V = np.zeros((NVARS,) + np.shape(x))
            V[0] = 1.0
            V[4] = 1.0 / 1.4
            for idx, val in enumerate(Ai.reshape(9)):
                V[A0 + idx] = val
            return hs.prim_to_cons(V, p)

        u = st.initialize(ic)
        dt = 10 * tau1
        qh = ader.predict(sys, u, dt, g.dx, g.dy, cfg)
        A_end = qh[A0:A0 + 9, 0, 0, -1, 0, 0].reshape(3, 3)
        devG0 = mat.deviator(mat.metric_tensor(Ai))
        devG = mat.deviator(mat.metric_tensor(A_end))
        assert np.abs(devG).max() < 2e-2 * np.abs(devG0).max()

    def test_failure_carries_cell_and_residual(self):
        p = params_with(mu=1e-2)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=2, M=2, picard_max=1, picard_tol=1e-14)
        g = gr.CartesianGrid(4, 4, 0.0, 1.0, 0.0, 1.0, ghost=1)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)

        def ic(x, y):
            V = np.zeros((NVARS,) + np.shape(x))
            V[0] = 1.0 + 0.3 * np.sin(2 * np.pi * x)
            V[4] = 1.0 / 1.4
            cb = np.cbrt(V[0])
            for idx, val in enumerate(np.eye(3).reshape(9)):
                V[A0 + idx] = val * cb
            return hs.prim_to_cons(V, p)

        u = st.initialize(ic)
        with pytest.raises(ader.PredictorFailureError) as exc:
            ader.predict(sys, u, st.timestep(u), g.dx, g.dy, cfg)
        assert exc.value.cell is not None
        assert exc.value.residual is not None


class TestCorrector:
    def test_uniform_state_fixed(self):
        p = params_with(mu=1e-2, kappa=1e-3, alpha=1.0)
        sys = hs.HPRSystem(p)
        for N, M in [(0, 2), (2, 2)]:
            cfg = ader.SchemeConfig(N=N, M=M)
            g = gr.CartesianGrid(6, 5, 0.0, 1.0, 0.0, 1.0, ghost=cfg.ghost)
            st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)
            u = st.initialize(uniform_ic(p))
            u0 = u.copy()
            t = 0.0
            for _ in range(20):
                dt = st.timestep(u)
                u = st.step(u, t, dt)
                t += dt
            assert np.abs(st.interior(u) - st.interior(u0)).max() < 1e-12

    def test_equal_states_give_zero_jump(self):
        p = params_with()
        sys = hs.HPRSystem(p)
        q = hs.prim_to_cons(np.r_[1.0, 0.2, 0.1, 0.0, 0.7,
                                  np.eye(3).reshape(9), 0.0, 0.0, 0.0], p)
        F = sys.flux(q, 0)
        central, diss = ader._face_terms(sys, q, q, F, F, 0, 3)
        assert np.allclose(central, 0.0) and np.allclose(diss, 0.0)

    def test_conservation_telescopes(self):
        p = params_with(mu=2e-4, kappa=1e-4, alpha=1.0, cs=0.8)
        sys = hs.HPRSystem(p)
        cfg = ader.SchemeConfig(N=0, M=3, cfl=0.45)
        g = gr.CartesianGrid(16, 16, 0.0, 1.0, 0.0, 1.0, ghost=3)
        st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)

        def ic(x, y):
            V = np.zeros((NVARS,) + np.shape(x))
            V[0] = 1.0 + 0.15 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
            V[1] = 0.1 * np.sin(2 * np.pi * y)
            V[2] = 0.05 * np.cos(2 * np.pi * x)
            V[4] = 1.0 / 1.4
            cb = np.cbrt(V[0])
            for idx, val in enumerate(np.eye(3).reshape(9)):
                V[A0 + idx] = val * cb
            return hs.prim_to_cons(V, p)

        u = st.initialize(ic)
        tot0 = ader.conserved_totals(st, u)
        t = 0.0
        for _ in range(25):
            dt = st.timestep(u)
            u = st.step(u, t, dt)
            t += dt
        tot = ader.conserved_totals(st, u)
        scale = np.abs(tot0[[0, 4]]).max()
        for row in (0, 1, 2, 3, 4):
            assert abs(tot[row] - tot0[row]) < 1e-13 * scale

    def test_elastic_plane_wave_order(self):
        ep = hs.ElasticParams(lam=2.0, mu=1.0, rho=1.0)
        sys = hs.ElasticSystem(ep)
        cp = ep.cp
        R = np.array([-(ep.lam + 2 * ep.mu), -ep.lam, 0.0, cp, 0.0])
        errs = []
        for nx in (8, 16, 32):
            cfg = ader.SchemeConfig(N=2, M=2, cfl=0.5)
            g = gr.CartesianGrid(nx, 3, 0.0, 1.0, 0.0, 1.0, ghost=1)
            st = ader.Stepper(sys, g, gr.BoundarySet(), cfg)

            def ic(x, y, t0=0.0):
                prof = 0.01 * np.sin(2 * np.pi * (x - cp * t0))
                return R[(slice(None),) + (None,) * prof.ndim] * prof

            u = st.initialize(ic)
            t = 0.0
            t_end = 0.25 / cp
            while t < t_end - 1e-14:
                dt = min(st.timestep(u), t_end - t)
                u = st.step(u, t, dt)
                t += dt
            ue = st.initialize(lambda x, y: ic(x, y, t_end))
            errs.append(np.abs(st.cell_averages(u)
                               - st.cell_averages(ue)).max())
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert orders.min() > 2.4


class TestRunLoop:
    def test_zero_duration(self):
        p = params_with()
        case = _UniformCase(p, t_end=0.0)
        out = ader.run(case, ader.SchemeConfig(N=0, M=2))
        assert out.steps == 0
        assert len(out.fields) >= 1

    def test_hits_output_times_exactly(self):
        p = params_with()
        case = _UniformCase(p, t_end=0.02, output_times=[0.011, 0.02])
        out = ader.run(case, ader.SchemeConfig(N=0, M=2))
        assert out.times[0] == pytest.approx(0.011, abs=1e-13)
        assert out.times[-1] == pytest.approx(0.02, abs=1e-13)

    def test_point_source_deposits_momentum(self):
        p = params_with(mu=1e-3)
        case = _UniformCase(p, t_end=5e-4, v=(0.0, 0.0, 0.0))
        g_amp = 2.0
        case.point_sources = (ader.PointSource(
            x=0.55, y=0.55, row=2,
            time_integral=lambda t0, t1: g_amp * (t1 - t0)),)
        out = ader.run(case, ader.SchemeConfig(N=0, M=2))
        st = out.stepper
        avg = out.fields[-1]
        tot_my = avg[2].sum() * st.grid.dx * st.grid.dy
        assert tot_my == pytest.approx(g_amp * 5e-4, rel=1e-10)


class _UniformCase:
    def __init__(self, params, t_end, v=(0.3, -0.2, 0.0), output_times=None):
        self.params = params
        self.t_end = t_end
        self.output_times = output_times
        self.point_sources = ()
        self._v = v

    def grid(self, cfg):
        return gr.CartesianGrid(8, 8, 0.0, 1.0, 0.0, 1.0, ghost=cfg.ghost)

    def bcs(self):
        return gr.BoundarySet()

    def system(self):
        return hs.HPRSystem(self.params)

    def ic(self, x, y):
        return uniform_ic(self.params, v=self._v)(x, y)
