import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpr import hpr_system as hs
from hpr import material as mat
from hpr.errors import UnphysicalStateError
from hpr.hpr_system import A0, EN, J0, NVARS, RHO
from hpr.material import EosKind, MaterialParams


def params_ideal(**kw):
    base = dict(gamma=1.4, cv=2.5, rho0=1.0, cs=0.5, alpha=1.0, T0=1.0,
                tau1=1e-2, tau2=1e-2)
    base.update(kw)
    return MaterialParams(**base)


def make_prim(rho=1.0, v=(0.0, 0.0, 0.0), p=1.0 / 1.4, A=None, J=(0.0, 0.0, 0.0)):
    prim = np.zeros(NVARS)
    prim[RHO] = rho
    prim[1:4] = v
    prim[4] = p
    prim[A0:A0 + 9] = (np.eye(3) if A is None else np.asarray(A)).reshape(9)
    prim[J0:J0 + 3] = J
    return prim


def random_prim(rng, params, spread=0.15):
    rho = rng.uniform(0.6, 1.8)
    A = np.cbrt(rho / params.rho0) * (np.eye(3) + spread * rng.standard_normal((3, 3)))
    if np.linalg.det(A) < 0.3:
        A = np.cbrt(rho / params.rho0) * np.eye(3)
    return make_prim(rho=rho, v=rng.uniform(-1, 1, 3), p=rng.uniform(0.5, 2.0),
                     A=A, J=0.2 * rng.standard_normal(3))


class TestStateConversion:
    def test_rest_energy_is_internal(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(), p)
        assert q[EN] == pytest.approx(1.0 / 0.56, rel=1e-12)

    def test_kinetic_increment(self):
        p = params_ideal()
        q0 = hs.prim_to_cons(make_prim(), p)
        q1 = hs.prim_to_cons(make_prim(v=(1.0, 0.0, 0.0)), p)
        assert q1[EN] - q0[EN] == pytest.approx(0.5, rel=1e-13)

    def test_mesoscopic_energy(self):
        p = params_ideal(cs=1.0, alpha=0.0)
        q = hs.prim_to_cons(make_prim(A=np.diag([2.0, 1.0, 1.0])), p)
        E2 = q[EN] - 1.0 / 0.56
        assert E2 == pytest.approx(1.5, rel=1e-13)

    def test_roundtrip_recovers_pressure(self):
        p = params_ideal()
        prim = make_prim()
        back = hs.cons_to_prim(hs.prim_to_cons(prim, p), p)
        assert back[4] == pytest.approx(1.0 / 1.4, rel=1e-13)

    def test_negative_residual_energy_raises(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(v=(1.0, 0.0, 0.0)), p)
        q[EN] = 0.4  # below kinetic energy 0.5
        with pytest.raises(UnphysicalStateError):
            hs.cons_to_prim(q, p)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_random(self, seed):
        rng = np.random.default_rng(seed)
        p = params_ideal()
        prim = random_prim(rng, p)
        back = hs.cons_to_prim(hs.prim_to_cons(prim, p), p)
        assert np.allclose(back, prim, rtol=1e-13, atol=1e-13)


class TestFlux:
    def test_rest_state(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(), p)
        F = hs.flux(q, p, 0)
        assert F[RHO] == 0.0
        assert np.allclose(F[1:4], [1.0 / 1.4, 0.0, 0.0])
        assert F[EN] == pytest.approx(0.0, abs=1e-15)
        T = (1.0 / 1.4) / (0.4 * 1.0 * 2.5)
        assert np.allclose(F[J0:J0 + 3], [T, 0.0, 0.0])

    def test_euler_reduction(self):
        p = params_ideal(cs=0.0, alpha=0.0)
        rng = np.random.default_rng(0)
        prim = make_prim(rho=1.3, v=rng.uniform(-1, 1, 3), p=0.8,
                         A=np.eye(3) + 0.2 * rng.standard_normal((3, 3)))
        q = hs.prim_to_cons(prim, p)
        for k in range(3):
            F = hs.flux(q, p, k)
            rho, v, pr = prim[RHO], prim[1:4], prim[4]
            assert F[RHO] == pytest.approx(rho * v[k], rel=1e-13)
            mom = rho * v * v[k]
            mom[k] += pr
            assert np.allclose(F[1:4], mom, rtol=1e-13)
            assert F[EN] == pytest.approx(v[k] * (q[EN] + pr), rel=1e-13)

    def test_galilean_boost_of_mass_flux(self):
        p = params_ideal()
        rng = np.random.default_rng(1)
        prim = random_prim(rng, p)
        boosted = prim.copy()
        boosted[1] += 0.37
        q, qb = hs.prim_to_cons(prim, p), hs.prim_to_cons(boosted, p)
        dF = hs.flux(qb, p, 0)[RHO] - hs.flux(q, p, 0)[RHO]
        assert dF == pytest.approx(prim[RHO] * 0.37, rel=1e-13)


def ncp_reference(q, gradq, params):
    """Loop transcription of v_j (dA_ik/dx_j - dA_ij/dx_k), the A-row
    bracket, used as an independent oracle for the vectorized version."""
    rho = q[RHO]
    v = q[1:4] / rho
    d = gradq.shape[1]
    out = np.zeros_like(q)
    for i in range(3):
        for k in range(3):
            acc = 0.0
            for j in range(d):
                acc += v[j] * gradq[A0 + 3 * i + k, j]
            if k < d:
                for j in range(3):
                    acc -= v[j] * gradq[A0 + 3 * i + j, k]
            out[A0 + 3 * i + k] = acc
    return out


class TestNonConservativeProduct:
    def test_zero_velocity(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(), p)
        gradq = np.random.default_rng(2).standard_normal((NVARS, 2))
        assert np.allclose(hs.nonconservative_product(q, gradq, p), 0.0)

    def test_compatible_distortion_field(self):
        # dA_ik/dx_j symmetric in (j, k) -> the bracket vanishes
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(v=(0.3, -0.2, 0.1)), p)
        rng = np.random.default_rng(3)
        gradq = np.zeros((NVARS, 3))
        sym = rng.standard_normal((3, 3, 3))
        sym = sym + np.swapaxes(sym, 1, 2)  # symmetric in (k, j)
        for i in range(3):
            for k in range(3):
                for j in range(3):
                    gradq[A0 + 3 * i + k, j] = sym[i, k, j]
        assert np.allclose(hs.nonconservative_product(q, gradq, p), 0.0,
                           atol=1e-14)

    def test_manufactured_single_gradient(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(v=(1.0, 0.0, 0.0)), p)
        gradq = np.zeros((NVARS, 2))
        gradq[A0 + 0, 1] = 1.0  # dA11/dy = 1
        out = hs.nonconservative_product(q, gradq, p)
        assert out[A0 + 0] == 0.0          # A11 row
        assert out[A0 + 1] == pytest.approx(-1.0)  # A12 row: -v1 dA11/dy
        assert np.allclose(out, ncp_reference(q, gradq, p))

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        p = params_ideal()
        q = hs.prim_to_cons(random_prim(rng, p), p)
        gradq = rng.standard_normal((NVARS, 2))
        assert np.allclose(hs.nonconservative_product(q, gradq, p),
                           ncp_reference(q, gradq, p), rtol=1e-13, atol=1e-13)


class TestSource:
    def test_equilibrium_state(self):
        p = params_ideal()
        rho = 1.7
        A = np.cbrt(rho) * np.eye(3)
        q = hs.prim_to_cons(make_prim(rho=rho, A=A), p)
        assert np.allclose(hs.source(q, p), 0.0, atol=1e-14)

    def test_elastic_solid_limit(self):
        p = params_ideal(tau1=math.inf, tau2=math.inf)
        q = hs.prim_to_cons(make_prim(A=np.diag([2.0, 1.0, 1.0]),
                                      J=(0.3, 0.0, 0.0)), p)
        assert np.allclose(hs.source(q, p), 0.0)

    def test_delegates_to_material(self):
        p = params_ideal(tau1=1.0)
        A = np.diag([2.0, 1.0, 1.0])
        q = hs.prim_to_cons(make_prim(A=A), p)
        S = hs.source(q, p)
        assert np.allclose(hs.tensor_view(S[A0:A0 + 9]),
                           mat.strain_source(A, 1.0))
        assert np.allclose(S[:A0], 0.0)

    def test_conserved_rows_are_zero(self):
        p = params_ideal(tau1=1e-3, tau2=1e-3)
        rng = np.random.default_rng(4)
        q = hs.prim_to_cons(random_prim(rng, p), p)
        S = hs.source(q, p)
        assert np.allclose(S[:A0], 0.0)

    def test_source_jacobian_matches_fd(self):
        p = params_ideal(tau1=3e-2, tau2=2e-2)
        rng = np.random.default_rng(5)
        q = hs.prim_to_cons(random_prim(rng, p), p)
        jac = hs.source_jacobian(q, p)
        h = 1e-6
        for col in range(12):
            qp, qm = q.copy(), q.copy()
            qp[A0 + col] += h
            qm[A0 + col] -= h
            fd = (hs.source(qp, p) - hs.source(qm, p))[A0:] / (2 * h)
            assert np.allclose(jac[:, col], fd, rtol=5e-5, atol=5e-5)


class TestEigenvalues:
    def test_rest_state_speeds(self):
        p = params_ideal(cs=8.0, alpha=0.0, cv=1.0)
        # c0 = 10 -> p = c0^2 rho / gamma
        prim = make_prim(p=100.0 / 1.4)
        lams = hs.eigenvalues_viscous(prim, p, 0)
        lmax = math.sqrt(100.0 + 4.0 * 64.0 / 3.0)
        expect = np.sort([-lmax, -8, -8, 0, 0, 8, 8, lmax])
        assert np.allclose(lams, expect, rtol=1e-12)
        assert lmax == pytest.approx(13.615, abs=2e-3)

    def test_euler_collapse(self):
        p = params_ideal(cs=0.0, alpha=0.0)
        prim = make_prim(v=(0.2, 0.0, 0.0), p=1.0 / 1.4)
        lams = hs.eigenvalues_viscous(prim, p, 0)
        assert lams[0] == pytest.approx(0.2 - 1.0, rel=1e-12)
        assert lams[-1] == pytest.approx(0.2 + 1.0, rel=1e-12)
        assert np.allclose(lams[1:-1], 0.2, atol=1e-12)

    def test_matches_dense_eigensolver(self):
        p = params_ideal(cs=0.8, alpha=0.0)
        rng = np.random.default_rng(6)
        for _ in range(100):
            prim = random_prim(rng, p)
            for k in range(3):
                M = hs.quasilinear_matrix_viscous(prim, p, k)
                oracle = np.sort(np.linalg.eigvals(M).real)
                got = hs.eigenvalues_viscous(prim, p, k)
                scale = np.abs(oracle).max()
                assert np.allclose(got, oracle, atol=1e-9 * scale)

    def test_sigma_derivatives_match_central_differences(self):
        p = params_ideal(cs=0.8)
        rng = np.random.default_rng(7)
        rho, pr = 1.2, 0.9
        A = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        dsr, dsp, dsA = hs.sigma_derivatives(rho, pr, A, p)
        h = 1e-6
        fd_r = (mat.shear_stress(rho * (1 + h), A, p.cs)
                - mat.shear_stress(rho * (1 - h), A, p.cs)) / (2 * rho * h)
        assert np.allclose(dsr, fd_r, rtol=1e-6, atol=1e-8)
        assert np.allclose(dsp, 0.0)
        for m in range(3):
            for n in range(3):
                Ap, Am = A.copy(), A.copy()
                Ap[m, n] += h
                Am[m, n] -= h
                fd = (mat.shear_stress(rho, Ap, p.cs)
                      - mat.shear_stress(rho, Am, p.cs)) / (2 * h)
                assert np.allclose(dsA[:, :, m, n], fd, rtol=1e-6, atol=1e-6)

    def test_full_17var_jacobian_spectrum(self):
        # the conserved-variable quasilinear matrix (FD flux Jacobian + B)
        # must share the 8x8 primitive block spectrum plus v_k nine times
        p = params_ideal(cs=0.7, alpha=0.0)
        rng = np.random.default_rng(8)
        prim = random_prim(rng, p)
        q = hs.prim_to_cons(prim, p)
        k = 0
        h = 1e-7
        M = np.zeros((NVARS, NVARS))
        for j in range(NVARS):
            dq = np.zeros(NVARS)
            dq[j] = h * max(abs(q[j]), 1.0)
            M[:, j] = (hs.flux(q + dq, p, k) - hs.flux(q - dq, p, k)) / (2 * dq[j])
            M[:, j] += hs.ncp_dot(q, np.eye(NVARS)[j], p, k)
        cons_eigs = np.sort(np.linalg.eigvals(M).real)
        prim_eigs = hs.eigenvalues_viscous(prim, p, k)
        vk = prim[1 + k]
        expect = np.sort(np.concatenate([prim_eigs, np.full(9, vk)]))
        assert np.allclose(cons_eigs, expect, atol=2e-5)

    def test_rest_full_alpha_zero_degeneration(self):
        p = params_ideal(cs=8.0, alpha=0.0, cv=1.0)
        lams = hs.eigenvalues_rest_full(p, 1.0, 100.0 / 1.4)
        lmax = math.sqrt(100.0 + 4.0 * 64.0 / 3.0)
        assert lams[0] == pytest.approx(-lmax, rel=1e-12)
        assert np.count_nonzero(np.isclose(np.abs(lams), 0.0, atol=1e-12)) == 2

    def test_rest_full_euler(self):
        p = params_ideal(cs=0.0, alpha=0.0)
        lams = hs.eigenvalues_rest_full(p, 1.0, 1.0 / 1.4)
        assert lams[-1] == pytest.approx(1.0, rel=1e-12)
        assert np.count_nonzero(np.abs(lams) > 1e-12) == 2

    def test_rest_full_matches_dense_matrix(self):
        p = params_ideal(cs=8.0, alpha=2.0)
        lams = hs.eigenvalues_rest_full(p, 1.0, 1.0 / 1.4)
        M = hs.rest_full_matrix(p, 1.0, 1.0 / 1.4)
        oracle = np.sort(np.linalg.eigvals(M).real)
        nonzero = oracle[np.abs(oracle) > 1e-12]
        assert len(nonzero) == 8
        assert np.allclose(lams, nonzero, rtol=1e-10, atol=1e-10)


class TestMaxSignalSpeed:
    def test_bounds_rest_spectrum(self):
        p = params_ideal(cs=8.0, alpha=2.0)
        prim = make_prim(p=1.0 / 1.4)
        bound = hs.max_signal_speed(prim, p, np.array([1.0, 0.0]))
        lams = hs.eigenvalues_rest_full(p, 1.0, 1.0 / 1.4)
        assert bound >= np.abs(lams).max() - 1e-12

    def test_euler_bound(self):
        p = params_ideal(cs=0.0, alpha=0.0)
        prim = make_prim(v=(0.3, 0.0, 0.0), p=1.0 / 1.4)
        got = hs.max_signal_speed(prim, p, np.array([1.0, 0.0]))
        assert got == pytest.approx(0.3 + 1.0, rel=1e-12)

    def test_boost_shift(self):
        p = params_ideal()
        prim = make_prim(v=(0.1, 0.0, 0.0))
        prim2 = make_prim(v=(0.6, 0.0, 0.0))
        n = np.array([1.0, 0.0])
        assert (hs.max_signal_speed(prim2, p, n)
                - hs.max_signal_speed(prim, p, n)) == pytest.approx(0.5)


class TestObjectivityAndCompatibility:
    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_reference_frame_rotation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        A = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        assert np.allclose(mat.shear_stress(1.0, Q @ A, 0.9),
                           mat.shear_stress(1.0, A, 0.9), atol=1e-12)

    def test_a_rows_vanish_at_equilibrium_rest(self):
        p = params_ideal(tau1=0.1)
        rng = np.random.default_rng(9)
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        Q = Q * np.sign(np.linalg.det(Q))
        rho = 2.0
        A = np.cbrt(rho) * Q
        q = hs.prim_to_cons(make_prim(rho=rho, A=A), p)
        assert np.allclose(hs.flux(q, p, 0)[A0:A0 + 9], 0.0, atol=1e-14)
        assert np.allclose(hs.source(q, p)[A0:A0 + 9], 0.0, atol=1e-12)

    def test_energy_equation_is_compatible_combination(self):
        # The energy flux divergence must equal the energy-gradient-weighted
        # combination of the mass/momentum/distortion/impulse/entropy
        # residuals for arbitrary pointwise field configurations.
        p = params_ideal(cs=0.8, alpha=1.3)
        rng = np.random.default_rng(10)
        prim = random_prim(rng, p)
        q = hs.prim_to_cons(prim, p)
        gradq = 0.3 * rng.standard_normal(NVARS)

        def all_fluxes(qq):
            """Fluxes of (rho, rho v, A, rho J, rho s) plus energy, dir 0."""
            pr = hs.cons_to_prim(qq, p)
            s = mat.entropy(p, pr[RHO], pr[4])
            F = hs.flux(qq, p, 0)
            Fs = qq[RHO] * s * pr[1] + p.alpha**2 * pr[J0]
            return F, Fs

        h = 1e-7
        Fp, Fsp = all_fluxes(q + h * gradq)
        Fm, Fsm = all_fluxes(q - h * gradq)
        dF = (Fp - Fm) / (2 * h)
        dFs = (Fsp - Fsm) / (2 * h)
        ncp = hs.ncp_dot(q, gradq, p, 0)

        def rhoE_of(u):
            rho = u[0]
            rv = u[1:4]
            A = hs.tensor_view(u[4:13])
            rJ = u[13:16]
            rs = u[16]
            E1 = mat.internal_energy(p, rho, rs / rho)
            devG = mat.deviator(mat.metric_tensor(A))
            E2 = (p.cs**2 / 4.0 * np.einsum("ik,ik->", devG, devG)
                  + p.alpha**2 / 2.0 * (rJ / rho) @ (rJ / rho))
            return rho * E1 + rho * E2 + rv @ rv / (2.0 * rho)

        pr = hs.cons_to_prim(q, p)
        s = float(mat.entropy(p, pr[RHO], pr[4]))
        u = np.concatenate([[q[RHO]], q[1:4], q[A0:A0 + 9], q[J0:J0 + 3],
                            [q[RHO] * s]])
        w = np.zeros(17)
        for j in range(17):
            du = np.zeros(17)
            du[j] = 1e-7 * max(abs(u[j]), 1.0)
            w[j] = (rhoE_of(u + du) - rhoE_of(u - du)) / (2 * du[j])

        resid = np.concatenate([
            [dF[RHO]], dF[1:4], dF[A0:A0 + 9] + ncp[A0:A0 + 9],
            dF[J0:J0 + 3], [dFs]])
        assert w @ resid == pytest.approx(dF[EN], rel=5e-6, abs=5e-6)

    def test_source_conserves_energy(self):
        # rho psi : S_A + H . S_rhoJ + T * (entropy production) == 0
        p = params_ideal(tau1=0.07, tau2=0.04, cs=0.8, alpha=1.3)
        rng = np.random.default_rng(11)
        prim = random_prim(rng, p)
        q = hs.prim_to_cons(prim, p)
        S = hs.source(q, p)
        d = hs.diagnostics(q, p)
        rho = q[RHO]
        A = hs.tensor_view(q[A0:A0 + 9])
        J = q[J0:J0 + 3] / rho
        psi = mat.strain_dissipation_force(A, p.cs)
        H = p.alpha**2 * J
        _, T = mat.pressure_temperature(p, rho, d["E1"])
        total = (rho * np.einsum("ik,ik->", psi, hs.tensor_view(S[A0:A0 + 9]))
                 + H @ S[J0:J0 + 3] + T * d["entropy_production"])
        scale = abs(T * d["entropy_production"]) + 1e-30
        assert abs(total) < 1e-10 * scale


class TestDiagnostics:
    def test_equilibrium(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(), p)
        d = hs.diagnostics(q, p)
        assert d["entropy_production"] == pytest.approx(0.0, abs=1e-14)
        assert d["det_constraint_residual"] == pytest.approx(0.0, abs=1e-14)

    def test_cbrt_scaling(self):
        p = params_ideal()
        rho = 8.0
        q = hs.prim_to_cons(make_prim(rho=rho, A=np.cbrt(rho) * np.eye(3)), p)
        d = hs.diagnostics(q, p)
        assert d["det_constraint_residual"] == pytest.approx(0.0, abs=1e-12)

    def test_distorted(self):
        p = params_ideal()
        q = hs.prim_to_cons(make_prim(A=np.diag([2.0, 1.0, 1.0])), p)
        d = hs.diagnostics(q, p)
        assert d["det_constraint_residual"] == pytest.approx(1.0, rel=1e-13)


class TestElastic:
    def test_wave_speeds(self):
        ep = hs.ElasticParams(lam=7.509672500e9, mu=7.509163750e9, rho=2200.0)
        assert ep.cp == pytest.approx(3200.0, abs=1e-6)
        assert ep.cs == pytest.approx(1847.5, abs=1e-6)
        lams = hs.elastic_eigenvalues(ep)
        assert np.allclose(lams, [-3200.0, -1847.5, 0.0, 1847.5, 3200.0])

    def test_zero_state_zero_flux(self):
        ep = hs.ElasticParams(lam=1.0, mu=1.0, rho=1.0)
        assert np.allclose(hs.elastic_flux(np.zeros(5), ep, 0), 0.0)
        assert np.allclose(hs.elastic_flux(np.zeros(5), ep, 1), 0.0)

    def test_p_wave_eigenvector(self):
        ep = hs.ElasticParams(lam=2.0, mu=1.5, rho=1.2)
        cp = ep.cp
        R = np.array([-(ep.lam + 2 * ep.mu), -ep.lam, 0.0, cp, 0.0])
        # quasilinear matrix in x from the linear flux
        M = np.zeros((5, 5))
        for j in range(5):
            e = np.zeros(5)
            e[j] = 1.0
            M[:, j] = hs.elastic_flux(e, ep, 0)
        assert np.allclose(M @ R, cp * R, rtol=1e-12)
