"""The 17-variable HPR system: state algebra, fluxes, sources, eigenstructure.

State vectors carry the variable axis first, ``q.shape == (17, ...)``, in the
fixed order

    [rho, rho*u, rho*v, rho*w, rho*E, A11, A12, A13, A21, A22, A23,
     A31, A32, A33, rho*J1, rho*J2, rho*J3]

Primitive vectors use the same slots with [rho, u, v, w, p, A..., J...].
All functions broadcast over trailing axes and are pure (safe to evaluate in
data-parallel passes over cells).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import material as mat
from .errors import HyperbolicityLossError, UnphysicalStateError
from .material import EosKind, MaterialParams

NVARS = 17
RHO, MX, MY, MZ, EN = 0, 1, 2, 3, 4
A0, J0 = 5, 14  # start of the 9 distortion rows / 3 thermal-impulse rows
SOURCE_ROWS = slice(A0, NVARS)  # the 12 rows with relaxation sources


def tensor_view(block9: np.ndarray) -> np.ndarray:
    """View a (9, ...) block as (..., 3, 3), row-major in (i, k)."""
    return np.moveaxis(block9.reshape(3, 3, *block9.shape[1:]), (0, 1), (-2, -1))


def tensor_pack(T: np.ndarray) -> np.ndarray:
    """Inverse of tensor_view: (..., 3, 3) -> (9, ...)."""
    T = np.moveaxis(T, (-2, -1), (0, 1))
    return T.reshape(9, *T.shape[2:])


def vec_view(block3: np.ndarray) -> np.ndarray:
    return np.moveaxis(block3, 0, -1)


# ---------------------------------------------------------------------------
# Conserved <-> primitive
# ---------------------------------------------------------------------------

def prim_to_cons(prim: np.ndarray, params: MaterialParams) -> np.ndarray:
    prim = np.asarray(prim, dtype=float)
    rho = prim[RHO]
    v = prim[1:4]
    p = prim[4]
    A = tensor_view(prim[A0:A0 + 9])
    J = vec_view(prim[J0:J0 + 3])
    g = params.gamma
    if params.eos_kind is EosKind.IDEAL_GAS:
        E1 = p / ((g - 1.0) * rho)
    else:
        E1 = (p + params.k0) / ((g - 1.0) * rho) + params.k0 / rho
    devG = mat.deviator(mat.metric_tensor(A))
    E2 = (params.cs**2 / 4.0 * np.einsum("...ik,...ik->...", devG, devG)
          + params.alpha**2 / 2.0 * np.einsum("...i,...i->...", J, J))
    E3 = 0.5 * np.einsum("i...,i...->...", v, v)
    q = np.empty_like(prim)
    q[RHO] = rho
    q[1:4] = rho * v
    q[EN] = rho * (E1 + E2 + E3)
    q[A0:A0 + 9] = prim[A0:A0 + 9]
    q[J0:J0 + 3] = rho * prim[J0:J0 + 3]
    return q


def _split_energy(q: np.ndarray, params: MaterialParams):
    """(rho, v(3,...), A view, J view, E1) from a conserved state."""
    rho = q[RHO]
    v = q[1:4] / rho
    A = tensor_view(q[A0:A0 + 9])
    J = vec_view(q[J0:J0 + 3] / rho)
    devG = mat.deviator(mat.metric_tensor(A))
    E2 = (params.cs**2 / 4.0 * np.einsum("...ik,...ik->...", devG, devG)
          + params.alpha**2 / 2.0 * np.einsum("...i,...i->...", J, J))
    E3 = 0.5 * np.einsum("i...,i...->...", v, v)
    E1 = q[EN] / rho - E2 - E3
    return rho, v, A, J, E1


def cons_to_prim(cons: np.ndarray, params: MaterialParams,
                 validate: bool = True) -> np.ndarray:
    cons = np.asarray(cons, dtype=float)
    rho = cons[RHO]
    if validate and np.any(rho <= 0.0):
        idx = np.unravel_index(int(np.argmax(rho <= 0.0)), np.shape(rho))
        raise UnphysicalStateError("non-positive density", cell=idx)
    rho, v, A, J, E1 = _split_energy(cons, params)
    if validate:
        floor = params.k0 / rho if params.eos_kind is EosKind.STIFFENED_GAS else 0.0
        bad = E1 <= floor
        if np.any(bad):
            idx = np.unravel_index(int(np.argmax(bad)), np.shape(bad))
            raise UnphysicalStateError("negative residual internal energy", cell=idx)
    p, _ = mat.pressure_temperature(params, rho, E1)
    prim = np.empty_like(cons)
    prim[RHO] = rho
    prim[1:4] = v
    prim[4] = p
    prim[A0:A0 + 9] = cons[A0:A0 + 9]
    prim[J0:J0 + 3] = cons[J0:J0 + 3] / rho
    return prim


# ---------------------------------------------------------------------------
# Pointwise constitutive bundle (fused for the solver hot path)
# ---------------------------------------------------------------------------

@dataclass
class PointState:
    rho: np.ndarray
    v: np.ndarray        # (3, ...)
    p: np.ndarray
    T: np.ndarray
    A: np.ndarray        # (..., 3, 3)
    J: np.ndarray        # (..., 3)
    sigma: np.ndarray    # (..., 3, 3)
    qheat: np.ndarray    # (..., 3)
    E1: np.ndarray


def point_state(q: np.ndarray, params: MaterialParams) -> PointState:
    rho, v, A, J, E1 = _split_energy(q, params)
    p, T = mat.pressure_temperature(params, rho, E1)
    G = mat.metric_tensor(A)
    devG = mat.deviator(G)
    sigma = -rho[..., None, None] * params.cs**2 * np.matmul(G, devG)
    qheat = params.alpha**2 * T[..., None] * J
    return PointState(rho=rho, v=v, p=p, T=T, A=A, J=J, sigma=sigma,
                      qheat=qheat, E1=E1)


def flux_from_point(pt: PointState, q: np.ndarray, k: int) -> np.ndarray:
    """Conservative flux F_k evaluated from a prebuilt PointState."""
    F = np.zeros_like(q)
    vk = pt.v[k]
    sig_k = pt.sigma[..., :, k]  # column k, (..., 3)
    F[RHO] = q[RHO] * vk
    for i in range(3):
        F[1 + i] = q[1 + i] * vk - sig_k[..., i]
    F[1 + k] += pt.p
    # v_k rho E + v_i (p delta_ik - sigma_ik) + q_k
    vdots = np.einsum("i...,...i->...", pt.v, sig_k)
    F[EN] = vk * (q[EN] + pt.p) - vdots + pt.qheat[..., k]
    Av = np.einsum("...im,m...->...i", pt.A, pt.v)
    for i in range(3):
        F[A0 + 3 * i + k] = Av[..., i]
    for i in range(3):
        F[J0 + i] = q[J0 + i] * vk
    F[J0 + k] += pt.T
    return F


def flux(q: np.ndarray, params: MaterialParams, k: int) -> np.ndarray:
    """Conservative flux component F_k, k in {0, 1, 2}."""
    q = np.asarray(q, dtype=float)
    return flux_from_point(point_state(q, params), q, k)


def ncp_dot(q: np.ndarray, dq: np.ndarray, params: MaterialParams,
            k: int) -> np.ndarray:
    """B_k(q) . dq : the non-conservative matrix in direction k applied to dq.

    Only the nine A-rows are affected:
    (B_k dq)_{A_ij} = v_k dA_ij - delta_{jk} v_m dA_im.
    """
    out = np.zeros_like(dq)
    rho = q[RHO]
    v = q[1:4] / rho
    vk = v[k]
    for i in range(3):
        vdA = sum(v[m] * dq[A0 + 3 * i + m] for m in range(3))
        for j in range(3):
            row = A0 + 3 * i + j
            out[row] = vk * dq[row]
            if j == k:
                out[row] -= vdA
    return out


def nonconservative_product(q: np.ndarray, gradq: np.ndarray,
                            params: MaterialParams) -> np.ndarray:
    """B(q) . grad(q) for gradq of shape (17, d, ...)."""
    gradq = np.asarray(gradq, dtype=float)
    out = np.zeros_like(np.asarray(q, dtype=float))
    for k in range(gradq.shape[1]):
        out += ncp_dot(q, gradq[:, k], params, k)
    return out


def source(q: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Relaxation sources; nonzero only on the A and rho*J rows."""
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(q)
    need_a = not math.isinf(params.tau1)
    need_j = not math.isinf(params.tau2) and params.alpha > 0.0
    if not (need_a or need_j):
        return out
    rho, v, A, J, E1 = _split_energy(q, params)
    if need_a:
        out[A0:A0 + 9] = tensor_pack(mat.strain_source(A, params.tau1))
    if need_j:
        _, T = mat.pressure_temperature(params, rho, E1)
        out[J0:J0 + 3] = np.moveaxis(mat.thermal_source(rho, J, T, params), -1, 0)
    return out


def source_jacobian(q: np.ndarray, params: MaterialParams) -> np.ndarray:
    """d(source)/dq restricted to the 12 rows/cols A11..A33, rho*J1..3.

    Returns (..., 12, 12).  rho, rho*v, rho*E are held fixed, which is how the
    node-implicit predictor treats the relaxation step; T therefore varies
    with A and rho*J through the energy split.
    """
    q = np.asarray(q, dtype=float)
    shape = q.shape[1:]
    jac = np.zeros(shape + (12, 12))
    rho, v, A, J, E1 = _split_energy(q, params)
    if not math.isinf(params.tau1):
        jA = mat.strain_source_jacobian(A, params.tau1)  # (...,3,3,3,3)
        jac[..., :9, :9] = jA.reshape(shape + (9, 9))
    if not math.isinf(params.tau2) and params.alpha > 0.0:
        _, T = mat.pressure_temperature(params, rho, E1)
        c = params.rho0 / (rho * params.T0 * params.tau2)
        rhoJ = q[J0:J0 + 3]
        dT_dA = -params.cs**2 * np.einsum(
            "...im,...mk->...ik", A, mat.deviator(mat.metric_tensor(A))) / params.cv
        dT_drhoJ = -params.alpha**2 * np.moveaxis(rhoJ, 0, -1) / (
            rho[..., None]**2 * params.cv)
        # S_i = -c T rhoJ_i
        for i in range(3):
            jac[..., 9 + i, :9] = (-c * rhoJ[i])[..., None] * dT_dA.reshape(
                shape + (9,))
            jac[..., 9 + i, 9:] = (-c)[..., None] * (
                dT_drhoJ * rhoJ[i][..., None])
            jac[..., 9 + i, 9 + i] += -c * T
    return jac


# ---------------------------------------------------------------------------
# Signal speeds and eigenstructure
# ---------------------------------------------------------------------------

def heat_char_speed_sq(params: MaterialParams, rho, T):
    return params.alpha**2 * np.asarray(T) / (np.asarray(rho)**2 * params.cv)


def max_signal_speed(prim: np.ndarray, params: MaterialParams,
                     n: np.ndarray) -> np.ndarray:
    """|v.n| + sqrt(c0^2 + 4 cs^2/3 + c_h^2): rest-state bound, Rusanov s_max."""
    prim = np.asarray(prim, dtype=float)
    n = np.asarray(n, dtype=float)
    rho, p = prim[RHO], prim[4]
    asq = mat.sound_speed_sq(params, rho, p)
    if params.eos_kind is EosKind.IDEAL_GAS:
        T = p / ((params.gamma - 1.0) * rho * params.cv)
    else:
        T = (p + params.k0) / ((params.gamma - 1.0) * rho * params.cv)
    chsq = heat_char_speed_sq(params, rho, T)
    vn = sum(prim[1 + i] * n[i] for i in range(min(3, len(n))))
    return np.abs(vn) + np.sqrt(asq + 4.0 * params.cs**2 / 3.0 + chsq)


def _max_speed_cons(q: np.ndarray, params: MaterialParams, k: int) -> np.ndarray:
    rho, v, A, J, E1 = _split_energy(q, params)
    p, T = mat.pressure_temperature(params, rho, E1)
    asq = mat.sound_speed_sq(params, rho, p)
    chsq = heat_char_speed_sq(params, rho, T)
    return np.abs(v[k]) + np.sqrt(asq + 4.0 * params.cs**2 / 3.0 + chsq)


def sigma_derivatives(rho, p, A, params: MaterialParams):
    """Analytic (d sigma/d rho, d sigma/d p, d sigma/dA) for quadratic E2.

    Returns (sigma/rho-shaped, zeros, (..., 3, 3, 3, 3)) with the last laid
    out as [i, c, m, n] = d sigma_ic / d A_mn.
    """
    rho = np.asarray(rho, dtype=float)
    A = np.asarray(A, dtype=float)
    cs2 = params.cs**2
    G = mat.metric_tensor(A)
    devG = mat.deviator(G)
    sigma = -rho[..., None, None] * cs2 * np.einsum("...im,...mk->...ik", G, devG)
    dsig_drho = sigma / rho[..., None, None]
    eye = np.eye(3)
    # dG_ia/dA_mn = delta_an A_mi + delta_in A_ma
    dH = (np.einsum("an,...mi,...ac->...icmn", eye, A, devG)
          + np.einsum("in,...ma,...ac->...icmn", eye, A, devG)
          + np.einsum("...ia,cn,...ma->...icmn", G, eye, A)
          + np.einsum("...ia,an,...mc->...icmn", G, eye, A)
          - 2.0 / 3.0 * np.einsum("...ic,...mn->...icmn", G, A))
    dsig_dA = -rho[..., None, None, None, None] * cs2 * dH
    return dsig_drho, np.zeros_like(sigma), dsig_dA


def quasilinear_matrix_viscous(prim: np.ndarray, params: MaterialParams,
                               k: int) -> np.ndarray:
    """8x8 quasilinear matrix of the viscous subsystem in direction k.

    State order (rho, p, v1, v2, v3, A_1k, A_2k, A_3k); the remaining state
    components are passively advected at v_k and decouple from this block.
    """
    prim = np.asarray(prim, dtype=float)
    rho, p = float(prim[RHO]), float(prim[4])
    v = prim[1:4].astype(float)
    A = tensor_view(prim[A0:A0 + 9])
    asq = float(mat.sound_speed_sq(params, rho, p))
    dsr, _, dsA = sigma_derivatives(rho, p, A, params)
    M = np.zeros((8, 8))
    vk = float(v[k])
    np.fill_diagonal(M, vk)
    M[0, 2 + k] = rho
    M[1, 2 + k] = rho * asq
    for i in range(3):
        M[2 + i, 0] = -dsr[i, k] / rho
        M[2 + i, 1] = (1.0 if i == k else 0.0) / rho
        for j in range(3):
            M[2 + i, 5 + j] = -dsA[i, k, j, k] / rho
            M[5 + i, 2 + j] = A[i, j]
    return M


def _char_cubic(W: np.ndarray):
    """Positive speeds (l1<=l2<=l3) from the 3x3 product matrix W via the
    trigonometric solution of its characteristic cubic."""
    I1 = np.trace(W)
    I2 = np.trace(W @ W)
    a = (I1**2 - 3.0 * I2) / 6.0
    b = (5.0 * I1**3 / 9.0 - I1 * I2 - 6.0 * np.linalg.det(W)) / 6.0
    scale = max(abs(I1), np.sqrt(abs(I2)), 1e-300)
    if a > 1e-12 * scale**2:
        raise HyperbolicityLossError("characteristic cubic has complex roots")
    a = min(a, 0.0)
    if a == 0.0:
        betas = np.zeros(3)
    else:
        arg = -27.0 * b**2 / (4.0 * a**3)
        if arg > 1.0 + 1e-8:
            raise HyperbolicityLossError("characteristic cubic has complex roots")
        phi = math.acos(-math.copysign(math.sqrt(min(arg, 1.0)), b))
        betas = 2.0 * math.sqrt(-a / 3.0) * np.cos(
            (phi + 2.0 * np.arange(3) * np.pi) / 3.0)
    lamsq = betas + I1 / 3.0
    if np.any(lamsq < -1e-10 * scale):
        raise HyperbolicityLossError("negative squared characteristic speed")
    return np.sort(np.sqrt(np.maximum(lamsq, 0.0)))


def eigenvalues_viscous(prim: np.ndarray, params: MaterialParams,
                        k: int) -> np.ndarray:
    """Eight sorted speeds {v_k +- l1, +- l2, +- l3, v_k, v_k}."""
    M = quasilinear_matrix_viscous(prim, params, k)
    vk = float(np.asarray(prim, dtype=float)[1 + k])
    slow = [0, 1, 5, 6, 7]
    W1 = M[2:5][:, slow]          # velocity rows, slow columns
    W2 = M[slow][:, 2:5]          # slow rows, velocity columns
    lams = _char_cubic(W1 @ W2)
    return np.sort(np.concatenate([vk - lams, [vk, vk], vk + lams]))


def rest_full_matrix(params: MaterialParams, rho: float, p: float) -> np.ndarray:
    """9x9 quasilinear matrix of the full system at a rest state,
    state order (rho, p, J1, v1, v2, v3, A11, A21, A31)."""
    g, cv, cs, alpha = params.gamma, params.cv, params.cs, params.alpha
    asq = float(mat.sound_speed_sq(params, rho, p))
    if params.eos_kind is EosKind.IDEAL_GAS:
        T = p / ((g - 1.0) * rho * cv)
    else:
        T = (p + params.k0) / ((g - 1.0) * rho * cv)
    M = np.zeros((9, 9))
    M[0, 3] = rho
    M[1, 2] = (g - 1.0) * alpha**2 * T
    M[1, 3] = rho * asq
    M[2, 0] = -T / rho**2
    M[2, 1] = 1.0 / ((g - 1.0) * cv * rho**2)
    M[3, 1] = 1.0 / rho
    M[3, 6] = 4.0 / 3.0 * cs**2
    M[4, 7] = cs**2
    M[5, 8] = cs**2
    M[6, 3] = 1.0
    M[7, 4] = 1.0
    M[8, 5] = 1.0
    return M


def eigenvalues_rest_full(params: MaterialParams, rho: float,
                          p: float) -> np.ndarray:
    """Eight nonzero rest-state speeds: +-cs (twice each) and the two
    heat/pressure pairs from the quartic lam^4 - C lam^2 + K = 0."""
    g, cv, cs = params.gamma, params.cv, params.cs
    asq = float(mat.sound_speed_sq(params, rho, p))
    if params.eos_kind is EosKind.IDEAL_GAS:
        T = p / ((g - 1.0) * rho * cv)
    else:
        T = (p + params.k0) / ((g - 1.0) * rho * cv)
    chsq = float(heat_char_speed_sq(params, rho, T))
    C = asq + chsq + 4.0 * cs**2 / 3.0
    disc = C**2 - 4.0 * chsq * ((g - 1.0) * cv * T + 4.0 * cs**2 / 3.0)
    if disc < -1e-12 * C**2:
        raise HyperbolicityLossError("rest-state quartic has complex roots")
    root = math.sqrt(max(disc, 0.0))
    lam_heat = math.sqrt(max((C - root) / 2.0, 0.0))
    lam_long = math.sqrt((C + root) / 2.0)
    lams = np.array([cs, cs, lam_heat, lam_long])
    return np.sort(np.concatenate([-lams, lams]))


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def diagnostics(cons: np.ndarray, params: MaterialParams) -> dict:
    """Entropy, entropy production, |A| - rho/rho0 residual, energy split."""
    cons = np.asarray(cons, dtype=float)
    rho, v, A, J, E1 = _split_energy(cons, params)
    p, T = mat.pressure_temperature(params, rho, E1)
    th = mat.Thermo.from_state(params, rho, np.moveaxis(v, 0, -1), A,
                               J, p)
    det = mat.det3(A)
    return {
        "entropy": th.s,
        "entropy_production": th.entropy_production(rho),
        "det_constraint_residual": det - rho / params.rho0,
        "E1": th.E1,
        "E2": th.E2,
        "E3": th.E3,
    }


# ---------------------------------------------------------------------------
# Solver-facing system wrappers
# ---------------------------------------------------------------------------

class HPRSystem:
    """HPR model bound to one MaterialParams, in the shape the ADER solver
    consumes: flux/ncp/source plus admissibility and signal-speed hooks."""

    nvars = NVARS

    def __init__(self, params: MaterialParams, use_kernels: bool = True):
        self.params = params
        from . import _kernels
        self._kernels = _kernels if (_kernels.HAVE_NUMBA and use_kernels) \
            else None

    def _kernel_call(self, q, need_flux, need_source):
        p = self.params
        shape = q.shape[1:]
        qn = np.ascontiguousarray(q.reshape(NVARS, -1).T)
        Fx, Fy, S = self._kernels.hpr_flux_source(
            qn, p.gamma, p.cv, p.rho0, p.cs, p.alpha, p.T0, p.tau1, p.tau2,
            p.k0, p.eos_kind is EosKind.STIFFENED_GAS, need_flux, need_source)

        def back(x):
            return np.ascontiguousarray(x.T).reshape((NVARS,) + shape)

        return ((back(Fx), back(Fy)) if need_flux else None,
                back(S) if need_source else None)

    def flux(self, q, k):
        return flux(q, self.params, k)

    def flux_both(self, q, dirs=(0, 1)):
        if self._kernels is not None and dirs == (0, 1):
            fluxes, _ = self._kernel_call(q, True, False)
            return list(fluxes)
        pt = point_state(q, self.params)
        return [flux_from_point(pt, q, k) for k in dirs]

    def ncp_dot(self, q, dq, k):
        return ncp_dot(q, dq, self.params, k)

    def has_ncp(self):
        return True

    def source(self, q):
        if self._kernels is not None and self.has_source():
            _, S = self._kernel_call(q, False, True)
            return S
        return source(q, self.params)

    # fused per-cell kernels consumed by the ADER predictor/corrector;
    # None signals the generic numpy path
    def predictor_rhs(self, qh, D, dx, dy, with_source, emit_flux=False):
        if self._kernels is None:
            return None
        p = self.params
        shape = qh.shape
        q5 = np.ascontiguousarray(qh).reshape(NVARS, -1, *shape[3:])
        if emit_flux:
            FxG = np.empty_like(q5)
            FyG = np.empty_like(q5)
        else:
            FxG = np.empty((NVARS, 1, 1, 1, 1))
            FyG = np.empty((NVARS, 1, 1, 1, 1))
        rhs = self._kernels.hpr_predictor_rhs(
            q5, D, 1.0 / dx, 1.0 / dy, p.gamma, p.cv, p.rho0, p.cs, p.alpha,
            p.T0, p.tau1, p.tau2, p.k0,
            p.eos_kind is EosKind.STIFFENED_GAS,
            with_source and self.has_source(), emit_flux, FxG, FyG)
        rhs = rhs.reshape(shape)
        if emit_flux:
            return rhs, FxG.reshape(shape), FyG.reshape(shape)
        return rhs

    def newton_kernels(self):
        """(residual_fn, mode_solve_fn) for the stiff source solver, or None."""
        if self._kernels is None:
            return None
        p = self.params

        def residual(q, b, KW, dt):
            shape = q.shape
            q5 = q.reshape(NVARS, -1, *shape[3:])
            b5 = b.reshape(NVARS, -1, *shape[3:])
            R, rmax = self._kernels.hpr_newton_residual(
                q5, b5, KW, dt, p.gamma, p.cv, p.rho0, p.cs, p.alpha, p.T0,
                p.tau1, p.tau2, p.k0,
                p.eos_kind is EosKind.STIFFENED_GAS)
            return R.reshape((12,) + shape[1:]), float(rmax.max())

        def mode_solve(R, Vre, Vim, Wre, Wim, invre, invim):
            shape = R.shape
            R5 = np.ascontiguousarray(R).reshape(12, -1, *shape[3:])
            dX = self._kernels.hpr_mode_solve(R5, Vre, Vim, Wre, Wim,
                                              invre, invim)
            return dX.reshape(shape)

        return residual, mode_solve

    def has_source(self):
        p = self.params
        return (not math.isinf(p.tau1)) or (not math.isinf(p.tau2) and p.alpha > 0)

    def source_jacobian(self, q):
        return source_jacobian(q, self.params)

    source_rows = SOURCE_ROWS

    def min_relax_time(self):
        p = self.params
        taus = [p.tau1]
        if p.alpha > 0:
            taus.append(p.tau2)
        return min(taus)

    def max_speed(self, q, k):
        return _max_speed_cons(q, self.params, k)

    def validate(self, q):
        cons_to_prim(q, self.params)

    def cons_to_prim(self, q):
        return cons_to_prim(q, self.params)

    def prim_to_cons(self, prim):
        return prim_to_cons(prim, self.params)


class ForcedSystem:
    """Wrap a system with a smooth body-force source on conserved rows.

    The force callable maps conserved states to a source contribution
    (momentum and its work, typically); relaxation stiffness handling and
    boundary surgery delegate to the wrapped system.
    """

    source_touches_conserved = True

    def __init__(self, inner, force):
        self.inner = inner
        self.force = force
        self.nvars = inner.nvars
        self.params = inner.params
        self.source_rows = inner.source_rows

    def flux(self, q, k):
        return self.inner.flux(q, k)

    def flux_both(self, q, dirs=(0, 1)):
        return self.inner.flux_both(q, dirs)

    def ncp_dot(self, q, dq, k):
        return self.inner.ncp_dot(q, dq, k)

    def has_ncp(self):
        return self.inner.has_ncp()

    def source(self, q):
        return self.inner.source(q) + self.force(q)

    def has_source(self):
        return True

    def source_jacobian(self, q):
        return self.inner.source_jacobian(q)

    def min_relax_time(self):
        return self.inner.min_relax_time()

    def predictor_rhs(self, qh, D, dx, dy, with_source, emit_flux=False):
        fused = getattr(self.inner, "predictor_rhs", None)
        if fused is None:
            return None
        out = fused(qh, D, dx, dy, with_source, emit_flux)
        if out is None:
            return None
        if not with_source:
            return out
        if emit_flux:
            rhs, Fx, Fy = out
            return rhs + self.force(qh), Fx, Fy
        return out + self.force(qh)

    def max_speed(self, q, k):
        return self.inner.max_speed(q, k)

    def validate(self, q):
        self.inner.validate(q)

    def cons_to_prim(self, q):
        return self.inner.cons_to_prim(q)

    def prim_to_cons(self, prim):
        return self.inner.prim_to_cons(prim)

    def ghost_slip(self, prim, axis):
        return self.inner.ghost_slip(prim, axis)

    def ghost_noslip(self, prim, axis, v_wall):
        return self.inner.ghost_noslip(prim, axis, v_wall)

    def ghost_free_surface(self, prim, axis):
        return self.inner.ghost_free_surface(prim, axis)


@dataclass(frozen=True)
class ElasticParams:
    """Lame constants and density for the velocity-stress companion."""

    lam: float
    mu: float
    rho: float

    @property
    def cp(self) -> float:
        return math.sqrt((self.lam + 2.0 * self.mu) / self.rho)

    @property
    def cs(self) -> float:
        return math.sqrt(self.mu / self.rho)


def elastic_flux(state: np.ndarray, params: ElasticParams, k: int) -> np.ndarray:
    """Linear velocity-stress flux, state order (sxx, syy, sxy, u, v)."""
    state = np.asarray(state, dtype=float)
    sxx, syy, sxy, u, v = state
    F = np.zeros_like(state)
    lam, mu, rho = params.lam, params.mu, params.rho
    if k == 0:
        F[0] = -(lam + 2.0 * mu) * u
        F[1] = -lam * u
        F[2] = -mu * v
        F[3] = -sxx / rho
        F[4] = -sxy / rho
    else:
        F[0] = -lam * v
        F[1] = -(lam + 2.0 * mu) * v
        F[2] = -mu * u
        F[3] = -sxy / rho
        F[4] = -syy / rho
    return F


def elastic_eigenvalues(params: ElasticParams) -> np.ndarray:
    cp, cs = params.cp, params.cs
    return np.array([-cp, -cs, 0.0, cs, cp])


class ElasticSystem:
    """Linear elasticity companion in the same solver-facing shape."""

    nvars = 5

    def __init__(self, params: ElasticParams):
        self.params = params

    def flux(self, q, k):
        return elastic_flux(q, self.params, k)

    def flux_both(self, q, dirs=(0, 1)):
        return [elastic_flux(q, self.params, k) for k in dirs]

    def ncp_dot(self, q, dq, k):
        return np.zeros_like(dq)

    def has_ncp(self):
        return False

    def source(self, q):
        return np.zeros_like(q)

    def has_source(self):
        return False

    def min_relax_time(self):
        return math.inf

    source_rows = slice(0, 0)

    def max_speed(self, q, k):
        return np.full(q.shape[1:], self.params.cp)

    def validate(self, q):
        pass

    def cons_to_prim(self, q):
        return q

    def prim_to_cons(self, prim):
        return prim
