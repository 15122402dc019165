"""Benchmark case catalog: initial conditions, exact and reference solutions.

Each factory returns a CaseSpec carrying the physical parameters of the
corresponding test problem; grids and scheme orders default to desk-scale
values and can be overridden through `replace(...)` or factory arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import erf

from . import ader
from . import grid as gr
from . import hpr_system as hs
from . import material as mat
from . import quadrature as quad
from .errors import DomainError, SolverFailureError
from .hpr_system import A0, EN, J0, NVARS
from .material import EosKind, MaterialParams


# ---------------------------------------------------------------------------
# Case container
# ---------------------------------------------------------------------------

@dataclass
class CaseSpec:
    name: str
    domain: tuple            # (x0, x1, y0, y1)
    nx: int
    ny: int
    scheme: ader.SchemeConfig
    params: MaterialParams | hs.ElasticParams
    t_end: float
    boundary: gr.BoundarySet
    ic: Callable             # ic(x, y) -> conserved states (V, ...)
    exact: Callable | None = None   # exact(x, y, t) -> conserved states
    output_times: list | None = None
    point_sources: tuple = ()
    probes: tuple = ()
    body_force: Callable | None = None
    elastic: bool = False
    max_steps: int | None = None

    def grid(self, cfg: ader.SchemeConfig) -> gr.CartesianGrid:
        x0, x1, y0, y1 = self.domain
        return gr.CartesianGrid(self.nx, self.ny, x0, x1, y0, y1,
                                ghost=cfg.ghost)

    def bcs(self) -> gr.BoundarySet:
        return self.boundary

    def system(self):
        if self.elastic:
            return hs.ElasticSystem(self.params)
        sys = hs.HPRSystem(self.params)
        if self.body_force is not None:
            sys = hs.ForcedSystem(sys, self.body_force)
        return sys

    def with_grid(self, nx: int, ny: int) -> "CaseSpec":
        return replace(self, nx=nx, ny=ny)

    def run(self, scheme: ader.SchemeConfig | None = None, **kw):
        return ader.run(self, scheme or self.scheme, **kw)


def hpr_state(rho, v, p, params, A=None, J=None):
    """Conserved state array from primitive fields (broadcasting)."""
    rho = np.asarray(rho, dtype=float)
    prim = np.zeros((NVARS,) + rho.shape)
    prim[0] = rho
    for i in range(3):
        prim[1 + i] = v[i]
    prim[4] = p
    if A is None:
        cb = np.cbrt(rho / params.rho0)
        for idx, val in enumerate(np.eye(3).reshape(9)):
            prim[A0 + idx] = val * cb
    else:
        prim[A0:A0 + 9] = A
    if J is not None:
        prim[J0:J0 + 3] = J
    return hs.prim_to_cons(prim, params)


# ---------------------------------------------------------------------------
# Convected isentropic vortex
# ---------------------------------------------------------------------------

VORTEX_EPS = 5.0


def vortex_fields(x, y, gamma=1.4):
    r2 = (np.asarray(x) - 5.0) ** 2 + (np.asarray(y) - 5.0) ** 2
    dT = -(gamma - 1.0) * VORTEX_EPS**2 / (8.0 * gamma * np.pi**2) * np.exp(
        1.0 - r2)
    du = VORTEX_EPS / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2)) * (-(y - 5.0))
    dv = VORTEX_EPS / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2)) * (x - 5.0)
    rho = (1.0 + dT) ** (1.0 / (gamma - 1.0))
    p = (1.0 + dT) ** (gamma / (gamma - 1.0))
    return rho, 1.0 + du, 1.0 + dv, p


def vortex_exact(x, y, t, params):
    """Inviscid-limit reference: the initial condition convected by (1,1)."""
    L = 10.0
    xs = np.mod(np.asarray(x) - t - 0.0, L)
    ys = np.mod(np.asarray(y) - t - 0.0, L)
    rho, u, v, p = vortex_fields(xs, ys, params.gamma)
    return hpr_state(rho, (u, v, 0.0), p, params)


def vortex_case(nx=40, scheme=None, mu=1e-6, kappa=1e-6) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=0.5, alpha=1.0,
                            T0=1.0).with_transport(mu, kappa)
    scheme = scheme or ader.SchemeConfig(N=3, M=3, cfl=0.9)

    def ic(x, y):
        rho, u, v, p = vortex_fields(x, y, params.gamma)
        return hpr_state(rho, (u, v, 0.0), p, params)

    return CaseSpec(
        name="vortex", domain=(0.0, 10.0, 0.0, 10.0), nx=nx, ny=nx,
        scheme=scheme, params=params, t_end=1.0,
        boundary=gr.BoundarySet(), ic=ic,
        exact=lambda x, y, t: vortex_exact(x, y, t, params))


# ---------------------------------------------------------------------------
# Stokes' first problem
# ---------------------------------------------------------------------------

def stokes_exact(x, t, mu_visc, v0=0.1):
    """v = v0 erf(x / (2 sqrt(mu t))), the incompressible shear layer."""
    if t <= 0:
        raise DomainError("stokes_exact needs t > 0")
    return v0 * erf(0.5 * np.asarray(x) / math.sqrt(mu_visc * t))


def stokes_case(mu=1e-2, scheme=None) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=1.0, alpha=0.0,
                            T0=1.0).with_transport(mu, 0.0)
    scheme = scheme or ader.SchemeConfig(N=3, M=3, cfl=0.9)
    v0 = 0.1

    def ic(x, y):
        v = np.where(np.asarray(x) < 0.0, -v0, v0) + 0.0 * np.asarray(y)
        return hpr_state(np.ones_like(v), (0.0, v, 0.0), 1.0 / 1.4, params)

    boundary = gr.BoundarySet(
        left=gr.Dirichlet(hpr_state(1.0, (0.0, -v0, 0.0), 1.0 / 1.4, params)),
        right=gr.Dirichlet(hpr_state(1.0, (0.0, v0, 0.0), 1.0 / 1.4, params)),
        bottom=gr.Periodic(), top=gr.Periodic())
    return CaseSpec(
        name="stokes", domain=(-0.5, 0.5, -0.05, 0.05), nx=100, ny=10,
        scheme=scheme, params=params, t_end=1.0, boundary=boundary, ic=ic)


# ---------------------------------------------------------------------------
# Blasius boundary layer (similarity ODE + flow case)
# ---------------------------------------------------------------------------

@dataclass
class BlasiusSolution:
    eta: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    fpp0: float

    def u_profile(self, eta):
        return np.interp(eta, self.eta, self.fp)


def blasius_solve(eta_max=10.0, tol=1e-10, samples=401) -> BlasiusSolution:
    """Shooting solution of f''' + f f'' = 0, f(0)=f'(0)=0, f'(inf)=1."""
    if eta_max < 8.0:
        raise DomainError("blasius_solve needs eta_max >= 8")

    def integrate(fpp0, dense=False):
        sol = solve_ivp(lambda t, y: [y[1], y[2], -y[0] * y[2]],
                        (0.0, eta_max), [0.0, 0.0, fpp0], method="DOP853",
                        rtol=1e-11, atol=1e-13, dense_output=dense)
        return sol

    def mismatch(fpp0):
        return integrate(fpp0).y[1][-1] - 1.0

    lo, hi = 0.2, 0.8
    if mismatch(lo) * mismatch(hi) > 0:
        raise SolverFailureError("blasius shooting bracket failed")
    fpp0 = brentq(mismatch, lo, hi, xtol=tol)
    sol = integrate(fpp0, dense=True)
    eta = np.linspace(0.0, eta_max, samples)
    f, fp, fpp = sol.sol(eta)
    return BlasiusSolution(eta=eta, f=f, fp=fp, fpp=fpp, fpp0=fpp0)


def blasius_case(scheme=None) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=8.0, alpha=0.0,
                            T0=1.0).with_transport(1e-3, 0.0)
    scheme = scheme or ader.SchemeConfig(N=0, M=2, cfl=0.45)
    free = hpr_state(1.0, (1.0, 0.0, 0.0), 100.0 / 1.4, params)

    def ic(x, y):
        ones = np.ones(np.broadcast(x, y).shape)
        return hpr_state(ones, (1.0, 0.0, 0.0), 100.0 / 1.4, params)

    boundary = gr.BoundarySet(
        left=gr.Dirichlet(free), right=gr.Extrapolate(),
        bottom=gr.NoSlipWall(), top=gr.Extrapolate())
    return CaseSpec(name="blasius", domain=(0.0, 1.5, 0.0, 0.4),
                    nx=75, ny=100, scheme=scheme, params=params, t_end=10.0,
                    boundary=boundary, ic=ic)


# ---------------------------------------------------------------------------
# Hagen-Poiseuille channel
# ---------------------------------------------------------------------------

def poiseuille_exact(y, dpdx=-0.48, mu=1e-2, rho=1.0, h=0.5):
    """u(y) = (dp/dx)(rho/mu) y (y - h) / 2; u_max = 1.5 for the defaults."""
    y = np.asarray(y)
    return 0.5 * dpdx * rho / mu * y * (y - h)


def poiseuille_case(scheme=None, nx=6) -> CaseSpec:
    """Channel flow driven by the equivalent body force G = -dp/dx = 0.48
    on a periodic-in-x domain; the steady profile matches the duct solution
    measured at mid-length."""
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=8.0, alpha=0.0,
                            T0=1.0).with_transport(1e-2, 0.0)
    scheme = scheme or ader.SchemeConfig(N=0, M=2, cfl=0.45)
    G = 0.48

    def force(q):
        S = np.zeros_like(q)
        S[1] = G
        S[4] = G * q[1] / q[0]
        return S

    def ic(x, y):
        ones = np.ones(np.broadcast(x, y).shape)
        return hpr_state(ones, (0.0, 0.0, 0.0), 100.0 / 1.4, params)

    boundary = gr.BoundarySet(left=gr.Periodic(), right=gr.Periodic(),
                              bottom=gr.NoSlipWall(), top=gr.NoSlipWall())
    return CaseSpec(name="poiseuille", domain=(0.0, 0.5, 0.0, 0.5),
                    nx=nx, ny=50, scheme=scheme, params=params, t_end=10.0,
                    boundary=boundary, ic=ic, body_force=force)


# ---------------------------------------------------------------------------
# Lid-driven cavity
# ---------------------------------------------------------------------------

def cavity_case(scheme=None, n=100) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=8.0, alpha=0.0,
                            T0=1.0).with_transport(1e-2, 0.0)
    scheme = scheme or ader.SchemeConfig(N=0, M=2, cfl=0.45)

    def ic(x, y):
        ones = np.ones(np.broadcast(x, y).shape)
        return hpr_state(ones, (0.0, 0.0, 0.0), 100.0 / 1.4, params)

    boundary = gr.BoundarySet(
        left=gr.NoSlipWall(), right=gr.NoSlipWall(),
        bottom=gr.NoSlipWall(), top=gr.NoSlipWall(v_wall=(1.0, 0.0)))
    return CaseSpec(name="cavity", domain=(-0.5, 0.5, -0.5, 0.5),
                    nx=n, ny=n, scheme=scheme, params=params, t_end=10.0,
                    boundary=boundary, ic=ic)


def load_ghia_reference(path):
    """Ghia et al. centerline tables from a user-supplied CSV with columns
    y, u[, x, v]; returns dict with 'y', 'u' (and 'x', 'v' when present)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    out = {k: np.asarray(data[k], dtype=float) for k in data.dtype.names}
    if "y" not in out or "u" not in out:
        raise DomainError("Ghia CSV needs at least columns y, u")
    return out


# ---------------------------------------------------------------------------
# Double shear layer
# ---------------------------------------------------------------------------

def dsl_case(n=200, scheme=None) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=8.0, alpha=0.0,
                            T0=1.0).with_transport(2e-4, 0.0)
    scheme = scheme or ader.SchemeConfig(N=0, M=3, cfl=0.45)
    rho_t, delta = 30.0, 0.05

    def ic(x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        u = np.where(y <= 0.5, np.tanh(rho_t * (y - 0.25)),
                     np.tanh(rho_t * (0.75 - y)))
        v = delta * np.sin(2.0 * np.pi * x) + 0.0 * y
        return hpr_state(np.ones_like(u), (u, v, 0.0), 100.0 / 1.4, params)

    return CaseSpec(name="dsl", domain=(0.0, 1.0, 0.0, 1.0), nx=n, ny=n,
                    scheme=scheme, params=params, t_end=1.8,
                    boundary=gr.BoundarySet(), ic=ic)


# ---------------------------------------------------------------------------
# Taylor-Green vortex
# ---------------------------------------------------------------------------

def taylor_green_exact(x, y, t, nu, C=100.0 / 1.4):
    u = np.sin(x) * np.cos(y) * math.exp(-2.0 * nu * t)
    v = -np.cos(x) * np.sin(y) * math.exp(-2.0 * nu * t)
    p = C + 0.25 * (np.cos(2 * np.asarray(x)) + np.cos(2 * np.asarray(y))) \
        * math.exp(-4.0 * nu * t)
    return u, v, p


def taylor_green_case(n=50, scheme=None, t_end=10.0) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=1.0, rho0=1.0, cs=10.0, alpha=0.0,
                            T0=1.0).with_transport(1e-2, 0.0)
    scheme = scheme or ader.SchemeConfig(N=3, M=3, cfl=0.9)
    nu = 1e-2

    def state_at(x, y, t):
        u, v, p = taylor_green_exact(x, y, t, nu)
        return hpr_state(np.ones_like(u), (u, v, 0.0), p, params)

    return CaseSpec(name="taylor_green", domain=(0.0, 2 * np.pi, 0.0,
                                                 2 * np.pi),
                    nx=n, ny=n, scheme=scheme, params=params, t_end=t_end,
                    boundary=gr.BoundarySet(),
                    ic=lambda x, y: state_at(x, y, 0.0), exact=state_at)


# ---------------------------------------------------------------------------
# Heat conduction in a gas
# ---------------------------------------------------------------------------

def heat_case(scheme=None) -> CaseSpec:
    params = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=1.0, alpha=2.0,
                            T0=1.0).with_transport(1e-2, 1e-2)
    scheme = scheme or ader.SchemeConfig(N=3, M=3, cfl=0.9)

    def state(x, y):
        rho = np.where(np.asarray(x) < 0.0, 2.0, 0.5) + 0.0 * np.asarray(y)
        return hpr_state(rho, (0.0, 0.0, 0.0), 1.0, params)

    def dirichlet_side(xval):
        rho = 2.0 if xval < 0.0 else 0.5
        return hpr_state(rho, (0.0, 0.0, 0.0), 1.0, params)

    boundary = gr.BoundarySet(
        left=gr.Dirichlet(dirichlet_side(-0.5)),
        right=gr.Dirichlet(dirichlet_side(0.5)),
        bottom=gr.Periodic(), top=gr.Periodic())
    return CaseSpec(name="heat", domain=(-0.5, 0.5, -0.1, 0.1), nx=100,
                    ny=5, scheme=scheme, params=params, t_end=1.0,
                    boundary=boundary, ic=state)


# ---------------------------------------------------------------------------
# Becker's viscous shock profile
# ---------------------------------------------------------------------------

@dataclass
class BeckerProfile:
    Ms: float
    Re_s: float
    gamma: float
    lam2: float
    x: np.ndarray
    ubar: np.ndarray
    pbar: np.ndarray
    rhobar: np.ndarray
    one_minus_u: np.ndarray = None   # stable 1 - ubar
    u_minus_lam2: np.ndarray = None  # stable ubar - lam2

    def residual(self):
        """Implicit-relation residual in log form (well conditioned even
        into the tails); fully saturated samples return 0."""
        omu = (self.one_minus_u if self.one_minus_u is not None
               else np.abs(1.0 - self.ubar))
        uml = (self.u_minus_lam2 if self.u_minus_lam2 is not None
               else np.abs(self.ubar - self.lam2))
        sat = (omu <= 1e-280) | (uml <= 1e-280)
        lhs = np.where(sat, 1.0,
                       np.log(np.where(sat, 1.0, omu))
                       - self.lam2 * np.log(np.where(sat, 1.0, uml)))
        rhs = _becker_log_rhs(self.x, self.Ms, self.Re_s, self.gamma,
                              self.lam2)
        return np.where(sat, 0.0, np.abs(lhs - rhs))


def _becker_log_rhs(x, Ms, Re_s, gamma, lam2):
    # orientation: upstream (ubar -> 1) at x -> +inf, so the exponent decays
    expo = -0.75 * Re_s * (Ms**2 - 1.0) / (gamma * Ms**2) * np.asarray(x)
    return (1.0 - lam2) * math.log((1.0 - lam2) / 2.0) + expo


def _becker_rhs(x, Ms, Re_s, gamma, lam2):
    return np.exp(_becker_log_rhs(x, Ms, Re_s, gamma, lam2))


def becker_profile(Ms, Re_s, gamma=1.4, x=None, samples=801) -> BeckerProfile:
    """Exact stationary viscous shock at Pr = 0.75 (dimensionless fields).

    The implicit relation is solved for s = log(1 - ubar), which stays well
    conditioned into both saturated tails.
    """
    if Ms <= 1.0:
        raise DomainError("becker_profile needs Ms > 1")
    lam2 = (1.0 + 0.5 * (gamma - 1.0) * Ms**2) / (0.5 * (gamma + 1.0) * Ms**2)
    if x is None:
        x = np.linspace(-0.5, 0.5, samples)
    x = np.asarray(x, dtype=float)
    ubar = np.empty_like(x)
    omu = np.empty_like(x)
    uml = np.empty_like(x)
    # substitute w = log((1-u)/(u-lam2)); both tails stay well conditioned
    c1 = 1.0 - lam2
    const = c1 * math.log(c1)

    def g(w, target):
        return w - c1 * np.logaddexp(0.0, w) + const - target

    from scipy.special import expit
    for i, xi in enumerate(x):
        target = _becker_log_rhs(xi, Ms, Re_s, gamma, lam2)
        lo, hi = -800.0, 800.0
        if g(lo, target) > 0.0:
            w = lo
        elif g(hi, target) < 0.0:
            w = hi
        else:
            w = brentq(g, lo, hi, args=(target,), xtol=1e-13, rtol=8.9e-16)
        omu[i] = c1 * expit(w)
        uml[i] = c1 * expit(-w)
        ubar[i] = lam2 + uml[i]
    pbar = 1.0 - ubar + (gamma + 1.0) / (4.0 * gamma * (gamma - 1.0)) \
        * 2.0 * (ubar - 1.0) * (ubar - lam2) / ubar
    rhobar = 1.0 / ubar
    return BeckerProfile(Ms=Ms, Re_s=Re_s, gamma=gamma, lam2=lam2, x=x,
                         ubar=ubar, pbar=pbar, rhobar=rhobar,
                         one_minus_u=omu, u_minus_lam2=uml)


def becker_state(x, y, t, params, Ms=2.0, Re_s=100.0, x0=-0.2):
    """Traveling-shock conserved fields: lab frame, shock speed Ms c0."""
    gamma = params.gamma
    c0 = 1.0
    p0 = 1.0 / gamma
    xs = np.asarray(x) - x0 - Ms * c0 * t
    prof = becker_profile(Ms, Re_s, gamma, x=np.ravel(xs))
    ubar = prof.ubar.reshape(np.shape(xs))
    pbar = prof.pbar.reshape(np.shape(xs))
    rho = 1.0 / ubar + 0.0 * np.asarray(y)
    u = Ms * c0 * (1.0 - ubar) + 0.0 * np.asarray(y)
    p = p0 + pbar * Ms**2 * c0**2 + 0.0 * np.asarray(y)
    return hpr_state(rho, (u, 0.0, 0.0), p, params)


def becker_case(scheme=None) -> CaseSpec:
    mu = 2e-2
    kappa = 9.0 + 1.0 / 3.0
    params = MaterialParams(gamma=1.4, cv=2.5, rho0=1.0, cs=50.0, alpha=50.0,
                            T0=1.0).with_transport(mu, kappa * 1e-2)
    scheme = scheme or ader.SchemeConfig(N=3, M=3, cfl=0.9)

    def ic(x, y):
        return becker_state(x, y, 0.0, params)

    boundary = gr.BoundarySet(
        left=gr.Dirichlet(lambda x, y, t: becker_state(x, y, t, params)),
        right=gr.Dirichlet(lambda x, y, t: becker_state(x, y, t, params)),
        bottom=gr.Periodic(), top=gr.Periodic())
    return CaseSpec(name="becker", domain=(-0.5, 0.5, -0.1, 0.1), nx=100,
                    ny=5, scheme=scheme, params=params, t_end=0.2,
                    boundary=boundary, ic=ic,
                    exact=lambda x, y, t: becker_state(x, y, t, params))


# ---------------------------------------------------------------------------
# Viscous double Mach reflection (reduced, qualitative)
# ---------------------------------------------------------------------------

def dmr_case(mu=1e-1, nx=700, ny=200, scheme=None) -> CaseSpec:
    gamma = 1.4
    params = MaterialParams(gamma=gamma, cv=2.5, rho0=1.0, cs=20.0,
                            alpha=math.sqrt(200.0), T0=1.0).with_transport(
                                mu, gamma * 2.5 * mu / 0.75)
    scheme = scheme or ader.SchemeConfig(N=0, M=2, cfl=0.45)
    xfoot = 1.0 / 6.0
    post = (8.0 / gamma, 8.25 * math.cos(math.pi / 6.0),
            -8.25 * math.sin(math.pi / 6.0), 116.5 / gamma)
    pre = (1.0, 0.0, 0.0, 1.0 / gamma)

    def shock_x(y, t):
        return xfoot + (np.asarray(y) + 20.0 * t) / math.sqrt(3.0)

    def state(x, y, t):
        behind = np.asarray(x) < shock_x(y, t)
        rho = np.where(behind, post[0], pre[0])
        u = np.where(behind, post[1], pre[1])
        v = np.where(behind, post[2], pre[2])
        p = np.where(behind, post[3], pre[3])
        return hpr_state(rho, (u, v, 0.0), p, params)

    def bottom_bc(system, inner, axis, side, x, y, t):
        # post-shock inflow ahead of the ramp foot, slip wall beyond it
        ghost = system.prim_to_cons(
            gr.ghost_prim(system, system.cons_to_prim(inner), gr.SlipWall(),
                          axis))
        fixed = state(x, y, t)
        mask = np.asarray(x) < xfoot
        return np.where(mask[None], fixed, ghost)

    boundary = gr.BoundarySet(
        left=gr.Dirichlet(lambda x, y, t: state(x, y, t)),
        right=gr.Extrapolate(),
        bottom=gr.Custom(bottom_bc),
        top=gr.Dirichlet(lambda x, y, t: state(x, y, t)))
    return CaseSpec(name="dmr", domain=(0.0, 3.5, 0.0, 1.0), nx=nx, ny=ny,
                    scheme=scheme, params=params, t_end=0.2,
                    boundary=boundary, ic=lambda x, y: state(x, y, 0.0))


# ---------------------------------------------------------------------------
# Lamb's problem (elastic solid) and the linear-elasticity companion
# ---------------------------------------------------------------------------

LAMB_TD = 0.08
LAMB_A1 = -2000.0
LAMB_FC = 14.5
LAMB_A2 = -(math.pi * LAMB_FC) ** 2


def lamb_wavelet_integral(t0: float, t1: float, rho0: float = 2200.0) -> float:
    """Exact integral of rho0 a1 (1/2 + a2 (t-tD)^2) exp(a2 (t-tD)^2);
    the antiderivative is rho0 a1 (t-tD)/2 exp(a2 (t-tD)^2)."""

    def F(t):
        tau = t - LAMB_TD
        return rho0 * LAMB_A1 * 0.5 * tau * math.exp(LAMB_A2 * tau * tau)

    return F(t1) - F(t0)


def lamb_case(nx=100, ny=50, scheme=None, t_end=1.3) -> CaseSpec:
    params = MaterialParams(gamma=2.0, cv=1.0, rho0=2200.0, cs=1847.5,
                            alpha=0.0, T0=1.0, tau1=math.inf, tau2=math.inf,
                            eos_kind=EosKind.STIFFENED_GAS,
                            c0=2385.160721, p0=0.0)
    scheme = scheme or ader.SchemeConfig(N=2, M=2, cfl=0.9)

    def ic(x, y):
        ones = np.ones(np.broadcast(x, y).shape)
        return hpr_state(2200.0 * ones, (0.0, 0.0, 0.0), 0.0, params)

    source = ader.PointSource(x=0.0, y=-1.0, row=2,
                              time_integral=lamb_wavelet_integral)
    boundary = gr.BoundarySet(
        left=gr.Extrapolate(), right=gr.Extrapolate(),
        bottom=gr.Extrapolate(), top=gr.FreeSurface())
    return CaseSpec(name="lamb", domain=(-2000.0, 2000.0, -2000.0, 0.0),
                    nx=nx, ny=ny, scheme=scheme, params=params, t_end=t_end,
                    boundary=boundary, ic=ic, point_sources=(source,),
                    probes=((990.0, 0.0),))


def elasticity_reference_case(nx=100, ny=50, scheme=None,
                              t_end=1.3) -> CaseSpec:
    ep = hs.ElasticParams(lam=7.509672500e9, mu=7.509163750e9, rho=2200.0)
    scheme = scheme or ader.SchemeConfig(N=2, M=2, cfl=0.9)

    def ic(x, y):
        return np.zeros((5,) + np.broadcast(x, y).shape)

    # the same wavelet acts on the velocity (not momentum) row here
    source = ader.PointSource(
        x=0.0, y=-1.0, row=4,
        time_integral=lambda t0, t1: lamb_wavelet_integral(t0, t1) / ep.rho)
    boundary = gr.BoundarySet(
        left=gr.Extrapolate(), right=gr.Extrapolate(),
        bottom=gr.Extrapolate(), top=gr.FreeSurface())
    return CaseSpec(name="elastic_reference",
                    domain=(-2000.0, 2000.0, -2000.0, 0.0), nx=nx, ny=ny,
                    scheme=scheme, params=ep, t_end=t_end, boundary=boundary,
                    ic=ic, point_sources=(source,), probes=((990.0, 0.0),),
                    elastic=True)


CASE_FACTORIES = {
    "vortex": vortex_case,
    "stokes": stokes_case,
    "blasius": blasius_case,
    "poiseuille": poiseuille_case,
    "cavity": cavity_case,
    "dsl": dsl_case,
    "taylor_green": taylor_green_case,
    "heat": heat_case,
    "becker": becker_case,
    "dmr": dmr_case,
    "lamb": lamb_case,
    "elastic_reference": elasticity_reference_case,
}


def make_case(name: str, **kw) -> CaseSpec:
    if name not in CASE_FACTORIES:
        raise DomainError(f"unknown case '{name}'; "
                          f"available: {sorted(CASE_FACTORIES)}")
    return CASE_FACTORIES[name](**kw)


# ---------------------------------------------------------------------------
# Error norms and convergence orders
# ---------------------------------------------------------------------------

def error_norms(stepper: ader.Stepper, u, exact, t, component=0):
    """Continuous (L1, L2, Linf) of u_h - exact via per-cell quadrature."""
    g = stepper.grid
    cfg = stepper.cfg
    n = cfg.M + 1
    xi, w = quad.gauss_legendre_01(n)
    xs = g.x0 + g.dx * (np.arange(g.nx)[:, None] + xi[None, :])
    ys = g.y0 + g.dy * (np.arange(g.ny)[:, None] + xi[None, :])
    X = xs[:, None, :, None] + np.zeros((1, g.ny, 1, n))
    Y = ys[None, :, None, :] + np.zeros((g.nx, 1, n, 1))
    ue = exact(X, Y, t)[component]
    if cfg.is_dg:
        uh = u[component]
    else:
        uh = stepper.interior(u)[component][:, :, None, None] + 0.0 * ue
    diff = np.abs(uh - ue)
    cellw = w[:, None] * w[None, :] * g.dx * g.dy
    L1 = float(np.einsum("xyij,ij->", diff, cellw))
    L2 = math.sqrt(float(np.einsum("xyij,ij->", diff**2, cellw)))
    Linf = float(diff.max())
    return L1, L2, Linf


def convergence_orders(ns, errors):
    """Observed orders log(e_i/e_{i+1}) / log(n_{i+1}/n_i)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return np.log(errors[:-1] / errors[1:]) / np.log(ns[1:] / ns[:-1])
