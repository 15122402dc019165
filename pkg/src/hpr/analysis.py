"""Dispersion relations of the relaxation system linearized about rest states.

Roots z = k/omega of det(I - z A + (i/omega) B) = 0 are computed from closed
forms for the decoupled viscous (longitudinal + shear) and heat subsystems;
phase velocity and attenuation follow as V = 1/Re(z), atten = -omega Im(z).
Every returned root zeroes the corresponding rest-state determinant, which is
the binding consistency contract (see tests for the residual oracle).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import hpr_system as hs
from . import material as mat
from .errors import DomainError
from .material import EosKind, MaterialParams


@dataclass
class DispersionPoint:
    """One frequency sample: complex slowness plus derived V and attenuation."""

    omega: float
    Omega: float
    z: complex
    V: float
    atten: float

    @classmethod
    def from_root(cls, omega: float, Omega: float, z: complex) -> "DispersionPoint":
        if z.real < 0.0:
            z = -z
        return cls(omega=omega, Omega=Omega, z=z, V=1.0 / z.real,
                   atten=-omega * z.imag)


def _rest_temperature(params: MaterialParams, rho: float, p: float) -> float:
    if params.eos_kind is EosKind.IDEAL_GAS:
        return p / ((params.gamma - 1.0) * rho * params.cv)
    return (p + params.k0) / ((params.gamma - 1.0) * rho * params.cv)


def longitudinal_dispersion(omega: float, params: MaterialParams,
                            rho: float, p: float) -> DispersionPoint:
    """Longitudinal sound-wave root of the viscous subsystem at (rho, p)."""
    if omega <= 0.0 or not math.isfinite(params.tau1) or params.tau1 <= 0.0:
        raise DomainError("longitudinal_dispersion needs omega > 0, finite tau1")
    Om = params.tau1 * omega
    c0sq = float(mat.sound_speed_sq(params, rho, p))
    w = Om - 4.0j
    z = cmath.sqrt(3.0 * w / (3.0 * c0sq * w + 4.0 * Om * params.cs**2))
    return DispersionPoint.from_root(omega, Om, z)


def shear_dispersion(omega: float, params: MaterialParams) -> DispersionPoint:
    """Transverse sound-wave root; limits are 0 (omega->0) and cs (omega->inf)."""
    if omega <= 0.0 or not math.isfinite(params.tau1) or params.tau1 <= 0.0:
        raise DomainError("shear_dispersion needs omega > 0, finite tau1")
    if params.cs <= 0.0:
        raise DomainError("shear_dispersion needs cs > 0")
    Om = params.tau1 * omega
    z = cmath.sqrt((Om - 3.0j) / (Om * params.cs**2))
    return DispersionPoint.from_root(omega, Om, z)


def heat_dispersion(omega: float, params: MaterialParams, rho: float,
                    T: float) -> DispersionPoint:
    """Heat-wave root; limits are 0 (omega->0) and c_h (omega->inf)."""
    if omega <= 0.0 or not math.isfinite(params.tau2) or params.tau2 <= 0.0:
        raise DomainError("heat_dispersion needs omega > 0, finite tau2")
    if params.alpha <= 0.0 or params.cv <= 0.0:
        raise DomainError("heat_dispersion needs alpha > 0 and cv > 0")
    Om = params.tau2 * omega
    ch = params.alpha / rho * math.sqrt(T / params.cv)
    r = params.rho0 * T / (rho * params.T0)  # relaxation-rate factor of theta2
    z = cmath.sqrt(1.0 - 1.0j * r / Om) / ch
    return DispersionPoint.from_root(omega, Om, z)


# ---------------------------------------------------------------------------
# Rest-state systems for the determinant-residual oracle
# ---------------------------------------------------------------------------

def viscous_rest_system(params: MaterialParams, rho: float, p: float):
    """(A, B) of the 8-variable viscous subsystem at rest,
    state (rho, p, v1, v2, v3, A11, A21, A31)."""
    c0sq = float(mat.sound_speed_sq(params, rho, p))
    cs2 = params.cs**2
    A = np.zeros((8, 8))
    A[0, 2] = rho
    A[1, 2] = rho * c0sq
    A[2, 1] = 1.0 / rho
    A[2, 5] = 4.0 / 3.0 * cs2
    A[3, 6] = cs2
    A[4, 7] = cs2
    A[5, 2] = A[6, 3] = A[7, 4] = 1.0
    # source Jacobian of the actual relaxation law at the rest state,
    # restricted to the (A11, A21, A31) columns of this subsystem
    prim = np.zeros(hs.NVARS)
    prim[hs.RHO] = rho
    prim[4] = p
    prim[hs.A0:hs.A0 + 9] = np.eye(3).reshape(9)
    q = hs.prim_to_cons(prim, params)
    jac = hs.source_jacobian(q, params)  # (12, 12) on A/rhoJ rows
    B = np.zeros((8, 8))
    cols = [0, 3, 6]  # A11, A21, A31 within the 9 A-slots
    for a, ra in enumerate(cols):
        for b, rb in enumerate(cols):
            B[5 + a, 5 + b] = jac[ra, rb]
    return A, B


def heat_rest_system(params: MaterialParams, rho: float, T: float):
    """(A, B) of the 2-variable heat subsystem (J1, s) at rest."""
    A = np.array([[0.0, T / (rho * params.cv)],
                  [params.alpha**2 / rho, 0.0]])
    r = params.rho0 * T / (rho * params.T0)
    B = np.array([[-r / params.tau2, 0.0], [0.0, 0.0]])
    return A, B


def dispersion_residual(A: np.ndarray, B: np.ndarray, omega: float,
                        z: complex) -> float:
    """|det(I - z A + i/omega B)| scaled by the determinant magnitude at
    nearby off-root points (a local relative residual)."""
    def det_at(zz):
        return np.linalg.det(np.eye(len(A), dtype=complex) - zz * A
                             + 1j / omega * B)

    val = abs(det_at(z))
    scale = max(abs(det_at(z * s)) for s in (1.5, 0.5, 1 + 0.5j, 1 - 0.5j))
    return val / scale


def coupled_dispersion_root(omega: float, params: MaterialParams, rho: float,
                            p: float, z0: complex) -> complex:
    """Experimental: Newton root of the fully coupled 9-variable rest-state
    dispersion determinant, seeded from a subsystem closed form."""
    A = hs.rest_full_matrix(params, rho, p)
    T = _rest_temperature(params, rho, p)
    B = np.zeros((9, 9))
    jac_prim = np.zeros(hs.NVARS)
    jac_prim[hs.RHO] = rho
    jac_prim[4] = p
    jac_prim[hs.A0:hs.A0 + 9] = np.eye(3).reshape(9)
    q = hs.prim_to_cons(jac_prim, params)
    jac = hs.source_jacobian(q, params)
    for a, ra in enumerate([0, 3, 6]):
        for b, rb in enumerate([0, 3, 6]):
            B[6 + a, 6 + b] = jac[ra, rb]
    # J1 row: d/d(rho J1) of the thermal source, converted to a J1 rate
    B[2, 2] = jac[9, 9]
    z = complex(z0)
    eye = np.eye(9, dtype=complex)

    def f(zz):
        return np.linalg.det(eye - zz * A + 1j / omega * B)

    h = 1e-8 * max(abs(z), 1e-12)
    for _ in range(60):
        fz = f(z)
        dfz = (f(z + h) - f(z - h)) / (2 * h)
        if dfz == 0:
            break
        step = fz / dfz
        z -= step
        if abs(step) < 1e-14 * max(abs(z), 1e-12):
            break
    return z if z.real >= 0 else -z


# ---------------------------------------------------------------------------
# Frequency sweeps
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = ("omega", "Omega", "V_long", "atten_long", "V_shear",
                 "atten_shear", "V_heat")


def sweep(omega_grid, params: MaterialParams, rho: float, p: float) -> dict:
    """Evaluate all three branches on a sorted positive frequency grid.

    Returns a dict of equally sized arrays keyed by SWEEP_COLUMNS.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.ndim != 1 or omega_grid.size == 0:
        raise DomainError("sweep needs a nonempty 1-d grid")
    if np.any(omega_grid <= 0.0):
        raise DomainError("sweep needs positive frequencies")
    if omega_grid.size > 1 and np.any(np.diff(omega_grid) <= 0.0):
        raise DomainError("sweep needs a strictly increasing grid")
    T = _rest_temperature(params, rho, p)
    cols = {name: np.zeros(omega_grid.size) for name in SWEEP_COLUMNS}
    has_heat = params.alpha > 0.0 and math.isfinite(params.tau2)
    for i, om in enumerate(omega_grid):
        lo = longitudinal_dispersion(om, params, rho, p)
        sh = shear_dispersion(om, params)
        cols["omega"][i] = om
        cols["Omega"][i] = lo.Omega
        cols["V_long"][i] = lo.V
        cols["atten_long"][i] = lo.atten
        cols["V_shear"][i] = sh.V
        cols["atten_shear"][i] = sh.atten
        cols["V_heat"][i] = (heat_dispersion(om, params, rho, T).V
                             if has_heat else 0.0)
    return cols
