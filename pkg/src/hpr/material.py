"""Equations of state, constitutive closures and relaxation-time maps.

All operations are pure functions of their inputs and broadcast over leading
array axes; tensors use trailing (..., 3, 3) axes and vectors (..., 3).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateDistortionError,
    DomainError,
    InconsistentParametersError,
    NoRealSolutionError,
)

EYE3 = np.eye(3)


def det3(A):
    """Closed-form determinant of (..., 3, 3) arrays (faster than LAPACK
    dispatch for tiny batched matrices)."""
    A = np.asarray(A)
    return (A[..., 0, 0] * (A[..., 1, 1] * A[..., 2, 2]
                            - A[..., 1, 2] * A[..., 2, 1])
            - A[..., 0, 1] * (A[..., 1, 0] * A[..., 2, 2]
                              - A[..., 1, 2] * A[..., 2, 0])
            + A[..., 0, 2] * (A[..., 1, 0] * A[..., 2, 1]
                              - A[..., 1, 1] * A[..., 2, 0]))


def inv3(A):
    """Closed-form inverse of (..., 3, 3) arrays via the adjugate."""
    A = np.asarray(A)
    out = np.empty_like(A)
    out[..., 0, 0] = A[..., 1, 1] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 1]
    out[..., 0, 1] = A[..., 0, 2] * A[..., 2, 1] - A[..., 0, 1] * A[..., 2, 2]
    out[..., 0, 2] = A[..., 0, 1] * A[..., 1, 2] - A[..., 0, 2] * A[..., 1, 1]
    out[..., 1, 0] = A[..., 1, 2] * A[..., 2, 0] - A[..., 1, 0] * A[..., 2, 2]
    out[..., 1, 1] = A[..., 0, 0] * A[..., 2, 2] - A[..., 0, 2] * A[..., 2, 0]
    out[..., 1, 2] = A[..., 0, 2] * A[..., 1, 0] - A[..., 0, 0] * A[..., 1, 2]
    out[..., 2, 0] = A[..., 1, 0] * A[..., 2, 1] - A[..., 1, 1] * A[..., 2, 0]
    out[..., 2, 1] = A[..., 0, 1] * A[..., 2, 0] - A[..., 0, 0] * A[..., 2, 1]
    out[..., 2, 2] = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    return out / det3(A)[..., None, None]


class EosKind(enum.Enum):
    IDEAL_GAS = "ideal"
    STIFFENED_GAS = "stiffened"


@dataclass(frozen=True)
class MaterialParams:
    """EOS constants plus mesoscopic and relaxation parameters.

    ``tau1``/``tau2`` may be ``math.inf`` (elastic solid / frozen thermal
    impulse); the relaxation sources then short-circuit to zero.  ``p0`` and
    ``c0`` are only meaningful for the stiffened-gas EOS.
    """

    gamma: float
    cv: float
    rho0: float
    cs: float = 0.0
    alpha: float = 0.0
    T0: float = 1.0
    tau1: float = math.inf
    tau2: float = math.inf
    eos_kind: EosKind = EosKind.IDEAL_GAS
    p0: float = 0.0
    c0: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.cv > 0.0:
            raise DomainError(f"cv must be positive, got {self.cv}")
        if not self.rho0 > 0.0:
            raise DomainError(f"rho0 must be positive, got {self.rho0}")
        if self.cs < 0.0 or self.alpha < 0.0:
            raise DomainError("cs and alpha must be nonnegative")
        if not self.tau1 > 0.0 or not self.tau2 > 0.0:
            raise DomainError("relaxation times must be positive (inf allowed)")
        if self.eos_kind is EosKind.STIFFENED_GAS and not self.c0 > 0.0:
            raise DomainError("stiffened gas requires a positive reference c0")

    @property
    def k0(self) -> float:
        """Stiffened-gas constant (rho0*c0^2 - gamma*p0)/gamma; 0 for ideal gas."""
        if self.eos_kind is EosKind.IDEAL_GAS:
            return 0.0
        return (self.rho0 * self.c0**2 - self.gamma * self.p0) / self.gamma

    def with_transport(self, mu: float, kappa: float) -> "MaterialParams":
        """Return a copy with tau1/tau2 set from (mu, kappa)."""
        tau1, tau2 = relaxation_from_transport(mu, kappa, self)
        return replace(
            self,
            tau1=tau1 if tau1 > 0.0 else self.tau1,
            tau2=tau2 if tau2 > 0.0 else self.tau2,
        )


# ---------------------------------------------------------------------------
# Equilibrium EOS
# ---------------------------------------------------------------------------

def internal_energy(params: MaterialParams, rho, s):
    """Specific equilibrium energy E1(rho, s)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("internal_energy requires rho > 0")
    g, cv = params.gamma, params.cv
    if params.eos_kind is EosKind.IDEAL_GAS:
        return rho ** (g - 1.0) * np.exp(np.asarray(s) / cv) / (g - 1.0)
    c0sq = params.c0**2
    return (
        c0sq / (g * (g - 1.0))
        * (rho / params.rho0) ** (g - 1.0)
        * np.exp(np.asarray(s) / cv)
        + params.k0 / rho
    )


def pressure_temperature(params: MaterialParams, rho, E1):
    """Closed-form inversion (p, T) from (rho, E1)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("pressure_temperature requires rho > 0")
    g, cv = params.gamma, params.cv
    E1 = np.asarray(E1, dtype=float)
    if params.eos_kind is EosKind.IDEAL_GAS:
        return (g - 1.0) * rho * E1, E1 / cv
    k0 = params.k0
    core = E1 - k0 / rho
    return (g - 1.0) * rho * core - k0, core / cv


def entropy(params: MaterialParams, rho, p):
    """Specific entropy from (rho, p); diagnostic inverse of the EOS."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("entropy requires rho > 0")
    g, cv = params.gamma, params.cv
    if params.eos_kind is EosKind.IDEAL_GAS:
        return cv * np.log(p * rho ** (-g))
    arg = g * (p + params.k0) / (rho * params.c0**2) * (params.rho0 / rho) ** (g - 1.0)
    return cv * np.log(arg)


def sound_speed_sq(params: MaterialParams, rho, p):
    """Adiabatic sound speed squared at (rho, p)."""
    if params.eos_kind is EosKind.IDEAL_GAS:
        return params.gamma * np.asarray(p) / np.asarray(rho)
    return params.gamma * (np.asarray(p) + params.k0) / np.asarray(rho)


# ---------------------------------------------------------------------------
# Mesoscopic closures
# ---------------------------------------------------------------------------

def metric_tensor(A):
    """G = A^T A for (..., 3, 3) distortion fields."""
    A = np.asarray(A, dtype=float)
    return np.matmul(np.swapaxes(A, -1, -2), A)


def deviator(G):
    """Trace-free part of a (..., 3, 3) symmetric tensor."""
    G = np.asarray(G, dtype=float)
    tr = G[..., 0, 0] + G[..., 1, 1] + G[..., 2, 2]
    return G - tr[..., None, None] / 3.0 * EYE3


def shear_stress(rho, A, cs):
    """Viscous stress sigma = -rho cs^2 G dev(G); symmetric by construction."""
    G = metric_tensor(A)
    devG = deviator(G)
    GdevG = np.matmul(G, devG)
    return -np.asarray(rho)[..., None, None] * cs**2 * GdevG


def strain_dissipation_force(A, cs):
    """psi = cs^2 A dev(G), the energy gradient with respect to A."""
    A = np.asarray(A, dtype=float)
    return cs**2 * np.matmul(A, deviator(metric_tensor(A)))


def strain_source(A, tau1, cs=None):
    """Relaxation rate for A: -3/tau1 |A|^{5/3} A dev(G).

    ``cs`` is accepted for symmetry with -psi/theta1 but cancels exactly
    between psi and theta1.  Returns zeros when tau1 is infinite.
    """
    A = np.asarray(A, dtype=float)
    if math.isinf(tau1):
        return np.zeros_like(A)
    det = det3(A)
    if np.any(det <= 0.0):
        raise DegenerateDistortionError("strain_source requires det(A) > 0")
    AdevG = np.matmul(A, deviator(metric_tensor(A)))
    return -3.0 / tau1 * det[..., None, None] ** (5.0 / 3.0) * AdevG


def strain_source_jacobian(A, tau1):
    """d(strain_source)/dA as a (..., 3, 3, 3, 3) array, [i,k,m,n] layout."""
    A = np.asarray(A, dtype=float)
    shape = A.shape[:-2]
    if math.isinf(tau1):
        return np.zeros(shape + (3, 3, 3, 3))
    det = det3(A)
    if np.any(det <= 0.0):
        raise DegenerateDistortionError("strain_source_jacobian requires det(A) > 0")
    d53 = det ** (5.0 / 3.0)
    Ainv = inv3(A)
    devG = deviator(metric_tensor(A))
    M = np.einsum("...ia,...ak->...ik", A, devG)
    AAt = np.einsum("...ia,...ma->...im", A, A)
    eye = EYE3
    term = (
        5.0 / 3.0 * np.einsum("...,...nm,...ik->...ikmn", d53, Ainv, M)
        + np.einsum("...,im,...nk->...ikmn", d53, eye, devG)
        + np.einsum("...,...in,...mk->...ikmn", d53, A, A)
        + np.einsum("...,kn,...im->...ikmn", d53, eye, AAt)
        - 2.0 / 3.0 * np.einsum("...,...ik,...mn->...ikmn", d53, A, A)
    )
    return -3.0 / tau1 * term


def heat_flux(T, J, alpha):
    """q = alpha^2 T J."""
    return alpha**2 * np.asarray(T)[..., None] * np.asarray(J, dtype=float)


def thermal_source(rho, J, T, params: MaterialParams):
    """Relaxation rate for rho*J: -(T/T0)(rho0/rho) rho J / tau2."""
    J = np.asarray(J, dtype=float)
    if np.any(np.asarray(rho) <= 0.0) or params.T0 <= 0.0:
        raise DomainError("thermal_source requires rho > 0 and T0 > 0")
    if math.isinf(params.tau2):
        return np.zeros_like(J)
    coeff = -np.asarray(T) / params.T0 * params.rho0 / params.tau2
    return coeff[..., None] * J


# ---------------------------------------------------------------------------
# Transport-coefficient maps
# ---------------------------------------------------------------------------

def relaxation_from_transport(mu: float, kappa: float, params: MaterialParams):
    """(tau1, tau2) from mu = tau1 rho0 cs^2/6 and kappa = alpha^2 tau2 T0/rho0.

    A vanishing coefficient maps to tau = 0 (not +inf); callers route
    inviscid/adiabatic runs to Euler mode or an explicit tau themselves.
    """
    if mu < 0.0 or kappa < 0.0:
        raise DomainError("transport coefficients must be nonnegative")
    if mu > 0.0 and params.cs == 0.0:
        raise InconsistentParametersError("mu > 0 requires cs > 0")
    if kappa > 0.0 and params.alpha == 0.0:
        raise InconsistentParametersError("kappa > 0 requires alpha > 0")
    tau1 = 6.0 * mu / (params.rho0 * params.cs**2) if mu > 0.0 else 0.0
    tau2 = kappa * params.rho0 / (params.alpha**2 * params.T0) if kappa > 0.0 else 0.0
    return tau1, tau2


def transport_from_relaxation(params: MaterialParams):
    """(mu, kappa) implied by the stored relaxation times."""
    mu = params.tau1 * params.rho0 * params.cs**2 / 6.0
    kappa = params.alpha**2 * params.tau2 * params.T0 / params.rho0
    return mu, kappa


def fit_cs_from_limits(c0: float, cinf: float) -> float:
    """Shear speed from measured low/high-frequency longitudinal speeds."""
    if not cinf > c0:
        raise NoRealSolutionError(
            f"c_inf = {cinf} must exceed c0 = {c0} for a real shear speed")
    return math.sqrt(3.0 * (cinf**2 - c0**2) / 4.0)


def high_frequency_speed(c0: float, cs: float) -> float:
    """Longitudinal high-frequency limit sqrt(c0^2 + 4 cs^2 / 3)."""
    return math.sqrt(c0**2 + 4.0 * cs**2 / 3.0)


# ---------------------------------------------------------------------------
# Thermodynamic state bundle
# ---------------------------------------------------------------------------

@dataclass
class Thermo:
    """All pointwise constitutive quantities derived from one state."""

    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray
    T: np.ndarray
    s: np.ndarray
    sigma: np.ndarray
    q: np.ndarray
    psi: np.ndarray
    H: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    G: np.ndarray
    devG: np.ndarray

    @classmethod
    def from_state(cls, params: MaterialParams, rho, v, A, J, p) -> "Thermo":
        rho = np.asarray(rho, dtype=float)
        v = np.asarray(v, dtype=float)
        A = np.asarray(A, dtype=float)
        J = np.asarray(J, dtype=float)
        p = np.asarray(p, dtype=float)
        g = params.gamma
        if params.eos_kind is EosKind.IDEAL_GAS:
            E1 = p / ((g - 1.0) * rho)
            T = E1 / params.cv
        else:
            core = (p + params.k0) / ((g - 1.0) * rho)
            E1 = core + params.k0 / rho
            T = core / params.cv
        s = entropy(params, rho, p)
        G = metric_tensor(A)
        devG = deviator(G)
        psi = params.cs**2 * np.einsum("...im,...mk->...ik", A, devG)
        sigma = -rho[..., None, None] * params.cs**2 * np.einsum(
            "...im,...mk->...ik", G, devG)
        H = params.alpha**2 * J
        q = T[..., None] * H
        E2 = (params.cs**2 / 4.0 * np.einsum("...ik,...ik->...", devG, devG)
              + params.alpha**2 / 2.0 * np.einsum("...i,...i->...", J, J))
        E3 = 0.5 * np.einsum("...i,...i->...", v, v)
        det = det3(A)
        theta1 = np.asarray(params.tau1 * params.cs**2 / 3.0
                            * det ** (-5.0 / 3.0))
        theta2 = np.asarray(params.tau2 * params.alpha**2 * rho / params.rho0
                            * params.T0 / T)
        return cls(E1=E1, E2=E2, E3=E3, T=T, s=s, sigma=sigma, q=q, psi=psi,
                   H=H, theta1=theta1, theta2=theta2, G=G, devG=devG)

    def entropy_production(self, rho) -> np.ndarray:
        """rho/(theta1 T) psi:psi + rho/(theta2 T) H.H; zero for tau = inf."""
        rho = np.asarray(rho, dtype=float)
        psi2 = np.einsum("...ik,...ik->...", self.psi, self.psi)
        H2 = np.einsum("...i,...i->...", self.H, self.H)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(np.isfinite(self.theta1) & (self.theta1 > 0.0),
                          rho / (self.theta1 * self.T) * psi2, 0.0)
            t2 = np.where(np.isfinite(self.theta2) & (self.theta2 > 0.0),
                          rho / (self.theta2 * self.T) * H2, 0.0)
        return t1 + t2
