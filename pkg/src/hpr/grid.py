"""Cartesian grids with ghost layers and boundary-condition application.

Boundary surgery is expressed in primitive variables by the system classes
(`ghost_slip`, `ghost_noslip`, `ghost_free_surface` methods); this module owns
the grid bookkeeping and the per-side ghost fill for cell-average fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hpr_system as hs
from .errors import ConfigError


@dataclass(frozen=True)
class CartesianGrid:
    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float
    ghost: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.ghost < 0:
            raise ConfigError("grid needs nx, ny >= 1 and ghost >= 0")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ConfigError("grid extents must be increasing")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    def xc(self, with_ghosts: bool = False) -> np.ndarray:
        g = self.ghost if with_ghosts else 0
        i = np.arange(-g, self.nx + g)
        return self.x0 + (i + 0.5) * self.dx

    def yc(self, with_ghosts: bool = False) -> np.ndarray:
        g = self.ghost if with_ghosts else 0
        j = np.arange(-g, self.ny + g)
        return self.y0 + (j + 0.5) * self.dy

    def centers(self, with_ghosts: bool = False):
        X, Y = np.meshgrid(self.xc(with_ghosts), self.yc(with_ghosts),
                           indexing="ij")
        return X, Y

    def cell_of(self, x: float, y: float):
        i = int(np.clip((x - self.x0) / self.dx, 0, self.nx - 1))
        j = int(np.clip((y - self.y0) / self.dy, 0, self.ny - 1))
        return i, j


# --- boundary-condition kinds ------------------------------------------------

@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Dirichlet:
    """Fixed boundary state: a (nvars,) conserved vector or a callable
    state(x, y, t) -> (nvars, ...) evaluated at ghost-cell centers."""

    state: np.ndarray | Callable

    def evaluate(self, x, y, t):
        if callable(self.state):
            return np.asarray(self.state(x, y, t), dtype=float)
        s = np.asarray(self.state, dtype=float)
        return np.broadcast_to(s.reshape(s.shape + (1,) * np.ndim(x)),
                               s.shape + np.shape(x)).copy()


@dataclass(frozen=True)
class Extrapolate:
    pass


@dataclass(frozen=True)
class SlipWall:
    pass


@dataclass(frozen=True)
class NoSlipWall:
    v_wall: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class FreeSurface:
    pass


@dataclass(frozen=True)
class Custom:
    """Escape hatch for composite boundaries (e.g. a wall with an inflow
    segment): fn(system, inner_cons, axis, side, x, y, t) -> ghost cons."""

    fn: Callable


SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class BoundarySet:
    left: object = field(default_factory=Periodic)
    right: object = field(default_factory=Periodic)
    bottom: object = field(default_factory=Periodic)
    top: object = field(default_factory=Periodic)

    def __post_init__(self):
        for a, b in (("left", "right"), ("bottom", "top")):
            pa = isinstance(getattr(self, a), Periodic)
            pb = isinstance(getattr(self, b), Periodic)
            if pa != pb:
                raise ConfigError(f"periodic boundaries must pair {a}/{b}")

    def side(self, name: str):
        return getattr(self, name)


# --- ghost-state surgery (primitive-variable mirror rules) ------------------

def mirror_signs(axis: int, nvars: int = hs.NVARS) -> np.ndarray:
    """Sign pattern of a slip-type mirror in primitive variables: normal
    velocity, the mixed distortion entries and the normal thermal impulse
    flip; everything else is even."""
    s = np.ones(nvars)
    n = axis
    s[1 + n] = -1.0
    for i in range(3):
        for k in range(3):
            if (i == n) != (k == n):
                s[hs.A0 + 3 * i + k] = -1.0
    s[hs.J0 + n] = -1.0
    return s


def ghost_prim(system, prim_face: np.ndarray, bc, axis: int,
               t: float = 0.0, coords=None) -> np.ndarray:
    """Primitive ghost state from the mirrored interior primitive state."""
    if isinstance(bc, Extrapolate):
        return prim_face.copy()
    if isinstance(bc, Dirichlet):
        if coords is None:
            raise ConfigError("Dirichlet ghost fill needs coordinates")
        q = bc.evaluate(coords[0], coords[1], t)
        return system.cons_to_prim(q)
    if isinstance(bc, SlipWall):
        return system.ghost_slip(prim_face, axis)
    if isinstance(bc, NoSlipWall):
        return system.ghost_noslip(prim_face, axis, bc.v_wall)
    if isinstance(bc, FreeSurface):
        return system.ghost_free_surface(prim_face, axis)
    raise ConfigError(f"unsupported boundary kind {bc!r}")


def hpr_ghost_slip(prim, axis):
    out = prim * mirror_signs(axis, prim.shape[0])[(slice(None),)
                                                   + (None,) * (prim.ndim - 1)]
    return out


def hpr_ghost_noslip(prim, axis, v_wall):
    out = prim.copy()
    vw = np.zeros(3)
    vw[: len(v_wall)] = v_wall
    for i in range(3):
        out[1 + i] = 2.0 * vw[i] - prim[1 + i]
    return out


def hpr_ghost_free_surface(prim, axis):
    out = prim.copy()
    out[4] = -prim[4]  # zero-traction: odd pressure about 0
    sign = mirror_signs(axis, prim.shape[0])
    for r in range(hs.A0, hs.NVARS):
        out[r] = sign[r] * prim[r]
    return out


def elastic_ghost_slip(prim, axis):
    out = prim.copy()
    out[3 + axis] = -prim[3 + axis]
    out[2] = -prim[2]
    return out


def elastic_ghost_noslip(prim, axis, v_wall):
    out = prim.copy()
    vw = np.zeros(2)
    vw[: len(v_wall)] = v_wall
    out[3] = 2.0 * vw[0] - prim[3]
    out[4] = 2.0 * vw[1] - prim[4]
    return out


def elastic_ghost_free_surface(prim, axis):
    out = prim.copy()
    out[2] = -prim[2]          # sxy
    out[axis] = -prim[axis]    # sxx for x-normal, syy for y-normal
    return out


# bind the surgery onto the solver-facing systems
hs.HPRSystem.ghost_slip = staticmethod(hpr_ghost_slip)
hs.HPRSystem.ghost_noslip = staticmethod(hpr_ghost_noslip)
hs.HPRSystem.ghost_free_surface = staticmethod(hpr_ghost_free_surface)
hs.ElasticSystem.ghost_slip = staticmethod(elastic_ghost_slip)
hs.ElasticSystem.ghost_noslip = staticmethod(elastic_ghost_noslip)
hs.ElasticSystem.ghost_free_surface = staticmethod(elastic_ghost_free_surface)


# --- cell-average fields and the ghost fill ---------------------------------

@dataclass
class Field:
    """Cell-average data on a grid, variables first: (nvars, NX, NY) with
    NX = nx + 2 ghost."""

    grid: CartesianGrid
    data: np.ndarray

    @classmethod
    def zeros(cls, grid: CartesianGrid, nvars: int) -> "Field":
        return cls(grid, np.zeros((nvars,
                                   grid.nx + 2 * grid.ghost,
                                   grid.ny + 2 * grid.ghost)))

    @property
    def interior(self) -> np.ndarray:
        g = self.grid.ghost
        if g == 0:
            return self.data
        return self.data[:, g:-g, g:-g]

    @interior.setter
    def interior(self, values):
        g = self.grid.ghost
        if g == 0:
            self.data[...] = values
        else:
            self.data[:, g:-g, g:-g] = values


def fill_ghosts(field: Field, bcs: BoundarySet, system, t: float = 0.0) -> Field:
    """Populate ghost layers in place.  Periodic wraps; walls mirror layer by
    layer with the system's primitive surgery; Dirichlet evaluates the given
    state at ghost centers; Extrapolate copies the boundary cell."""
    g = field.grid.ghost
    if g == 0:
        return field
    d = field.data
    nx, ny = field.grid.nx, field.grid.ny

    def fill_axis(axis: int, lo_bc, hi_bc):
        n = nx if axis == 0 else ny
        if isinstance(lo_bc, Periodic):
            if axis == 0:
                d[:, :g, :] = d[:, n:n + g, :]
                d[:, n + g:, :] = d[:, g:2 * g, :]
            else:
                d[:, :, :g] = d[:, :, n:n + g]
                d[:, :, n + g:] = d[:, :, g:2 * g]
            return
        for side, bc in (("lo", lo_bc), ("hi", hi_bc)):
            for layer in range(g):
                if axis == 0:
                    src = g + layer if side == "lo" else g + n - 1 - layer
                    dst = g - 1 - layer if side == "lo" else g + n + layer
                    if isinstance(bc, Extrapolate):
                        src = g if side == "lo" else g + n - 1
                    inner = d[:, src, :]
                else:
                    src = g + layer if side == "lo" else g + n - 1 - layer
                    dst = g - 1 - layer if side == "lo" else g + n + layer
                    if isinstance(bc, Extrapolate):
                        src = g if side == "lo" else g + n - 1
                    inner = d[:, :, src]
                if isinstance(bc, (Dirichlet, Custom)):
                    if axis == 0:
                        x = np.full(d.shape[2], field.grid.xc(True)[dst])
                        y = field.grid.yc(True)
                    else:
                        x = field.grid.xc(True)
                        y = np.full(d.shape[1], field.grid.yc(True)[dst])
                    if isinstance(bc, Dirichlet):
                        ghost = bc.evaluate(x, y, t)
                    else:
                        ghost = bc.fn(system, inner,
                                      axis, 0 if side == "lo" else 1, x, y, t)
                else:
                    prim = system.cons_to_prim(inner)
                    ghost = system.prim_to_cons(
                        ghost_prim(system, prim, bc, axis, t))
                if axis == 0:
                    d[:, dst, :] = ghost
                else:
                    d[:, :, dst] = ghost

    fill_axis(0, bcs.left, bcs.right)
    fill_axis(1, bcs.bottom, bcs.top)
    return field
