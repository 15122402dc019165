"""Nonlinear WENO reconstruction from cell averages, dimension by dimension.

Degree-M polynomials are built on one-dimensional stencils of M+1 cells and
blended with nonlinear weights from a Sobolev-seminorm oscillation indicator.
Reconstructed polynomials are stored nodally (values at the M+1 tensor
Gauss-Legendre points per cell), which is the representation the space-time
predictor consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import quadrature as quad
from .errors import ConfigError


@dataclass(frozen=True)
class ReconstructionConfig:
    M: int
    eps: float = 1e-14
    r: int = 8
    lambda_central: float = 1e5
    lambda_sided: float = 1.0

    def __post_init__(self):
        if self.M < 1:
            raise ConfigError("WENO degree M must be >= 1")
        if not self.eps > 0.0 or self.r < 2:
            raise ConfigError("need eps > 0 and r >= 2")


def stencil_offsets(M: int):
    """Left-edge offsets of each (M+1)-cell stencil and its centrality flag."""
    if M == 1:
        return [(-1, False), (0, False)]
    if M % 2 == 0:
        return [(-M, False), (-M // 2, True), (0, False)]
    return [(-M, False), (-(M + 1) // 2, True), (-(M - 1) // 2, True),
            (0, False)]


@lru_cache(maxsize=None)
def _operators(M: int):
    """Per-stencil matrices mapping window averages to nodal values, plus the
    oscillation quadratic form on nodal values."""
    n = M + 1
    xi, w = quad.gauss_legendre_01(n)
    polys = quad.basis_polynomials(n)
    mats = []
    for start, central in stencil_offsets(M):
        Avg = np.zeros((n, n))
        for row, o in enumerate(range(start, start + n)):
            for j, p in enumerate(polys):
                P = p.integ()
                Avg[row, j] = P(o + 1.0) - P(o)
        mats.append((start, central, np.linalg.inv(Avg)))
    OS = quad.oscillation_matrix(n)
    return mats, OS


def reconstruct_1d(window: np.ndarray, config: ReconstructionConfig) -> np.ndarray:
    """Reconstruct one cell from its (..., 2M+1) window of averages.

    Returns nodal values (..., M+1) at the Gauss-Legendre points of the
    central cell.  The blend conserves the central average exactly because
    every stencil polynomial reproduces it exactly.
    """
    window = np.asarray(window, dtype=float)
    M = config.M
    if window.shape[-1] != 2 * M + 1:
        raise ConfigError(f"window must span 2M+1 = {2 * M + 1} cells")
    return _blend(window[..., None, :], config)[..., 0, :]


def _blend(windows: np.ndarray, config: ReconstructionConfig) -> np.ndarray:
    """Core WENO blend for windows shaped (..., ncells, 2M+1)."""
    M = config.M
    mats, OS = _operators(M)
    num = 0.0
    den = 0.0
    for start, central, R in mats:
        lo = M + start
        vals = windows[..., lo:lo + M + 1] @ R.T
        os_s = np.einsum("...i,ij,...j->...", vals, OS, vals)
        lam = config.lambda_central if central else config.lambda_sided
        wgt = lam / (os_s + config.eps) ** config.r
        num = num + wgt[..., None] * vals
        den = den + wgt
    return num / den[..., None]


def reconstruct_sweep(data: np.ndarray, config: ReconstructionConfig,
                      n_out: int, ghost: int) -> np.ndarray:
    """Reconstruct along the last axis of `data` for the n_out interior
    cells, given `ghost` ghost cells on each end (ghost >= M).

    Input (..., n_out + 2 ghost) -> output (..., n_out, M+1).
    """
    M = config.M
    if ghost < M:
        raise ConfigError(f"WENO degree {M} needs at least {M} ghost cells")
    lead = data.shape[:-1]
    skip = ghost - M
    span = data[..., skip: skip + n_out + 2 * M]
    windows = sliding_window_view(span, 2 * M + 1, axis=-1)
    assert windows.shape == lead + (n_out, 2 * M + 1)
    return _blend(windows, config)


def reconstruct_field(data: np.ndarray, config: ReconstructionConfig,
                      nx: int, ny: int, ghost: int) -> np.ndarray:
    """Tensor-product reconstruction of a (nvars, NX, NY) average field.

    x-sweep first, then a y-sweep applied to each x-node coefficient plane;
    returns (nvars, nx, ny, M+1, M+1) nodal values.
    """
    M = config.M
    # x-sweep over all y rows (ghosts included so the y-sweep has support)
    tmp = reconstruct_sweep(np.moveaxis(data, 1, -1), config, nx, ghost)
    # tmp: (nvars, NY, nx, M+1) with y still averaged
    tmp = np.moveaxis(tmp, 1, -1)           # (nvars, nx, M+1, NY)
    out = reconstruct_sweep(tmp, config, ny, ghost)
    # out: (nvars, nx, M+1x, ny, M+1y) -> (nvars, nx, ny, M+1x, M+1y)
    return np.moveaxis(out, 2, 3)


def evaluate_nodal(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate a nodal polynomial (..., M+1) at reference points x."""
    n = values.shape[-1]
    xi, _ = quad.gauss_legendre_01(n)
    L = quad.lagrange_values(xi, x)
    return values @ L.T


def cell_average(values: np.ndarray) -> np.ndarray:
    """Average over the cell of a nodal polynomial (..., M+1)."""
    _, w = quad.gauss_legendre_01(values.shape[-1])
    return values @ w
