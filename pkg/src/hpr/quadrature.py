"""Gauss-Legendre nodes on [0,1] and nodal Lagrange-basis operators."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre_01(n: int):
    """(nodes, weights) of n-point Gauss-Legendre quadrature on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def lagrange_values(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix L[a, j] = ell_j(x[a]) for the Lagrange basis on `nodes`."""
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodes)
    L = np.ones((len(x), n))
    for j in range(n):
        for m in range(n):
            if m != j:
                L[:, j] *= (x - nodes[m]) / (nodes[j] - nodes[m])
    return L


@lru_cache(maxsize=None)
def diff_matrix(n: int) -> np.ndarray:
    """D[a, j] = ell_j'(xi_a) at the n Gauss-Legendre nodes on [0, 1]."""
    xi, _ = gauss_legendre_01(n)
    D = np.zeros((n, n))
    for j in range(n):
        for a in range(n):
            if a == j:
                D[a, j] = sum(1.0 / (xi[j] - xi[m]) for m in range(n) if m != j)
            else:
                num = 1.0
                for m in range(n):
                    if m != j and m != a:
                        num *= (xi[a] - xi[m]) / (xi[j] - xi[m])
                D[a, j] = num / (xi[j] - xi[a])
    return D


@lru_cache(maxsize=None)
def end_values(n: int):
    """(ell_j(0), ell_j(1)) row vectors for the nodal basis."""
    xi, _ = gauss_legendre_01(n)
    L = lagrange_values(xi, np.array([0.0, 1.0]))
    return L[0].copy(), L[1].copy()


@lru_cache(maxsize=None)
def basis_polynomials(n: int):
    """The nodal basis as numpy Polynomial objects (for exact integrals)."""
    xi, _ = gauss_legendre_01(n)
    polys = []
    for j in range(n):
        p = np.polynomial.Polynomial([1.0])
        for m in range(n):
            if m != j:
                p *= np.polynomial.Polynomial([-xi[m], 1.0]) / (xi[j] - xi[m])
        polys.append(p)
    return polys


@lru_cache(maxsize=None)
def oscillation_matrix(n: int) -> np.ndarray:
    """Sum over derivative orders of int_0^1 ell_j^(a) ell_k^(a) dxi, the
    Sobolev-seminorm quadratic form used as the WENO smoothness indicator."""
    polys = basis_polynomials(n)
    OS = np.zeros((n, n))
    for order in range(1, n):
        derivs = [p.deriv(order) for p in polys]
        for j in range(n):
            for k in range(n):
                OS[j, k] += (derivs[j] * derivs[k]).integ()(1.0)
    return OS
