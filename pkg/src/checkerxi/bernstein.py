"""Bernstein copulas of a grid copula matrix and their closed-form
Spearman's rho, Kendall's tau and Chatterjee's xi."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .core import Family, GridCopulaMatrix, MeasureReport, Source
from .errors import OutOfDomain


@dataclass(frozen=True)
class BernsteinCoefficients:
    """Coefficient matrices for an ``m x n`` Bernstein copula.

    ``gamma`` (m x n) enters rho, ``theta_m``/``theta_n`` enter tau, and the
    derivative/basis Gram matrices ``omega_b`` (m x m) and ``lam`` (n x n)
    enter xi.
    """

    gamma: np.ndarray
    theta_m: np.ndarray
    theta_n: np.ndarray
    omega_b: np.ndarray
    lam: np.ndarray


def _theta_entry(m: int, i: int, j: int) -> Fraction:
    num = (i - j) * comb(m, i) * comb(m, j)
    den = (2 * m - i - j) * comb(2 * m - 1, i + j - 1)
    if den == 0:
        # only i = j = m; 0/0 is taken as 1
        return Fraction(1)
    return Fraction(num, den)


def _omega_entry(m: int, i: int, r: int) -> Fraction:
    if i == m and r == m:
        return Fraction(m * m, 2 * m - 1)
    if i < m and r < m:
        scale = Fraction(comb(m, i) * comb(m, r), (2 * m - 3) * comb(2 * m - 4, i + r - 2))
        return scale * (i * r - Fraction(2 * m * (m - 1) * comb(i + r, 2), (2 * m - 1) * (2 * m - 2)))
    k = i if i < m else r
    return Fraction(
        m * (m - 1) * (k - m) * comb(m, k),
        (2 * m - 1) * (2 * m - 2) * comb(2 * m - 3, m + k - 2),
    )


def _lambda_entry(n: int, j: int, s: int) -> Fraction:
    return Fraction(comb(n, j) * comb(n, s), (2 * n + 1) * comb(2 * n, j + s))


def _build(size: int, entry) -> np.ndarray:
    out = np.array(
        [[float(entry(size, a, b)) for b in range(1, size + 1)] for a in range(1, size + 1)]
    )
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _theta(m: int) -> np.ndarray:
    return _build(m, _theta_entry)


@lru_cache(maxsize=None)
def _omega(m: int) -> np.ndarray:
    return _build(m, _omega_entry)


@lru_cache(maxsize=None)
def _lambda(n: int) -> np.ndarray:
    return _build(n, _lambda_entry)


def bernstein_coefficients(m: int, n: int) -> BernsteinCoefficients:
    """Coefficient matrices, evaluated exactly in rational arithmetic and
    rounded once to float. Results are memoised per size."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    gamma = np.full((m, n), 1.0 / ((m + 1) * (n + 1)))
    gamma.setflags(write=False)
    return BernsteinCoefficients(
        gamma=gamma, theta_m=_theta(m), theta_n=_theta(n), omega_b=_omega(m), lam=_lambda(n)
    )


# -- basis polynomials ----------------------------------------------------------


def _check_domain(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    bad = (u < 0) | (u > 1) | (v < 0) | (v > 1) | np.isnan(u + v)
    if np.any(bad):
        k = np.flatnonzero(np.broadcast_to(bad, np.broadcast(u, v).shape))[0]
        raise OutOfDomain(float(np.broadcast_to(u, bad.shape).flat[k]), float(np.broadcast_to(v, bad.shape).flat[k]))
    return u, v


def basis(m: int, x) -> np.ndarray:
    """``B_{i,m}(x)`` for ``i = 1..m``, stacked on the last axis."""
    x = np.asarray(x, dtype=np.float64)[..., None]
    i = np.arange(1, m + 1)
    coef = np.array([comb(m, k) for k in i], dtype=np.float64)
    return coef * x**i * (1.0 - x) ** (m - i)


def basis_derivative(m: int, x) -> np.ndarray:
    """``d/dx B_{i,m}(x)`` for ``i = 1..m``."""
    x = np.asarray(x, dtype=np.float64)[..., None]
    i = np.arange(1, m)
    coef = np.array([comb(m, k) for k in i], dtype=np.float64)
    inner = coef * (i - m * x) * x ** (i - 1) * (1.0 - x) ** (m - i - 1)
    last = m * x ** (m - 1)
    return np.concatenate([inner, last], axis=-1)


def _contract(left: np.ndarray, d: np.ndarray, right: np.ndarray):
    out = np.einsum("...i,ij,...j->...", left, d, right)
    return float(out) if out.ndim == 0 else out


def eval_bernstein_cdf(grid: GridCopulaMatrix, u, v):
    u, v = _check_domain(u, v)
    return _contract(basis(grid.m, u), grid.entries, basis(grid.n, v))


def eval_bernstein_partial1(grid: GridCopulaMatrix, u, v):
    u, v = _check_domain(u, v)
    return _contract(basis_derivative(grid.m, u), grid.entries, basis(grid.n, v))


def eval_bernstein_partial2(grid: GridCopulaMatrix, u, v):
    u, v = _check_domain(u, v)
    return _contract(basis(grid.m, u), grid.entries, basis_derivative(grid.n, v))


# -- closed forms ------------------------------------------------------------------


def rho_bernstein(grid: GridCopulaMatrix) -> float:
    coef = bernstein_coefficients(grid.m, grid.n)
    return float(12.0 * np.sum(coef.gamma * grid.entries) - 3.0)


def tau_bernstein(grid: GridCopulaMatrix) -> float:
    coef = bernstein_coefficients(grid.m, grid.n)
    d = grid.entries
    return float(1.0 - np.trace(coef.theta_m @ d @ coef.theta_n @ d.T))


def xi_bernstein(grid: GridCopulaMatrix) -> float:
    coef = bernstein_coefficients(grid.m, grid.n)
    d = grid.entries
    return float(6.0 * np.sum((coef.omega_b @ d) * (d @ coef.lam)) - 2.0)


def tail_bernstein(grid: GridCopulaMatrix) -> tuple[float, float]:
    # bounded density: no tail dependence
    return 0.0, 0.0


def measures(grid: GridCopulaMatrix) -> MeasureReport:
    return MeasureReport(
        rho_s=rho_bernstein(grid),
        tau=tau_bernstein(grid),
        xi=xi_bernstein(grid),
        lambda_lower=0.0,
        lambda_upper=0.0,
        family=Family.BERNSTEIN,
        source=Source.CLOSED_FORM,
    )
