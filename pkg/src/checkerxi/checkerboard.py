"""Closed-form association measures for checkerboard, check-min and check-w
copulas built on a checkerboard matrix.

All measures are computed with cumulative-sum sweeps in O(mn); the matrix
(trace) forms are available through :func:`structure_matrices` for
cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._random import generator
from .core import (
    CheckerboardFamily,
    CheckerboardMatrix,
    Family,
    MeasureReport,
    SampleSet,
    Source,
    XiFamily,
)
from .errors import OutOfDomain


def _family(fam) -> CheckerboardFamily:
    return CheckerboardFamily(getattr(fam, "value", fam))


def _xi_family(fam) -> XiFamily:
    value = getattr(fam, "value", fam)
    if value in (CheckerboardFamily.MIN.value, CheckerboardFamily.W.value):
        return XiFamily.PERFECT_DEPENDENCE
    return XiFamily(value)


def _ratio(arr: np.ndarray, num: int, den: int):
    return Fraction(num, den) if arr.dtype == object else num / den


def _exclusive_cumsum(a: np.ndarray, axis: int, reverse: bool = False) -> np.ndarray:
    """Sum of the strictly preceding (or following) entries along ``axis``."""
    if reverse:
        a = np.flip(a, axis=axis)
    out = np.cumsum(a, axis=axis) - a
    return np.flip(out, axis=axis) if reverse else out


@dataclass(frozen=True)
class XiStructureMatrices:
    """Matrices of the trace forms: ``T``, ``M_xi``, ``Xi_m``, ``Xi_n`` and the
    Spearman weights ``Omega_rho`` (all as exact Fraction object arrays)."""

    T: np.ndarray
    M_xi: np.ndarray
    Xi_m: np.ndarray
    Xi_n: np.ndarray
    Omega_rho: np.ndarray


def _xi_pattern(size: int) -> np.ndarray:
    idx = np.arange(size)
    return np.where(idx[:, None] > idx[None, :], 2, np.where(idx[:, None] == idx[None, :], 1, 0))


def structure_matrices(m: int, n: int) -> XiStructureMatrices:
    idx = np.arange(n)
    T = (idx[:, None] < idx[None, :]).astype(int)
    third = np.full((n, n), Fraction(0), dtype=object)
    np.fill_diagonal(third, Fraction(1, 3))
    M_xi = (T @ T.T + T.T).astype(object) + third
    rows = np.array([2 * (m - i) + 1 for i in range(1, m + 1)], dtype=object)
    cols = np.array([2 * (n - j) + 1 for j in range(1, n + 1)], dtype=object)
    omega = np.outer(rows, cols) * Fraction(1, m * n)
    return XiStructureMatrices(
        T=T, M_xi=M_xi, Xi_m=_xi_pattern(m), Xi_n=_xi_pattern(n), Omega_rho=omega
    )


# -- measure sums on raw arrays (shared with the sample estimators) ----------


def xi_sum(entries: np.ndarray):
    """``tr(D^T D M_xi)`` as ``sum (P^2 + P D + D^2 / 3)`` with ``P`` the
    exclusive row-wise cumulative sum of ``D``."""
    prefix = _exclusive_cumsum(entries, axis=1)
    return (prefix * prefix + prefix * entries).sum() + (entries * entries).sum() * _ratio(entries, 1, 3)


def squared_mass(entries: np.ndarray):
    """``tr(D^T D)``, the sum of squared cell masses."""
    return (entries * entries).sum()


def xi_pi_raw(entries: np.ndarray):
    m, n = entries.shape
    return 6 * _ratio(entries, m, n) * xi_sum(entries) - 2


# -- closed forms -------------------------------------------------------------


def rho_checkerboard(delta: CheckerboardMatrix, fam) -> float:
    """Spearman's rho of the checkerboard-type copula of ``delta``."""
    fam = _family(fam)
    e = delta.entries
    m, n = delta.shape
    rows = np.array([2 * (m - i) + 1 for i in range(1, m + 1)])
    cols = np.array([2 * (n - j) + 1 for j in range(1, n + 1)])
    if delta.exact:
        rows, cols = rows.astype(object), cols.astype(object)
    weighted = (rows @ e @ cols) * _ratio(e, 1, m * n)
    rho = 3 * weighted - 3
    if fam is CheckerboardFamily.MIN:
        rho = rho + _ratio(e, 1, m * n)
    elif fam is CheckerboardFamily.W:
        rho = rho - _ratio(e, 1, m * n)
    return rho


def tau_checkerboard(delta: CheckerboardMatrix, fam) -> float:
    """Kendall's tau of the checkerboard-type copula of ``delta``."""
    fam = _family(fam)
    e = delta.entries
    # (Xi_m D)_{ij} = 2 sum_{k<i} D_kj + D_ij, then right-multiply by Xi_n
    left = 2 * _exclusive_cumsum(e, axis=0) + e
    both = 2 * _exclusive_cumsum(left, axis=1, reverse=True) + left
    tau = 1 - (both * e).sum()
    if fam is CheckerboardFamily.MIN:
        tau = tau + squared_mass(e)
    elif fam is CheckerboardFamily.W:
        tau = tau - squared_mass(e)
    return tau


def xi_checkerboard(delta: CheckerboardMatrix, fam) -> float:
    """Chatterjee's xi of ``C^delta_Pi`` (``fam='pi'``) or of any perfect
    dependence copula on ``delta`` (``fam='pd'``, ``'min'`` or ``'w'``)."""
    fam = _xi_family(fam)
    e = delta.entries
    xi = xi_pi_raw(e)
    if fam is XiFamily.PERFECT_DEPENDENCE:
        m, n = delta.shape
        xi = xi + _ratio(e, m, n) * squared_mass(e)
    return xi


def tail_coefficients(delta: CheckerboardMatrix, fam) -> tuple[float, float]:
    fam = _family(fam)
    if fam is not CheckerboardFamily.MIN:
        zero = Fraction(0) if delta.exact else 0.0
        return zero, zero
    k = min(delta.m, delta.n)
    return delta.entries[0, 0] * k, delta.entries[-1, -1] * k


def xi_gap_bound(delta: CheckerboardMatrix):
    """Upper bound on ``|xi(C_pd) - xi(C_Pi)|`` for an ``m x n`` grid."""
    m, n = delta.shape
    e = delta.entries
    return _ratio(e, m, n * n) if m <= n else _ratio(e, 1, n)


def measures(delta: CheckerboardMatrix, fam) -> MeasureReport:
    fam = _family(fam)
    lo, up = tail_coefficients(delta, fam)
    return MeasureReport(
        rho_s=float(rho_checkerboard(delta, fam)),
        tau=float(tau_checkerboard(delta, fam)),
        xi=float(xi_checkerboard(delta, fam)),
        lambda_lower=float(lo),
        lambda_upper=float(up),
        family=Family(fam.value),
        source=Source.CLOSED_FORM,
    )


# -- CDF evaluation -----------------------------------------------------------


def _locate(delta: CheckerboardMatrix, u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if np.any((u < 0) | (u > 1) | np.isnan(u)) or np.any((v < 0) | (v > 1) | np.isnan(v)):
        bad = np.broadcast_to((u < 0) | (u > 1) | (v < 0) | (v > 1) | np.isnan(u + v), np.broadcast(u, v).shape)
        k = np.flatnonzero(bad)[0]
        raise OutOfDomain(float(np.broadcast_to(u, bad.shape).flat[k]), float(np.broadcast_to(v, bad.shape).flat[k]))
    m, n = delta.shape
    i = np.minimum(np.floor(m * u).astype(np.int64), m - 1)
    j = np.minimum(np.floor(n * v).astype(np.int64), n - 1)
    return u, v, i, j, m * u - i, n * v - j


def _prefix_table(entries: np.ndarray) -> np.ndarray:
    m, n = entries.shape
    table = np.zeros((m + 1, n + 1))
    table[1:, 1:] = np.cumsum(np.cumsum(entries.astype(np.float64), axis=0), axis=1)
    return table


def eval_cdf(delta: CheckerboardMatrix, fam, u, v):
    """Evaluate the checkerboard-type copula at ``(u, v)`` (scalars or arrays).

    Cells are half-open ``[(i-1)/m, i/m)``; the edge ``u = 1`` belongs to the
    last cell.
    """
    fam = _family(fam)
    u, v, i, j, s, t = _locate(delta, u, v)
    table = _prefix_table(delta.entries)
    base = table[i, j]
    above = table[i, j + 1] - base
    left = table[i + 1, j] - base
    cell = delta.entries.astype(np.float64)[i, j]
    if fam is CheckerboardFamily.PI:
        inner = s * t
    elif fam is CheckerboardFamily.MIN:
        inner = np.minimum(s, t)
    else:
        inner = np.maximum(s + t - 1, 0.0)
    out = base + above * t + left * s + cell * inner
    return float(out) if out.ndim == 0 else out


def eval_partial1(delta: CheckerboardMatrix, fam, u, v):
    """Exact ``d/du C(u, v)`` (right-continuous choice at jumps)."""
    fam = _family(fam)
    u, v, i, j, s, t = _locate(delta, u, v)
    table = _prefix_table(delta.entries)
    left = table[i + 1, j] - table[i, j]
    cell = delta.entries.astype(np.float64)[i, j]
    if fam is CheckerboardFamily.PI:
        slope = t
    elif fam is CheckerboardFamily.MIN:
        slope = (s < t).astype(np.float64)
    else:
        slope = (s + t > 1).astype(np.float64)
    out = delta.m * (left + cell * slope)
    return float(out) if out.ndim == 0 else out


def eval_partial2(delta: CheckerboardMatrix, fam, u, v):
    """Exact ``d/dv C(u, v)``."""
    fam = _family(fam)
    u, v, i, j, s, t = _locate(delta, u, v)
    table = _prefix_table(delta.entries)
    above = table[i, j + 1] - table[i, j]
    cell = delta.entries.astype(np.float64)[i, j]
    if fam is CheckerboardFamily.PI:
        slope = s
    elif fam is CheckerboardFamily.MIN:
        slope = (t < s).astype(np.float64)
    else:
        slope = (s + t > 1).astype(np.float64)
    out = delta.n * (above + cell * slope)
    return float(out) if out.ndim == 0 else out


def sample_checkerboard(delta: CheckerboardMatrix, fam, count: int, seed: int) -> SampleSet:
    """Exact draws from the checkerboard-type copula of ``delta``."""
    fam = _family(fam)
    m, n = delta.shape
    rng = generator(seed)
    probs = delta.entries.astype(np.float64).ravel()
    cells = rng.choice(probs.size, size=count, p=probs / probs.sum())
    i, j = np.divmod(cells, n)
    s = rng.random(count)
    if fam is CheckerboardFamily.PI:
        t = rng.random(count)
    elif fam is CheckerboardFamily.MIN:
        t = s
    else:
        t = 1.0 - s
    return SampleSet((i + s) / m, (j + t) / n)
