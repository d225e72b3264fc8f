"""Brute-force numeric evaluation of association measures.

Everything here works from a copula's CDF and its exact partial
derivatives only, so it serves as an independent check on the closed forms.
Integrals over the unit square use tensor Gauss-Legendre rules on each cell
of a partition; the inner (``v``) integral is additionally split at
evaluator-supplied kink lines so that piecewise-polynomial integrands with
jumps or kinks inside a cell are still integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._random import generator, standard_normal
from .bernstein import eval_bernstein_cdf, eval_bernstein_partial1, eval_bernstein_partial2
from .checkerboard import eval_cdf, eval_partial1, eval_partial2, sample_checkerboard
from .core import (
    CheckerboardFamily,
    CheckerboardMatrix,
    Family,
    GridCopulaMatrix,
    MeasureReport,
    Permutation,
    SampleSet,
    Source,
)
from .errors import MissingPartial, NoConvergence
from .shuffle import (
    eval_shuffle_cdf,
    eval_shuffle_partial1,
    eval_shuffle_partial2,
    sample_shuffle,
    segment_offsets,
)

Surface = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CopulaEvaluator:
    """A copula given by callables.

    ``kinks(u)`` returns, for each ``u`` in a 1-d array, the ``v`` locations
    (shape ``(len(u), K)``) where the integrands may be non-smooth inside a
    cell; ``cell_grid`` marks the cell boundaries.
    """

    cdf: Surface
    partial1: Optional[Surface] = None
    partial2: Optional[Surface] = None
    sampler: Optional[Callable[[int, int], SampleSet]] = None
    cell_grid: tuple[int, int] = (1, 1)
    kinks: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "copula"

    def check_boundary(self, points: int = 33, tol: float = 1e-12) -> bool:
        """Groundedness and uniform marginals on a 1-d probe grid."""
        t = np.linspace(0.0, 1.0, points)
        zero, one = np.zeros_like(t), np.ones_like(t)
        return bool(
            np.all(np.abs(self.cdf(t, zero)) <= tol)
            and np.all(np.abs(self.cdf(zero, t)) <= tol)
            and np.all(np.abs(self.cdf(t, one) - t) <= tol)
            and np.all(np.abs(self.cdf(one, t) - t) <= tol)
        )


@dataclass(frozen=True)
class QuadratureSpec:
    points_per_cell: int = 8
    cells: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.points_per_cell < 2:
            raise ValueError("points_per_cell must be at least 2")


def _rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    return (x + 1.0) / 2.0, w / 2.0


def integrate(c: CopulaEvaluator, integrand: Surface, q: QuadratureSpec | None = None) -> float:
    """Integral of ``integrand(u, v)`` over the unit square."""
    q = q or QuadratureSpec()
    m, n = q.cells or c.cell_grid
    x, w = _rule(q.points_per_cell)

    lo = np.arange(m) / m
    u = (lo[:, None] + x[None, :] / m).ravel()
    wu = np.tile(w / m, m)

    breaks = np.broadcast_to(np.arange(n + 1) / n, (u.size, n + 1))
    if c.kinks is not None:
        extra = np.clip(np.asarray(c.kinks(u), dtype=np.float64).reshape(u.size, -1), 0.0, 1.0)
        breaks = np.concatenate([breaks, extra], axis=1)
    breaks = np.sort(breaks, axis=1)
    a, b = breaks[:, :-1], breaks[:, 1:]
    v = a[..., None] + (b - a)[..., None] * x
    wv = (b - a)[..., None] * w
    uu = np.broadcast_to(u[:, None, None], v.shape)
    values = integrand(uu.ravel(), v.ravel()).reshape(v.shape)
    inner = np.sum(values * wv, axis=(1, 2))
    return float(np.sum(inner * wu))


def rho_oracle(c: CopulaEvaluator, q: QuadratureSpec | None = None) -> float:
    return 12.0 * integrate(c, c.cdf, q) - 3.0


def tau_oracle(c: CopulaEvaluator, q: QuadratureSpec | None = None) -> float:
    if c.partial1 is None:
        raise MissingPartial("partial1")
    if c.partial2 is None:
        raise MissingPartial("partial2")
    return 1.0 - 4.0 * integrate(c, lambda u, v: c.partial1(u, v) * c.partial2(u, v), q)


def xi_oracle(c: CopulaEvaluator, q: QuadratureSpec | None = None) -> float:
    if c.partial1 is None:
        raise MissingPartial("partial1")
    return 6.0 * integrate(c, lambda u, v: c.partial1(u, v) ** 2, q) - 2.0


def _dyadic_limit(values: Callable[[float], float], kmin: int, kmax: int, tol: float) -> float:
    history: list[float] = []
    for k in range(kmin, kmax + 1):
        history.append(values(2.0**-k))
        if len(history) >= 3 and max(history[-3:]) - min(history[-3:]) <= tol:
            return history[-1]
    raise NoConvergence(f"tail ratio did not settle: last iterates {history[-3:]}")


def tail_oracle(c: CopulaEvaluator, kmin: int = 4, kmax: int = 24, tol: float = 1e-4) -> tuple[float, float]:
    """Lower/upper tail coefficients from ``C(t, t) / t`` along dyadic ``t``."""
    lower = _dyadic_limit(lambda t: float(c.cdf(np.array(t), np.array(t))) / t, kmin, kmax, tol)

    def upper_ratio(s: float) -> float:
        t = 1.0 - s
        return (1.0 - float(c.cdf(np.array(t), np.array(t)))) / s

    upper = 2.0 - _dyadic_limit(upper_ratio, kmin, kmax, tol)
    return lower, upper


def oracle_report(c: CopulaEvaluator, family: Family, q: QuadratureSpec | None = None) -> MeasureReport:
    lower, upper = tail_oracle(c)
    return MeasureReport(
        rho_s=rho_oracle(c, q),
        tau=tau_oracle(c, q),
        xi=xi_oracle(c, q),
        lambda_lower=min(max(lower, 0.0), 1.0),
        lambda_upper=min(max(upper, 0.0), 1.0),
        family=family,
        source=Source.ORACLE,
    )


# -- Monte Carlo checks --------------------------------------------------------


def tau_concordance(sampler: Callable[[int, int], SampleSet], count: int, seed: int) -> tuple[float, float]:
    """Kendall's tau as P(concordant) - P(discordant) over ``count``
    independent pairs of draws; returns (estimate, standard error)."""
    first = sampler(count, seed)
    second = sampler(count, seed + 1)
    signs = np.sign((first.x - second.x) * (first.y - second.y))
    return float(signs.mean()), float(signs.std(ddof=1) / math.sqrt(count))


def empirical_cdf(samples: SampleSet, u: float, v: float) -> float:
    return float(np.mean((samples.x <= u) & (samples.y <= v)))


# -- reference copulas ---------------------------------------------------------


def independence() -> CopulaEvaluator:
    def sampler(count: int, seed: int) -> SampleSet:
        rng = generator(seed)
        return SampleSet(rng.random(count), rng.random(count))

    return CopulaEvaluator(
        cdf=lambda u, v: u * v,
        partial1=lambda u, v: np.asarray(v, dtype=np.float64) + 0.0 * u,
        partial2=lambda u, v: np.asarray(u, dtype=np.float64) + 0.0 * v,
        sampler=sampler,
        name="Pi",
    )


def upper_frechet() -> CopulaEvaluator:
    def sampler(count: int, seed: int) -> SampleSet:
        u = generator(seed).random(count)
        return SampleSet(u, u)

    return CopulaEvaluator(
        cdf=np.minimum,
        partial1=lambda u, v: (u < v).astype(np.float64),
        partial2=lambda u, v: (v < u).astype(np.float64),
        sampler=sampler,
        kinks=lambda u: u[:, None],
        name="M",
    )


def lower_frechet() -> CopulaEvaluator:
    def sampler(count: int, seed: int) -> SampleSet:
        u = generator(seed).random(count)
        return SampleSet(u, 1.0 - u)

    return CopulaEvaluator(
        cdf=lambda u, v: np.maximum(u + v - 1.0, 0.0),
        partial1=lambda u, v: (u + v > 1.0).astype(np.float64),
        partial2=lambda u, v: (u + v > 1.0).astype(np.float64),
        sampler=sampler,
        kinks=lambda u: 1.0 - u[:, None],
        name="W",
    )


def checkerboard_evaluator(delta: CheckerboardMatrix, fam) -> CopulaEvaluator:
    fam = CheckerboardFamily(getattr(fam, "value", fam))
    delta = delta.to_float()
    m, n = delta.shape
    kinks = None
    if fam is not CheckerboardFamily.PI:
        cols = np.arange(n)

        def kinks(u: np.ndarray) -> np.ndarray:
            i = np.minimum(np.floor(m * u), m - 1)
            s = (m * u - i)[:, None]
            if fam is CheckerboardFamily.MIN:
                return (cols + s) / n
            return (cols + 1.0 - s) / n

    return CopulaEvaluator(
        cdf=lambda u, v: eval_cdf(delta, fam, u, v),
        partial1=lambda u, v: eval_partial1(delta, fam, u, v),
        partial2=lambda u, v: eval_partial2(delta, fam, u, v),
        sampler=lambda count, seed: sample_checkerboard(delta, fam, count, seed),
        cell_grid=(m, n),
        kinks=kinks,
        name=f"checkerboard-{fam.value}",
    )


def bernstein_evaluator(grid: GridCopulaMatrix) -> CopulaEvaluator:
    return CopulaEvaluator(
        cdf=lambda u, v: eval_bernstein_cdf(grid, u, v),
        partial1=lambda u, v: eval_bernstein_partial1(grid, u, v),
        partial2=lambda u, v: eval_bernstein_partial2(grid, u, v),
        cell_grid=(grid.m, grid.n),
        name="bernstein",
    )


def shuffle_evaluator(p: Permutation) -> CopulaEvaluator:
    n = p.n
    offsets = segment_offsets(p)

    def kinks(u: np.ndarray) -> np.ndarray:
        k = np.minimum(np.floor(n * u).astype(np.int64), n - 1)
        return (u - offsets[k])[:, None]

    return CopulaEvaluator(
        cdf=lambda u, v: eval_shuffle_cdf(p, u, v),
        partial1=lambda u, v: eval_shuffle_partial1(p, u, v),
        partial2=lambda u, v: eval_shuffle_partial2(p, u, v),
        sampler=lambda count, seed: sample_shuffle(p, count, seed),
        cell_grid=(n, n),
        kinks=kinks,
        name="shuffle",
    )


# -- Gaussian references -------------------------------------------------------


def gaussian_factor_sampler(count: int, seed: int) -> SampleSet:
    """Pairs ``(Z, Z + eps)`` with independent standard normals."""
    rng = generator(seed)
    z = standard_normal(rng, count)
    eps = standard_normal(rng, count)
    return SampleSet(z, z + eps)


def gaussian_xi(correlation: float) -> float:
    """Chatterjee's xi of a bivariate Gaussian copula."""
    return 3.0 / math.pi * math.asin((1.0 + correlation**2) / 2.0) - 0.5


GAUSSIAN_FACTOR_XI = gaussian_xi(1.0 / math.sqrt(2.0))
