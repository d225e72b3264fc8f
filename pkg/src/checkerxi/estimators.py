"""Sample estimators of Chatterjee's xi.

The checkerboard estimator bins the rank-transformed sample into a
``g x g`` grid with ``g = floor(n**kappa)`` and plugs the empirical cell
masses into the checkerboard closed forms. ``Lower`` uses the within-cell
independence formula, ``Upper`` the perfect-dependence one and ``Average``
their midpoint. The classical rank/nearest-neighbour estimator is provided
for comparison.
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._random import derive_seed, generator, standard_normal
from .checkerboard import squared_mass, xi_pi_raw
from .core import SampleSet
from .errors import DegenerateY, TooFewSamples
from .oracle import GAUSSIAN_FACTOR_XI, gaussian_factor_sampler



class Variant(str, enum.Enum):
    AVERAGE = "avg"
    UPPER = "upper"
    LOWER = "lower"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class EstimatorConfig:
    kappa: float = 1.0 / 3.0
    seed: int = 0
    variant: Variant = Variant.AVERAGE

    def __post_init__(self) -> None:
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa!r}")
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class EmpiricalCheckerboard:
    g: int
    counts: np.ndarray
    delta: np.ndarray


def ranks(values) -> np.ndarray:
    """``rank_k = #{j : v_j <= v_k}`` (ties share the larger rank)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    last = np.ones(n, dtype=bool)
    last[:-1] = ordered[1:] != ordered[:-1]
    # position of the last member of each tie block, propagated backwards
    ends = np.where(last, np.arange(n), n)
    ends = np.minimum.accumulate(ends[::-1])[::-1]
    out = np.empty(n, dtype=np.int64)
    out[order] = ends + 1
    return out


def _rank_bins(values: np.ndarray, g: int) -> np.ndarray:
    """0-based ``ceil(g * rank / n) - 1`` without materialising the ranks.

    ``rank_k <= r`` holds iff ``v_k`` is below the ``(r+1)``-th order
    statistic, so only the ``g - 1`` order statistics at ranks
    ``floor(t n / g) + 1`` are needed.
    """
    n = values.size
    if g == 1:
        return np.zeros(n, dtype=np.int64)
    kth = (np.arange(1, g) * n) // g
    thresholds = np.partition(values, kth)[kth]
    return np.searchsorted(thresholds, values, side="right")


def grid_size(n: int, kappa: float) -> int:
    return int(math.floor(n**kappa + 1e-9))


def empirical_checkerboard(samples: SampleSet, g: int) -> EmpiricalCheckerboard:
    """Bin rank pairs into a ``g x g`` grid: row ``ceil(g R^X / n)``, column
    ``ceil(g R^Y / n)``."""
    if g < 1:
        raise TooFewSamples(f"grid size must be at least 1, got {g}")
    n = len(samples)
    rows = _rank_bins(samples.x, g)
    cols = _rank_bins(samples.y, g)
    counts = np.bincount(rows * g + cols, minlength=g * g).reshape(g, g)
    return EmpiricalCheckerboard(g=g, counts=counts, delta=counts / n)


def checkerboard_estimates(samples: SampleSet, kappa: float = 1.0 / 3.0) -> dict[Variant, float]:
    """Lower, Average and Upper checkerboard estimates from one binning."""
    n = len(samples)
    if n < 2:
        raise TooFewSamples("need at least two observations")
    g = grid_size(n, kappa)
    if g < 1:
        raise TooFewSamples(f"floor(n**kappa) = {g} < 1")
    delta = empirical_checkerboard(samples, g).delta
    lower = float(xi_pi_raw(delta))
    spread = float(squared_mass(delta))
    return {
        Variant.LOWER: lower,
        Variant.AVERAGE: lower + 0.5 * spread,
        Variant.UPPER: lower + spread,
    }


def xi_checkerboard_estimate(samples: SampleSet, cfg: EstimatorConfig | None = None) -> float:
    cfg = cfg or EstimatorConfig()
    if cfg.variant is Variant.CLASSICAL:
        return xi_classical(samples, cfg.seed)
    return checkerboard_estimates(samples, cfg.kappa)[cfg.variant]


def estimate(samples: SampleSet, cfg: EstimatorConfig | None = None) -> float:
    """Dispatch on ``cfg.variant`` (all four variants)."""
    return xi_checkerboard_estimate(samples, cfg)


def _nearest_neighbours(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    new_group[1:] = xs[1:] != xs[:-1]
    group = np.cumsum(new_group) - 1
    start = np.flatnonzero(new_group)
    size = np.diff(np.append(start, n))
    value = xs[start]
    n_groups = start.size

    pos = np.arange(n)
    g = group
    draw = rng.random(n)
    pick = np.empty(n, dtype=np.int64)

    tied = size[g] >= 2
    r = np.floor(draw * (size[g] - 1)).astype(np.int64)
    cand = start[g] + r
    cand = np.where(cand >= pos, cand + 1, cand)
    pick[tied] = cand[tied]

    lone = ~tied
    left_ok = g > 0
    right_ok = g < n_groups - 1
    gl = np.maximum(g - 1, 0)
    gr = np.minimum(g + 1, n_groups - 1)
    dl = np.where(left_ok, xs - value[gl], np.inf)
    dr = np.where(right_ok, value[gr] - xs, np.inf)
    use_left = dl <= dr
    use_right = dr <= dl
    n_left = np.where(use_left, size[gl], 0)
    n_right = np.where(use_right, size[gr], 0)
    r = np.floor(draw * (n_left + n_right)).astype(np.int64)
    cand = np.where(r < n_left, start[gl] + r, start[gr] + (r - n_left))
    pick[lone] = cand[lone]

    out = np.empty(n, dtype=np.int64)
    out[order] = order[pick]
    return out


def xi_classical(samples: SampleSet, seed: int = 0) -> float:
    """Rank/nearest-neighbour xi estimator.

    Neighbours are nearest in the dense ranks of ``x`` so the estimate only
    depends on the orderings of ``x`` and ``y``; equidistant candidates
    (both sides, or tied ``x``) are chosen uniformly at random from ``seed``.
    """
    n = len(samples)
    if n < 2:
        raise TooFewSamples("need at least two observations")
    y = samples.y
    sorted_y = np.sort(y)
    r = np.searchsorted(sorted_y, y, side="right").astype(np.float64)
    l = n - np.searchsorted(sorted_y, y, side="left").astype(np.float64)
    den = np.sum(l * (n - l))
    if den == 0:
        raise DegenerateY()
    dense = np.unique(samples.x, return_inverse=True)[1].reshape(-1).astype(np.float64)
    nn = _nearest_neighbours(dense, generator(seed))
    num = np.sum(n * np.minimum(r, r[nn]) - l * l)
    return float(num / den)


# -- experiments -----------------------------------------------------------------


class Model(str, enum.Enum):
    GAUSSIAN_FACTOR = "gaussian-factor"
    INDEPENDENCE = "independence"
    COMONOTONE = "comonotone"


_MODEL_INDEX = {Model.GAUSSIAN_FACTOR: 0, Model.INDEPENDENCE: 1, Model.COMONOTONE: 2}


def draw_model(model: Model | str, count: int, seed: int) -> SampleSet:
    """Sample ``count`` pairs ``(X, Y)`` from one of the benchmark models.

    For the single-factor model the pair is ``(Z, Z + eps)``.
    """
    model = Model(model)
    if model is Model.GAUSSIAN_FACTOR:
        return gaussian_factor_sampler(count, seed)
    rng = generator(seed)
    if model is Model.INDEPENDENCE:
        return SampleSet(standard_normal(rng, count), standard_normal(rng, count))
    z = standard_normal(rng, count)
    return SampleSet(z, z)


@dataclass(frozen=True)
class ExperimentRow:
    model: str
    n: int
    kappa: float
    replicate: int
    variant: str
    value: float


def _kappa_key(kappa: float) -> int:
    return int(round(kappa * 1_000_000_000))


def _one_replicate(model: Model, n: int, kappa: float, rep: int, seed: int) -> list[ExperimentRow]:
    child = derive_seed(seed, _MODEL_INDEX[model], n, _kappa_key(kappa), rep)
    samples = draw_model(model, n, child)
    values = checkerboard_estimates(samples, kappa)
    values[Variant.CLASSICAL] = xi_classical(samples, derive_seed(child, 1))
    return [
        ExperimentRow(model.value, n, kappa, rep, variant.value, values[variant])
        for variant in (Variant.LOWER, Variant.AVERAGE, Variant.UPPER, Variant.CLASSICAL)
    ]


def convergence_experiment(
    model: Model | str,
    ns: Sequence[int],
    kappas: Sequence[float],
    replicates: int,
    seed: int = 0,
    threads: int = 1,
) -> list[ExperimentRow]:
    """Estimates for every (n, kappa, replicate); deterministic per ``seed``
    regardless of ``threads``."""
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    model = Model(model)
    tasks = [(model, n, k, rep, seed) for n in ns for k in kappas for rep in range(replicates)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: _one_replicate(*t), tasks))
    else:
        chunks = [_one_replicate(*t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


@dataclass(frozen=True)
class TimingRow:
    estimator: str
    n: int
    millis: float


def timing_experiment(
    ns: Iterable[int],
    seed: int = 0,
    kappa: float = 1.0 / 3.0,
    repeats: int = 3,
    variants: Sequence[Variant] = (Variant.CLASSICAL, Variant.AVERAGE, Variant.LOWER),
) -> list[TimingRow]:
    """Best-of-``repeats`` wall time per estimator on single-factor samples."""
    rows = []
    for n in ns:
        samples = draw_model(Model.GAUSSIAN_FACTOR, n, derive_seed(seed, n))
        for variant in variants:
            cfg = EstimatorConfig(kappa=kappa, seed=seed, variant=variant)
            best = math.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                estimate(samples, cfg)
                best = min(best, time.perf_counter() - t0)
            rows.append(TimingRow(Variant(variant).value, n, best * 1e3))
    return rows
