"""Straight equal-width shuffle-of-min copulas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._random import generator
from .core import Family, MeasureReport, Permutation, SampleSet, Source
from .errors import OutOfDomain


def _merge_count(seq: list[int]) -> tuple[list[int], int]:
    if len(seq) <= 1:
        return seq, 0
    mid = len(seq) // 2
    left, a = _merge_count(seq[:mid])
    right, b = _merge_count(seq[mid:])
    merged = []
    count = a + b
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            # every remaining left element exceeds right[j]
            count += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, count


def inversions(p: Permutation) -> int:
    """Number of pairs ``i < j`` with ``pi(i) > pi(j)`` (merge count)."""
    return _merge_count(list(p.mapping))[1]


@dataclass(frozen=True)
class DisplacementSums:
    total: int
    squares: int
    weighted: int


def displacement_sums(p: Permutation) -> DisplacementSums:
    """``sum d_i``, ``sum d_i**2`` and ``sum d_i (2i - 1)`` as exact ints."""
    d = p.displacements
    return DisplacementSums(
        total=sum(d),
        squares=sum(x * x for x in d),
        weighted=sum(x * (2 * i - 1) for i, x in enumerate(d, start=1)),
    )


def displacement_sumsq(p: Permutation) -> int:
    return displacement_sums(p).squares


def shuffle_measures(p: Permutation) -> MeasureReport:
    n = p.n
    return MeasureReport(
        rho_s=1.0 - 6.0 * displacement_sumsq(p) / n**3,
        tau=1.0 - 4.0 * inversions(p) / n**2,
        xi=1.0,
        lambda_lower=float(p(1) == 1),
        lambda_upper=float(p(n) == n),
        family=Family.SHUFFLE,
        source=Source.CLOSED_FORM,
    )


def _check(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    bad = (u < 0) | (u > 1) | (v < 0) | (v > 1) | np.isnan(u + v)
    if np.any(bad):
        k = np.flatnonzero(np.broadcast_to(bad, np.broadcast(u, v).shape))[0]
        raise OutOfDomain(float(np.broadcast_to(u, bad.shape).flat[k]), float(np.broadcast_to(v, bad.shape).flat[k]))
    return u, v


def eval_shuffle_cdf(p: Permutation, u, v):
    """``C_pi(u, v) = (1/n) sum_k clamp(min(nu - k + 1, nv - pi(k) + 1), 0, 1)``."""
    u, v = _check(u, v)
    n = p.n
    k = np.arange(1, n + 1)
    pk = np.asarray(p.mapping)
    a = n * u[..., None] - k + 1
    b = n * v[..., None] - pk + 1
    out = np.clip(np.minimum(a, b), 0.0, 1.0).sum(axis=-1) / n
    return float(out) if out.ndim == 0 else out


def _strip(n: int, x: np.ndarray) -> np.ndarray:
    return np.minimum(np.floor(n * x).astype(np.int64), n - 1)


def eval_shuffle_partial1(p: Permutation, u, v):
    """``d/du C_pi``: indicator that ``v`` lies above the segment of u's strip."""
    u, v = _check(u, v)
    n = p.n
    k = _strip(n, u)
    shift = (k - p.zero_based[k]) / n
    out = (v > u - shift).astype(np.float64)
    return float(out) if out.ndim == 0 else out


def eval_shuffle_partial2(p: Permutation, u, v):
    """``d/dv C_pi``: indicator that ``u`` lies right of the segment of v's strip."""
    u, v = _check(u, v)
    n = p.n
    inverse = np.argsort(p.zero_based)
    col = _strip(n, v)
    k = inverse[col]
    shift = (k - col) / n
    out = (u > v + shift).astype(np.float64)
    return float(out) if out.ndim == 0 else out


def segment_offsets(p: Permutation) -> np.ndarray:
    """Offset ``(k - pi(k)) / n`` of each strip's support segment."""
    n = p.n
    return (np.arange(n) - p.zero_based) / n


def sample_shuffle(p: Permutation, count: int, seed: int) -> SampleSet:
    """Exact sampler: ``U`` uniform, ``V = U - (k - pi(k)) / n`` on strip ``k``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = generator(seed)
    u = rng.random(count)
    k = _strip(p.n, u)
    v = u - segment_offsets(p)[k]
    return SampleSet(u, np.clip(v, 0.0, 1.0))
