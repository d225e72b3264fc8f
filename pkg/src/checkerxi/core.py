"""Shared domain types: checkerboard and grid copula matrices, permutations,
paired samples and measure reports.

Public indices follow the usual 1-based matrix convention (row ``i`` of an
``m x n`` matrix runs from 1 to ``m``); storage is 0-based numpy, so
``entries[i - 1, j - 1]`` holds the mass of cell ``(i, j)``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from ._random import generator
from .errors import (
    ColSumViolation,
    DimensionMismatch,
    InvalidGrid,
    InvalidPermutation,
    InvalidSample,
    NegativeEntry,
    NotTwoIncreasing,
    RowSumViolation,
)

CONSTRUCTION_TOL = 1e-12
PARSE_TOL = 1e-9


class Family(str, enum.Enum):
    PI = "pi"
    MIN = "min"
    W = "w"
    BERNSTEIN = "bernstein"
    SHUFFLE = "shuffle"


class CheckerboardFamily(str, enum.Enum):
    """Within-cell dependence of a checkerboard-type copula."""

    PI = "pi"
    MIN = "min"
    W = "w"


class XiFamily(str, enum.Enum):
    PI = "pi"
    PERFECT_DEPENDENCE = "pd"


class Source(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    ORACLE = "oracle"


def _as_matrix(raw: Any) -> np.ndarray:
    arr = np.asarray(raw)
    if arr.dtype != object:
        arr = arr.astype(np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _unit(arr: np.ndarray, num: int, den: int):
    """``num / den`` as a Fraction for exact (object) arrays, else a float."""
    return Fraction(num, den) if _is_exact(arr) else num / den


def _check_checkerboard(entries: np.ndarray, tol: float) -> None:
    m, n = entries.shape
    for (i, j), value in np.ndenumerate(entries):
        if value < 0:
            raise NegativeEntry(i + 1, j + 1, value)
    row_target = _unit(entries, 1, m)
    for i, s in enumerate(entries.sum(axis=1)):
        if abs(s - row_target) > tol:
            raise RowSumViolation(i + 1, s, row_target)
    col_target = _unit(entries, 1, n)
    for j, s in enumerate(entries.sum(axis=0)):
        if abs(s - col_target) > tol:
            raise ColSumViolation(j + 1, s, col_target)


class CheckerboardMatrix:
    """Cell masses of a copula on a uniform ``m x n`` grid.

    Entries are nonnegative, every row sums to ``1/m`` and every column to
    ``1/n``. Object arrays of :class:`fractions.Fraction` are kept as-is so
    that closed forms can be evaluated exactly.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Any, *, tol: float = CONSTRUCTION_TOL):
        arr = _as_matrix(entries)
        _check_checkerboard(arr, tol)
        self._entries = _frozen(arr)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def m(self) -> int:
        return self._entries.shape[0]

    @property
    def n(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries.shape

    @property
    def exact(self) -> bool:
        return _is_exact(self._entries)

    def __getitem__(self, ij: tuple[int, int]):
        """1-based cell access ``delta[i, j]``."""
        i, j = ij
        return self._entries[i - 1, j - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CheckerboardMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._entries == other._entries))

    def __repr__(self) -> str:
        return f"CheckerboardMatrix(m={self.m}, n={self.n})"

    def transpose(self) -> "CheckerboardMatrix":
        return CheckerboardMatrix(self._entries.T)

    def to_float(self) -> "CheckerboardMatrix":
        if not self.exact:
            return self
        return CheckerboardMatrix(self._entries.astype(np.float64))


class GridCopulaMatrix:
    """Copula values ``D[i, j] = C(i/m, j/n)`` on the grid points."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Any, *, tol: float = CONSTRUCTION_TOL):
        arr = _as_matrix(entries)
        _check_grid(arr, tol)
        self._entries = _frozen(arr)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def m(self) -> int:
        return self._entries.shape[0]

    @property
    def n(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries.shape

    def transpose(self) -> "GridCopulaMatrix":
        return GridCopulaMatrix(self._entries.T)

    def __repr__(self) -> str:
        return f"GridCopulaMatrix(m={self.m}, n={self.n})"


def _second_differences(d: np.ndarray) -> np.ndarray:
    padded = np.zeros((d.shape[0] + 1, d.shape[1] + 1), dtype=d.dtype)
    if _is_exact(d):
        padded[:] = Fraction(0)
    padded[1:, 1:] = d
    return padded[1:, 1:] - padded[:-1, 1:] - padded[1:, :-1] + padded[:-1, :-1]


def _check_grid(d: np.ndarray, tol: float) -> None:
    m, n = d.shape
    for i in range(m):
        if abs(d[i, -1] - _unit(d, i + 1, m)) > tol:
            raise InvalidGrid(f"last column entry {i + 1} is {d[i, -1]!r}, expected {(i + 1) / m!r}")
    for j in range(n):
        if abs(d[-1, j] - _unit(d, j + 1, n)) > tol:
            raise InvalidGrid(f"last row entry {j + 1} is {d[-1, j]!r}, expected {(j + 1) / n!r}")
    diffs = _second_differences(d)
    for (i, j), value in np.ndenumerate(diffs):
        if value < -tol:
            raise NotTwoIncreasing(i + 1, j + 1, value)
    # grounded + 2-increasing implies monotone; checked anyway for malformed input
    if np.any(np.diff(d, axis=0) < -tol) or np.any(np.diff(d, axis=1) < -tol):
        raise InvalidGrid("grid matrix is not monotone along rows and columns")


def validate_checkerboard(raw: Any, tol: float = PARSE_TOL) -> CheckerboardMatrix:
    """Validate a raw matrix as a checkerboard matrix.

    The default tolerance is the looser parse-time one so that matrices
    round-tripped through text are accepted. Nothing is renormalized.
    """
    return CheckerboardMatrix(raw, tol=tol)


def cumulate(delta: CheckerboardMatrix) -> GridCopulaMatrix:
    """Partial sums ``D[i, j] = sum_{k<=i, l<=j} delta[k, l]``."""
    d = np.cumsum(np.cumsum(delta.entries, axis=0), axis=1)
    return GridCopulaMatrix(d)


def delta_from_grid(grid: GridCopulaMatrix) -> CheckerboardMatrix:
    """Recover the cell masses of a grid copula matrix by second differences."""
    diffs = _second_differences(grid.entries)
    for (i, j), value in np.ndenumerate(diffs):
        if value < -CONSTRUCTION_TOL:
            raise NotTwoIncreasing(i + 1, j + 1, value)
    if not _is_exact(diffs):
        # clip round-off negatives so the result is a valid checkerboard matrix
        diffs = np.maximum(diffs, 0.0)
    return CheckerboardMatrix(diffs)


def random_checkerboard(m: int, n: int, k: int, seed: int) -> CheckerboardMatrix:
    """Random square checkerboard matrix as a Birkhoff mixture.

    Returns ``(1/n) * sum_t w_t P_t`` with ``k`` uniformly random permutation
    matrices ``P_t`` and Dirichlet(1, ..., 1) weights ``w_t``.
    """
    if m != n:
        raise DimensionMismatch(f"random_checkerboard needs a square grid, got {m}x{n}")
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    rng = generator(seed)
    weights = rng.dirichlet(np.ones(k)) if k > 1 else np.ones(1)
    out = np.zeros((n, n))
    rows = np.arange(n)
    for w in weights:
        out[rows, rng.permutation(n)] += w
    return CheckerboardMatrix(out / n)


def aggregate(delta: CheckerboardMatrix, m: int, n: int) -> CheckerboardMatrix:
    """Coarsen ``delta`` onto an ``m x n`` grid by summing blocks of cells.

    Both target sizes must divide the corresponding source size.
    """
    M, N = delta.shape
    if M % m or N % n:
        raise DimensionMismatch(f"cannot aggregate {M}x{N} onto {m}x{n}")
    blocks = delta.entries.reshape(m, M // m, n, N // n)
    return CheckerboardMatrix(blocks.sum(axis=(1, 3)))


def random_rectangular_checkerboard(m: int, n: int, k: int, seed: int) -> CheckerboardMatrix:
    """Random ``m x n`` checkerboard matrix obtained by aggregating a random
    square one of side ``lcm(m, n)``."""
    side = math.lcm(m, n)
    return aggregate(random_checkerboard(side, side, k, seed), m, n)


# -- text formats -----------------------------------------------------------


def parse_matrix(text: str) -> CheckerboardMatrix:
    """Parse a checkerboard matrix from CSV rows or the JSON object form
    ``{"m": .., "n": .., "entries": [[..]]}``."""
    stripped = _strip_comments(text).strip()
    if stripped.startswith("{"):
        obj = json.loads(stripped)
        entries = np.asarray(obj["entries"], dtype=np.float64)
        if entries.shape != (obj.get("m", entries.shape[0]), obj.get("n", entries.shape[1])):
            raise DimensionMismatch(
                f"declared shape ({obj.get('m')}, {obj.get('n')}) does not match entries {entries.shape}"
            )
        return validate_checkerboard(entries)
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(stripped)), start=1):
        if not row:
            continue
        try:
            rows.append([float(field_) for field_ in row])
        except ValueError as exc:
            raise DimensionMismatch(f"line {lineno}: {exc}") from None
    if len({len(r) for r in rows}) > 1:
        raise DimensionMismatch("rows have differing numbers of fields")
    return validate_checkerboard(np.asarray(rows, dtype=np.float64))


def read_matrix(path: str | Path) -> CheckerboardMatrix:
    return parse_matrix(Path(path).read_text())


def format_matrix_csv(delta: CheckerboardMatrix) -> str:
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in delta.entries)


def format_matrix_json(delta: CheckerboardMatrix) -> str:
    return json.dumps(
        {"m": delta.m, "n": delta.n, "entries": [[float(x) for x in row] for row in delta.entries]}
    )


# -- permutations -----------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """Shuffle permutation ``pi`` of ``{1, ..., n}``, stored 1-based."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        mapping = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        n = len(mapping)
        if n < 1:
            raise InvalidPermutation("permutation must have at least one element")
        if sorted(mapping) != list(range(1, n + 1)):
            raise InvalidPermutation(f"{mapping} is not a bijection of 1..{n}")

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))
        except ValueError:
            raise InvalidPermutation(f"cannot parse permutation {text!r}") from None

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def random(cls, n: int, seed: int) -> "Permutation":
        return cls(tuple(generator(seed).permutation(n) + 1))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    @cached_property
    def zero_based(self) -> np.ndarray:
        arr = np.asarray(self.mapping, dtype=np.int64) - 1
        arr.setflags(write=False)
        return arr

    @cached_property
    def displacements(self) -> tuple[int, ...]:
        """``d_i = pi(i) - i`` for ``i = 1..n``."""
        return tuple(p - i for i, p in enumerate(self.mapping, start=1))

    @cached_property
    def inversion_count(self) -> int:
        from .shuffle import inversions

        return inversions(self)


# -- samples ----------------------------------------------------------------


class SampleSet:
    """Paired real observations ``(x_k, y_k)``, ``k = 1..n``."""

    __slots__ = ("_x", "_y")

    def __init__(self, x: Iterable[float], y: Iterable[float]):
        x = np.asarray(x, dtype=np.float64).ravel()
        y = np.asarray(y, dtype=np.float64).ravel()
        if x.shape != y.shape:
            raise InvalidSample(f"x and y lengths differ: {x.size} vs {y.size}")
        if x.size < 1:
            raise InvalidSample("sample set is empty")
        bad = ~(np.isfinite(x) & np.isfinite(y))
        if bad.any():
            raise InvalidSample(f"non-finite value in row {int(np.argmax(bad)) + 1}")
        x.setflags(write=False)
        y.setflags(write=False)
        self._x, self._y = x, y

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "SampleSet":
        arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y(self) -> np.ndarray:
        return self._y

    def __len__(self) -> int:
        return self._x.size

    def __repr__(self) -> str:
        return f"SampleSet(n={len(self)})"


def _strip_comments(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not line.lstrip().startswith("#"))


def parse_samples_csv(text: str) -> SampleSet:
    """Parse ``x,y`` CSV (header required, ``#`` comment lines skipped)."""
    rows = [
        (lineno, row)
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1)
        if row and "".join(row).strip() and not row[0].lstrip().startswith("#")
    ]
    if not rows or [h.strip().lower() for h in rows[0][1]] != ["x", "y"]:
        raise InvalidSample(f"expected header 'x,y', got {rows[0][1] if rows else None!r}")
    xs, ys = [], []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise InvalidSample(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError:
            raise InvalidSample(f"line {lineno}: cannot parse {row!r}") from None
    return SampleSet(xs, ys)


def read_samples(path: str | Path) -> SampleSet:
    return parse_samples_csv(Path(path).read_text())


def format_samples_csv(samples: SampleSet) -> str:
    buf = io.StringIO()
    buf.write("x,y\n")
    for x, y in zip(samples.x, samples.y):
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


# -- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class MeasureReport:
    rho_s: float
    tau: float
    xi: float
    lambda_lower: float
    lambda_upper: float
    family: Family
    source: Source = Source.CLOSED_FORM
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for name in ("lambda_lower", "lambda_upper"):
            value = getattr(self, name)
            if not -1e-9 <= value <= 1 + 1e-9:
                raise ValueError(f"{name} = {value!r} is outside [0, 1]")

    def as_dict(self) -> dict:
        out = {
            "family": Family(self.family).value,
            "source": Source(self.source).value,
            "rho_s": float(self.rho_s),
            "tau": float(self.tau),
            "xi": float(self.xi),
            "lambda_lower": float(self.lambda_lower),
            "lambda_upper": float(self.lambda_upper),
        }
        out.update(self.extra)
        return out
