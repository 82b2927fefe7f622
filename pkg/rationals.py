"""Exact rational linear algebra.

Scalars are ``fractions.Fraction``; matrices and vectors keep their entries in
read-only numpy object arrays so every product, sum and elimination step stays
exact.
"""
import logging
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import (
    DivergentStar, LinalgError, NegativeDenominator, NonUniqueStationary,
    NotStochastic, ParseError, SingularMatrix,
)

Rational = Fraction
Number = Union[int, Fraction]

logger = logging.getLogger("Normcheck.Rationals")
logger.propagate = True

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/([+-]?\d+))?$")


def format_rational(value: Number) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str, line: Optional[int] = None) -> Fraction:
    match = _RATIONAL_RE.match(text.strip())
    if not match:
        raise ParseError(f"malformed rational {text!r}", line)
    numerator, denominator = match.group(1), match.group(2)
    if denominator is None:
        return Fraction(int(numerator))
    if denominator.startswith("-"):
        raise NegativeDenominator(text, line)
    if int(denominator) == 0:
        raise ParseError(f"zero denominator in {text!r}", line)
    return Fraction(int(numerator), int(denominator))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _fraction_array(rows: Iterable[Iterable[Number]]) -> np.ndarray:
    grid = [[Fraction(x) for x in row] for row in rows]
    width = len(grid[0]) if grid else 0
    if any(len(row) != width for row in grid):
        raise ValueError("ragged matrix rows")
    array = np.empty((len(grid), width), dtype=object)
    for i, row in enumerate(grid):
        for j, x in enumerate(row):
            array[i, j] = x
    return array


class RationalMatrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ("_data",)

    def __init__(self, rows: Iterable[Iterable[Number]]) -> None:
        self._data = _frozen(_fraction_array(rows))

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "RationalMatrix":
        matrix = cls.__new__(cls)
        normalized = np.empty(array.shape, dtype=object)
        for index, x in np.ndenumerate(array):
            normalized[index] = Fraction(x)
        matrix._data = _frozen(normalized)
        return matrix

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "RationalMatrix":
        cols = rows if cols is None else cols
        array = np.empty((rows, cols), dtype=object)
        array.fill(Fraction(0))
        return cls._wrap(array)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        array = np.empty((n, n), dtype=object)
        array.fill(Fraction(0))
        for i in range(n):
            array[i, i] = Fraction(1)
        return cls._wrap(array)

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying object array."""
        return self._data

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
        return self._data[i, j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        if not 0 <= i < self.rows:
            raise IndexError(f"row {i} outside a {self.rows}-row matrix")
        return tuple(self._data[i, :])

    def row_sums(self) -> Tuple[Fraction, ...]:
        return tuple(sum(self._data[i, :], Fraction(0)) for i in range(self.rows))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix._wrap(self._data.T.copy())

    def to_lists(self) -> List[List[Fraction]]:
        return [list(self._data[i, :]) for i in range(self.rows)]

    def to_float(self) -> np.ndarray:
        return self._data.astype(float)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return RationalMatrix.zeros(self.rows, other.cols)
        return RationalMatrix._wrap(self._data @ other._data)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self.shape} and {other.shape}")
        return RationalMatrix._wrap(self._data + other._data)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"cannot subtract {other.shape} from {self.shape}")
        return RationalMatrix._wrap(self._data - other._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._data == other._data))

    __hash__ = None

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self.to_lists())
        return f"RationalMatrix([{body}])"


class RationalVector:
    """Immutable row vector of Fractions."""

    __slots__ = ("_data",)

    def __init__(self, entries: Iterable[Number]) -> None:
        values = [Fraction(x) for x in entries]
        array = np.empty(len(values), dtype=object)
        for i, x in enumerate(values):
            array[i] = x
        self._data = _frozen(array)

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "RationalVector":
        return cls(list(array))

    @classmethod
    def zeros(cls, n: int) -> "RationalVector":
        return cls([0] * n)

    @classmethod
    def ones(cls, n: int) -> "RationalVector":
        return cls([1] * n)

    @property
    def array(self) -> np.ndarray:
        return self._data

    def __len__(self) -> int:
        return self._data.shape[0]

    def __iter__(self):
        return iter(self._data)

    def __getitem__(self, i: int) -> Fraction:
        if not 0 <= i < len(self):
            raise IndexError(f"entry {i} outside a vector of length {len(self)}")
        return self._data[i]

    def __matmul__(self, other: RationalMatrix) -> "RationalVector":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if len(self) != other.rows:
            raise ValueError(f"cannot multiply a {len(self)}-vector by {other.shape}")
        if len(self) == 0:
            return RationalVector.zeros(other.cols)
        return RationalVector._wrap(self._data @ other.array)

    def __neg__(self) -> "RationalVector":
        return RationalVector(-x for x in self._data)

    def dot(self, other: "RationalVector") -> Fraction:
        if len(self) != len(other):
            raise ValueError(f"length mismatch {len(self)} vs {len(other)}")
        return sum((x * y for x, y in zip(self._data, other._data)), Fraction(0))

    def concat(self, other: "RationalVector") -> "RationalVector":
        return RationalVector(list(self._data) + list(other._data))

    def total(self) -> Fraction:
        return sum(self._data, Fraction(0))

    def to_list(self) -> List[Fraction]:
        return list(self._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalVector):
            return NotImplemented
        return len(self) == len(other) and all(x == y for x, y in zip(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalVector([{' '.join(format_rational(x) for x in self._data)}])"


def block_diagonal(first: RationalMatrix, second: RationalMatrix) -> RationalMatrix:
    array = np.empty((first.rows + second.rows, first.cols + second.cols), dtype=object)
    array.fill(Fraction(0))
    array[:first.rows, :first.cols] = first.array
    array[first.rows:, first.cols:] = second.array
    return RationalMatrix._wrap(array)


def reduced_row_echelon(array: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Gauss-Jordan elimination on a copy; returns the reduced form and its pivot columns.

    Pivots are the first nonzero entry found below the current row.
    """
    m = np.array(array, dtype=object, copy=True)
    n_rows, n_cols = m.shape
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        found = next((r for r in range(piv_r, n_rows) if m[r, piv_c] != 0), None)
        if found is None:
            continue
        if found != piv_r:
            m[[piv_r, found], :] = m[[found, piv_r], :]
        m[piv_r, :] = m[piv_r, :] / m[piv_r, piv_c]
        for r in range(n_rows):
            if r != piv_r and m[r, piv_c] != 0:
                m[r, :] = m[r, :] - m[r, piv_c] * m[piv_r, :]
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots


def solve_linear(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Return X with A·X = B exactly."""
    if not a.is_square:
        raise ValueError(f"coefficient matrix must be square, got {a.shape}")
    if b.rows != a.rows:
        raise ValueError(f"right-hand side has {b.rows} rows, expected {a.rows}")
    n = a.rows
    x = a.array.copy()
    y = b.array.copy()
    for col in range(n):
        pivot = next((r for r in range(col, n) if x[r, col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col} of a {n}x{n} system")
        if pivot != col:
            x[[col, pivot], :] = x[[pivot, col], :]
            y[[col, pivot], :] = y[[pivot, col], :]
        p = x[col, col]
        x[col, :] = x[col, :] / p
        y[col, :] = y[col, :] / p
        for r in range(n):
            factor = x[r, col]
            if r != col and factor != 0:
                x[r, :] = x[r, :] - factor * x[col, :]
                y[r, :] = y[r, :] - factor * y[col, :]
    return RationalMatrix._wrap(y)


def star(e: RationalMatrix) -> RationalMatrix:
    """Kleene star Σ_k E^k, i.e. the solution of E* = E·E* + I."""
    if not e.is_square:
        raise ValueError(f"star needs a square matrix, got {e.shape}")
    identity = RationalMatrix.identity(e.rows)
    try:
        result = solve_linear(identity - e, identity)
    except SingularMatrix as exc:
        raise DivergentStar("I - E is singular: an empty-output cycle is taken with probability 1") from exc
    if e @ result + identity != result:
        raise LinalgError("star self-check E* = E E* + I failed")
    logger.debug(f"star: solved {e.rows}x{e.rows} system")
    return result


def check_stochastic(p: RationalMatrix) -> None:
    if not p.is_square:
        raise NotStochastic(f"transition matrix must be square, got {p.shape}")
    for i in range(p.rows):
        row = p.row(i)
        negative = next((j for j, x in enumerate(row) if x < 0), None)
        if negative is not None:
            raise NotStochastic(f"negative entry at ({i}, {negative})")
        total = sum(row, Fraction(0))
        if total != 1:
            raise NotStochastic(f"row {i} sums to {format_rational(total)}")


def stationary_distribution(p: RationalMatrix) -> RationalVector:
    """The unique probability vector π with π·P = π."""
    check_stochastic(p)
    n = p.rows
    # Unknowns are the π_q; one equation per column of (P - I) plus Σ π = 1.
    system = np.empty((n + 1, n + 1), dtype=object)
    system[:n, :n] = (p - RationalMatrix.identity(n)).transpose().array
    system[:n, n] = Fraction(0)
    system[n, :n] = Fraction(1)
    system[n, n] = Fraction(1)
    reduced, pivots = reduced_row_echelon(system)
    if n in pivots:
        raise LinalgError("stationary system is inconsistent")
    if len(pivots) < n:
        raise NonUniqueStationary(
            f"stationary solutions form a space of dimension {n - len(pivots)}"
        )
    pi = RationalVector(reduced[k, n] for k in range(n))
    if any(x < 0 for x in pi):
        raise LinalgError("stationary solution has a negative entry")
    logger.debug(f"stationary_distribution: {pi}")
    return pi


def matrix_from_entries(size: int, entries: Sequence[Tuple[int, int, Number]]) -> RationalMatrix:
    """Build a size x size matrix by summing (row, col, value) triples."""
    array = np.empty((size, size), dtype=object)
    array.fill(Fraction(0))
    for i, j, value in entries:
        array[i, j] = array[i, j] + Fraction(value)
    return RationalMatrix._wrap(array)
