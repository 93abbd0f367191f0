"""Exact rational scalars and dense rational matrices.

Scalars are :class:`fractions.Fraction` (always stored in lowest terms with a
positive denominator).  :class:`RatMatrix` is an immutable row-major grid of
fractions; products and eliminations skip zero entries, which keeps the
sparse matrices of the duality constructions cheap at a few hundred states.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational as _RationalABC
from typing import Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "RatMatrix",
    "DimensionMismatch",
    "Singular",
    "to_rational",
    "format_rational",
    "matmul",
    "invert",
    "determinant",
    "solve",
    "vecmat",
]


class DimensionMismatch(ValueError):
    pass


class Singular(ArithmeticError):
    pass


def to_rational(x, allow_float: bool = False) -> Fraction:
    """Convert ``x`` to a Fraction.

    Accepts ints, Fractions and strings such as ``"3"``, ``"-2/5"`` or
    ``"0.25"``.  Python floats are refused unless ``allow_float`` is set,
    in which case their decimal repr is parsed (``0.1`` becomes ``1/10``).
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Integral, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not allow_float and ("." in s or "e" in s.lower()):
            raise ValueError(f"exact mode expects 'num/den', got {x!r}")
        return Fraction(s)
    if isinstance(x, float):
        if not allow_float:
            raise TypeError(f"float {x!r} given where an exact rational is required")
        return Fraction(repr(x))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class RatMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("_rows", "_nrows", "_ncols", "_nz")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise DimensionMismatch("ragged rows")
        else:
            width = ncols or 0
        if ncols is not None and width != ncols:
            raise DimensionMismatch(f"expected {ncols} columns, got {width}")
        self._rows = data
        self._nrows = len(data)
        self._ncols = width
        self._nz = None

    @classmethod
    def _wrap(cls, data: tuple, ncols: int) -> "RatMatrix":
        # trusted constructor: entries already Fractions
        m = object.__new__(cls)
        m._rows = data
        m._nrows = len(data)
        m._ncols = ncols
        m._nz = None
        return m

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._wrap(
            tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        zero = Fraction(0)
        return cls._wrap(tuple((zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        vals = [to_rational(v) for v in values]
        n = len(vals)
        zero = Fraction(0)
        return cls._wrap(
            tuple(tuple(vals[i] if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_sparse(cls, n: int, entries: dict, ncols: int | None = None) -> "RatMatrix":
        """Build from ``{(i, j): value}``; missing entries are zero."""
        ncols = n if ncols is None else ncols
        grid = [[Fraction(0)] * ncols for _ in range(n)]
        for (i, j), v in entries.items():
            grid[i][j] = to_rational(v)
        return cls._wrap(tuple(tuple(r) for r in grid), ncols)

    # -- basic protocol -------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def is_square(self) -> bool:
        return self._nrows == self._ncols

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self._rows[i][j]
        return self._rows[idx]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self):
        return self._nrows

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(format_rational(x) for x in r) + "]" for r in self._rows)
        return f"RatMatrix([{body}])"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self._rows]

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self._rows], dtype=float).reshape(self.shape)

    def nonzero_rows(self) -> tuple:
        """Per row, a tuple of ``(column, value)`` for nonzero entries (cached)."""
        if self._nz is None:
            self._nz = tuple(tuple((j, x) for j, x in enumerate(r) if x) for r in self._rows)
        return self._nz

    # -- arithmetic -----------------------------------------------------
    @property
    def T(self) -> "RatMatrix":
        return RatMatrix._wrap(tuple(zip(*self._rows)) if self._rows else (), self._nrows)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            return matmul(self, other)
        return NotImplemented

    def _combine(self, other: "RatMatrix", op) -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        return RatMatrix._wrap(
            tuple(tuple(op(x, y) for x, y in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self._ncols,
        )

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __neg__(self):
        return RatMatrix._wrap(tuple(tuple(-x for x in r) for r in self._rows), self._ncols)

    def scale(self, c) -> "RatMatrix":
        c = to_rational(c)
        return RatMatrix._wrap(tuple(tuple(c * x for x in r) for r in self._rows), self._ncols)

    def scale_rows(self, factors: Sequence) -> "RatMatrix":
        """diag(factors) @ self."""
        return RatMatrix._wrap(
            tuple(tuple(f * x if x else x for x in r) for f, r in zip(factors, self._rows)),
            self._ncols,
        )

    def scale_cols(self, factors: Sequence) -> "RatMatrix":
        """self @ diag(factors)."""
        return RatMatrix._wrap(
            tuple(tuple(x * f if x else x for x, f in zip(r, factors)) for r in self._rows),
            self._ncols,
        )

    # -- predicates -----------------------------------------------------
    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(r, Fraction(0)) for r in self._rows)

    def negative_entries(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, x) for i, r in enumerate(self._rows) for j, x in enumerate(r) if x < 0]

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for r in self._rows for x in r)

    def is_stochastic(self) -> bool:
        return self.is_nonnegative() and all(s == 1 for s in self.row_sums())

    def is_lower_triangular(self) -> bool:
        return all(x == 0 for i, r in enumerate(self._rows) for x in r[i + 1:])

    def first_difference(self, other: "RatMatrix"):
        """First ``(i, j)`` where the matrices differ, or None."""
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        for i, (r, s) in enumerate(zip(self._rows, other._rows)):
            if r != s:
                for j, (x, y) in enumerate(zip(r, s)):
                    if x != y:
                        return i, j
        return None


def matmul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    if a.ncols != b.nrows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    bnz = b.nonzero_rows()
    ncols = b.ncols
    zero = Fraction(0)
    out = []
    for arow in a.nonzero_rows():
        acc: dict[int, Fraction] = {}
        for k, x in arow:
            for j, y in bnz[k]:
                acc[j] = acc.get(j, zero) + x * y
        row = [zero] * ncols
        for j, v in acc.items():
            row[j] = v
        out.append(tuple(row))
    return RatMatrix._wrap(tuple(out), ncols)


def vecmat(v: Sequence, m: RatMatrix) -> tuple[Fraction, ...]:
    """Row vector times matrix, exact."""
    if len(v) != m.nrows:
        raise DimensionMismatch(f"vector of length {len(v)} vs {m.shape}")
    acc = [Fraction(0)] * m.ncols
    for x, row in zip(v, m.nonzero_rows()):
        if x:
            for j, y in row:
                acc[j] += x * y
    return tuple(acc)


def _sparse(m: RatMatrix) -> list[dict[int, Fraction]]:
    return [dict(r) for r in m.nonzero_rows()]


def _axpy(target: dict, f: Fraction, source: dict) -> None:
    # target -= f * source, dropping cancelled entries
    for j, v in source.items():
        w = target.get(j, 0) - f * v
        if w:
            target[j] = w
        else:
            target.pop(j, None)


def _gauss_jordan(left: list[dict], right: list[dict], n: int) -> None:
    for col in range(n):
        piv = next((r for r in range(col, n) if left[r].get(col)), None)
        if piv is None:
            raise Singular(f"matrix is singular (no pivot in column {col})")
        if piv != col:
            left[col], left[piv] = left[piv], left[col]
            right[col], right[piv] = right[piv], right[col]
        p = left[col][col]
        if p != 1:
            inv = 1 / p
            left[col] = {j: v * inv for j, v in left[col].items()}
            right[col] = {j: v * inv for j, v in right[col].items()}
        lrow, rrow = left[col], right[col]
        for r in range(n):
            if r != col:
                f = left[r].get(col)
                if f:
                    _axpy(left[r], f, lrow)
                    _axpy(right[r], f, rrow)


def invert(a: RatMatrix) -> RatMatrix:
    if not a.is_square:
        raise DimensionMismatch(f"cannot invert non-square {a.shape}")
    n = a.nrows
    left = _sparse(a)
    right = [{i: Fraction(1)} for i in range(n)]
    _gauss_jordan(left, right, n)
    return RatMatrix.from_sparse(n, {(i, j): v for i, r in enumerate(right) for j, v in r.items()})


def solve(a: RatMatrix, b: Sequence) -> tuple[Fraction, ...]:
    """Solve ``a x = b`` exactly for square nonsingular ``a``."""
    if not a.is_square or len(b) != a.nrows:
        raise DimensionMismatch(f"system {a.shape} with rhs of length {len(b)}")
    n = a.nrows
    left = _sparse(a)
    right = [{0: to_rational(x)} if x else {} for x in b]
    _gauss_jordan(left, right, n)
    return tuple(r.get(0, Fraction(0)) for r in right)


def determinant(a: RatMatrix) -> Fraction:
    if not a.is_square:
        raise DimensionMismatch(f"determinant of non-square {a.shape}")
    n = a.nrows
    rows = _sparse(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r].get(col)), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        prow = rows[col]
        for r in range(col + 1, n):
            f = rows[r].get(col)
            if f:
                _axpy(rows[r], f / p, prow)
    return det
