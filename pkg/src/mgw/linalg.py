"""Exact dense linear algebra over Q and prime fields.

Vectors are rows.  Two interchangeable backends share one interface:

* ``FlintField`` wraps python-flint's ``fmpq_mat`` / ``nmod_mat``
* ``PyField`` is plain Python (``Fraction`` or integers mod p); it is slow and
  exists as an independent reference for tests
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

try:
    import flint
except ImportError:  # pragma: no cover - flint is a declared dependency
    flint = None


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


class FieldError(ValueError):
    pass


class Field:
    """Common interface; ``characteristic`` is 0 for Q."""

    characteristic: int

    @property
    def name(self) -> str:
        return "Q" if self.characteristic == 0 else f"Fp:{self.characteristic}"

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"

    def __eq__(self, other):
        return type(self) is type(other) and self.characteristic == other.characteristic

    def __hash__(self):
        return hash((type(self).__name__, self.characteristic))

    def reduce(self, x):
        """Map an integer or Fraction into the field (as a Python scalar)."""
        if self.characteristic == 0:
            return Fraction(x)
        p = self.characteristic
        x = Fraction(x)
        if x.denominator % p == 0:
            raise FieldError(f"{x} has no image in F_{p}")
        return x.numerator * pow(x.denominator, -1, p) % p

    def div(self, a, b):
        a, b = self.reduce(a), self.reduce(b)
        if self.characteristic == 0:
            return a / b
        return a * pow(b, -1, self.characteristic) % self.characteristic

    def is_zero_scalar(self, x) -> bool:
        return self.reduce(x) == 0

    def rank(self, m) -> int:
        return self.rref(m)[1]

    def left_kernel(self, m):
        """Rows spanning ``{k : k m = 0}``."""
        n = self.nrows(m)
        _, rank, _, transform = self.rref_with_transform(m)
        return self.row_range(transform, rank, n)

    def rref_with_transform(self, m):
        """``(R, rank, pivots, E)`` with ``E m = R`` and ``R`` in reduced echelon form.

        Rows ``rank:`` of ``E`` span the left kernel of ``m``.
        """
        n = self.nrows(m)
        aug = self.hstack([m, self.identity(n)], n)
        r, _, _ = self.rref(aug)
        c = self.ncols(m)
        left = self.col_range(r, 0, c)
        rank = 0
        pivots = []
        rows = self.to_rows(left)
        for i, row in enumerate(rows):
            j = next((j for j, x in enumerate(row) if x != 0), None)
            if j is None:
                break
            pivots.append(j)
            rank += 1
        return left, rank, pivots, self.col_range(r, c, c + n)

    def solve_left(self, m, targets):
        """``X`` with ``X m = targets``; raises if some target row is outside the row space."""
        left, rank, pivots, transform = self.rref_with_transform(m)
        picked = self.col_select(targets, pivots)
        x = self.mul(picked, self.row_range(transform, 0, rank))
        if self.to_rows(self.sub(self.mul(x, m), targets)) != self.to_rows(self.zeros(self.nrows(targets), self.ncols(m))):
            raise FieldError("target rows are not in the row space")
        return x

    def independent_rows(self, m) -> list[int]:
        """Indices of the first maximal set of linearly independent rows."""
        _, _, pivots = self.rref(self.transpose(m))
        return pivots


class FlintField(Field):
    def __init__(self, characteristic: int = 0):
        if flint is None:
            raise FieldError("python-flint is not installed")
        if characteristic and not is_prime(characteristic):
            raise FieldError(f"{characteristic} is not prime")
        self.characteristic = characteristic

    def _new(self, r, c, entries):
        if self.characteristic == 0:
            return flint.fmpq_mat(r, c, entries)
        return flint.nmod_mat(r, c, entries, self.characteristic)

    def _conv(self, x):
        if self.characteristic == 0:
            x = Fraction(x)
            return flint.fmpq(x.numerator, x.denominator)
        return self.reduce(x)

    def matrix(self, rows: Sequence[Sequence], ncols: int | None = None):
        rows = list(rows)
        c = len(rows[0]) if rows else (ncols or 0)
        if ncols is not None:
            c = ncols
        return self._new(len(rows), c, [self._conv(x) for row in rows for x in row])

    def zeros(self, r, c):
        return self._new(r, c, [0] * (r * c))

    def identity(self, n):
        return self._new(n, n, [int(i == j) for i in range(n) for j in range(n)])

    def nrows(self, m):
        return m.nrows()

    def ncols(self, m):
        return m.ncols()

    def to_rows(self, m):
        if self.characteristic == 0:
            return [[Fraction(int(x.p), int(x.q)) for x in row] for row in m.table()]
        return [[int(x) for x in row] for row in m.table()]

    def _from_rows(self, rows, c):
        return self.matrix(rows, c)

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def scale(self, a, x):
        return a * self._conv(x)

    def transpose(self, m):
        return m.transpose()

    def rref(self, m):
        if m.nrows() == 0 or m.ncols() == 0:
            return m, 0, []
        r, rank = m.rref()
        pivots = []
        for i in range(rank):
            j = 0
            while r[i, j] == 0:
                j += 1
            pivots.append(j)
        return r, rank, pivots

    def hstack(self, mats, nrows):
        cols = sum(m.ncols() for m in mats)
        tables = [m.table() for m in mats]
        entries = []
        for i in range(nrows):
            for t in tables:
                entries.extend(t[i])
        return self._new(nrows, cols, entries)

    def vstack(self, mats, ncols):
        rows = sum(m.nrows() for m in mats)
        entries = []
        for m in mats:
            entries.extend(m.entries())
        return self._new(rows, ncols, entries)

    def row_range(self, m, start, stop):
        t = m.table()[start:stop]
        return self._new(len(t), m.ncols(), [x for row in t for x in row])

    def col_range(self, m, start, stop):
        return self.col_select(m, range(start, stop))

    def col_select(self, m, cols):
        cols = list(cols)
        t = m.table()
        return self._new(m.nrows(), len(cols), [row[j] for row in t for j in cols])

    def row_select(self, m, rows):
        rows = list(rows)
        t = m.table()
        return self._new(len(rows), m.ncols(), [x for i in rows for x in t[i]])

    def is_zero(self, m) -> bool:
        return all(x == 0 for x in m.entries())


class PyField(Field):
    """Reference backend on lists of rows."""

    def __init__(self, characteristic: int = 0):
        if characteristic and not is_prime(characteristic):
            raise FieldError(f"{characteristic} is not prime")
        self.characteristic = characteristic

    def _norm(self, x):
        return self.reduce(x)

    def matrix(self, rows, ncols=None):
        rows = [[self._norm(x) for x in row] for row in rows]
        c = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        return _PyMat(rows, c)

    def zeros(self, r, c):
        return _PyMat([[self._norm(0)] * c for _ in range(r)], c)

    def identity(self, n):
        return _PyMat([[self._norm(int(i == j)) for j in range(n)] for i in range(n)], n)

    def nrows(self, m):
        return len(m.rows)

    def ncols(self, m):
        return m.ncols

    def to_rows(self, m):
        return [list(r) for r in m.rows]

    def _fix(self, x):
        return x % self.characteristic if self.characteristic else x

    def mul(self, a, b):
        bt = list(zip(*b.rows)) if b.rows else [()] * b.ncols
        out = [[self._fix(sum(x * y for x, y in zip(row, col))) for col in bt] for row in a.rows]
        if not b.rows:
            out = [[self._norm(0)] * b.ncols for _ in a.rows]
        return _PyMat(out, b.ncols)

    def add(self, a, b):
        return _PyMat([[self._fix(x + y) for x, y in zip(r, s)] for r, s in zip(a.rows, b.rows)], a.ncols)

    def sub(self, a, b):
        return _PyMat([[self._fix(x - y) for x, y in zip(r, s)] for r, s in zip(a.rows, b.rows)], a.ncols)

    def scale(self, a, x):
        x = self._norm(x)
        return _PyMat([[self._fix(y * x) for y in r] for r in a.rows], a.ncols)

    def transpose(self, m):
        return _PyMat([list(c) for c in zip(*m.rows)] if m.rows else [[] for _ in range(m.ncols)], len(m.rows))

    def _inv(self, x):
        return 1 / x if self.characteristic == 0 else pow(x, -1, self.characteristic)

    def rref(self, m):
        rows = [list(r) for r in m.rows]
        pivots = []
        r = 0
        for c in range(m.ncols):
            piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = self._inv(rows[r][c])
            rows[r] = [self._fix(x * inv) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [self._fix(x - f * y) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return _PyMat(rows, m.ncols), r, pivots

    def hstack(self, mats, nrows):
        return _PyMat([sum((list(m.rows[i]) for m in mats), []) for i in range(nrows)], sum(m.ncols for m in mats))

    def vstack(self, mats, ncols):
        return _PyMat([list(r) for m in mats for r in m.rows], ncols)

    def row_range(self, m, start, stop):
        return _PyMat([list(r) for r in m.rows[start:stop]], m.ncols)

    def col_range(self, m, start, stop):
        return self.col_select(m, range(start, stop))

    def col_select(self, m, cols):
        cols = list(cols)
        return _PyMat([[r[j] for j in cols] for r in m.rows], len(cols))

    def row_select(self, m, rows):
        return _PyMat([list(m.rows[i]) for i in rows], m.ncols)

    def is_zero(self, m) -> bool:
        return all(x == 0 for r in m.rows for x in r)


class _PyMat:
    __slots__ = ("rows", "ncols")

    def __init__(self, rows, ncols):
        self.rows = rows
        self.ncols = ncols

    def __repr__(self):
        return f"_PyMat({self.rows})"


def parse_field(spec: str, backend: str = "flint") -> Field:
    """``"Q"`` or ``"Fp:5"`` (also ``"F5"``) to a field object."""
    s = spec.strip()
    cls = FlintField if backend == "flint" and flint is not None else PyField
    if s in ("Q", "QQ"):
        return cls(0)
    m = re.fullmatch(r"F(?:p:)?(\d+)", s)
    if not m:
        raise FieldError(f"cannot parse field {spec!r}; expected Q or Fp:<prime>")
    p = int(m.group(1))
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    return cls(p)
