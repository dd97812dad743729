"""Exact sparse linear algebra over the rationals.

Matrices are stored row-wise as ``{row: {col: value}}`` with no explicit
zeros.  Values are Python ``int`` when integral and ``Fraction`` otherwise,
so the common case of signed incidence matrices never leaves integer
arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping

Rational = Fraction


def to_rational(value) -> int | Fraction:
    """Normalize ``value`` to an exact rational (``int`` if integral)."""
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use Fraction or a 'p/q' string")
    f = Fraction(value)
    return f.numerator if f.denominator == 1 else f


class DimensionError(ValueError):
    pass


class QMatrix:
    """Sparse rational matrix.  Treat instances as immutable."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, int | Fraction]] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside shape ({rows}, {cols})")
            v = to_rational(v)
            if v:
                data.setdefault(r, {})[c] = v
        self._data = data

    @classmethod
    def _from_rows(cls, rows: int, cols: int, data: dict[int, dict[int, int | Fraction]]) -> QMatrix:
        # trusted constructor: data already normalized, no zeros, in range
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._data = {r: row for r, row in data.items() if row}
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls._from_rows(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, rows: list[list], cols: int | None = None) -> QMatrix:
        nrows = len(rows)
        ncols = len(rows[0]) if rows else (cols or 0)
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionError("ragged dense matrix")
            for j, v in enumerate(row):
                entries[i, j] = v
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, nrows: int, columns: list[Mapping[int, object]]) -> QMatrix:
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                entries[i, j] = v
        return cls(nrows, len(columns), entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> dict[tuple[int, int], int | Fraction]:
        return {(r, c): v for r, row in self._data.items() for c, v in row.items()}

    def items(self) -> Iterator[tuple[int, int, int | Fraction]]:
        for r in sorted(self._data):
            row = self._data[r]
            for c in sorted(row):
                yield r, c, row[c]

    def row(self, r: int) -> dict[int, int | Fraction]:
        return dict(self._data.get(r, {}))

    def nnz(self) -> int:
        return sum(len(row) for row in self._data.values())

    def __getitem__(self, key: tuple[int, int]):
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(key)
        return self._data.get(r, {}).get(c, 0)

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.items():
            out[r][c] = v
        return out

    def transpose(self) -> QMatrix:
        data: dict[int, dict[int, int | Fraction]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return QMatrix._from_rows(self.cols, self.rows, data)

    @property
    def T(self) -> QMatrix:
        return self.transpose()

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}, {self.cols}, nnz={self.nnz()})"

    def __neg__(self) -> QMatrix:
        return self.scale(-1)

    def scale(self, s) -> QMatrix:
        s = to_rational(s)
        if not s:
            return QMatrix(self.rows, self.cols)
        data = {r: {c: to_rational(v * s) for c, v in row.items()} for r, row in self._data.items()}
        return QMatrix._from_rows(self.rows, self.cols, data)

    def __add__(self, other: QMatrix) -> QMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        data = {r: dict(row) for r, row in self._data.items()}
        for r, row in other._data.items():
            target = data.setdefault(r, {})
            for c, v in row.items():
                s = target.get(c, 0) + v
                if s:
                    target[c] = to_rational(s)
                else:
                    target.pop(c, None)
        return QMatrix._from_rows(self.rows, self.cols, data)

    def __sub__(self, other: QMatrix) -> QMatrix:
        return self + (-other)

    def __matmul__(self, other: QMatrix) -> QMatrix:
        return matmul(self, other)

    def apply(self, vec: Mapping[int, object]) -> dict[int, int | Fraction]:
        """Multiply by a sparse column vector given as ``{index: value}``."""
        out: dict[int, int | Fraction] = {}
        for r, row in self._data.items():
            s = 0
            for c, v in row.items():
                x = vec.get(c)
                if x:
                    s += v * x
            if s:
                out[r] = to_rational(s)
        return out

    def columns(self) -> list[dict[int, int | Fraction]]:
        cols: list[dict[int, int | Fraction]] = [{} for _ in range(self.cols)]
        for r, row in self._data.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols


def matmul(A: QMatrix, B: QMatrix) -> QMatrix:
    """Exact product ``A @ B``."""
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    bdata = B._data
    data: dict[int, dict[int, int | Fraction]] = {}
    for r, arow in A._data.items():
        acc: dict[int, int | Fraction] = {}
        for k, a in arow.items():
            brow = bdata.get(k)
            if not brow:
                continue
            for c, b in brow.items():
                acc[c] = acc.get(c, 0) + a * b
        out = {c: to_rational(v) for c, v in acc.items() if v}
        if out:
            data[r] = out
    return QMatrix._from_rows(A.rows, B.cols, data)


def hstack(mats: Iterable[QMatrix], rows: int | None = None) -> QMatrix:
    mats = list(mats)
    if rows is None:
        if not mats:
            raise DimensionError("hstack of no matrices needs an explicit row count")
        rows = mats[0].rows
    data: dict[int, dict[int, int | Fraction]] = {}
    offset = 0
    for m in mats:
        if m.rows != rows:
            raise DimensionError(f"hstack row mismatch: {m.rows} != {rows}")
        for r, row in m._data.items():
            target = data.setdefault(r, {})
            for c, v in row.items():
                target[c + offset] = v
        offset += m.cols
    return QMatrix._from_rows(rows, offset, data)


def block_matrix(row_sizes: list[int], col_sizes: list[int], blocks: Mapping[tuple[int, int], QMatrix]) -> QMatrix:
    """Assemble a matrix from blocks keyed by (block_row, block_col)."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    data: dict[int, dict[int, int | Fraction]] = {}
    for (bi, bj), m in blocks.items():
        if m.shape != (row_sizes[bi], col_sizes[bj]):
            raise DimensionError(
                f"block ({bi}, {bj}) has shape {m.shape}, expected {(row_sizes[bi], col_sizes[bj])}"
            )
        for r, row in m._data.items():
            target = data.setdefault(r + roff[bi], {})
            for c, v in row.items():
                c2 = c + coff[bj]
                s = target.get(c2, 0) + v
                if s:
                    target[c2] = to_rational(s)
                else:
                    target.pop(c2, None)
    return QMatrix._from_rows(roff[-1], coff[-1], data)


# -- elimination -----------------------------------------------------------

def _integer_row(row: Mapping[int, int | Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    if den == 1:
        return dict(row)  # type: ignore[arg-type]
    return {c: int(v * den) for c, v in row.items()}


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _echelon_integer(rows: Iterable[Mapping[int, int | Fraction]]) -> dict[int, dict[int, int]]:
    """Fraction-free online row reduction; returns {pivot_col: row}.

    Each incoming row is reduced against existing pivots on its leading
    column.  When two rows compete for a pivot column, the one whose entry
    there has the smaller bit size becomes (or stays) the pivot.
    """
    pivots: dict[int, dict[int, int]] = {}
    for raw in rows:
        if not raw:
            continue
        r = _primitive(_integer_row(raw))
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = r
                break
            if abs(r[c]).bit_length() < abs(p[c]).bit_length():
                pivots[c], r, p = r, p, r
            a, b = p[c], r[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new: dict[int, int] = {}
            if a == 1:
                new = dict(r)
            else:
                for k, v in r.items():
                    new[k] = a * v
            for k, v in p.items():
                s = new.get(k, 0) - b * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            r = _primitive(new)
    return pivots


def _orient(M: QMatrix) -> Iterable[dict[int, int | Fraction]]:
    # reduce whichever side has fewer vectors to insert
    if M.rows <= M.cols:
        return M._data.values()
    return M.transpose()._data.values()


def rank(M: QMatrix) -> int:
    """Exact rank over Q."""
    if M.is_zero():
        return 0
    return len(_echelon_integer(_orient(M)))


def _rref(M: QMatrix) -> dict[int, dict[int, int | Fraction]]:
    """Reduced row echelon form as {pivot_col: row with 1 at pivot_col}."""
    pivots = _echelon_integer(M._data.values())
    out: dict[int, dict[int, int | Fraction]] = {}
    for c, row in pivots.items():
        lead = row[c]
        out[c] = {k: to_rational(Fraction(v, lead)) for k, v in row.items()}
    for c in sorted(out, reverse=True):
        prow = out[c]
        for c2 in out:
            if c2 < c:
                other = out[c2]
                f = other.get(c)
                if f:
                    for k, v in prow.items():
                        s = other.get(k, 0) - f * v
                        if s:
                            other[k] = to_rational(s)
                        else:
                            other.pop(k, None)
    return out


def kernel_basis(M: QMatrix) -> QMatrix:
    """Basis of the null space of ``M`` as the columns of a ``cols x nullity`` matrix."""
    rref = _rref(M)
    free = [c for c in range(M.cols) if c not in rref]
    # column index -> pivot rows that mention it
    mentions: dict[int, list[int]] = {}
    for pc, row in rref.items():
        for k in row:
            if k != pc:
                mentions.setdefault(k, []).append(pc)
    columns = []
    for f in free:
        vec: dict[int, int | Fraction] = {f: 1}
        for pc in mentions.get(f, ()):
            vec[pc] = -rref[pc][f]
        columns.append(vec)
    return QMatrix.from_columns(M.cols, columns)


def nullity(M: QMatrix) -> int:
    return M.cols - rank(M)


def column_space_rank(*mats: QMatrix, rows: int) -> int:
    """Rank of the span of all columns of the given matrices."""
    return rank(hstack(mats, rows=rows)) if mats else 0
