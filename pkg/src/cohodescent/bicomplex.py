"""First-quadrant double complexes, their total complexes and low spectral-sequence pages.

Convention: the horizontal map ``horiz(i, j): D^{i,j} -> D^{i+1,j}`` and the
vertical map ``vert(i, j): D^{i,j} -> D^{i,j+1}`` anticommute.  Builders that
start from a commuting grid must put the sign on the vertical maps
themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .complexes import CochainComplex, InvalidComplexError, Report
from .ratlinalg import QMatrix, block_matrix, hstack, kernel_basis, matmul, rank

Cell = tuple[int, int]

ROW = "row"
COLUMN = "column"


class DoubleComplex:
    """Bigraded spaces ``D^{i,j}`` with horizontal and vertical differentials.

    Cells absent from ``dims`` are zero; absent maps are zero.
    """

    def __init__(self, dims: Mapping[Cell, int], horiz: Mapping[Cell, QMatrix] | None = None,
                 vert: Mapping[Cell, QMatrix] | None = None):
        for (i, j), n in dims.items():
            if i < 0 or j < 0:
                raise InvalidComplexError(f"cell {(i, j)} outside the first quadrant")
            if n < 0:
                raise InvalidComplexError(f"cell {(i, j)} has negative dimension")
        self._dims = {c: n for c, n in dims.items() if n > 0}
        self._horiz = {c: m for c, m in (horiz or {}).items() if not m.is_zero()}
        self._vert = {c: m for c, m in (vert or {}).items() if not m.is_zero()}

    @property
    def support(self) -> list[Cell]:
        return sorted(self._dims)

    def dim(self, i: int, j: int) -> int:
        return self._dims.get((i, j), 0)

    def horiz(self, i: int, j: int) -> QMatrix:
        m = self._horiz.get((i, j))
        return m if m is not None else QMatrix(self.dim(i + 1, j), self.dim(i, j))

    def vert(self, i: int, j: int) -> QMatrix:
        m = self._vert.get((i, j))
        return m if m is not None else QMatrix(self.dim(i, j + 1), self.dim(i, j))

    def max_total_degree(self) -> int:
        return max((i + j for i, j in self._dims), default=-1)

    def row(self, j: int) -> CochainComplex:
        """Row ``j`` as a cochain complex in the horizontal direction."""
        cols = [i for i, jj in self._dims if jj == j]
        hi = max(cols, default=-1)
        return CochainComplex({i: self.dim(i, j) for i in range(0, hi + 1)},
                              {i: self.horiz(i, j) for i in range(0, hi)}, lo=0)

    def column(self, i: int) -> CochainComplex:
        rows = [j for ii, j in self._dims if ii == i]
        hi = max(rows, default=-1)
        return CochainComplex({j: self.dim(i, j) for j in range(0, hi + 1)},
                              {j: self.vert(i, j) for j in range(0, hi)}, lo=0)

    def __repr__(self) -> str:
        return f"DoubleComplex(cells={len(self._dims)}, max_total_degree={self.max_total_degree()})"


def validate_double_complex(D: DoubleComplex) -> Report:
    report = Report()
    for (i, j), m in sorted(D._horiz.items()):
        if m.shape != (D.dim(i + 1, j), D.dim(i, j)):
            report.fail((i, j), f"cell {(i, j)}: horizontal map has shape {m.shape}")
    for (i, j), m in sorted(D._vert.items()):
        if m.shape != (D.dim(i, j + 1), D.dim(i, j)):
            report.fail((i, j), f"cell {(i, j)}: vertical map has shape {m.shape}")
    if not report:
        return report
    for i, j in D.support:
        h, v = D.horiz(i, j), D.vert(i, j)
        if not (D.horiz(i + 1, j) @ h).is_zero():
            report.fail((i, j), f"cell {(i, j)}: horizontal differential squares to nonzero")
        if not (D.vert(i, j + 1) @ v).is_zero():
            report.fail((i, j), f"cell {(i, j)}: vertical differential squares to nonzero")
        if not (D.vert(i + 1, j) @ h + D.horiz(i, j + 1) @ v).is_zero():
            report.fail((i, j), f"cell {(i, j)}: horizontal and vertical maps do not anticommute")
    return report


def require_valid_double(D: DoubleComplex) -> None:
    report = validate_double_complex(D)
    if not report:
        raise InvalidComplexError(report.failures[0])


def total_complex(D: DoubleComplex, check: bool = True) -> CochainComplex:
    """Tot^n = direct sum of D^{i,n-i}, ordered by increasing i, with differential vert + horiz."""
    if check:
        require_valid_double(D)
    top = D.max_total_degree()
    dims = {}
    diffs = {}
    for n in range(0, top + 1):
        dims[n] = sum(D.dim(i, n - i) for i in range(n + 1))
    for n in range(0, top):
        src = [D.dim(i, n - i) for i in range(n + 1)]
        tgt = [D.dim(i, n + 1 - i) for i in range(n + 2)]
        blocks = {}
        for i in range(n + 1):
            j = n - i
            v = D._vert.get((i, j))
            if v is not None:
                blocks[i, i] = v
            h = D._horiz.get((i, j))
            if h is not None:
                blocks[i + 1, i] = h
        if blocks:
            diffs[n] = block_matrix(tgt, src, blocks)
    return CochainComplex(dims, diffs, lo=0)


def truncate(D: DoubleComplex, q: int) -> DoubleComplex:
    """Keep cells with i + j <= q + 1; maps into dropped cells become zero."""
    keep = lambda c: c[0] + c[1] <= q + 1  # noqa: E731
    dims = {c: n for c, n in D._dims.items() if keep(c)}
    horiz = {c: m for c, m in D._horiz.items() if keep(c) and keep((c[0] + 1, c[1]))}
    vert = {c: m for c, m in D._vert.items() if keep(c) and keep((c[0], c[1] + 1))}
    return DoubleComplex(dims, horiz, vert)


def euler_characteristic(D: DoubleComplex) -> int:
    return sum((-1) ** (i + j) * n for (i, j), n in D._dims.items())


@dataclass
class Page:
    r: int
    filtration: str
    dims: dict[Cell, int] = field(default_factory=dict)

    def dim(self, i: int, j: int) -> int:
        return self.dims.get((i, j), 0)

    def table(self, max_i: int | None = None, max_j: int | None = None) -> list[list[int]]:
        """Rows indexed by j (top row = largest j), columns by i."""
        mi = max((i for i, _ in self.dims), default=0) if max_i is None else max_i
        mj = max((j for _, j in self.dims), default=0) if max_j is None else max_j
        return [[self.dim(i, j) for i in range(mi + 1)] for j in range(mj, -1, -1)]


def _transposed(D: DoubleComplex) -> DoubleComplex:
    """Swap the roles of the two directions, so pages of one filtration can reuse the other."""
    dims = {(j, i): n for (i, j), n in D._dims.items()}
    horiz = {(j, i): m for (i, j), m in D._vert.items()}
    vert = {(j, i): m for (i, j), m in D._horiz.items()}
    return DoubleComplex(dims, horiz, vert)


def page(D: DoubleComplex, filtration: str = ROW, r: int = 1, check: bool = True) -> Page:
    """Dimensions of E_1 or E_2.

    ``row``: E_1 is cohomology of the horizontal maps, E_2 the cohomology of
    the induced vertical maps.  ``column`` swaps the two directions.
    """
    if filtration not in (ROW, COLUMN):
        raise ValueError(f"unknown filtration {filtration!r}")
    if r not in (1, 2):
        raise ValueError("only pages r=1 and r=2 are computed")
    if check:
        require_valid_double(D)
    # work in "first differential = horiz" orientation
    W = D if filtration == ROW else _transposed(D)
    flip = (lambda c: c) if filtration == ROW else (lambda c: (c[1], c[0]))
    cells = W.support
    if r == 1:
        out = {}
        for i, j in cells:
            n = W.dim(i, j) - rank(W.horiz(i, j))
            if i > 0:
                n -= rank(W.horiz(i - 1, j))
            if n:
                out[flip((i, j))] = n
        return Page(1, filtration, out)

    zbasis: dict[Cell, QMatrix] = {}

    def Z(i: int, j: int) -> QMatrix:
        if (i, j) not in zbasis:
            zbasis[i, j] = kernel_basis(W.horiz(i, j))
        return zbasis[i, j]

    def B(i: int, j: int) -> QMatrix:
        # image of the incoming horizontal map, as spanning columns
        return W.horiz(i - 1, j) if i > 0 else QMatrix(W.dim(i, j), 0)

    out = {}
    for i, j in cells:
        z = Z(i, j)
        if z.cols == 0:
            continue
        # cocycles of the induced vertical map: z with d z in B(i, j+1)
        up = W.dim(i, j + 1)
        if up:
            dz = matmul(W.vert(i, j), z)
            bup = B(i, j + 1)
            excess = rank(hstack([dz, bup], rows=up)) - rank(bup)
        else:
            excess = 0
        cocycles = z.cols - excess
        # coboundaries: B(i, j) + d Z(i, j-1)
        parts = [B(i, j)]
        if j > 0 and W.dim(i, j - 1):
            parts.append(matmul(W.vert(i, j - 1), Z(i, j - 1)))
        boundaries = rank(hstack(parts, rows=W.dim(i, j)))
        n = cocycles - boundaries
        if n:
            out[flip((i, j))] = n
    return Page(2, filtration, out)
