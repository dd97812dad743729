"""Independent constructions used as oracles by the tests.

``random_complex`` builds a cochain complex with prescribed cohomology: a
direct sum of one-dimensional pieces (cohomology) and two-term identity
pieces (acyclic), hidden behind a random change of basis made of elementary
row operations.  ``tensor_double`` forms A (x) B, whose total cohomology and
spectral pages are products of the factors' cohomology.
"""

from __future__ import annotations

import random
from fractions import Fraction

from cohodescent.bicomplex import DoubleComplex
from cohodescent.complexes import CochainComplex
from cohodescent.ratlinalg import QMatrix


def _elementary_ops(rng: random.Random, n: int, count: int) -> list[tuple[int, int, Fraction]]:
    ops = []
    if n < 2:
        return ops
    for _ in range(count):
        a, b = rng.sample(range(n), 2)
        ops.append((a, b, Fraction(rng.randint(-3, 3), rng.randint(1, 2))))
    return ops


def _apply_rows(M: list[list], ops, inverse: bool = False) -> list[list]:
    """Left-multiply by the product of ops (row b += c * row a), or by its inverse."""
    M = [list(r) for r in M]
    seq = reversed(ops) if inverse else ops
    for a, b, c in seq:
        c = -c if inverse else c
        M[b] = [x + c * y for x, y in zip(M[b], M[a])]
    return M


def _transpose(M: list[list], rows: int, cols: int) -> list[list]:
    return [[M[r][c] for r in range(rows)] for c in range(cols)]


def random_complex(rng: random.Random, length: int = 3, max_piece: int = 2, scramble: bool = True):
    """A complex in degrees 0..length-1 and its cohomology dimensions."""
    h = [rng.randint(0, max_piece) for _ in range(length)]
    e = [rng.randint(0, max_piece) for _ in range(length - 1)]
    dims = [h[n] + (e[n] if n < length - 1 else 0) + (e[n - 1] if n > 0 else 0) for n in range(length)]
    # basis of C^n: [points | sources of intervals starting at n | targets of intervals ending at n]
    dense = []
    for n in range(length - 1):
        M = [[Fraction(0)] * dims[n] for _ in range(dims[n + 1])]
        src0 = h[n]
        tgt0 = h[n + 1] + (e[n + 1] if n + 1 < length - 1 else 0)
        for k in range(e[n]):
            M[tgt0 + k][src0 + k] = Fraction(1)
        dense.append(M)
    if scramble:
        ops = [_elementary_ops(rng, dims[n], 2 * dims[n]) for n in range(length)]
        for n in range(length - 1):
            # d' = P_{n+1} d P_n^{-1}; right-multiplying by P^{-1} is a row action on the transpose
            M = _apply_rows(dense[n], ops[n + 1])
            Mt = _transpose(M, dims[n + 1], dims[n])
            inv_t = _transpose_ops(ops[n])
            Mt = _apply_rows(Mt, inv_t, inverse=True)
            dense[n] = _transpose(Mt, dims[n], dims[n + 1])
    diffs = {n: QMatrix.from_dense(M, cols=dims[n]) for n, M in enumerate(dense)}
    return CochainComplex(dims, diffs, lo=0), h


def _transpose_ops(ops):
    # (E_{b,a}(c))^T = E_{a,b}(c), and (P^{-1})^T = (P^T)^{-1}; reverse order for the transpose
    return [(b, a, c) for a, b, c in reversed(ops)]


def kron(A: QMatrix, B: QMatrix) -> QMatrix:
    entries = {}
    for r1, c1, v1 in A.items():
        for r2, c2, v2 in B.items():
            entries[r1 * B.rows + r2, c1 * B.cols + c2] = v1 * v2
    return QMatrix(A.rows * B.rows, A.cols * B.cols, entries)


def tensor_double(A: CochainComplex, B: CochainComplex) -> DoubleComplex:
    dims, horiz, vert = {}, {}, {}
    for i in range(A.lo, A.hi + 1):
        for j in range(B.lo, B.hi + 1):
            dims[i, j] = A.dim(i) * B.dim(j)
            if i < A.hi:
                horiz[i, j] = kron(A.diff(i), QMatrix.identity(B.dim(j)))
            if j < B.hi:
                v = kron(QMatrix.identity(A.dim(i)), B.diff(j))
                vert[i, j] = -v if i % 2 else v
    return DoubleComplex(dims, horiz, vert)
