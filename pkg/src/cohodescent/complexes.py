"""Bounded cochain complexes of finite-dimensional rational vector spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .ratlinalg import QMatrix, block_matrix, rank


class InvalidComplexError(ValueError):
    pass


@dataclass
class Report:
    """Outcome of a structural check.

    ``failures`` holds human-readable messages, the first of which names the
    first violating degree (or cell, for double complexes).
    """

    ok: bool = True
    failures: list[str] = field(default_factory=list)
    location: object = None

    def fail(self, where, message: str) -> None:
        if self.ok:
            self.location = where
        self.ok = False
        self.failures.append(message)

    def __bool__(self) -> bool:
        return self.ok


class CochainComplex:
    """C^lo -> ... -> C^hi with ``diff(i): C^i -> C^{i+1}`` as a dim(i+1) x dim(i) matrix.

    Degrees outside ``[lo, hi]`` have dimension 0.  The differential out of
    ``hi`` is the zero map into the zero space.
    """

    def __init__(self, dims: Mapping[int, int] | Sequence[int], diffs: Mapping[int, QMatrix] | None = None,
                 lo: int | None = None):
        if isinstance(dims, Mapping):
            d = {int(k): int(v) for k, v in dims.items()}
        else:
            start = 0 if lo is None else lo
            d = {start + i: int(v) for i, v in enumerate(dims)}
        if any(v < 0 for v in d.values()):
            raise InvalidComplexError("negative dimension")
        if d:
            self.lo = min(d) if lo is None else lo
            self.hi = max(d)
        else:
            self.lo, self.hi = (0 if lo is None else lo), (0 if lo is None else lo) - 1
        self._dims = d
        self._diffs: dict[int, QMatrix] = {}
        for i, m in (diffs or {}).items():
            if m.is_zero():
                # keep shape information for reporting, but zero maps are implicit
                continue
            self._diffs[int(i)] = m

    @property
    def degree_range(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def dim(self, i: int) -> int:
        return self._dims.get(i, 0)

    def dims(self, lo: int | None = None, hi: int | None = None) -> list[int]:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return [self.dim(i) for i in range(lo, hi + 1)]

    def diff(self, i: int) -> QMatrix:
        m = self._diffs.get(i)
        if m is None:
            return QMatrix(self.dim(i + 1), self.dim(i))
        return m

    def nonzero_diffs(self) -> dict[int, QMatrix]:
        return dict(self._diffs)

    def __repr__(self) -> str:
        return f"CochainComplex(dims={self.dims()}, lo={self.lo})"


@dataclass
class ComplexMorphism:
    source: CochainComplex
    target: CochainComplex
    maps: dict[int, QMatrix] = field(default_factory=dict)
    name: str = ""

    def map(self, i: int) -> QMatrix:
        m = self.maps.get(i)
        if m is None:
            return QMatrix(self.target.dim(i), self.source.dim(i))
        return m

    def degrees(self) -> range:
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        return range(lo, hi + 1)


def validate_complex(C: CochainComplex) -> Report:
    report = Report()
    for i, m in sorted(C._diffs.items()):
        if m.shape != (C.dim(i + 1), C.dim(i)):
            report.fail(i, f"degree {i}: differential has shape {m.shape}, expected {(C.dim(i + 1), C.dim(i))}")
    if not report:
        return report
    for i in range(C.lo, C.hi):
        if i in C._diffs and i + 1 in C._diffs:
            if not (C._diffs[i + 1] @ C._diffs[i]).is_zero():
                report.fail(i, f"degree {i}: d^{i + 1} d^{i} != 0")
    return report


def require_valid(C: CochainComplex) -> None:
    report = validate_complex(C)
    if not report:
        raise InvalidComplexError(report.failures[0])


def cohomology_dims(C: CochainComplex, lo: int | None = None, hi: int | None = None,
                    check: bool = True) -> list[int]:
    """dim H^i = dim C^i - rank d^i - rank d^{i-1} for i in [lo, hi]."""
    if check:
        require_valid(C)
    lo = C.lo if lo is None else lo
    hi = C.hi if hi is None else hi
    ranks: dict[int, int] = {}

    def r(i: int) -> int:
        if i not in ranks:
            ranks[i] = rank(C.diff(i)) if i in C._diffs else 0
        return ranks[i]

    return [C.dim(i) - r(i) - r(i - 1) for i in range(lo, hi + 1)]


def euler_characteristic(C: CochainComplex) -> int:
    return sum((-1) ** i * C.dim(i) for i in range(C.lo, C.hi + 1))


def validate_morphism(phi: ComplexMorphism) -> Report:
    report = Report()
    S, T = phi.source, phi.target
    label = f"{phi.name}: " if phi.name else ""
    for i, m in sorted(phi.maps.items()):
        if m.shape != (T.dim(i), S.dim(i)):
            report.fail(i, f"{label}degree {i}: map has shape {m.shape}, expected {(T.dim(i), S.dim(i))}")
    if not report:
        return report
    for i in phi.degrees():
        lhs = T.diff(i) @ phi.map(i)
        rhs = phi.map(i + 1) @ S.diff(i)
        if lhs != rhs:
            report.fail(i, f"{label}degree {i}: square does not commute")
    return report


def identity_morphism(C: CochainComplex) -> ComplexMorphism:
    return ComplexMorphism(C, C, {i: QMatrix.identity(C.dim(i)) for i in range(C.lo, C.hi + 1)})


def zero_morphism(S: CochainComplex, T: CochainComplex) -> ComplexMorphism:
    return ComplexMorphism(S, T, {})


def direct_sum(parts: Sequence[CochainComplex], shifts: Sequence[int] | None = None) -> CochainComplex:
    """Block-diagonal sum; summand k is placed with its degree i at i + shifts[k]."""
    if not parts:
        return CochainComplex({})
    shifts = list(shifts) if shifts is not None else [0] * len(parts)
    lo = min(C.lo + s for C, s in zip(parts, shifts))
    hi = max(C.hi + s for C, s in zip(parts, shifts))
    dims = {}
    for n in range(lo, hi + 1):
        dims[n] = sum(C.dim(n - s) for C, s in zip(parts, shifts))
    diffs = {}
    for n in range(lo, hi):
        blocks = {}
        for k, (C, s) in enumerate(zip(parts, shifts)):
            m = C.diff(n - s)
            if not m.is_zero():
                blocks[k, k] = m
        if blocks:
            diffs[n] = block_matrix([C.dim(n + 1 - s) for C, s in zip(parts, shifts)],
                                    [C.dim(n - s) for C, s in zip(parts, shifts)], blocks)
    return CochainComplex(dims, diffs, lo=lo)
