"""Descent double complex of a simplicial surjection and Betti numbers of its image.

For a monotone vertex map f: X -> Y (Y replaced by the image of f) the
double complex has D^{p,n} = C^n(W^p), vertical maps (-1)^p times the
coboundary of W^p and horizontal maps the alternating sums of pullbacks
along the coordinate-dropping projections W^{p+1} -> W^p.  Only cells with
p + n <= q + 1 are built; the cohomology of the total complex in degrees
0..q is the cohomology of the image.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .bicomplex import DoubleComplex, Page, ROW, page, require_valid_double, total_complex
from .complexes import CochainComplex, Report, cohomology_dims, validate_morphism
from .ratlinalg import QMatrix, rank
from .simpsets import (
    FiberedPower,
    SComplex,
    SimplicialError,
    SSetMap,
    VertexMap,
    _image,
    augmentation_map,
    check_levelwise_surjective,
    fibered_power,
    induced_sset_map,
    nerve_of_complex,
    normalized_cochain_complex,
    projection_map,
    pullback_cochain_map,
    pullback_matrix,
    unnormalized_cochain_complex,
)


class BettiVector(tuple):
    """b_0, ..., b_q."""

    def __new__(cls, values):
        values = tuple(int(v) for v in values)
        if any(v < 0 for v in values):
            raise ValueError("Betti numbers are non-negative")
        return super().__new__(cls, values)

    def __str__(self) -> str:
        return " ".join(map(str, self))

    def __repr__(self) -> str:
        return f"BettiVector({tuple(self)})"


@dataclass
class DescentProblem:
    """A vertex map out of ``X`` and a Betti range ``q``.

    The target is always the image of the map; its vertex order is
    ``target_order`` if given, else the order in which images first appear
    along the vertex order of ``X``.
    """

    X: SComplex
    assignment: dict
    q: int
    target_order: list | None = None

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be non-negative")
        self.assignment = dict(self.assignment)
        order = self.target_order
        if order is None:
            order = []
            for v in self.X.vertices:
                if v in self.assignment and self.assignment[v] not in order:
                    order.append(self.assignment[v])
        else:
            order = list(order)
            unknown = {self.assignment[v] for v in self.X.vertices if v in self.assignment} - set(order)
            if unknown:
                raise SimplicialError(f"images {sorted(map(str, unknown))} are missing from the target order")
        missing = [v for v in self.X.vertices if v not in self.assignment]
        if missing:
            raise SimplicialError(f"map does not assign vertices {missing}")
        self.Y = _image(self.X, self.assignment, order)
        self.f = VertexMap(self.X, self.Y, self.assignment)

    def with_q(self, q: int) -> DescentProblem:
        return DescentProblem(self.X, self.assignment, q, list(self.Y.vertices))

    @property
    def is_empty(self) -> bool:
        return not self.X.vertices


class DescentTower:
    """Nerves of X and Y, the map between them and the fibered powers W^0..W^{q+1}.

    W^p is built up to dimension ``top - p`` with ``top = q + 1``: exactly the
    cells p + n <= q + 1 of the truncated double complex.
    """

    def __init__(self, prob: DescentProblem, normalized: bool = True):
        self.prob = prob
        self.q = prob.q
        self.normalized = normalized
        top = prob.q + 1
        self.top = top
        self.X = nerve_of_complex(prob.X, top)
        self.Y = nerve_of_complex(prob.Y, top)
        self.f: SSetMap = induced_sset_map(prob.f, top, self.X, self.Y)
        if not check_levelwise_surjective(self.f, top):
            # cannot happen once the target is the image; refuse rather than guess
            raise SimplicialError("map is not surjective on simplices up to the cap")
        self.powers: list[FiberedPower] = [fibered_power(self.f, p, top - p) for p in range(top + 1)]
        self._pullbacks: dict[tuple[int, int, int], QMatrix] = {}
        self._projections: dict[tuple[int, int], SSetMap] = {}

    def cochains(self, p: int) -> CochainComplex:
        return self._cochains[p]

    @cached_property
    def _cochains(self) -> list[CochainComplex]:
        build = normalized_cochain_complex if self.normalized else unnormalized_cochain_complex
        return [build(W.carrier) for W in self.powers]

    @cached_property
    def base_cochains(self) -> CochainComplex:
        build = normalized_cochain_complex if self.normalized else unnormalized_cochain_complex
        return build(self.Y)

    def projection(self, p: int, i: int) -> SSetMap:
        """pi_{p,i}: W^p -> W^{p-1}."""
        key = (p, i)
        if key not in self._projections:
            self._projections[key] = projection_map(self.powers[p], i, self.powers[p - 1])
        return self._projections[key]

    def pullback(self, p: int, i: int, n: int) -> QMatrix:
        """pi_{p,i}^* in cochain degree n: C^n(W^{p-1}) -> C^n(W^p)."""
        key = (p, i, n)
        if key not in self._pullbacks:
            self._pullbacks[key] = pullback_matrix(self.projection(p, i), n, self.normalized)
        return self._pullbacks[key]

    def horizontal(self, p: int, n: int) -> QMatrix:
        """delta^p = sum_i (-1)^i pi_{p+1,i}^* in cochain degree n."""
        total = None
        for i in range(p + 2):
            m = self.pullback(p + 1, i, n)
            if i % 2:
                m = -m
            total = m if total is None else total + m
        return total

    def augmentation(self, n: int) -> QMatrix:
        return pullback_matrix(augmentation_map(self.powers[0], self.Y), n, self.normalized)

    def double_complex(self) -> DoubleComplex:
        top = self.top
        dims, horiz, vert = {}, {}, {}
        for p in range(top + 1):
            C = self.cochains(p)
            for n in range(top - p + 1):
                dims[p, n] = C.dim(n)
                if p + n + 1 <= top:
                    d = C.diff(n)
                    vert[p, n] = -d if p % 2 else d
                    horiz[p, n] = self.horizontal(p, n)
        return DoubleComplex(dims, horiz, vert)


def build_descent_double_complex(prob: DescentProblem, normalized: bool = True,
                                 tower: DescentTower | None = None) -> DoubleComplex:
    tower = tower or DescentTower(prob, normalized)
    D = tower.double_complex()
    require_valid_double(D)
    return D


def betti_of_image(prob: DescentProblem, normalized: bool = True) -> BettiVector:
    """b_0..b_q of the image, read off the total complex of the truncated descent complex."""
    if prob.is_empty:
        return BettiVector([0] * (prob.q + 1))
    D = build_descent_double_complex(prob, normalized)
    T = total_complex(D, check=False)
    return BettiVector(cohomology_dims(T, 0, prob.q, check=False))


def direct_betti(prob: DescentProblem) -> BettiVector:
    """Brute-force oracle: cohomology of the image complex itself."""
    Y = nerve_of_complex(prob.Y, prob.q + 1)
    C = normalized_cochain_complex(Y)
    return BettiVector(cohomology_dims(C, 0, prob.q))


def complex_betti(K: SComplex, q: int) -> BettiVector:
    C = normalized_cochain_complex(nerve_of_complex(K, q + 1))
    return BettiVector(cohomology_dims(C, 0, q))


def fibered_power_betti(prob: DescentProblem, p: int, q: int | None = None) -> BettiVector:
    """b_0..b_q of W^p (q defaults to the problem's range)."""
    q = prob.q if q is None else q
    X = nerve_of_complex(prob.X, q + 1)
    Y = nerve_of_complex(prob.Y, q + 1)
    f = induced_sset_map(prob.f, q + 1, X, Y)
    W = fibered_power(f, p, q + 1)
    return BettiVector(cohomology_dims(normalized_cochain_complex(W.carrier), 0, q))


# -- verifiers ------------------------------------------------------------------------

@dataclass
class ExactnessEntry:
    degree: int
    position: int  # -1: augmentation f^*, p >= 0: the term C^n(W^p)
    dim_ker: int
    dim_im: int
    composite_zero: bool = True

    @property
    def ok(self) -> bool:
        return self.composite_zero and self.dim_ker == self.dim_im


@dataclass
class ExactnessReport:
    entries: list[ExactnessEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> list[ExactnessEntry]:
        return [e for e in self.entries if not e.ok]

    def __bool__(self) -> bool:
        return self.ok


def verify_mv_exactness(prob: DescentProblem, tower: DescentTower | None = None) -> ExactnessReport:
    """Exactness of 0 -> C^n(Y) -> C^n(W^0) -> C^n(W^1) -> ... on unnormalized cochains.

    Checked at every term C^n(W^p) with p + n <= q (the terms whose outgoing
    map stays inside the truncated double complex), plus injectivity of the
    augmentation in every degree n <= q + 1.
    """
    report = ExactnessReport()
    if prob.is_empty:
        return report
    tower = tower if tower is not None and not tower.normalized else DescentTower(prob, normalized=False)
    q = prob.q
    for n in range(q + 2):
        aug = tower.augmentation(n)
        r_aug = rank(aug)
        report.entries.append(ExactnessEntry(n, -1, aug.cols - r_aug, 0))
        if n > q:
            continue
        incoming, r_in = aug, r_aug
        for p in range(0, q - n + 1):
            out = tower.horizontal(p, n)
            r_out = rank(out)
            report.entries.append(ExactnessEntry(
                n, p, out.cols - r_out, r_in, composite_zero=(out @ incoming).is_zero()))
            incoming, r_in = out, r_out
    return report


def descent_inequality(prob: DescentProblem, n: int) -> tuple[int, int]:
    """(b_n(image), sum over i + j = n of b_j(W^i))."""
    if not 0 <= n <= prob.q:
        raise ValueError(f"degree {n} outside 0..{prob.q}")
    lhs = direct_betti(prob)[n]
    if prob.is_empty:
        return lhs, 0
    X = nerve_of_complex(prob.X, n + 1)
    Y = nerve_of_complex(prob.Y, n + 1)
    f = induced_sset_map(prob.f, n + 1, X, Y)
    rhs = 0
    for i in range(n + 1):
        j = n - i
        W = fibered_power(f, i, j + 1)
        rhs += cohomology_dims(normalized_cochain_complex(W.carrier), j, j)[0]
    return lhs, rhs


@dataclass
class DegenerationReport:
    e1: Page
    e2: Page
    expected: BettiVector
    ok: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def e2_degeneration_report(prob: DescentProblem, normalized: bool = True,
                           tower: DescentTower | None = None) -> DegenerationReport:
    """Row-filtration E_1 and E_2 of the truncated descent complex.

    Passes iff column 0 of E_2 is the cohomology of the image and E_2^{i,j}
    vanishes for i >= 1, i + j <= q.  The anti-diagonal i + j = q + 1 is not
    judged: truncation cuts the maps leaving it.
    """
    q = prob.q
    expected = direct_betti(prob)
    if prob.is_empty:
        return DegenerationReport(Page(1, ROW), Page(2, ROW), expected, True, [])
    D = build_descent_double_complex(prob, normalized, tower)
    e1 = page(D, ROW, 1, check=False)
    e2 = page(D, ROW, 2, check=False)
    failures = []
    for j in range(q + 1):
        if e2.dim(0, j) != expected[j]:
            failures.append(f"E_2^(0,{j}) = {e2.dim(0, j)}, expected b_{j} = {expected[j]}")
    for i in range(1, q + 1):
        for j in range(0, q - i + 1):
            if e2.dim(i, j):
                failures.append(f"E_2^({i},{j}) = {e2.dim(i, j)}, expected 0")
    return DegenerationReport(e1, e2, expected, not failures, failures)


def validate_pullbacks(prob: DescentProblem, normalized: bool = True,
                       tower: DescentTower | None = None) -> Report:
    """Commuting-square check for every projection pullback and the augmentation."""
    report = Report()
    if prob.is_empty:
        return report
    tower = tower or DescentTower(prob, normalized)
    build = normalized_cochain_complex if normalized else unnormalized_cochain_complex
    for p in range(1, tower.top + 1):
        source = build(tower.powers[p].carrier)
        for i in range(p + 1):
            g = tower.projection(p, i)
            top = tower.powers[p].cap
            target = build(tower.powers[p - 1].carrier, top)
            phi = pullback_cochain_map(g, top, normalized, source_complex=source, target_complex=target)
            r = validate_morphism(phi)
            if not r:
                report.fail((p, i), f"pi_{p},{i}: {r.failures[0]}")
    aug = augmentation_map(tower.powers[0], tower.Y)
    r = validate_morphism(pullback_cochain_map(aug, tower.top, normalized))
    if not r:
        report.fail("f", f"f*: {r.failures[0]}")
    return report
