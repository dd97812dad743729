"""Finite simplicial sets generated by ordered simplicial complexes.

Every simplicial set built here (nerves of ordered complexes and fibered
powers of maps between them) is determined by its vertices: an n-simplex is
a sequence of n+1 points, ``d_i`` deletes entry i, ``s_j`` repeats entry j,
and a simplex is degenerate exactly when two consecutive entries agree.
For a nerve a point is a vertex name; for the p-th fibered power it is a
(p+1)-tuple of vertex names of X with a common image.

``SimplexTerm`` is the Eilenberg-Zilber normal form (nondegenerate base plus
a strictly decreasing degeneracy word).  ``SSet.face`` and
``SSet.degeneracy`` act on terms through the simplicial identities, using
only the face table of nondegenerate simplices; the vertex-sequence route
(``SimplexTerm.vertices`` / ``SimplexTerm.from_vertices``) is kept as an
independent check.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .complexes import CochainComplex, ComplexMorphism
from .ratlinalg import QMatrix

Point = Hashable
Seq = tuple  # tuple of points


class SimplicialError(ValueError):
    pass


def collapse(seq: Sequence) -> tuple:
    """Drop consecutive repeats."""
    out = []
    for v in seq:
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)


def is_nondegenerate(seq: Sequence) -> bool:
    return all(seq[k] != seq[k + 1] for k in range(len(seq) - 1))


def normalize_word(word: Sequence[int]) -> tuple[int, ...]:
    """Rewrite s_{a1} ... s_{ak} into strictly decreasing form via s_i s_j = s_{j+1} s_i (i <= j)."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for k in range(len(w) - 1):
            if w[k] <= w[k + 1]:
                w[k], w[k + 1] = w[k + 1] + 1, w[k]
                changed = True
    return tuple(w)


@dataclass(frozen=True, order=True)
class SimplexTerm:
    """``s_{word[0]} ... s_{word[-1]} base`` with ``word`` strictly decreasing."""

    base: tuple
    word: tuple[int, ...] = ()

    def __post_init__(self):
        w = self.word
        if any(w[k] <= w[k + 1] for k in range(len(w) - 1)):
            raise SimplicialError(f"degeneracy word {w} is not strictly decreasing")
        m = len(self.base) - 1
        # the rightmost operator acts first; s_j on an r-simplex needs j <= r
        for depth, j in enumerate(reversed(w)):
            if not 0 <= j <= m + depth:
                raise SimplicialError(f"degeneracy index {j} invalid in word {w} over a {m}-simplex")

    @property
    def dim(self) -> int:
        return len(self.base) - 1 + len(self.word)

    @property
    def base_dim(self) -> int:
        return len(self.base) - 1

    def is_degenerate(self) -> bool:
        return bool(self.word)

    def vertices(self) -> tuple:
        seq = list(self.base)
        for j in reversed(self.word):
            seq.insert(j, seq[j])
        return tuple(seq)

    @classmethod
    def from_vertices(cls, seq: Sequence) -> SimplexTerm:
        seq = tuple(seq)
        word = tuple(k for k in range(len(seq) - 2, -1, -1) if seq[k] == seq[k + 1])
        return cls(collapse(seq), word)

    def __str__(self) -> str:
        inner = ",".join(map(str, self.base))
        ops = "".join(f"s{j}" for j in self.word)
        return f"{ops}[{inner}]"


# -- ordered simplicial complexes -----------------------------------------------

class SComplex:
    """Ordered simplicial complex: vertex order is the order of ``vertices``.

    Listed vertices that lie in no facet are kept as isolated points.
    """

    def __init__(self, vertices: Iterable[Point], facets: Iterable[Iterable[Point]] = ()):
        self.vertices: list = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise SimplicialError("duplicate vertex names")
        self.order = {v: k for k, v in enumerate(self.vertices)}
        faces: set[tuple] = {(v,) for v in self.vertices}
        self.facets: list[tuple] = []
        for facet in facets:
            fs = set(facet)
            unknown = [v for v in fs if v not in self.order]
            if unknown:
                raise SimplicialError(f"facet {list(facet)} uses unknown vertices {unknown}")
            if not fs:
                continue
            s = self.sort(fs)
            self.facets.append(s)
            for r in range(1, len(s) + 1):
                faces.update(combinations(s, r))
        self.simplices: frozenset[tuple] = frozenset(faces)

    def sort(self, vs: Iterable[Point]) -> tuple:
        return tuple(sorted(vs, key=self.order.__getitem__))

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of_dim(self, m: int) -> list[tuple]:
        return sorted((s for s in self.simplices if len(s) == m + 1),
                      key=lambda s: [self.order[v] for v in s])

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for s in self.simplices:
            ss = set(s)
            if not any(len(t) > len(s) and ss <= set(t) for t in self.simplices):
                out.append(s)
        return sorted(out, key=lambda s: (len(s), [self.order[v] for v in s]))

    def __contains__(self, simplex) -> bool:
        return self.sort(simplex) in self.simplices

    def f_vector(self) -> list[int]:
        return [len(self.simplices_of_dim(m)) for m in range(self.dimension + 1)]

    def __repr__(self) -> str:
        return f"SComplex({len(self.vertices)} vertices, f={self.f_vector()})"


@dataclass
class VertexMap:
    source: SComplex
    target: SComplex
    assignment: dict

    def __post_init__(self):
        self.assignment = dict(self.assignment)
        validate_vertex_map(self)

    def __call__(self, v):
        return self.assignment[v]


def validate_vertex_map(f: VertexMap) -> None:
    missing = [v for v in f.source.vertices if v not in f.assignment]
    if missing:
        raise SimplicialError(f"map does not assign vertices {missing}")
    for v in f.source.vertices:
        if f.assignment[v] not in f.target.order:
            raise SimplicialError(f"vertex {v!r} maps to {f.assignment[v]!r}, which is not a target vertex")
    tord = f.target.order
    for s in sorted(f.source.simplices, key=lambda s: (len(s), [f.source.order[v] for v in s])):
        img = [f.assignment[v] for v in s]
        if set(img) and f.target.sort(set(img)) not in f.target.simplices:
            raise SimplicialError(f"simplex {list(s)} maps to {sorted(set(img), key=tord.get)}, not a simplex of the target")
        if any(tord[img[k]] > tord[img[k + 1]] for k in range(len(img) - 1)):
            raise SimplicialError(
                f"map is not order-preserving on simplex {list(s)} (images {img}); "
                "barycentric subdivision of the source makes any simplicial map monotone"
            )


def image_complex(f: VertexMap) -> SComplex:
    """Subcomplex of the target made of images of source simplices."""
    return _image(f.source, f.assignment, f.target.vertices)


def _image(source: SComplex, assignment: Mapping, target_order: Sequence) -> SComplex:
    used = {assignment[v] for v in source.vertices}
    verts = [v for v in target_order if v in used]
    faces = {frozenset(assignment[v] for v in s) for s in source.simplices}
    maximal = [fs for fs in faces if not any(fs < g for g in faces)]
    Y = SComplex(verts, [sorted(fs, key=verts.index) for fs in maximal])
    return SComplex(verts, Y.maximal_simplices())


# -- simplicial sets ---------------------------------------------------------------

class SSet:
    """Simplicial set given by its nondegenerate simplices (as point sequences) up to ``cap``."""

    def __init__(self, nondegenerate: Sequence[Sequence[tuple]], cap: int, name: str = ""):
        nd = [list(level) for level in nondegenerate][: cap + 1]
        while len(nd) < cap + 1:
            nd.append([])
        self.cap = cap
        self.name = name
        self.nd: list[list[tuple]] = nd
        self.index: list[dict[tuple, int]] = [{s: k for k, s in enumerate(level)} for level in nd]
        for n, level in enumerate(nd):
            for s in level:
                if len(s) != n + 1 or not is_nondegenerate(s):
                    raise SimplicialError(f"{s} is not a nondegenerate {n}-simplex")

    def nd_counts(self) -> list[int]:
        counts = [len(level) for level in self.nd]
        while len(counts) > 1 and counts[-1] == 0:
            counts.pop()
        return counts if any(counts) else []

    def contains(self, seq: Sequence) -> bool:
        base = collapse(seq)
        n = len(base) - 1
        return n <= self.cap and base in self.index[n]

    def face_of(self, x: tuple, i: int) -> SimplexTerm:
        """d_i of a nondegenerate simplex, in normal form."""
        n = len(x) - 1
        if not 0 <= i <= n or n == 0:
            raise SimplicialError(f"face index {i} out of range for {x}")
        return SimplexTerm.from_vertices(x[:i] + x[i + 1:])

    def face(self, t: SimplexTerm, i: int) -> SimplexTerm:
        """d_i of a term, pushed through its degeneracy word by the simplicial identities."""
        if not 0 <= i <= t.dim or t.dim == 0:
            raise SimplicialError(f"face index {i} out of range in dimension {t.dim}")
        out: list[int] = []
        cur: int | None = i
        for j in t.word:
            if cur is None:
                out.append(j)
            elif cur < j:
                out.append(j - 1)
            elif cur in (j, j + 1):
                cur = None
            else:
                out.append(j)
                cur -= 1
        if cur is None:
            return SimplexTerm(t.base, normalize_word(out))
        inner = self.face_of(t.base, cur)
        return SimplexTerm(inner.base, normalize_word(out + list(inner.word)))

    def degeneracy(self, t: SimplexTerm, j: int) -> SimplexTerm:
        if not 0 <= j <= t.dim:
            raise SimplicialError(f"degeneracy index {j} out of range in dimension {t.dim}")
        return SimplexTerm(t.base, normalize_word([j, *t.word]))

    def simplices_at(self, n: int) -> list[SimplexTerm]:
        """All n-simplices, degenerate ones included."""
        if n > self.cap:
            raise SimplicialError(f"dimension {n} exceeds cap {self.cap}")
        out = []
        for m in range(0, n + 1):
            t = n - m
            words = [tuple(sorted(c, reverse=True)) for c in combinations(range(n), t)]
            for x in self.nd[m]:
                for w in words:
                    out.append(SimplexTerm(x, w))
        return out

    def all_sequences(self, n: int) -> list[tuple]:
        return [t.vertices() for t in self.simplices_at(n)]

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"SSet({label}nd={self.nd_counts()}, cap={self.cap})"


def nerve_of_complex(K: SComplex, cap: int) -> SSet:
    nd = [K.simplices_of_dim(m) for m in range(cap + 1)]
    return SSet(nd, cap, name="nerve")


@dataclass
class SSetMap:
    """Map of vertex-determined simplicial sets given by its action on points."""

    source: SSet
    target: SSet
    on_points: Callable[[Point], Point]
    name: str = ""

    def image_seq(self, seq: Sequence) -> tuple:
        f = self.on_points
        return tuple(f(v) for v in seq)

    def image_of(self, x: tuple) -> SimplexTerm:
        return SimplexTerm.from_vertices(self.image_seq(x))

    def image(self, t: SimplexTerm) -> SimplexTerm:
        # a simplicial map commutes with degeneracies, so it suffices to map the base
        img = self.image_of(t.base)
        return SimplexTerm(img.base, normalize_word([*t.word, *img.word]))


def induced_sset_map(f: VertexMap, cap: int, source: SSet | None = None, target: SSet | None = None) -> SSetMap:
    validate_vertex_map(f)
    X = source if source is not None else nerve_of_complex(f.source, cap)
    Y = target if target is not None else nerve_of_complex(f.target, cap)
    return SSetMap(X, Y, f.assignment.__getitem__, name="f")


def identity_sset_map(X: SSet) -> SSetMap:
    return SSetMap(X, X, lambda v: v, name="id")


def check_levelwise_surjective(g: SSetMap, cap: int | None = None) -> bool:
    cap = min(g.source.cap, g.target.cap) if cap is None else cap
    for n in range(cap + 1):
        hit = {g.image_seq(x) for x in g.source.all_sequences(n)}
        if any(y not in hit for y in g.target.all_sequences(n)):
            return False
    return True


# -- cochains -----------------------------------------------------------------------

def _coboundary(rows: list[tuple], cols_index: Mapping[tuple, int], normalized: bool) -> QMatrix:
    entries: dict[tuple[int, int], int] = defaultdict(int)
    for r, x in enumerate(rows):
        for i in range(len(x)):
            face = x[:i] + x[i + 1:]
            if normalized and not is_nondegenerate(face):
                continue
            entries[r, cols_index[face]] += -1 if i % 2 else 1
    return QMatrix(len(rows), len(cols_index), entries)


def normalized_cochain_complex(X: SSet, top: int | None = None) -> CochainComplex:
    """Cochains on nondegenerate simplices in degrees 0..top (default: the cap)."""
    top = X.cap if top is None else top
    dims = {n: len(X.nd[n]) for n in range(top + 1)}
    diffs = {n: _coboundary(X.nd[n + 1], X.index[n], True) for n in range(top)}
    return CochainComplex(dims, diffs, lo=0)


def unnormalized_cochain_complex(X: SSet, top: int | None = None) -> CochainComplex:
    """Cochains on all simplices in degrees 0..top (default: the cap)."""
    top = X.cap if top is None else top
    levels = [X.all_sequences(n) for n in range(top + 1)]
    index = [{s: k for k, s in enumerate(level)} for level in levels]
    dims = {n: len(levels[n]) for n in range(top + 1)}
    diffs = {n: _coboundary(levels[n + 1], index[n], False) for n in range(top)}
    return CochainComplex(dims, diffs, lo=0)


def pullback_matrix(g: SSetMap, n: int, normalized: bool = True) -> QMatrix:
    """Matrix of g^*: C^n(target) -> C^n(source)."""
    if normalized:
        rows = g.source.nd[n]
        tindex = g.target.index[n]
        entries = {}
        for r, x in enumerate(rows):
            y = g.image_seq(x)
            k = tindex.get(y)
            if k is not None:
                entries[r, k] = 1
            elif is_nondegenerate(y):
                raise SimplicialError(f"image {y} of {x} is missing from the target")
        return QMatrix(len(rows), len(tindex), entries)
    rows = g.source.all_sequences(n)
    tseqs = g.target.all_sequences(n)
    tindex = {s: k for k, s in enumerate(tseqs)}
    entries = {}
    for r, x in enumerate(rows):
        y = g.image_seq(x)
        if y not in tindex:
            raise SimplicialError(f"image {y} of {x} is missing from the target")
        entries[r, tindex[y]] = 1
    return QMatrix(len(rows), len(tseqs), entries)


def pullback_cochain_map(g: SSetMap, top: int | None = None, normalized: bool = True,
                         source_complex: CochainComplex | None = None,
                         target_complex: CochainComplex | None = None) -> ComplexMorphism:
    top = min(g.source.cap, g.target.cap) if top is None else top
    build = normalized_cochain_complex if normalized else unnormalized_cochain_complex
    S = target_complex if target_complex is not None else build(g.target, top)
    T = source_complex if source_complex is not None else build(g.source, top)
    maps = {n: pullback_matrix(g, n, normalized) for n in range(top + 1)}
    return ComplexMorphism(S, T, maps, name=f"{g.name}*" if g.name else "pullback")


# -- fibered powers -----------------------------------------------------------------

@dataclass
class FiberedPower:
    """W^p: (p+1)-tuples of simplices of X with a common image under ``base_map``.

    Points of ``carrier`` are (p+1)-tuples of X-points.
    """

    p: int
    base_map: SSetMap
    carrier: SSet
    projections: list[SSetMap] = field(default_factory=list)

    @property
    def cap(self) -> int:
        return self.carrier.cap


def fibered_power(f: SSetMap, p: int, cap: int | None = None) -> FiberedPower:
    X = f.source
    cap = X.cap if cap is None else cap
    if cap > X.cap:
        raise SimplicialError(f"cap {cap} exceeds the cap {X.cap} of the source")
    if p < 0:
        raise SimplicialError("fibered power index must be non-negative")
    nd: list[list[tuple]] = []
    for n in range(cap + 1):
        groups: dict[tuple, list[tuple]] = defaultdict(list)
        for x in X.all_sequences(n):
            groups[f.image_seq(x)].append(x)
        level = []
        for members in groups.values():
            for combo in product(members, repeat=p + 1):
                seq = tuple(zip(*combo))  # sequence of (p+1)-tuples of points
                if is_nondegenerate(seq):
                    level.append(seq)
        level.sort(key=repr)
        nd.append(level)
    carrier = SSet(nd, cap, name=f"W^{p}")
    return FiberedPower(p, f, carrier)


def projection_map(W: FiberedPower, i: int, target: FiberedPower | None = None) -> SSetMap:
    """pi_{p,i}: drop coordinate ``i`` of every point."""
    if not 0 <= i <= W.p or W.p == 0:
        raise SimplicialError(f"projection index {i} out of range for p={W.p}")
    if target is None:
        target = fibered_power(W.base_map, W.p - 1, W.cap)
    return SSetMap(W.carrier, target.carrier, lambda pt: pt[:i] + pt[i + 1:], name=f"pi_{W.p},{i}")


def augmentation_map(W0: FiberedPower, Y: SSet) -> SSetMap:
    """W^0 -> Y, (x,) -> f(x)."""
    f = W0.base_map.on_points
    return SSetMap(W0.carrier, Y, lambda pt: f(pt[0]), name="f")
