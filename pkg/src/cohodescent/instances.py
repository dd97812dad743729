"""Canonical descent problems and a seeded generator of random ones."""

from __future__ import annotations

import random
from itertools import combinations

from .descent import DescentProblem
from .simpsets import SComplex


def identity_circle(q: int = 1) -> DescentProblem:
    X = SComplex([1, 2, 3], [[1, 2], [1, 3], [2, 3]])
    return DescentProblem(X, {v: v for v in X.vertices}, q)


def identity_sphere(q: int = 2) -> DescentProblem:
    X = SComplex([1, 2, 3, 4], list(combinations([1, 2, 3, 4], 3)))
    return DescentProblem(X, {v: v for v in X.vertices}, q)


def constant_triangle(q: int = 1) -> DescentProblem:
    X = SComplex([1, 2, 3], [[1, 2, 3]])
    return DescentProblem(X, {1: "p", 2: "p", 3: "p"}, q)


def two_points(q: int = 1) -> DescentProblem:
    return DescentProblem(SComplex(["a", "b"]), {"a": "p", "b": "p"}, q)


def two_arc_cover(q: int = 1) -> DescentProblem:
    """A path a0-a1-a2-a3 over y0-y1-y2-y3 and an edge b0-b1 over y0-y3: the 4-gon circle."""
    X = SComplex(["a0", "a1", "a2", "a3", "b0", "b1"],
                 [["a0", "a1"], ["a1", "a2"], ["a2", "a3"], ["b0", "b1"]])
    f = {"a0": "y0", "a1": "y1", "a2": "y2", "a3": "y3", "b0": "y0", "b1": "y3"}
    return DescentProblem(X, f, q, ["y0", "y1", "y2", "y3"])


def two_triangles(q: int = 2) -> DescentProblem:
    X = SComplex(["a", "b", "c", "d", "e", "g"], [["a", "b", "c"], ["d", "e", "g"]])
    f = {"a": "u", "b": "v", "c": "w", "d": "u", "e": "v", "g": "w"}
    return DescentProblem(X, f, q)


def canonical_suite() -> dict[str, DescentProblem]:
    return {
        "identity_circle": identity_circle(),
        "identity_sphere": identity_sphere(),
        "constant_triangle": constant_triangle(),
        "two_points": two_points(),
        "two_arc_cover": two_arc_cover(),
        "two_triangles": two_triangles(),
    }


def random_subcomplex(rng: random.Random, n: int = 6, max_facets: int = 4, max_facet_size: int = 4) -> SComplex:
    """Random subcomplex of the simplex on vertices 0..n-1, given by a few random facets."""
    facets = []
    for _ in range(rng.randint(1, max_facets)):
        size = rng.randint(1, max_facet_size)
        facets.append(sorted(rng.sample(range(n), size)))
    used = sorted({v for f in facets for v in f})
    return SComplex(used, facets)


def random_monotone_map(rng: random.Random, X: SComplex, tries: int = 20) -> dict:
    """Integer-valued vertex map, weakly increasing on every simplex of X.

    Monotonicity refers to the numeric order of the targets, so pass
    ``sorted(set(f.values()))`` as the target order.
    """
    verts = X.vertices
    for _ in range(tries if rng.random() < 0.5 else 0):
        targets = rng.randint(1, len(verts))
        f = {v: rng.randrange(targets) for v in verts}
        if all(f[s[k]] <= f[s[k + 1]] for s in X.simplices for k in range(len(s) - 1)):
            return f
    # globally monotone fallback: cut the vertex order into consecutive blocks
    cuts = sorted(rng.sample(range(1, len(verts)), rng.randint(0, len(verts) - 1))) if len(verts) > 1 else []
    f, block = {}, 0
    for k, v in enumerate(verts):
        if block < len(cuts) and k == cuts[block]:
            block += 1
        f[v] = block
    return f


def random_problem(rng: random.Random, q: int | None = None, **kwargs) -> DescentProblem:
    X = random_subcomplex(rng, **kwargs)
    f = random_monotone_map(rng, X)
    q = rng.choice([0, 1, 2]) if q is None else q
    return DescentProblem(X, f, q, sorted(set(f.values())))
