from __future__ import annotations

from itertools import combinations_with_replacement, permutations, product

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohodescent.complexes import cohomology_dims, validate_morphism
from cohodescent.descent import DescentProblem
from cohodescent.instances import random_problem, random_subcomplex, two_arc_cover
from cohodescent.ratlinalg import QMatrix
from cohodescent.simpsets import (
    SComplex,
    SimplexTerm,
    SimplicialError,
    SSetMap,
    VertexMap,
    check_levelwise_surjective,
    fibered_power,
    identity_sset_map,
    image_complex,
    induced_sset_map,
    nerve_of_complex,
    normalize_word,
    normalized_cochain_complex,
    projection_map,
    pullback_cochain_map,
    unnormalized_cochain_complex,
)

TRIANGLE = SComplex([1, 2, 3], [[1, 2, 3]])
CIRCLE = SComplex([1, 2, 3], [[1, 2], [1, 3], [2, 3]])
POINT = SComplex(["p"])
EDGE = SComplex([0, 1], [[0, 1]])
SQUARE = SComplex(["y0", "y1", "y2", "y3"], [["y0", "y1"], ["y1", "y2"], ["y2", "y3"], ["y0", "y3"]])


def nerve_sequences(K: SComplex, n: int) -> set[tuple]:
    """Brute force: weakly increasing (n+1)-sequences whose support is a simplex."""
    out = set()
    for seq in combinations_with_replacement(K.vertices, n + 1):
        if K.sort(set(seq)) in K.simplices:
            out.add(seq)
    return out


def power_components(prob: DescentProblem, p: int) -> int:
    """Connected components of W^p from its 1-skeleton, built directly from X."""
    f = prob.assignment
    G = nx.Graph()
    fibres: dict = {}
    for v in prob.X.vertices:
        fibres.setdefault(f[v], []).append(v)
    for members in fibres.values():
        G.add_nodes_from(product(members, repeat=p + 1))
    step = {(a, b) for a in prob.X.vertices for b in prob.X.vertices
            if a == b or prob.X.sort({a, b}) == (a, b) and (a, b) in prob.X.simplices}
    nodes = list(G.nodes)
    for u in nodes:
        for w in nodes:
            if u != w and all((a, b) in step for a, b in zip(u, w)):
                G.add_edge(u, w)
    return nx.number_connected_components(G)


# -- complexes and nerves -----------------------------------------------------------

def test_nd_counts():
    assert nerve_of_complex(TRIANGLE, 3).nd_counts() == [3, 3, 1]
    assert nerve_of_complex(CIRCLE, 3).nd_counts() == [3, 3]
    assert nerve_of_complex(POINT, 3).nd_counts() == [1]


def test_isolated_vertices_are_kept():
    K = SComplex(["a", "b", "c"], [["a", "b"]])
    assert K.f_vector() == [3, 1]
    assert set(K.maximal_simplices()) == {("a", "b"), ("c",)}


def test_simplices_at_counts():
    P = nerve_of_complex(POINT, 4)
    assert [len(P.simplices_at(n)) for n in range(5)] == [1] * 5
    E = nerve_of_complex(EDGE, 3)
    assert len(E.simplices_at(1)) == 3
    assert len(E.simplices_at(2)) == 4
    with pytest.raises(SimplicialError):
        E.simplices_at(4)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 3))
def test_simplices_match_brute_enumeration(rng, n):
    K = random_subcomplex(rng)
    X = nerve_of_complex(K, 3)
    seqs = X.all_sequences(n)
    assert len(seqs) == len(set(seqs))
    assert set(seqs) == nerve_sequences(K, n)


def test_term_round_trip():
    t = SimplexTerm((1, 2), (2, 0))
    assert t.vertices() == (1, 1, 2, 2)
    assert SimplexTerm.from_vertices(t.vertices()) == t
    with pytest.raises(SimplicialError):
        SimplexTerm((1, 2), (0, 2))
    assert normalize_word([0, 0]) == (1, 0)
    assert normalize_word([0, 1]) == (2, 0)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_simplicial_identities(rng):
    X = nerve_of_complex(random_subcomplex(rng), 4)
    n = rng.randint(2, 4)
    t = rng.choice(X.simplices_at(n))
    v = t.vertices()
    for i in range(n + 1):
        # identity route agrees with deleting a vertex
        assert X.face(t, i).vertices() == v[:i] + v[i + 1:]
        assert X.degeneracy(t, i).vertices() == v[:i] + (v[i],) + v[i:]
    for j in range(n + 1):
        for i in range(j):
            assert X.face(X.face(t, j), i) == X.face(X.face(t, i), j - 1)
    if n + 1 <= X.cap:
        for j in range(n + 1):
            for i in range(j + 1):
                assert X.degeneracy(X.degeneracy(t, j), i) == X.degeneracy(X.degeneracy(t, i), j + 1)
        for j in range(n + 1):
            assert X.face(X.degeneracy(t, j), j) == t
            assert X.face(X.degeneracy(t, j), j + 1) == t


# -- cochains -------------------------------------------------------------------------

def test_normalized_cohomology_examples():
    assert cohomology_dims(normalized_cochain_complex(nerve_of_complex(CIRCLE, 2)), 0, 1) == [1, 1]
    assert cohomology_dims(normalized_cochain_complex(nerve_of_complex(TRIANGLE, 3)), 0, 2) == [1, 0, 0]
    assert cohomology_dims(normalized_cochain_complex(nerve_of_complex(SQUARE, 2)), 0, 1) == [1, 1]


def test_unnormalized_examples():
    C = unnormalized_cochain_complex(nerve_of_complex(POINT, 4))
    assert C.dims() == [1] * 5
    # d^n is the alternating sum of n + 2 equal faces: 0 for n even, 1 for n odd
    assert [C.diff(n).to_dense() for n in range(4)] == [[[0]], [[1]], [[0]], [[1]]]
    assert cohomology_dims(C, 0, 3) == [1, 0, 0, 0]
    E = unnormalized_cochain_complex(nerve_of_complex(EDGE, 2))
    assert cohomology_dims(E, 0, 1) == [1, 0]
    S = nerve_of_complex(CIRCLE, 3)
    assert cohomology_dims(unnormalized_cochain_complex(S), 0, 2) == \
        cohomology_dims(normalized_cochain_complex(S), 0, 2)


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_normalized_and_unnormalized_agree(rng):
    X = nerve_of_complex(random_subcomplex(rng), 3)
    assert cohomology_dims(normalized_cochain_complex(X), 0, 2) == \
        cohomology_dims(unnormalized_cochain_complex(X), 0, 2)


# -- maps ------------------------------------------------------------------------------

def test_induced_map_examples():
    X = nerve_of_complex(CIRCLE, 2)
    ident = identity_sset_map(X)
    assert ident.image_of((1, 2)) == SimplexTerm((1, 2))
    const = induced_sset_map(VertexMap(TRIANGLE, POINT, {1: "p", 2: "p", 3: "p"}), 2)
    for m in (1, 2):
        for x in const.source.nd[m]:
            t = const.image_of(x)
            assert t.base == ("p",) and len(t.word) == m
    prob = two_arc_cover()
    g = induced_sset_map(prob.f, 1)
    assert g.image_of(("a0", "a1")) == SimplexTerm(("y0", "y1"))


def test_image_complex_examples():
    ident = VertexMap(CIRCLE, CIRCLE, {v: v for v in CIRCLE.vertices})
    assert image_complex(ident).simplices == CIRCLE.simplices
    const = VertexMap(TRIANGLE, POINT, {1: "p", 2: "p", 3: "p"})
    assert image_complex(const).simplices == POINT.simplices
    prob = two_arc_cover()
    assert prob.Y.simplices == SQUARE.simplices


def test_non_monotone_map_is_rejected_with_the_simplex():
    with pytest.raises(SimplicialError) as err:
        VertexMap(EDGE, EDGE, {0: 1, 1: 0})
    assert "[0, 1]" in str(err.value)
    assert "barycentric" in str(err.value)
    with pytest.raises(SimplicialError) as err:
        VertexMap(EDGE, SComplex([0, 1]), {0: 0, 1: 1})
    assert "not a simplex of the target" in str(err.value)


def test_pullback_examples():
    X = nerve_of_complex(CIRCLE, 2)
    phi = pullback_cochain_map(identity_sset_map(X), 1)
    assert all(phi.map(n) == QMatrix.identity(phi.source.dim(n)) for n in range(2))
    const = induced_sset_map(VertexMap(TRIANGLE, POINT, {1: "p", 2: "p", 3: "p"}), 2)
    psi = pullback_cochain_map(const, 2)
    assert validate_morphism(psi)
    assert psi.map(1).is_zero() and psi.map(2).is_zero() and not psi.map(0).is_zero()
    assert validate_morphism(pullback_cochain_map(const, 2, normalized=False))


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False), st.booleans())
def test_pullbacks_commute_with_coboundaries(rng, normalized):
    prob = random_problem(rng, q=1)
    g = induced_sset_map(prob.f, 2)
    assert validate_morphism(pullback_cochain_map(g, 2, normalized))


def test_surjectivity_examples():
    X = nerve_of_complex(CIRCLE, 2)
    assert check_levelwise_surjective(identity_sset_map(X))
    point_in_edge = induced_sset_map(VertexMap(SComplex([0]), EDGE, {0: 0}), 2)
    assert not check_levelwise_surjective(point_in_edge)


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_maps_onto_their_image_are_levelwise_surjective(rng):
    prob = random_problem(rng, q=2)
    assert check_levelwise_surjective(induced_sset_map(prob.f, 3))


# -- fibered powers ---------------------------------------------------------------------

def test_fibered_power_examples():
    prob = two_arc_cover()
    g = induced_sset_map(prob.f, 2)
    assert fibered_power(g, 0).carrier.nd_counts() == g.source.nd_counts()
    two = DescentProblem(SComplex(["a", "b"]), {"a": "p", "b": "p"}, 1)
    assert len(fibered_power(induced_sset_map(two.f, 1), 1).carrier.nd[0]) == 4
    W1 = fibered_power(g, 1)
    assert cohomology_dims(normalized_cochain_complex(W1.carrier), 0, 1) == [6, 0]
    # the graph is 1-dimensional, so b_1 is its cycle rank
    assert len(W1.carrier.nd_counts()) == 2
    assert power_components(prob, 1) == 6


def test_two_arc_power_components():
    prob = two_arc_cover()
    assert [power_components(prob, p) for p in range(3)] == [2, 6, 14]


def test_projection_examples():
    prob = two_arc_cover()
    g = induced_sset_map(prob.f, 1)
    W1 = fibered_power(g, 1)
    W0 = fibered_power(g, 0)
    pi0, pi1 = projection_map(W1, 0, W0), projection_map(W1, 1, W0)
    pt = ("a0", "b0")
    assert pi0.on_points(pt) == ("b0",)
    assert pi1.on_points(pt) == ("a0",)
    diag = ("a1", "a1")
    assert pi0.on_points(diag) == pi1.on_points(diag)
    with pytest.raises(SimplicialError):
        projection_map(W0, 0)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 2))
def test_power_components_match_graph_oracle(rng, p):
    prob = random_problem(rng, q=1, max_facets=3, max_facet_size=3)
    g = induced_sset_map(prob.f, 1)
    W = fibered_power(g, p)
    assert cohomology_dims(normalized_cochain_complex(W.carrier), 0, 0)[0] == power_components(prob, p)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 2))
def test_coordinate_permutations_preserve_powers(rng, p):
    prob = random_problem(rng, q=1, max_facets=3, max_facet_size=3)
    W = fibered_power(induced_sset_map(prob.f, 2), p).carrier
    for perm in permutations(range(p + 1)):
        for level in W.nd:
            moved = {tuple(tuple(pt[k] for k in perm) for pt in x) for x in level}
            assert moved == set(level)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 3))
def test_injective_maps_have_trivial_powers(rng, p):
    K = random_subcomplex(rng)
    prob = DescentProblem(K, {v: f"y{v}" for v in K.vertices}, 2)
    g = induced_sset_map(prob.f, 2)
    W = fibered_power(g, p)
    assert W.carrier.nd_counts() == g.source.nd_counts()
    for level in W.carrier.nd:
        for x in level:
            assert all(len(set(pt)) == 1 for pt in x)


def test_fibered_power_rejects_bad_arguments():
    g = induced_sset_map(two_arc_cover().f, 1)
    with pytest.raises(SimplicialError):
        fibered_power(g, -1)
    with pytest.raises(SimplicialError):
        fibered_power(g, 1, cap=5)


def test_sset_map_applies_on_points():
    X = nerve_of_complex(CIRCLE, 1)
    g = SSetMap(X, X, lambda v: 4 - v)
    assert g.image_seq((1, 1, 2)) == (3, 3, 2)
