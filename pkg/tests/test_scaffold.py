from __future__ import annotations

import json
from fractions import Fraction

import pytest

from cohodescent.complexes import ComplexMorphism
from cohodescent.descent import betti_of_image
from cohodescent.instances import canonical_suite, identity_circle, two_arc_cover
from cohodescent.ratlinalg import QMatrix
from cohodescent.scaffold import (
    BundleError,
    QuadraticPoly,
    ScaffoldError,
    assemble_from_provider,
    coordinate_swap,
    emit_system,
    fibered_variables,
    generate_fibered_systems,
    mock_bundle,
    parse_system,
    point_bundle,
    substitute_block,
    zero_bundle,
)


def poly(text, k=2, m=2):
    return QuadraticPoly.parse(text, k, m)


def test_parse_and_print():
    P = poly("X1^2 + 2*X1*Y2 - 1/3")
    assert P.degree == 2
    assert P.coeffs[("X1", "X1")] == 1
    assert P.coeffs[("X1", "Y2")] == 2
    assert P.coeffs[()] == Fraction(-1, 3)
    assert str(P) == "X1^2 + 2*X1*Y2 - 1/3"
    assert poly("X_1 - X1") == QuadraticPoly(P.variables)


@pytest.mark.parametrize("text, message", [
    ("X1^3", "degree"),
    ("X3 + 1", "unknown variables"),
    ("X1 +* 2", "cannot parse"),
    ("sqrt(2)*X1", "not rational"),
])
def test_parse_errors(text, message):
    with pytest.raises(ScaffoldError, match=message):
        poly(text)


def test_substitute_block_examples():
    P = QuadraticPoly.parse("X1^2 + Y1", 1, 1)
    assert str(substitute_block(P, 2, 1, 1, 1)) == "X1_2^2 + Y1"
    C = QuadraticPoly.parse("7", 1, 1)
    assert substitute_block(C, 0, 1, 1, 1).coeffs == C.coeffs
    P = poly("X1*X2 - Y1*Y2 + 1")
    assert str(substitute_block(P, 0, 2, 2, 0)) == "X1_0*X2_0 - Y1*Y2 + 1"
    with pytest.raises(ScaffoldError):
        substitute_block(P, 3, 2, 2, 1)


@pytest.mark.parametrize("ell, k, m, q", [(2, 3, 1, 1), (1, 2, 2, 0), (3, 1, 1, 2)])
def test_fibered_counts(ell, k, m, q):
    polys = [QuadraticPoly.parse(f"X1^2 - {n}", k, m) for n in range(1, ell + 1)]
    fs = generate_fibered_systems(polys, q, k, m)
    assert len(fs.variables) == k * (q + 2) + m
    assert len([v for v in fs.variables if v.startswith("X")]) == k * (q + 2)
    for p in range(q + 2):
        assert len(fs.system(p)) == ell * (p + 1)
        assert fs.index_sets[p] == list(range(1, (p + 1) * ell + 1))
        # S_p is exactly the polynomials indexed by L_p
        assert sorted(fs.q_index(i, j) for i, j in fs.systems[p]) == fs.index_sets[p]


def test_fibered_examples():
    polys = [QuadraticPoly.parse(t, 3, 1) for t in ("X1^2 + X2^2 + X3^2 - Y1^2 - 1", "X1*X2 - Y1 + 1/2")]
    fs = generate_fibered_systems(polys, 1)
    assert len([v for v in fs.variables if v.startswith("X")]) == 9
    assert len(fs.index_sets[1]) == 4
    assert len(fs.system(1)) == 4
    one = generate_fibered_systems([QuadraticPoly.parse("X1 - Y1", 1, 1)], 0)
    assert [len(one.system(p)) for p in range(2)] == [1, 2]


def test_system_document_round_trip():
    polys = [QuadraticPoly.parse(t, 3, 1) for t in ("X1^2 + X2^2 + X3^2 - Y1^2 - 1", "X1*X2 - Y1 + 1/2")]
    fs = generate_fibered_systems(polys, 1)
    text = emit_system(fs)
    doc = json.loads(text)
    assert len(doc["variables"]) == 10
    assert [len(s["members"]) for s in doc["systems"]] == [2, 4, 6]
    assert emit_system(parse_system(text)) == text
    empty = generate_fibered_systems([], 1, 2, 1)
    text = emit_system(empty)
    assert [s["members"] for s in json.loads(text)["systems"]] == [[], [], []]
    assert emit_system(parse_system(text)) == text


def test_tampered_system_document_is_rejected():
    fs = generate_fibered_systems([QuadraticPoly.parse("X1 - Y1", 1, 1)], 0)
    doc = json.loads(emit_system(fs))
    doc["blocks"][1]["terms"][0]["coeff"] = "5"
    with pytest.raises(ScaffoldError, match="P1_1"):
        parse_system(json.dumps(doc))


def test_coordinate_swap_examples():
    ident = coordinate_swap(1, 1, 2, 1, 1)
    assert all(k == v for k, v in ident.items())
    s = coordinate_swap(1, 0, 2, 0, 0)
    assert s["X1_0"] == "X1_1" and s["X2_0"] == "X2_1"
    assert s["X1_1"] == "X1_0" and s["X2_1"] == "X2_0"
    for p in range(4):
        for j in range(p + 1):
            perm = coordinate_swap(p, j, 2, 1, 2)
            assert sorted(perm.values()) == sorted(fibered_variables(2, 1, 2))
            assert all(perm[perm[v]] == v for v in perm)
    with pytest.raises(ScaffoldError):
        coordinate_swap(0, 1, 1, 1, 1)


# -- provider bundles -----------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(canonical_suite()))
def test_mock_bundle_reproduces_descent(name):
    prob = canonical_suite()[name]
    assert assemble_from_provider(mock_bundle(prob), prob.q) == tuple(betti_of_image(prob))


def test_mock_bundle_with_wider_blocks():
    prob = two_arc_cover()
    bundle = mock_bundle(prob, ell=2)
    assert bundle.L(1) == (1, 2, 3, 4)
    assert assemble_from_provider(bundle, 1) == (1, 1)


def test_zero_and_point_bundles():
    assert assemble_from_provider(zero_bundle(2), 2) == (0, 0, 0)
    # Q in every column with identity maps: the Cech pattern of a point
    assert assemble_from_provider(point_bundle(2), 2) == (1, 0, 0)
    # only F_{L_0} nonzero: b_0 comes from row 0 alone
    assert assemble_from_provider(point_bundle(1, only_first=True), 1) == (1, 0)


def test_corrupted_bundle_names_the_failing_square():
    bundle = mock_bundle(two_arc_cover())
    key = (bundle.L(0), bundle.L(1), 1)
    phi = bundle.morphisms[key]
    broken = dict(phi.maps)
    broken[0] = broken[0].scale(2) + QMatrix(broken[0].rows, broken[0].cols, {(0, 0): 1})
    bundle.morphisms[key] = ComplexMorphism(phi.source, phi.target, broken)
    with pytest.raises(BundleError) as err:
        assemble_from_provider(bundle, 1)
    msg = str(err.value)
    assert "{1}->{1,2}" in msg and "h=1" in msg and "degree 0" in msg


def test_missing_pieces_are_reported():
    bundle = mock_bundle(identity_circle())
    del bundle.complexes[bundle.L(2)]
    with pytest.raises(BundleError, match=r"missing complex F_\{1,2,3\}"):
        assemble_from_provider(bundle, 1)
    bundle = mock_bundle(identity_circle())
    del bundle.morphisms[bundle.L(1), bundle.L(2), 2]
    with pytest.raises(BundleError, match="h=2"):
        assemble_from_provider(bundle, 1)
