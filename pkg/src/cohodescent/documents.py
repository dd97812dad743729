"""JSON document formats: descent problems, provider bundles, polynomial inputs.

Matrices travel as triplet lists ``[row, col, "num/den"]`` so rationals stay
exact in text.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .complexes import CochainComplex, ComplexMorphism
from .descent import DescentProblem
from .ratlinalg import QMatrix
from .scaffold import ProviderBundle, QuadraticPoly, ScaffoldError
from .simpsets import SComplex, SimplicialError

BUNDLE_FORMAT = "cohodescent.provider-bundle/1"


class InputError(ValueError):
    """Malformed input document; the message names the offending element."""


def load_json(path: str | Path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc: dict, name: str, kind, where: str = ""):
    if not isinstance(doc, dict):
        raise InputError(f"{where or 'document'}: expected a JSON object")
    if name not in doc:
        raise InputError(f"{where}{name}: missing field")
    value = doc[name]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise InputError(f"{where}{name}: expected {getattr(kind, '__name__', kind)}")
    return value


def _nat(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise InputError(f"{where}: expected a non-negative integer")
    return value


# -- descent problems -------------------------------------------------------------------

def parse_problem(doc, q: int | None = None) -> DescentProblem:
    """Fields: vertices, facets, map, q; optional target_order."""
    vertices = _field(doc, "vertices", list)
    for k, v in enumerate(vertices):
        if not isinstance(v, str):
            raise InputError(f"vertices[{k}]: expected a string")
    if len(set(vertices)) != len(vertices):
        raise InputError("vertices: duplicate names")
    facets = _field(doc, "facets", list)
    known = set(vertices)
    for k, facet in enumerate(facets):
        if not isinstance(facet, list):
            raise InputError(f"facets[{k}]: expected a list of vertex names")
        for v in facet:
            if v not in known:
                raise InputError(f"facets[{k}]: unknown vertex {v!r}")
    assignment = _field(doc, "map", dict)
    for v in vertices:
        if v not in assignment:
            raise InputError(f"map: vertex {v!r} is not assigned")
        if not isinstance(assignment[v], str):
            raise InputError(f"map[{v!r}]: expected a vertex name")
    for v in assignment:
        if v not in known:
            raise InputError(f"map: {v!r} is not a source vertex")
    if q is None:
        q = _nat(_field(doc, "q", int), "q")
    else:
        q = _nat(q, "--q")
    target_order = doc.get("target_order")
    if target_order is not None and not isinstance(target_order, list):
        raise InputError("target_order: expected a list of vertex names")
    try:
        X = SComplex(vertices, facets)
        return DescentProblem(X, assignment, q, target_order)
    except SimplicialError as exc:
        raise InputError(f"map: {exc}") from None


def problem_to_doc(prob: DescentProblem) -> dict:
    return {
        "vertices": [str(v) for v in prob.X.vertices],
        "facets": [[str(v) for v in s] for s in prob.X.maximal_simplices()],
        "map": {str(v): str(prob.assignment[v]) for v in prob.X.vertices},
        "target_order": [str(v) for v in prob.Y.vertices],
        "q": prob.q,
    }


# -- matrices and complexes ---------------------------------------------------------------

def matrix_to_triplets(M: QMatrix) -> list[list]:
    return [[r, c, str(Fraction(v))] for r, c, v in M.items()]


def matrix_from_triplets(triplets, rows: int, cols: int, where: str) -> QMatrix:
    if not isinstance(triplets, list):
        raise InputError(f"{where}: expected a list of [row, col, value] triplets")
    entries = {}
    for k, t in enumerate(triplets):
        if not (isinstance(t, list) and len(t) == 3):
            raise InputError(f"{where}[{k}]: expected [row, col, value]")
        r, c, v = t
        if not (isinstance(r, int) and isinstance(c, int) and 0 <= r < rows and 0 <= c < cols):
            raise InputError(f"{where}[{k}]: index ({r}, {c}) outside shape ({rows}, {cols})")
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            raise InputError(f"{where}[{k}]: value must be an integer or a 'num/den' string")
        try:
            entries[r, c] = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}[{k}]: bad rational {v!r}") from None
    return QMatrix(rows, cols, entries)


def complex_to_doc(J, C: CochainComplex) -> dict:
    return {
        "index_set": list(J),
        "degree_range": [C.lo, C.hi],
        "dims": C.dims(),
        "differentials": [{"degree": i, "entries": matrix_to_triplets(m)}
                          for i, m in sorted(C.nonzero_diffs().items())],
    }


def complex_from_doc(doc, where: str) -> tuple[tuple[int, ...], CochainComplex]:
    J = tuple(_field(doc, "index_set", list, f"{where}."))
    rng = _field(doc, "degree_range", list, f"{where}.")
    if len(rng) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in rng):
        raise InputError(f"{where}.degree_range: expected [lo, hi] integers")
    lo, hi = rng
    dims = _field(doc, "dims", list, f"{where}.")
    if len(dims) != hi - lo + 1:
        raise InputError(f"{where}.dims: expected {hi - lo + 1} entries for degree range [{lo}, {hi}]")
    for k, n in enumerate(dims):
        _nat(n, f"{where}.dims[{k}]")
    dim = {lo + k: n for k, n in enumerate(dims)}
    diffs = {}
    for k, d in enumerate(_field(doc, "differentials", list, f"{where}.")):
        i = _field(d, "degree", int, f"{where}.differentials[{k}].")
        diffs[i] = matrix_from_triplets(d.get("entries"), dim.get(i + 1, 0), dim.get(i, 0),
                                        f"{where}.differentials[{k}].entries")
    return J, CochainComplex(dim, diffs, lo=lo)


def _morphism_doc(I, J, phi: ComplexMorphism, **extra) -> dict:
    doc = {"from": list(I), "to": list(J)}
    doc.update(extra)
    doc["matrices"] = [{"degree": i, "entries": matrix_to_triplets(m)}
                       for i, m in sorted(phi.maps.items()) if not m.is_zero()]
    return doc


def bundle_to_doc(bundle: ProviderBundle) -> dict:
    return {
        "format": BUNDLE_FORMAT,
        "ell": bundle.ell,
        "complexes": [complex_to_doc(J, C) for J, C in sorted(bundle.complexes.items())],
        "morphisms": [_morphism_doc(I, J, phi, h=h) for (I, J, h), phi in sorted(bundle.morphisms.items())],
        "permutations": [_morphism_doc(J, J, phi, swap=[p, j])
                         for (J, p, j), phi in sorted(bundle.permutations.items())],
    }


def bundle_from_doc(doc) -> ProviderBundle:
    fmt = _field(doc, "format", str)
    if fmt != BUNDLE_FORMAT:
        raise InputError(f"format: unsupported bundle format {fmt!r}")
    bundle = ProviderBundle(_nat(_field(doc, "ell", int), "ell"))
    for k, cdoc in enumerate(_field(doc, "complexes", list)):
        J, C = complex_from_doc(cdoc, f"complexes[{k}]")
        if J in bundle.complexes:
            raise InputError(f"complexes[{k}]: duplicate index set {list(J)}")
        bundle.complexes[J] = C

    def read_maps(mdoc, where, S, T):
        maps = {}
        for k, m in enumerate(_field(mdoc, "matrices", list, f"{where}.")):
            i = _field(m, "degree", int, f"{where}.matrices[{k}].")
            maps[i] = matrix_from_triplets(m.get("entries"), T.dim(i), S.dim(i),
                                           f"{where}.matrices[{k}].entries")
        return maps

    def lookup(J, where):
        if J not in bundle.complexes:
            raise InputError(f"{where}: no complex with index set {list(J)}")
        return bundle.complexes[J]

    for k, mdoc in enumerate(_field(doc, "morphisms", list)):
        where = f"morphisms[{k}]"
        I = tuple(_field(mdoc, "from", list, f"{where}."))
        J = tuple(_field(mdoc, "to", list, f"{where}."))
        h = _nat(_field(mdoc, "h", int, f"{where}."), f"{where}.h")
        S, T = lookup(I, f"{where}.from"), lookup(J, f"{where}.to")
        bundle.morphisms[I, J, h] = ComplexMorphism(S, T, read_maps(mdoc, where, S, T), name=f"phi(h={h})")
    for k, mdoc in enumerate(doc.get("permutations", [])):
        where = f"permutations[{k}]"
        J = tuple(_field(mdoc, "from", list, f"{where}."))
        swap = _field(mdoc, "swap", list, f"{where}.")
        if len(swap) != 2:
            raise InputError(f"{where}.swap: expected [p, j]")
        p, j = (_nat(x, f"{where}.swap") for x in swap)
        C = lookup(J, f"{where}.from")
        bundle.permutations[J, p, j] = ComplexMorphism(C, C, read_maps(mdoc, where, C, C))
    return bundle


# -- polynomial inputs ---------------------------------------------------------------------

def parse_polynomials(doc) -> tuple[list[QuadraticPoly], int, int]:
    """Fields: k, m, polynomials (list of strings such as ``"X1^2 + Y1 - 1"``)."""
    k = _nat(_field(doc, "k", int), "k")
    m = _nat(_field(doc, "m", int), "m")
    polys = []
    for n, text in enumerate(_field(doc, "polynomials", list)):
        if not isinstance(text, str):
            raise InputError(f"polynomials[{n}]: expected a string")
        try:
            polys.append(QuadraticPoly.parse(text, k, m))
        except ScaffoldError as exc:
            raise InputError(f"polynomials[{n}]: {exc}") from None
    return polys, k, m


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
