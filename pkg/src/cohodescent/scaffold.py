"""Fibered quadratic systems and assembly of the descent complex from a provider bundle.

Given P_1..P_l in X_1..X_k, Y_1..Y_m (degree <= 2), the block copies
P_{i,j} = P_i(X_{1,j}, ..., X_{k,j}, Y) for 0 <= j <= q+1 define systems
S_p = {P_{i,j} : j <= p}.  Listing the blocks as Q = (P_{1,0}, ..., P_{l,0},
P_{1,1}, ...) makes S_j the polynomials indexed by L_j = {1, ..., (j+1) l}.

A provider (any implementation of the quadratic complex construction)
supplies a complex F_J per index set J and morphisms
phi_{i+1,h}: F_{L_i} -> F_{L_{i+1}}.  ``assemble_from_provider`` builds the
truncated double complex with F^j_{L_i} in cell (i, j) and returns the
Betti numbers of its total complex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import sympy

from .bicomplex import DoubleComplex, total_complex, validate_double_complex
from .complexes import CochainComplex, ComplexMorphism, cohomology_dims, validate_complex, validate_morphism
from .ratlinalg import QMatrix, to_rational

Monomial = tuple[str, ...]


class ScaffoldError(ValueError):
    pass


class BundleError(ValueError):
    pass


def base_variables(k: int, m: int) -> list[str]:
    return [f"X{i}" for i in range(1, k + 1)] + [f"Y{i}" for i in range(1, m + 1)]


def block_variable(i: int, j: int) -> str:
    return f"X{i}_{j}"


def fibered_variables(k: int, m: int, q: int) -> list[str]:
    """X_{i,j} (grouped by block j) followed by Y_1..Y_m: k(q+2) + m names."""
    xs = [block_variable(i, j) for j in range(q + 2) for i in range(1, k + 1)]
    return xs + [f"Y{i}" for i in range(1, m + 1)]


@dataclass(frozen=True)
class QuadraticPoly:
    """Polynomial of total degree <= 2 with rational coefficients.

    ``coeffs`` maps a sorted tuple of variable names (with repetition) to
    its coefficient; zero coefficients are not stored.
    """

    variables: tuple[str, ...]
    coeffs: Mapping[Monomial, Fraction | int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        known = set(self.variables)
        for mono, c in self.coeffs.items():
            mono = tuple(sorted(mono))
            if len(mono) > 2:
                raise ScaffoldError(f"monomial {'*'.join(mono)} has degree {len(mono)} > 2")
            unknown = [v for v in mono if v not in known]
            if unknown:
                raise ScaffoldError(f"unknown variables {unknown}")
            c = to_rational(c)
            if c:
                clean[mono] = to_rational(clean.get(mono, 0) + c)
                if not clean[mono]:
                    del clean[mono]
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "variables", tuple(self.variables))

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.coeffs), default=0)

    def terms(self) -> list[tuple[Monomial, Fraction | int]]:
        return sorted(self.coeffs.items(), key=lambda kv: (-len(kv[0]), kv[0]))

    def rename(self, mapping: Mapping[str, str], variables: Iterable[str]) -> QuadraticPoly:
        out: dict[Monomial, Fraction | int] = {}
        for mono, c in self.coeffs.items():
            new = tuple(sorted(mapping.get(v, v) for v in mono))
            out[new] = out.get(new, 0) + c
        return QuadraticPoly(tuple(variables), out)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for mono, c in self.terms():
            names = []
            for v in sorted(set(mono)):
                e = mono.count(v)
                names.append(v if e == 1 else f"{v}^{e}")
            body = "*".join(names)
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if body and mag == 1:
                term = body
            elif body:
                term = f"{mag}*{body}"
            else:
                term = str(mag)
            parts.append((sign, term))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, term in parts[1:]:
            text += f" {sign} {term}"
        return text

    @classmethod
    def parse(cls, text: str, k: int, m: int) -> QuadraticPoly:
        """Parse e.g. ``"X1^2 - 2*X1*Y1 + 1/3"`` over X1..Xk, Y1..Ym."""
        names = base_variables(k, m)
        syms = {n: sympy.Symbol(n) for n in names}
        # accept X_1 as an alias of X1
        local = dict(syms)
        for n in names:
            local[f"{n[0]}_{n[1:]}"] = syms[n]
        try:
            expr = sympy.parse_expr(text.replace("^", "**"), local_dict=local, evaluate=True)
        except Exception as exc:  # sympy raises a variety of parse errors
            raise ScaffoldError(f"cannot parse polynomial {text!r}: {exc}") from None
        unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in syms)
        if unknown:
            raise ScaffoldError(f"polynomial {text!r} uses unknown variables {unknown}")
        gens = [syms[n] for n in names]
        if not gens:
            gens = [sympy.Symbol("_unused")]
        poly = sympy.Poly(expr, *gens)
        coeffs: dict[Monomial, Fraction] = {}
        for exps, c in poly.terms():
            if not c.is_Rational:
                raise ScaffoldError(f"coefficient {c} in {text!r} is not rational")
            mono = tuple(n for n, e in zip(names, exps) for _ in range(e))
            if len(mono) > 2:
                raise ScaffoldError(f"polynomial {text!r} has degree {sum(exps)} > 2")
            coeffs[mono] = Fraction(int(c.p), int(c.q))
        return cls(tuple(names), coeffs)


def substitute_block(P: QuadraticPoly, j: int, k: int, m: int, q: int) -> QuadraticPoly:
    """Replace X_i by X_{i,j}; Y variables are unchanged."""
    if not 0 <= j <= q + 1:
        raise ScaffoldError(f"block index {j} outside 0..{q + 1}")
    allowed = set(base_variables(k, m))
    for mono in P.coeffs:
        bad = [v for v in mono if v not in allowed]
        if bad:
            raise ScaffoldError(f"unknown variables {bad}")
    mapping = {f"X{i}": block_variable(i, j) for i in range(1, k + 1)}
    return P.rename(mapping, fibered_variables(k, m, q))


@dataclass
class FiberedSystem:
    k: int
    m: int
    ell: int
    q: int
    polys: list[QuadraticPoly]
    variables: list[str]
    blocks: dict[tuple[int, int], QuadraticPoly]
    systems: list[list[tuple[int, int]]]
    index_sets: list[list[int]]

    def q_index(self, i: int, j: int) -> int:
        """Position of P_{i,j} in Q = (P_{1,0}, ..., P_{l,0}, P_{1,1}, ...), 1-based."""
        return j * self.ell + i

    def system(self, p: int) -> list[QuadraticPoly]:
        return [self.blocks[c] for c in self.systems[p]]

    def essential_variables(self, p: int) -> list[str]:
        return [block_variable(i, j) for j in range(p + 1) for i in range(1, self.k + 1)] + \
            [f"Y{i}" for i in range(1, self.m + 1)]


def generate_fibered_systems(polys: list[QuadraticPoly], q: int, k: int | None = None,
                             m: int | None = None) -> FiberedSystem:
    if q < 0:
        raise ScaffoldError("q must be non-negative")
    if k is None or m is None:
        if not polys:
            raise ScaffoldError("k and m are required when there are no polynomials")
        xs = [v for v in polys[0].variables if v.startswith("X")]
        ys = [v for v in polys[0].variables if v.startswith("Y")]
        k = len(xs) if k is None else k
        m = len(ys) if m is None else m
    for n, P in enumerate(polys, 1):
        if P.degree > 2:
            raise ScaffoldError(f"P{n} has degree {P.degree} > 2")
    ell = len(polys)
    blocks = {}
    for j in range(q + 2):
        for i, P in enumerate(polys, 1):
            blocks[i, j] = substitute_block(P, j, k, m, q)
    systems = [[(i, j) for j in range(p + 1) for i in range(1, ell + 1)] for p in range(q + 2)]
    index_sets = [list(range(1, (j + 1) * ell + 1)) for j in range(q + 2)]
    return FiberedSystem(k, m, ell, q, list(polys), fibered_variables(k, m, q), blocks, systems, index_sets)


def coordinate_swap(p: int, j: int, k: int, m: int, q: int) -> dict[str, str]:
    """Variable permutation exchanging blocks X_{.,j} and X_{.,p}; everything else fixed."""
    if not (0 <= j <= p <= q + 1):
        raise ScaffoldError(f"need 0 <= j <= p <= q+1, got j={j}, p={p}, q={q}")
    perm = {v: v for v in fibered_variables(k, m, q)}
    for i in range(1, k + 1):
        perm[block_variable(i, j)] = block_variable(i, p)
        perm[block_variable(i, p)] = block_variable(i, j)
    return perm


# -- provider bundles -------------------------------------------------------------------

IndexSet = tuple[int, ...]


@dataclass
class ProviderBundle:
    """Complexes F_J and morphisms phi_{i+1,h}: F_{L_i} -> F_{L_{i+1}}.

    ``morphisms`` is keyed by (I, J, h).  ``permutations`` holds the
    coordinate-swap isomorphisms keyed by (J, p, j); they are validated but
    the assembly does not need them.
    """

    ell: int
    complexes: dict[IndexSet, CochainComplex] = field(default_factory=dict)
    morphisms: dict[tuple[IndexSet, IndexSet, int], ComplexMorphism] = field(default_factory=dict)
    permutations: dict[tuple[IndexSet, int, int], ComplexMorphism] = field(default_factory=dict)

    def L(self, j: int) -> IndexSet:
        return tuple(range(1, (j + 1) * self.ell + 1))


def _fmt(J: IndexSet) -> str:
    return "{" + ",".join(map(str, J)) + "}"


def validate_bundle(bundle: ProviderBundle) -> None:
    for J, F in sorted(bundle.complexes.items()):
        r = validate_complex(F)
        if not r:
            raise BundleError(f"complex F_{_fmt(J)}: {r.failures[0]}")
        if F.lo < 0 and any(F.dim(d) for d in range(F.lo, 0)):
            raise BundleError(f"complex F_{_fmt(J)} has nonzero terms in negative degrees")
    for (I, J, h), phi in sorted(bundle.morphisms.items()):
        r = validate_morphism(phi)
        if not r:
            raise BundleError(f"morphism phi_{_fmt(I)}->{_fmt(J)} (h={h}) at degree {r.location}: {_reason(r)}")
    for (J, p, j), phi in sorted(bundle.permutations.items()):
        r = validate_morphism(phi)
        if not r:
            raise BundleError(f"permutation F_{_fmt(J)} swap({p},{j}) at degree {r.location}: {_reason(r)}")


def _reason(report) -> str:
    # the report already names the degree; keep only what went wrong there
    return report.failures[0].split(f"degree {report.location}: ", 1)[-1]


def bundle_double_complex(bundle: ProviderBundle, q: int) -> DoubleComplex:
    """Cell (i, j) = F^j_{L_i} for i + j <= q + 1; vertical (-1)^i d, horizontal sum_h (-1)^h phi_{i+1,h}."""
    top = q + 1
    for i in range(top + 1):
        if bundle.L(i) not in bundle.complexes:
            raise BundleError(f"missing complex F_{_fmt(bundle.L(i))} (column {i})")
    for i in range(top):
        for h in range(i + 2):
            if (bundle.L(i), bundle.L(i + 1), h) not in bundle.morphisms:
                raise BundleError(f"missing morphism phi_{_fmt(bundle.L(i))}->{_fmt(bundle.L(i + 1))} (h={h})")
    dims, horiz, vert = {}, {}, {}
    for i in range(top + 1):
        F = bundle.complexes[bundle.L(i)]
        for j in range(top - i + 1):
            dims[i, j] = F.dim(j)
            if i + j + 1 <= top:
                d = F.diff(j)
                vert[i, j] = -d if i % 2 else d
                total = None
                for h in range(i + 2):
                    mj = bundle.morphisms[bundle.L(i), bundle.L(i + 1), h].map(j)
                    mj = -mj if h % 2 else mj
                    total = mj if total is None else total + mj
                horiz[i, j] = total
    return DoubleComplex(dims, horiz, vert)


def assemble_from_provider(bundle: ProviderBundle, q: int) -> tuple[int, ...]:
    validate_bundle(bundle)
    D = bundle_double_complex(bundle, q)
    r = validate_double_complex(D)
    if not r:
        raise BundleError(f"assembled double complex fails at cell {r.location}: {r.failures[0]}")
    T = total_complex(D, check=False)
    return tuple(cohomology_dims(T, 0, q, check=False))


def mock_bundle(prob, ell: int = 1) -> ProviderBundle:
    """Bundle whose F_{L_i} are normalized cochains of W^i and whose phi are projection pullbacks."""
    from .descent import DescentTower

    tower = DescentTower(prob, normalized=True)
    bundle = ProviderBundle(ell)
    for i, W in enumerate(tower.powers):
        bundle.complexes[bundle.L(i)] = tower.cochains(i)
    for i in range(tower.top):
        S, T = tower.cochains(i), tower.cochains(i + 1)
        top = tower.powers[i + 1].cap
        for h in range(i + 2):
            maps = {n: tower.pullback(i + 1, h, n) for n in range(top + 1)}
            bundle.morphisms[bundle.L(i), bundle.L(i + 1), h] = ComplexMorphism(S, T, maps, name=f"phi_{i + 1},{h}")
    return bundle


def zero_bundle(q: int, ell: int = 1) -> ProviderBundle:
    bundle = ProviderBundle(ell)
    for i in range(q + 2):
        bundle.complexes[bundle.L(i)] = CochainComplex({})
    for i in range(q + 1):
        for h in range(i + 2):
            bundle.morphisms[bundle.L(i), bundle.L(i + 1), h] = ComplexMorphism(
                bundle.complexes[bundle.L(i)], bundle.complexes[bundle.L(i + 1)])
    return bundle


def point_bundle(q: int, ell: int = 1, only_first: bool = False) -> ProviderBundle:
    """Every F_{L_i} (or only F_{L_0}) is Q in degree 0; every phi is the identity where both ends are Q."""
    bundle = ProviderBundle(ell)
    for i in range(q + 2):
        dims = {0: 1} if (i == 0 or not only_first) else {}
        bundle.complexes[bundle.L(i)] = CochainComplex(dims)
    for i in range(q + 1):
        S, T = bundle.complexes[bundle.L(i)], bundle.complexes[bundle.L(i + 1)]
        for h in range(i + 2):
            maps = {0: QMatrix.identity(1)} if S.dim(0) and T.dim(0) else {}
            bundle.morphisms[bundle.L(i), bundle.L(i + 1), h] = ComplexMorphism(S, T, maps)
    return bundle


# -- system documents -------------------------------------------------------------------

SYSTEM_FORMAT = "cohodescent.fibered-system/1"


def _terms_doc(P: QuadraticPoly) -> list[dict]:
    return [{"monomial": list(mono), "coeff": str(Fraction(c))} for mono, c in P.terms()]


def _terms_from_doc(terms: list[dict], variables: Iterable[str]) -> QuadraticPoly:
    coeffs = {}
    for t in terms:
        coeffs[tuple(t["monomial"])] = Fraction(t["coeff"])
    return QuadraticPoly(tuple(variables), coeffs)


def system_to_doc(fs: FiberedSystem) -> dict:
    return {
        "format": SYSTEM_FORMAT,
        "k": fs.k,
        "m": fs.m,
        "ell": fs.ell,
        "q": fs.q,
        "variables": list(fs.variables),
        "polynomials": [{"label": f"P{i}", "text": str(P), "terms": _terms_doc(P)}
                        for i, P in enumerate(fs.polys, 1)],
        "blocks": [
            {"label": f"P{i}_{j}", "i": i, "j": j, "q_index": fs.q_index(i, j),
             "text": str(fs.blocks[i, j]), "terms": _terms_doc(fs.blocks[i, j])}
            for j in range(fs.q + 2) for i in range(1, fs.ell + 1)
        ],
        "systems": [{"p": p, "members": [f"P{i}_{j}" for i, j in members]}
                    for p, members in enumerate(fs.systems)],
        "index_sets": [{"j": j, "indices": list(L)} for j, L in enumerate(fs.index_sets)],
    }


def emit_system(fs: FiberedSystem) -> str:
    return json.dumps(system_to_doc(fs), indent=2, sort_keys=True) + "\n"


def parse_system(text: str) -> FiberedSystem:
    doc = json.loads(text)
    if doc.get("format") != SYSTEM_FORMAT:
        raise ScaffoldError(f"unsupported system format {doc.get('format')!r}")
    k, m, q = doc["k"], doc["m"], doc["q"]
    polys = [_terms_from_doc(p["terms"], base_variables(k, m)) for p in doc["polynomials"]]
    fs = generate_fibered_systems(polys, q, k, m)
    if fs.ell != doc["ell"] or fs.variables != doc["variables"]:
        raise ScaffoldError("system document is inconsistent with its polynomials")
    for b in doc["blocks"]:
        given = _terms_from_doc(b["terms"], fs.variables)
        if given != fs.blocks[b["i"], b["j"]]:
            raise ScaffoldError(f"block {b['label']} does not match its source polynomial")
    return fs
