"""Built-in algebras: quantum plane, quantum affine space, 2x2 quantum
matrices, their Poisson limits, and transcribed relation tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .cocomplex import HochschildComplex, PoissonComplex, WeightVector, poisson_cochain
from .homology import cochain_degree
from .ncpoly import (
    NcPoly, QuadraticAlgebra, confluence_check, koszul_numerical_check, parse_ncpoly,
    quadratic_dual, relation_span_equal,
)
from .poisson import (
    PoissonBracket, enveloping_names, jacobi_check, poisson_dual_presentation,
    poisson_enveloping, semiclassical_limit,
)
from .scalars import LAURENT, QQ


class MismatchWithPaperTable(AssertionError):
    """A generated presentation differs from its transcribed table."""


@dataclass
class CatalogEntry:
    """One named algebra.  ``algebra`` is the quadratic algebra itself (over
    Q[q, q^-1] for quantum entries, over Q for commutative Poisson entries);
    ``bracket`` is its stored Poisson bracket (the semiclassical limit for
    quantum entries)."""

    name: str
    algebra: QuadraticAlgebra
    bracket: PoissonBracket | None = None
    weights: list | None = None
    doc: str = ""
    quantum: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @cached_property
    def dual(self) -> QuadraticAlgebra:
        return quadratic_dual(self.algebra)

    @cached_property
    def enveloping(self) -> QuadraticAlgebra:
        return poisson_enveloping(self.bracket)

    @cached_property
    def enveloping_dual(self) -> QuadraticAlgebra:
        return poisson_dual_presentation(self.bracket)

    def hochschild(self, scaled: bool | None = None) -> HochschildComplex:
        scaled = self.quantum if scaled is None else scaled
        key = ("hh", scaled)
        if key not in self._cache:
            self._cache[key] = HochschildComplex(self.algebra, self.dual, scaled=scaled)
        return self._cache[key]

    def poisson(self) -> PoissonComplex:
        if self.bracket is None:
            raise ValueError(f"{self.name} has no Poisson bracket")
        if "hp" not in self._cache:
            self._cache["hp"] = PoissonComplex(self.bracket)
        return self._cache["hp"]

    def validate(self, top: int = 6) -> None:
        rep = confluence_check(self.algebra)
        if not rep.confluent:
            raise AssertionError(f"{self.name}: not confluent")
        if not koszul_numerical_check(self.algebra, self.dual, top):
            raise AssertionError(f"{self.name}: Hilbert series identity fails")
        if self.bracket is not None:
            ok, wit = jacobi_check(self.bracket)
            if not ok:
                raise AssertionError(f"{self.name}: Jacobi fails at {wit}")


def _rels(names, texts, ring=LAURENT) -> list:
    return [parse_ncpoly(t, names, ring) for t in texts]


def _commutative(names) -> QuadraticAlgebra:
    n = len(names)
    rels = [NcPoly({(i, j): 1, (j, i): -1}, QQ) for i in range(n) for j in range(i + 1, n)]
    return QuadraticAlgebra(names, rels, QQ, label="k[" + ",".join(names) + "]")


# ---------------------------------------------------------------------------


def quantum_affine_space(n: int, names=None) -> CatalogEntry:
    """x_i x_j = q x_j x_i for i < j; bracket {x_i, x_j} = x_i x_j."""
    if n < 1:
        raise ValueError("n must be positive")
    names = list(names or (["x", "y", "z"][:n] if n <= 3 else [f"x{i}" for i in range(1, n + 1)]))
    texts = [f"{names[i]}.{names[j]} - q*{names[j]}.{names[i]}" for i in range(n) for j in range(i + 1, n)]
    alg = QuadraticAlgebra(names, _rels(names, texts), LAURENT, label=f"A({n})")
    B = PoissonBracket(names, {(i, j): f"{names[i]}*{names[j]}" for i in range(n) for j in range(i + 1, n)},
                       label=f"A({n})")
    return CatalogEntry(f"quantum_affine_{n}", alg, B, doc=f"quantum affine {n}-space", quantum=True)


def quantum_plane() -> CatalogEntry:
    e = quantum_affine_space(2)
    e.name = "quantum_plane"
    e.algebra.label = e.bracket.label = "plane"
    e.doc = "quantum plane xy = q yx"
    return e


M_NAMES = ["a", "b", "c", "d"]

M_RELATIONS = [
    "a.b - q*b.a",
    "a.c - q*c.a",
    "b.c - c.b",
    "b.d - q*d.b",
    "c.d - q*d.c",
    "a.d - d.a - (q - q^-1)*b.c",
]

M_BRACKET = {(0, 1): "a*b", (0, 2): "a*c", (0, 3): "2*b*c", (1, 3): "b*d", (2, 3): "c*d"}

# dual relations in a*, b*, c*, d* (written with the undecorated names)
M_DUAL_RELATIONS = [
    "a.a", "b.b", "c.c", "d.d",
    "b.c + c.b + (q - q^-1)*a.d",
    "q*a.b + b.a", "q*a.c + c.a", "a.d + d.a", "q*b.d + d.b", "q*c.d + d.c",
]


def grade_weights() -> list:
    """a: +1, d: -1 on the algebra; the dual generators carry the negatives."""
    return [WeightVector([1, 0, 0, -1])]


def quantum_matrices_2x2() -> CatalogEntry:
    alg = QuadraticAlgebra(M_NAMES, _rels(M_NAMES, M_RELATIONS), LAURENT, label="M")
    B = PoissonBracket(M_NAMES, M_BRACKET, label="M")
    return CatalogEntry("quantum_matrices_2x2", alg, B, grade_weights(), "2x2 quantum matrices", quantum=True)


def transcribed_dual_m() -> QuadraticAlgebra:
    rels = [NcPoly(r.terms, LAURENT) for r in _rels(M_NAMES, M_DUAL_RELATIONS)]
    return QuadraticAlgebra([s + "*" for s in M_NAMES], rels, LAURENT, label="M^!")


def poisson_plane() -> CatalogEntry:
    names = ["x", "y"]
    B = PoissonBracket(names, {(0, 1): "x*y"}, label="plane")
    return CatalogEntry("poisson_plane", _commutative(names), B, doc="k[x,y] with {x,y} = xy")


def poisson_matrices() -> CatalogEntry:
    B = PoissonBracket(M_NAMES, M_BRACKET, label="M")
    return CatalogEntry("poisson_matrices", _commutative(M_NAMES), B, grade_weights(),
                        "k[a,b,c,d] with the 2x2 quantum matrix bracket")


# ---------------------------------------------------------------------------
# transcribed enveloping-algebra tables


PM_TABLE = [
    "Om_a.a - a.Om_a", "Om_a.b - b.Om_a - a.b", "Om_a.c - c.Om_a - a.c", "Om_a.d - d.Om_a - 2*b.c",
    "Om_b.a - a.Om_b + a.b", "Om_b.b - b.Om_b", "Om_b.c - c.Om_b", "Om_b.d - d.Om_b - b.d",
    "Om_c.a - a.Om_c + a.c", "Om_c.b - b.Om_c", "Om_c.c - c.Om_c", "Om_c.d - d.Om_c - c.d",
    "Om_d.a - a.Om_d + 2*b.c", "Om_d.b - b.Om_d + b.d", "Om_d.c - c.Om_d + c.d", "Om_d.d - d.Om_d",
    "Om_a.Om_b - Om_b.Om_a - a.Om_b - b.Om_a",
    "Om_a.Om_c - Om_c.Om_a - a.Om_c - c.Om_a",
    "Om_a.Om_d - Om_d.Om_a - 2*b.Om_c - 2*c.Om_b",
    "Om_b.Om_c - Om_c.Om_b",
    "Om_b.Om_d - Om_d.Om_b - b.Om_d - d.Om_b",
    "Om_c.Om_d - Om_d.Om_c - c.Om_d - d.Om_c",
]

# the same presentation with Omega~ generators over Q[q, q^-1]; the
# monomials are (xy - yx)/(q - 1), written as the reversed word
QPM_TABLE = [
    "Om_a.a - a.Om_a", "Om_a.b - b.Om_a - b.a", "Om_a.c - c.Om_a - c.a",
    "Om_a.d - d.Om_a - (1 + q^-1)*b.c",
    "Om_b.a - a.Om_b + b.a", "Om_b.b - b.Om_b", "Om_b.c - c.Om_b", "Om_b.d - d.Om_b - d.b",
    "Om_c.a - a.Om_c + c.a", "Om_c.b - b.Om_c", "Om_c.c - c.Om_c", "Om_c.d - d.Om_c - d.c",
    "Om_d.a - a.Om_d + (1 + q^-1)*b.c", "Om_d.b - b.Om_d + d.b", "Om_d.c - c.Om_d + d.c",
    "Om_d.d - d.Om_d",
    "q*Om_a.Om_b - Om_b.Om_a - a.Om_b - b.Om_a",
    "q*Om_a.Om_c - Om_c.Om_a - a.Om_c - c.Om_a",
    "Om_a.Om_d - Om_d.Om_a - (1 + q^-1)*b.Om_c - (1 + q^-1)*c.Om_b + (q - q^-1)*Om_b.Om_c",
    "Om_b.Om_c - Om_c.Om_b",
    "q*Om_b.Om_d - Om_d.Om_b - b.Om_d - d.Om_b",
    "q*Om_c.Om_d - Om_d.Om_c - c.Om_d - d.Om_c",
]

PLANE_TABLE = [
    "Om_x.x - x.Om_x", "Om_x.y - y.Om_x - x.y",
    "Om_y.x - x.Om_y + x.y", "Om_y.y - y.Om_y",
    "Om_x.Om_y - Om_y.Om_x - x.Om_y - y.Om_x",
]


def _table_algebra(B: PoissonBracket, table: list, ring=QQ, base: list | None = None) -> QuadraticAlgebra:
    names = enveloping_names(B)
    n = B.n
    if base is None:
        rels = [NcPoly({(i, j): 1, (j, i): -1}, ring) for i in range(n) for j in range(i + 1, n)]
    else:
        rels = _rels(names, base, ring)
    rels += _rels(names, table, ring)
    return QuadraticAlgebra(names, rels, ring, check=False)


def transcribed_enveloping(entry: CatalogEntry) -> QuadraticAlgebra:
    table = {"M": PM_TABLE, "plane": PLANE_TABLE}.get(entry.bracket.label)
    if table is None:
        raise KeyError(f"no transcribed table for {entry.name}")
    return _table_algebra(entry.bracket, table)


def q_enveloping_table() -> QuadraticAlgebra:
    """k[q, q^-1]-form of the enveloping algebra of M in a, b, c, d, Om~_x."""
    B = PoissonBracket(M_NAMES, M_BRACKET, label="M")
    return _table_algebra(B, QPM_TABLE, LAURENT, M_RELATIONS)


def poisson_limits() -> dict:
    """P(A), P(A)^! for the plane and M, each checked against its table."""
    out = {}
    for e in (poisson_plane(), poisson_matrices()):
        P = e.enveloping
        if not relation_span_equal(P, transcribed_enveloping(e)):
            raise MismatchWithPaperTable(f"P({e.bracket.label}) differs from its transcribed table")
        out[e.bracket.label] = {"entry": e, "P": P, "P!": e.enveloping_dual}
    return out


# ---------------------------------------------------------------------------
# generators of HP(M) over k[Delta]


DELTA = [("a*d - b*c", "")]


def hpm_generators(cutoff: int) -> dict:
    """Named cocycles generating HP^i(M) as a k[Delta]-module, up to the
    internal degree ``cutoff``; keys are homological degrees."""
    B = poisson_matrices().bracket
    co = lambda *terms: poisson_cochain(B, terms)  # noqa: E731
    top = max(cutoff, 0)
    g: dict = {0: [("1", co(("1", "")))]}
    g[1] = [
        ("a*Om_a - d*Om_d", co(("a", "a"), ("-d", "d"))),
        ("a*Om_a + c*Om_c", co(("a", "a"), ("c", "c"))),
        ("b*Om_b + d*Om_d", co(("b", "b"), ("d", "d"))),
    ]
    h2 = []
    for r in range(0, top - 1):
        if r != 2:
            h2.append((f"b^{r}*Om_ad", co((f"b^{r}", "ad"))))
        if r not in (0, 2):
            h2.append((f"c^{r}*Om_ad", co((f"c^{r}", "ad"))))
    h2 += [
        ("b*c*Om_bc - a*b*Om_ab + a*c*Om_ac", co(("b*c", "bc"), ("-a*b", "ab"), ("a*c", "ac"))),
        ("b*(a*Om_ab + d*Om_bd)", co(("a*b", "ab"), ("d*b", "bd"))),
        ("c*(a*Om_ab + d*Om_bd)", co(("a*c", "ab"), ("d*c", "bd"))),
        ("b*(a*Om_ac + d*Om_cd)", co(("a*b", "ac"), ("d*b", "cd"))),
        ("c*(a*Om_ac + d*Om_cd)", co(("a*c", "ac"), ("d*c", "cd"))),
    ]
    g[2] = h2
    h3 = []
    for r in range(0, top - 2):
        if r != 3:
            h3.append((f"b^{r}*Om_abd", co((f"b^{r}", "abd"))))
        if r > 0:
            h3.append((f"c^{r}*Om_abd", co((f"c^{r}", "abd"))))
        h3.append((f"b^{r}*Om_acd", co((f"b^{r}", "acd"))))
        if r > 0 and r != 3:
            h3.append((f"c^{r}*Om_acd", co((f"c^{r}", "acd"))))
    for x in ("b^2", "b*c", "c^2"):
        h3.append((f"{x}*(a*Om_abc - d*Om_bcd)", co((f"a*{x}", "abc"), (f"-d*{x}", "bcd"))))
    g[3] = h3
    h4 = [("Om_abcd", co(("1", "abcd"))), ("b*c*Om_abcd", co(("b*c", "abcd")))]
    for r in range(1, top - 3):
        h4 += [(f"b^{r}*Om_abcd", co((f"b^{r}", "abcd"))), (f"c^{r}*Om_abcd", co((f"c^{r}", "abcd")))]
    g[4] = h4
    return {i: [(n, z) for n, z in lst if cochain_degree(z)[1] <= cutoff] for i, lst in g.items()}


# ---------------------------------------------------------------------------


CATALOG: dict = {
    "quantum_plane": quantum_plane,
    "quantum_affine_3": lambda: quantum_affine_space(3),
    "quantum_matrices_2x2": quantum_matrices_2x2,
    "poisson_plane": poisson_plane,
    "poisson_matrices": poisson_matrices,
}


def get(name: str) -> CatalogEntry:
    try:
        factory: Callable = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None
    return factory()


def semiclassical_matches(entry: CatalogEntry) -> bool:
    B = semiclassical_limit(entry.algebra)
    return B.table == entry.bracket.table
