"""Quadratic Poisson brackets on polynomial rings and their Koszul data."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .ncpoly import NcPoly, QuadraticAlgebra, dual_name, format_word
from .scalars import (
    QQ, LaurentPoly, RationalFunction, NotDivisible, ParseError, ExprParser, Q, _num,
    exact_div, format_rational,
)


class NoSemiclassicalLimit(ValueError):
    """Some commutator of generators is not divisible by q - 1."""


class JacobiFailure(ValueError):
    def __init__(self, triple, witness):
        super().__init__(f"Jacobi identity fails at {triple}: {witness}")
        self.triple = triple
        self.witness = witness


class CommPoly:
    """Commutative polynomial: exponent tuple -> rational coefficient."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {e: _num(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, n: int, i: int, c=1) -> "CommPoly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): c})

    @classmethod
    def const(cls, n: int, c=1) -> "CommPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "CommPoly":
        return cls(len(e), {tuple(e): c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, CommPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return CommPoly(self.n, out)

    def __neg__(self):
        return CommPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CommPoly):
            return CommPoly(self.n, {e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return CommPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CommPoly.const(self.n)
        for _ in range(k):
            out = out * self
        return out

    def deriv(self, i: int) -> "CommPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return CommPoly(self.n, out)

    def degrees(self) -> set:
        return {sum(e) for e in self.terms}

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            s = format_rational(c)
            if not mono:
                parts.append(s)
            elif s == "1":
                parts.append(mono)
            elif s == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{s}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"CommPoly({self.terms!r})"


def word_to_exponent(w: Sequence[int], n: int) -> tuple:
    e = [0] * n
    for i in w:
        e[i] += 1
    return tuple(e)


def exponent_to_word(e: Sequence[int]) -> tuple:
    return tuple(i for i, k in enumerate(e) for _ in range(k))


def parse_commpoly(text: str, names: Sequence[str]) -> CommPoly:
    n = len(names)
    index = {s: i for i, s in enumerate(names)}

    def atom(name, col):
        if name in index:
            return CommPoly.var(n, index[name])
        raise ParseError(f"unknown symbol {name!r}", col)

    def number(k):
        return CommPoly.const(n, k)

    def divide(a, b, col):
        if set(b.terms) - {(0,) * n}:
            raise ParseError("can only divide by numbers", col)
        v = b.terms.get((0,) * n, 0)
        if v == 0:
            raise ParseError("division by zero", col)
        return a * (Fraction(1) / Fraction(v))

    return ExprParser(text, atom, number, divide, dot=True).parse()


class PoissonBracket:
    """Quadratic bracket table {x_i, x_j} for i < j on Q[x_1..x_n]."""

    def __init__(self, names: Sequence[str], table: dict | None = None, label: str = ""):
        self.names = list(names)
        self.n = len(self.names)
        self.label = label
        self.table: dict = {}
        for (i, j), p in (table or {}).items():
            if i == j:
                if p:
                    raise ValueError("{x_i, x_i} must vanish")
                continue
            if not isinstance(p, CommPoly):
                p = parse_commpoly(p, self.names)
            if p and p.degrees() != {2}:
                raise ValueError(f"bracket {{{self.names[i]},{self.names[j]}}} is not quadratic homogeneous")
            if i > j:
                i, j, p = j, i, -p
            if (i, j) in self.table:
                raise ValueError(f"bracket {{{self.names[i]},{self.names[j]}}} given twice")
            if p:
                self.table[(i, j)] = p
        z = CommPoly(self.n)
        self._br = [[z] * self.n for _ in range(self.n)]
        for (i, j), p in self.table.items():
            self._br[i][j] = p
            self._br[j][i] = -p
        # hess[i][j][m][k] = d^2 {x_i, x_j} / dx_m dx_k
        self.hess = [[[[0] * self.n for _ in range(self.n)] for _ in range(self.n)] for _ in range(self.n)]
        for i in range(self.n):
            for j in range(self.n):
                p = self._br[i][j]
                for m in range(self.n):
                    dm = p.deriv(m)
                    for k in range(self.n):
                        self.hess[i][j][m][k] = dm.deriv(k).terms.get((0,) * self.n, 0)
        self._ystar: dict = {}

    def bracket(self, i: int, j: int) -> CommPoly:
        return self._br[i][j]

    def partial(self, i: int, j: int, k: int) -> CommPoly:
        return self._br[i][j].deriv(k)

    def is_zero(self) -> bool:
        return not self.table

    def format(self) -> list:
        return [f"{{{self.names[i]},{self.names[j]}}} = {p.format(self.names)}" for (i, j), p in sorted(self.table.items())]

    def __repr__(self):
        return f"PoissonBracket({self.label or self.names!r})"


def bracket_eval(B: PoissonBracket, f: CommPoly, g: CommPoly) -> CommPoly:
    """{f, g} = sum_{i<j} (f_i g_j - f_j g_i) {x_i, x_j}."""
    out = CommPoly(B.n)
    df = [f.deriv(i) for i in range(B.n)]
    dg = [g.deriv(i) for i in range(B.n)]
    for (i, j), p in B.table.items():
        c = df[i] * dg[j] - df[j] * dg[i]
        if c:
            out = out + c * p
    return out


def jacobi_check(B: PoissonBracket):
    """(True, None) or (False, ((i, j, k), J(x_i, x_j, x_k)))."""
    x = [CommPoly.var(B.n, i) for i in range(B.n)]
    for i, j, k in combinations(range(B.n), 3):
        J = (bracket_eval(B, x[i], B.bracket(j, k)) + bracket_eval(B, x[j], B.bracket(k, i))
             + bracket_eval(B, x[k], B.bracket(i, j)))
        if J:
            return False, ((i, j, k), J)
    return True, None


def require_jacobi(B: PoissonBracket) -> None:
    ok, wit = jacobi_check(B)
    if not ok:
        triple, J = wit
        raise JacobiFailure(tuple(B.names[t] for t in triple), J.format(B.names))


# ---------------------------------------------------------------------------
# P(A) and P(A)^!


def enveloping_names(B: PoissonBracket) -> list:
    return list(B.names) + [f"Om_{s}" for s in B.names]


def _lin_words(p: CommPoly, omega: int, n: int) -> dict:
    """A degree-1 polynomial sum c_r x_r, as words y_r Om_omega."""
    return {(exponent_to_word(e)[0], n + omega): c for e, c in p.terms.items()}


def _sym_words(p: CommPoly) -> dict:
    return {exponent_to_word(e): c for e, c in p.terms.items()}


def enveloping_relations(B: PoissonBracket) -> list:
    n = B.n
    rels = []
    for i, j in combinations(range(n), 2):
        rels.append(NcPoly({(i, j): 1, (j, i): -1}, QQ))
    for i in range(n):
        for j in range(n):
            t = {(n + i, j): 1, (j, n + i): -1}
            for w, c in _sym_words(B.bracket(i, j)).items():
                t[w] = t.get(w, 0) - c
            rels.append(NcPoly(t, QQ))
    for i, j in combinations(range(n), 2):
        t = {(n + i, n + j): 1, (n + j, n + i): -1}
        for k in range(n):
            for w, c in _lin_words(B.partial(i, j, k), k, n).items():
                t[w] = t.get(w, 0) - c
        rels.append(NcPoly(t, QQ))
    return rels


def poisson_enveloping(B: PoissonBracket, check: bool = True) -> QuadraticAlgebra:
    if check:
        require_jacobi(B)
    return QuadraticAlgebra(enveloping_names(B), enveloping_relations(B), QQ,
                            label=f"P({B.label})" if B.label else "", check=check)


def dual_family_relations(B: PoissonBracket, sign: int = 1) -> list:
    """The three families spanning R^perp for P(A).

    ``sign`` multiplies the Hessian term of the y*y* family; +1 is the value
    that annihilates the mixed relations under the standard pairing.
    """
    n = B.n
    H = B.hess
    rels = []
    for i in range(n):
        for j in range(i, n):
            t: dict = {}
            for w in ((n + i, n + j), (n + j, n + i)):
                t[w] = t.get(w, 0) + 1
            rels.append(NcPoly(t, QQ))
    for m in range(n):
        for k in range(n):
            t = {(n + m, k): 1, (k, n + m): 1}
            for i, j in combinations(range(n), 2):
                if H[i][j][m][k]:
                    t[(n + i, n + j)] = t.get((n + i, n + j), 0) + H[i][j][m][k]
            rels.append(NcPoly(t, QQ))
    for m in range(n):
        for k in range(m, n):
            t = {}
            for w in ((m, k), (k, m)):
                t[w] = t.get(w, 0) + 1
            for i, j in combinations(range(n), 2):
                h = H[i][j][m][k]
                if h:
                    t[(n + i, j)] = t.get((n + i, j), 0) + sign * h
                    t[(n + j, i)] = t.get((n + j, i), 0) - sign * h
            rels.append(NcPoly(t, QQ))
    return rels


def poisson_dual_presentation(B: PoissonBracket) -> QuadraticAlgebra:
    require_jacobi(B)
    names = [dual_name(s) for s in enveloping_names(B)]
    return QuadraticAlgebra(names, dual_family_relations(B), QQ,
                            label=f"P({B.label})^!" if B.label else "")


# ---------------------------------------------------------------------------
# the exterior algebra O = A^! and the action of y*


def wedge_left(m: int, S: tuple):
    """Omega_m* . Omega_S* as (sign, subset), or None if m in S."""
    if m in S:
        return None
    pos = sum(1 for s in S if s < m)
    T = S[:pos] + (m,) + S[pos:]
    return (-1 if pos % 2 else 1), T


def ext_mul(u: dict, v: dict) -> dict:
    """Product in the exterior algebra of subset-indexed elements."""
    out: dict = {}
    for S, a in u.items():
        for T, b in v.items():
            if set(S) & set(T):
                continue
            merged = list(S) + list(T)
            inv = sum(1 for x in S for y in T if x > y)
            W = tuple(sorted(merged))
            c = a * b * (-1 if inv % 2 else 1)
            out[W] = out.get(W, 0) + c
    return {W: c for W, c in out.items() if c}


def ystar_action(B: PoissonBracket, k: int, w: tuple) -> dict:
    """y_k* . w in A^! = O for a basis monomial w (increasing tuple)."""
    key = (k, w)
    got = B._ystar.get(key)
    if got is not None:
        return got
    if not w:
        res: dict = {}
    else:
        m, rest = w[0], w[1:]
        base = {}
        for i, j in combinations(range(B.n), 2):
            h = B.hess[i][j][m][k]
            if h:
                base[(i, j)] = base.get((i, j), 0) - h
        res = ext_mul(base, {rest: 1})
        tail = ystar_action(B, k, rest)
        if tail:
            for W, c in ext_mul({(m,): 1}, tail).items():
                res[W] = res.get(W, 0) - c
        res = {W: c for W, c in res.items() if c}
    B._ystar[key] = res
    return res


# ---------------------------------------------------------------------------


def semiclassical_limit(qalg: QuadraticAlgebra) -> PoissonBracket:
    """Bracket {x_i, x_j} = ((x_i x_j - x_j x_i)/(q - 1)) at q = 1."""
    n = qalg.n
    qm1 = Q - 1
    table = {}
    for i, j in combinations(range(n), 2):
        comm: dict = dict(qalg.nf_word((i, j)))
        for w, c in qalg.nf_word((j, i)).items():
            comm[w] = comm.get(w, 0) - c
        beta = CommPoly(n)
        for w, c in comm.items():
            if isinstance(c, RationalFunction):
                if not c.is_laurent():
                    raise NoSemiclassicalLimit(f"coefficient {c} is not a Laurent polynomial")
                c = c.num
            c = LaurentPoly._coerce(c)
            if not c:
                continue
            try:
                b = exact_div(c, qm1).eval_q1()
            except NotDivisible:
                raise NoSemiclassicalLimit(
                    f"{qalg.names[i]}{qalg.names[j]} - {qalg.names[j]}{qalg.names[i]} has coefficient "
                    f"{c} on {format_word(w, qalg.names)}, not divisible by q - 1") from None
            beta = beta + CommPoly.monomial(word_to_exponent(w, n), b)
        if beta:
            table[(i, j)] = beta
    B = PoissonBracket(qalg.names, table, label=qalg.label)
    require_jacobi(B)
    return B
