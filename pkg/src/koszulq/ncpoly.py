"""Quadratic algebras T(V)/(R) with PBW rewriting.

Words are tuples of generator indices.  The rewriting rules are obtained by
row-reducing the relation span with out-of-order words taking pivot priority,
so every rule rewrites a non-allowed length-2 word into allowed ones.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .scalars import (
    LAURENT, QQ, QQ_FIELD, LaurentPoly, RationalFunction, Ring, NotDivisible,
    ExprParser, ParseError, Q, format_scalar,
)

Word = tuple

STEP_BOUND = 10**6


class NonTerminating(RuntimeError):
    """Rewriting exceeded the step bound or revisited a word in progress."""


class NotConfluent(ValueError):
    """A presentation whose overlaps do not resolve."""

    def __init__(self, report):
        super().__init__(f"rewriting system is not confluent: {len(report.failures)} failing overlap(s)")
        self.report = report


class DualNotPBW(ValueError):
    """The quadratic dual's derived rules are not confluent."""


class NotSolvable(ValueError):
    """A relation cannot be solved over the coefficient ring."""


class NcPoly:
    """Finite linear combination of words."""

    __slots__ = ("terms", "ring")

    def __init__(self, terms: dict | None = None, ring: Ring = LAURENT):
        self.ring = ring
        self.terms = {w: ring.coerce(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def word(cls, w: Word, ring: Ring = LAURENT, coeff=None) -> "NcPoly":
        return cls({tuple(w): ring.one if coeff is None else coeff}, ring)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other: "NcPoly") -> "NcPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, self.ring.zero) + c
        return NcPoly(out, self.ring)

    def __neg__(self):
        return NcPoly({w: -c for w, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NcPoly":
        return NcPoly({w: c * x for w, x in self.terms.items()}, self.ring)

    def degree_set(self, degrees: Sequence[int]) -> set:
        return {sum(degrees[i] for i in w) for w in self.terms}

    def format(self, names: Sequence[str]) -> str:
        return format_terms(self.terms, names)

    def __repr__(self):
        return f"NcPoly({self.terms!r})"


def format_word(w: Word, names: Sequence[str], sep: str = ".") -> str:
    return sep.join(names[i] for i in w) if w else "1"


def format_terms(terms: dict, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    parts = []
    for w in sorted(terms):
        c = terms[w]
        s = format_scalar(c)
        body = format_word(w, names)
        if s == "1":
            parts.append(body)
        elif s == "-1":
            parts.append("-" + body)
        elif " " in s or s.startswith("("):
            parts.append(f"({s})*{body}")
        else:
            parts.append(f"{s}*{body}")
    return " + ".join(parts).replace("+ -", "- ")


def parse_ncpoly(text: str, names: Sequence[str], ring: Ring) -> NcPoly:
    """Parse e.g. ``q^-1 * a.b - (q - q^-1)*b.c``; ``.`` and ``*`` both multiply."""
    index = {n: i for i, n in enumerate(names)}

    class _E:
        __slots__ = ("t",)

        def __init__(self, t):
            self.t = t

        def __add__(self, o):
            out = dict(self.t)
            for w, c in o.t.items():
                out[w] = out.get(w, 0) + c
            return _E({w: c for w, c in out.items() if c})

        def __neg__(self):
            return _E({w: -c for w, c in self.t.items()})

        def __sub__(self, o):
            return self + (-o)

        def __mul__(self, o):
            out: dict = {}
            for w1, c1 in self.t.items():
                for w2, c2 in o.t.items():
                    w = w1 + w2
                    out[w] = out.get(w, 0) + c1 * c2
            return _E({w: c for w, c in out.items() if c})

        def __pow__(self, e):
            if e < 0:
                if len(self.t) == 1 and () in self.t:
                    c = self.t[()]
                    if isinstance(c, LaurentPoly):
                        return _E({(): c ** e})
                    return _E({(): Fraction(1) / Fraction(c) ** (-e)})
                raise ValueError("negative power of a non-unit")
            out = _E({(): 1})
            for _ in range(e):
                out = out * self
            return out

    def atom(name, col):
        if name in index:
            return _E({(index[name],): 1})
        if name == "q" and ring.has_q():
            return _E({(): Q})
        raise ParseError(f"unknown symbol {name!r}", col)

    def number(n):
        return _E({(): n})

    def divide(a, b, col):
        if set(b.t) != {()}:
            raise ParseError("can only divide by scalars", col)
        c = b.t[()]
        if isinstance(c, LaurentPoly) and not c.is_constant():
            if c.is_monomial():
                return a * _E({(): c ** -1})
            if ring is not QQ_FIELD:
                raise ParseError("division by a non-unit requires coeff = Qq_field", col)
            return a * _E({(): RationalFunction(1, c)})
        v = c.eval_q1() if isinstance(c, LaurentPoly) else c
        if v == 0:
            raise ParseError("division by zero", col)
        return a * _E({(): Fraction(1) / Fraction(v)})

    e = ExprParser(text, atom, number, divide, dot=True).parse()
    try:
        return NcPoly({w: ring.coerce(c) for w, c in e.t.items()}, ring)
    except NotDivisible as exc:
        raise ParseError(str(exc), 1) from None


# ---------------------------------------------------------------------------


class ConfluenceReport:
    def __init__(self, failures: list, names: Sequence[str]):
        self.failures = failures  # (word, difference NcPoly)
        self.names = list(names)

    @property
    def confluent(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.confluent

    def lines(self) -> list:
        return [
            f"overlap {format_word(w, self.names)}: reductions differ by {d.format(self.names)}"
            for w, d in self.failures
        ]


def _word_key(w):
    i, j = w
    if i > j:
        return (0, -i, -j)
    if i == j:
        return (1, -i, 0)
    return (2, i, j)


class QuadraticAlgebra:
    """Generators, quadratic relations and the derived rewriting system.

    ``relations`` are NcPolys whose words all have length 2 (and equal
    internal degree).  With ``check=True`` (default) a non-confluent rule set
    raises :class:`NotConfluent`.
    """

    def __init__(self, names: Sequence[str], relations: Iterable[NcPoly], ring: Ring = LAURENT,
                 degrees: Sequence[int] | None = None, label: str = "", check: bool = True):
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")
        self.n = len(self.names)
        self.ring = ring
        self.degrees = list(degrees) if degrees is not None else [1] * self.n
        if len(self.degrees) != self.n or any(d < 1 for d in self.degrees):
            raise ValueError("each generator needs a positive degree")
        self.label = label
        self.relations = [r for r in relations if r]
        for r in self.relations:
            if any(len(w) != 2 for w in r.terms):
                raise ValueError(f"relation {r.format(self.names)} is not quadratic")
            if len(r.degree_set(self.degrees)) != 1:
                raise ValueError(f"relation {r.format(self.names)} is not homogeneous")
        self.rules = self._derive_rules()
        self.allowed = [[(i, j) not in self.rules for j in range(self.n)] for i in range(self.n)]
        self.square_zero = frozenset(i for i in range(self.n) if (i, i) in self.rules and not self.rules[(i, i)])
        self._mr: dict = {}
        self._busy: set = set()
        self._steps = 0
        self._basis: dict = {}
        if check:
            rep = confluence_check(self)
            if not rep.confluent:
                raise NotConfluent(rep)

    # -- rules ----------------------------------------------------------
    def relation_rows(self) -> list:
        return [{w: c for w, c in r.terms.items()} for r in self.relations]

    def _derive_rules(self) -> dict:
        red = linalg.rref(self.relation_rows(), key=_word_key)
        rules = {}
        for p, row in red:
            rhs = {}
            for w, c in row.items():
                if w == p:
                    continue
                c = -c
                if self.ring is LAURENT:
                    if not c.is_laurent():
                        raise NotSolvable(
                            f"rule for {format_word(p, self.names)} needs coefficient {c} outside Q[q,q^-1]")
                    c = c.to_laurent()
                rhs[w] = c
            rules[p] = tuple(sorted(rhs.items()))
        return rules

    def leading_words(self) -> list:
        return sorted(self.rules)

    # -- rewriting ------------------------------------------------------
    def mul_right(self, w: Word, g: int) -> dict:
        """Normal form of (normal word w) * generator g, as a term dict."""
        key = (w, g)
        res = self._mr.get(key)
        if res is not None:
            return res
        if not w or self.allowed[w[-1]][g]:
            res = {w + (g,): self.ring.one}
            self._mr[key] = res
            return res
        if key in self._busy:
            raise NonTerminating(f"rewriting cycles at {format_word(w + (g,), self.names)}")
        self._steps += 1
        if self._steps > STEP_BOUND:
            raise NonTerminating(f"more than {STEP_BOUND} rewrite steps")
        self._busy.add(key)
        try:
            head = w[:-1]
            out: dict = {}
            for (k, l), c in self.rules[(w[-1], g)]:
                for u, cu in self.mul_right(head, k).items():
                    for v, cv in self.mul_right(u, l).items():
                        x = out.get(v)
                        y = c * cu * cv
                        out[v] = y if x is None else x + y
            res = {v: c for v, c in out.items() if c}
        finally:
            self._busy.discard(key)
        self._mr[key] = res
        return res

    def mul_word(self, u: Word, v: Word) -> dict:
        """Normal form of the product of normal word u with any word v."""
        cur = {u: self.ring.one}
        for g in v:
            nxt: dict = {}
            for w, c in cur.items():
                for w2, c2 in self.mul_right(w, g).items():
                    x = nxt.get(w2)
                    y = c * c2
                    nxt[w2] = y if x is None else x + y
            cur = {w: c for w, c in nxt.items() if c}
        return cur

    def nf_word(self, w: Word) -> dict:
        self._steps = 0
        return self.mul_word((), w)

    def is_normal(self, w: Word) -> bool:
        return all(self.allowed[w[k]][w[k + 1]] for k in range(len(w) - 1))

    def word_degree(self, w: Word) -> int:
        return sum(self.degrees[i] for i in w)

    # -- misc -----------------------------------------------------------
    def index(self, name: str) -> int:
        return self.names.index(name)

    def parse(self, text: str) -> NcPoly:
        return parse_ncpoly(text, self.names, self.ring)

    def element(self, terms: dict) -> NcPoly:
        return NcPoly(terms, self.ring)

    def __repr__(self):
        return f"QuadraticAlgebra({self.label or self.names!r}, {len(self.relations)} relations)"


def normal_form(p: NcPoly, alg: QuadraticAlgebra) -> NcPoly:
    alg._steps = 0
    out: dict = {}
    for w, c in p.terms.items():
        for v, cv in alg.mul_word((), w).items():
            out[v] = out.get(v, alg.ring.zero) + c * cv
    return NcPoly(out, alg.ring)


def multiply(u: NcPoly, v: NcPoly, alg: QuadraticAlgebra) -> NcPoly:
    alg._steps = 0
    u = normal_form(u, alg)
    out: dict = {}
    for w1, c1 in u.terms.items():
        for w2, c2 in v.terms.items():
            for w, c in alg.mul_word(w1, w2).items():
                out[w] = out.get(w, alg.ring.zero) + c1 * c2 * c
    return NcPoly(out, alg.ring)


def confluence_check(alg: QuadraticAlgebra) -> ConfluenceReport:
    """Resolve every overlap ij, jk of leading words."""
    failures = []
    lead = set(alg.rules)
    for (i, j) in sorted(lead):
        for k in range(alg.n):
            if (j, k) not in lead:
                continue
            alg._steps = 0
            left: dict = {}
            for (a, b), c in alg.rules[(i, j)]:
                for w, cw in alg.mul_word((), (a, b, k)).items():
                    left[w] = left.get(w, alg.ring.zero) + c * cw
            right: dict = {}
            for (a, b), c in alg.rules[(j, k)]:
                for w, cw in alg.mul_word((), (i, a, b)).items():
                    right[w] = right.get(w, alg.ring.zero) + c * cw
            diff = NcPoly(left, alg.ring) - NcPoly(right, alg.ring)
            if diff:
                failures.append(((i, j, k), diff))
    return ConfluenceReport(failures, alg.names)


def graded_basis(alg: QuadraticAlgebra, m: int) -> list:
    """Allowed words of internal degree m, lexicographic in PBW order."""
    got = alg._basis.get(m)
    if got is not None:
        return got
    out = []

    def rec(prefix, rest):
        if rest == 0:
            out.append(prefix)
            return
        for g in range(alg.n):
            d = alg.degrees[g]
            if d <= rest and (not prefix or alg.allowed[prefix[-1]][g]):
                rec(prefix + (g,), rest - d)

    rec((), m)
    alg._basis[m] = out
    return out


def hilbert_coeffs(alg: QuadraticAlgebra, top: int) -> list:
    """dim of degree 0..top pieces, by counting allowed words."""
    # ending[d][g] = number of allowed words of degree d ending in g
    ending = [[0] * alg.n for _ in range(top + 1)]
    dims = [1] + [0] * top
    for d in range(1, top + 1):
        for g in range(alg.n):
            dg = alg.degrees[g]
            if dg > d:
                continue
            if dg == d:
                cnt = 1
            else:
                cnt = sum(ending[d - dg][h] for h in range(alg.n) if alg.allowed[h][g])
            ending[d][g] = cnt
        dims[d] = sum(ending[d])
    return dims


def quadratic_dual(alg: QuadraticAlgebra, ring: Ring | None = None) -> QuadraticAlgebra:
    """T(V*)/(R^perp) with the pairing <x_i* x_j*, x_k x_l> = d_ik d_jl."""
    if any(d != 1 for d in alg.degrees):
        raise ValueError("quadratic_dual needs all generators in degree 1")
    ring = ring or alg.ring
    n = alg.n
    words = [(i, j) for i in range(n) for j in range(n)]
    perp = linalg.nullspace(alg.relation_rows(), words, key=_word_key)
    rels = []
    for v in perp:
        if ring is LAURENT:
            v = _clear_to_laurent(v)
        elif ring is QQ:
            v = {w: c for w, c in v.items()}
        rels.append(NcPoly(v, ring))
    names = [dual_name(s) for s in alg.names]
    dual = QuadraticAlgebra(names, rels, ring, label=(alg.label + "^!") if alg.label else "", check=False)
    rep = confluence_check(dual)
    if not rep.confluent:
        raise DualNotPBW("; ".join(rep.lines()[:3]))
    return dual


def dual_name(s: str) -> str:
    return s[:-1] if s.endswith("*") else s + "*"


def _clear_to_laurent(v: dict) -> dict:
    """Scale a Q(q) vector by the lcm of denominators into Q[q,q^-1]."""
    den = LaurentPoly.const(1)
    for c in v.values():
        c = RationalFunction._coerce(c)
        if c.den != 1:
            den = linalg.laurent_lcm(den, c.den)
    return {w: (RationalFunction._coerce(c) * den).to_laurent() for w, c in v.items()}


def relation_span_equal(a: QuadraticAlgebra, b: QuadraticAlgebra) -> bool:
    return linalg.span_equal(a.relation_rows(), b.relation_rows())


def koszul_numerical_check(alg: QuadraticAlgebra, dual: QuadraticAlgebra, top: int) -> bool:
    """sum_i (-1)^i dim dual_i dim alg_{m-i} = [m = 0] for m <= top."""
    h = hilbert_coeffs(alg, top)
    hd = hilbert_coeffs(dual, top)
    for m in range(top + 1):
        s = sum((-1) ** i * hd[i] * h[m - i] for i in range(m + 1))
        if s != (1 if m == 0 else 0):
            return False
    return True


def specialize(alg: QuadraticAlgebra, ring: Ring) -> QuadraticAlgebra:
    """Same presentation read over another ring (Q means q = 1)."""
    rels = []
    for r in alg.relations:
        if ring is QQ:
            terms = {w: (c.eval_q1() if not isinstance(c, (int, Fraction)) else c) for w, c in r.terms.items()}
        elif ring is QQ_FIELD:
            terms = {w: RationalFunction._coerce(c) for w, c in r.terms.items()}
        else:
            terms = dict(r.terms)
        rels.append(NcPoly(terms, ring))
    return QuadraticAlgebra(alg.names, rels, ring, alg.degrees, alg.label, check=False)
