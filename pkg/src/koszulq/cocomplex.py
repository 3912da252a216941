"""Koszul cocomplexes Lambda (x) Lambda^! and their differentials.

A cochain basis element is a pair ``(lam, mu)`` of normal words: ``lam`` in
the algebra, ``mu`` in its dual.  Homological degree is ``len(mu)`` and the
internal degree is ``len(lam) + len(mu)``, so every differential maps
bidegree ``(i, j)`` to ``(i + 1, j + 2)``.

For a Poisson complex ``lam`` is a sorted tuple of variable indices (a
commutative monomial) and ``mu`` a strictly increasing tuple (an exterior
monomial), which is exactly how the PBW words of a polynomial-type algebra
and its exterior-type dual look.  That makes the q = 1 comparison a plain
entrywise comparison of matrices.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from . import linalg
from .ncpoly import QuadraticAlgebra, graded_basis, format_word, quadratic_dual
from .poisson import (
    PoissonBracket, CommPoly, bracket_eval, ext_mul, require_jacobi, wedge_left,
    ystar_action, word_to_exponent, exponent_to_word, parse_commpoly,
)
from .scalars import (
    LAURENT, QQ, LaurentPoly, Q, Ring, exact_div, format_scalar, _num, eval_q1,
)


class NotHomogeneous(ValueError):
    """A differential entry connects basis elements of different weight."""


class GradedMatrix:
    """Matrix of a map C^{i,j} -> C^{i+1,j+2} (or another target).

    ``columns[c]`` is a dict ``row index -> nonzero coefficient``.
    """

    def __init__(self, i: int, j: int, rows: list, cols: list, columns: list, ring: Ring,
                 row_keys: list | None = None, col_keys: list | None = None):
        self.i, self.j = i, j
        self.rows, self.cols = rows, cols
        self.columns = columns
        self.ring = ring
        self.row_keys = row_keys
        self.col_keys = col_keys

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def entries(self) -> dict:
        return {(r, c): x for c, col in enumerate(self.columns) for r, x in col.items()}

    def entry(self, r: int, c: int):
        return self.columns[c].get(r, self.ring.zero)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def map(self, f, ring: Ring) -> "GradedMatrix":
        cols = []
        for col in self.columns:
            out = {}
            for r, x in col.items():
                y = f(x)
                if y:
                    out[r] = y
            cols.append(out)
        return GradedMatrix(self.i, self.j, self.rows, self.cols, cols, ring, self.row_keys, self.col_keys)

    def at_q1(self) -> "GradedMatrix":
        return self.map(eval_q1, QQ)

    def dense(self) -> list:
        m = [[self.ring.zero] * len(self.cols) for _ in self.rows]
        for c, col in enumerate(self.columns):
            for r, x in col.items():
                m[r][c] = x
        return m

    def to_json(self) -> dict:
        ent = sorted((r, c, format_scalar(x)) for c, col in enumerate(self.columns) for r, x in col.items())
        return {"i": self.i, "j": self.j, "rows": list(self.rows), "cols": list(self.cols),
                "entries": [list(e) for e in ent]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.rows == other.rows and self.cols == other.cols
                and self.entries() == other.entries())

    def same_map(self, other: "GradedMatrix") -> bool:
        """Equal entries on equal basis keys (labels may differ)."""
        return (self.row_keys == other.row_keys and self.col_keys == other.col_keys
                and self.entries() == other.entries())

    def __repr__(self):
        return f"GradedMatrix(({self.i},{self.j}), {len(self.rows)}x{len(self.cols)})"


def matrix_from_json(data: dict, ring: Ring) -> GradedMatrix:
    cols = [dict() for _ in data["cols"]]
    for r, c, s in data["entries"]:
        cols[c][r] = ring.parse(s)
    return GradedMatrix(data["i"], data["j"], data["rows"], data["cols"], cols, ring)


class WeightVector:
    """Integer weights on algebra generators and on dual generators."""

    def __init__(self, alg: Sequence[int], dual: Sequence[int] | None = None):
        self.alg = tuple(alg)
        self.dual = tuple(dual) if dual is not None else tuple(-w for w in self.alg)

    def of(self, key) -> int:
        lam, mu = key
        return sum(self.alg[g] for g in lam) + sum(self.dual[g] for g in mu)

    def is_zero(self) -> bool:
        return not any(self.alg) and not any(self.dual)

    def __repr__(self):
        return f"WeightVector({self.alg}, {self.dual})"


def _integer_basis(rows: list, n: int) -> list:
    """Integer basis vectors of the rational nullspace of ``rows``."""
    vecs = linalg.nullspace(rows, list(range(n)))
    out = []
    for v in vecs:
        den = 1
        for x in v.values():
            den = _lcm(den, Fraction(x).denominator)
        out.append(tuple(int(Fraction(v.get(k, 0)) * den) for k in range(n)))
    return out


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


def algebra_weights(alg: QuadraticAlgebra) -> list:
    """Basis of the integer weights making every relation homogeneous."""
    rows = []
    for lhs, rhs in alg.rules.items():
        for w, _ in rhs:
            r: dict = {}
            for g in lhs:
                r[g] = r.get(g, 0) + 1
            for g in w:
                r[g] = r.get(g, 0) - 1
            r = {k: v for k, v in r.items() if v}
            if r:
                rows.append(r)
    return [WeightVector(v) for v in _integer_basis(rows, alg.n)]


def bracket_weights(B: PoissonBracket) -> list:
    """Basis of the integer weights making the bracket homogeneous."""
    rows = []
    for (i, j), p in B.table.items():
        for e in p.terms:
            r: dict = {i: 1}
            r[j] = r.get(j, 0) + 1
            for k, m in enumerate(e):
                if m:
                    r[k] = r.get(k, 0) - m
            r = {k: v for k, v in r.items() if v}
            if r:
                rows.append(r)
    return [WeightVector(v) for v in _integer_basis(rows, B.n)]


# ---------------------------------------------------------------------------


class KoszulComplex:
    """Common machinery: bases, matrices, weights, products."""

    ring: Ring
    top: int | None = None
    alg_names: list
    dual_names: list

    def basis(self, i: int, j: int) -> list:
        raise NotImplementedError

    def image(self, key) -> dict:
        raise NotImplementedError

    def product(self, u: dict, v: dict) -> dict:
        raise NotImplementedError

    def label(self, key) -> str:
        lam, mu = key
        return f"{format_word(lam, self.alg_names)}|{format_word(mu, self.dual_names)}"

    def valid(self, i: int, j: int) -> bool:
        return 0 <= i <= j and (self.top is None or i <= self.top)

    def bidegrees(self, cutoff: int) -> list:
        return [(i, j) for j in range(cutoff + 1) for i in range(j + 1) if self.valid(i, j)]

    def apply(self, c: dict) -> dict:
        out: dict = {}
        for key, x in c.items():
            for k2, y in self.image(key).items():
                out[k2] = out.get(k2, self.ring.zero) + x * y
        return {k: v for k, v in out.items() if v}

    def matrix(self, i: int, j: int, keys: list | None = None, target: list | None = None) -> GradedMatrix:
        """d restricted to C^{i,j} (or to the sub-basis ``keys``)."""
        src = self.basis(i, j) if keys is None else keys
        if target is None:
            target = self.basis(i + 1, j + 2) if self.valid(i + 1, j + 2) else []
        index = {k: r for r, k in enumerate(target)}
        cols = []
        for key in src:
            col = {}
            for k2, x in self.image(key).items():
                r = index.get(k2)
                if r is None:
                    raise NotHomogeneous(f"{self.label(key)} maps outside the target block: {self.label(k2)}")
                col[r] = x
            cols.append(col)
        return GradedMatrix(i, j, [self.label(k) for k in target], [self.label(k) for k in src], cols,
                            self.ring, target, src)

    def weights(self) -> list:
        return []

    def weight_of(self, key, weights: Sequence[WeightVector] | None = None) -> tuple:
        ws = self.weights() if weights is None else weights
        return tuple(w.of(key) for w in ws)

    def blocks(self, i: int, j: int, weights: Sequence[WeightVector] | None = None) -> dict:
        """Basis of C^{i,j} grouped by weight tuple (sorted, deterministic)."""
        out: dict = {}
        for key in self.basis(i, j):
            out.setdefault(self.weight_of(key, weights), []).append(key)
        return dict(sorted(out.items()))


# ---------------------------------------------------------------------------


class HochschildComplex(KoszulComplex):
    """Lambda (x) Lambda^! with d(l|m) = sum_g g.l | g*.m + (-1)^{|m|+1} l.g | m.g*.

    With ``scaled=True`` every entry is divided exactly by (q - 1): the matrix
    in the basis where a dual word of length m carries the factor (q - 1)^m.
    """

    def __init__(self, alg: QuadraticAlgebra, dual: QuadraticAlgebra | None = None, scaled: bool = False):
        if any(d != 1 for d in alg.degrees):
            raise ValueError("Koszul cocomplexes need degree-1 generators")
        self.alg = alg
        self.dual = dual if dual is not None else quadratic_dual(alg)
        if self.dual.n != alg.n:
            raise ValueError("algebra and dual have different generator counts")
        self.scaled = scaled
        if scaled and alg.ring is not LAURENT:
            raise ValueError("the scaled form needs Laurent coefficients")
        self.ring = alg.ring
        self.alg_names = alg.names
        self.dual_names = self.dual.names
        hd = _finite_top(self.dual)
        self.top = hd
        self._img: dict = {}
        self._lmul: dict = {}
        self._weights = None

    def basis(self, i: int, j: int) -> list:
        if not self.valid(i, j):
            return []
        lams = graded_basis(self.alg, j - i)
        return [(lam, mu) for mu in graded_basis(self.dual, i) for lam in lams]

    def _left(self, A: QuadraticAlgebra, g: int, w: tuple) -> dict:
        key = (id(A), g, w)
        got = self._lmul.get(key)
        if got is None:
            A._steps = 0
            got = A.mul_word((g,), w)
            self._lmul[key] = got
        return got

    def image(self, key) -> dict:
        got = self._img.get(key)
        if got is not None:
            return got
        lam, mu = key
        A, D = self.alg, self.dual
        sign = 1 if len(mu) % 2 else -1  # (-1)^{|mu|+1}
        out: dict = {}
        for g in range(A.n):
            left_l = self._left(A, g, lam)
            if left_l:
                left_m = self._left(D, g, mu)
                for l2, a in left_l.items():
                    for m2, b in left_m.items():
                        k = (l2, m2)
                        out[k] = out.get(k, 0) + a * b
            A._steps = 0
            right_l = A.mul_right(lam, g)
            if right_l:
                D._steps = 0
                right_m = D.mul_right(mu, g)
                for l2, a in right_l.items():
                    for m2, b in right_m.items():
                        k = (l2, m2)
                        out[k] = out.get(k, 0) + sign * a * b
        out = {k: v for k, v in out.items() if v}
        if self.scaled:
            qm1 = Q - 1
            out = {k: exact_div(v, qm1) for k, v in out.items()}
        self._img[key] = out
        return out

    def product(self, u: dict, v: dict, sign_rule: str = "plain") -> dict:
        return dga_product(u, v, self.alg, self.dual, sign_rule)

    def weights(self) -> list:
        if self._weights is None:
            self._weights = algebra_weights(self.alg)
        return self._weights


def _finite_top(dual: QuadraticAlgebra):
    """Highest nonzero degree of the dual if it is finite (else None)."""
    from .ncpoly import hilbert_coeffs
    h = hilbert_coeffs(dual, dual.n + 2)
    for d in range(1, len(h)):
        if h[d] == 0:
            return d - 1
    return None


class PoissonComplex(KoszulComplex):
    """A (x) A^! for a quadratic Poisson bracket, with
    d(a|w) = sum_j {x_j, a} | Om_j* w + x_j a | y_j* . w.
    """

    def __init__(self, B: PoissonBracket, check: bool = True):
        if check:
            require_jacobi(B)
        self.B = B
        self.ring = QQ
        self.top = B.n
        self.alg_names = list(B.names)
        self.dual_names = [f"Om_{s}*" for s in B.names]
        self._img: dict = {}
        self._weights = None
        n = B.n
        self._xbr = [[B.bracket(k, i) for i in range(n)] for k in range(n)]

    def basis(self, i: int, j: int) -> list:
        if not self.valid(i, j):
            return []
        lams = list(combinations_with_replacement(range(self.B.n), j - i))
        return [(lam, mu) for mu in combinations(range(self.B.n), i) for lam in lams]

    def image(self, key) -> dict:
        got = self._img.get(key)
        if got is not None:
            return got
        lam, mu = key
        n = self.B.n
        e = word_to_exponent(lam, n)
        out: dict = {}
        for k in range(n):
            # {x_k, a} = sum_i d_i(a) {x_k, x_i}
            wd = wedge_left(k, mu)
            if wd is not None:
                s, T = wd
                for i in range(n):
                    if e[i] and self._xbr[k][i]:
                        f = list(e)
                        f[i] -= 1
                        for ee, c in self._xbr[k][i].terms.items():
                            w = exponent_to_word(tuple(a + b for a, b in zip(f, ee)))
                            key2 = (w, T)
                            out[key2] = out.get(key2, 0) + s * e[i] * c
            ys = ystar_action(self.B, k, mu)
            if ys:
                lw = tuple(sorted(lam + (k,)))
                for T, c in ys.items():
                    key2 = (lw, T)
                    out[key2] = out.get(key2, 0) + c
        out = {k: _num(v) for k, v in out.items() if v}
        self._img[key] = out
        return out

    def product(self, u: dict, v: dict, sign_rule: str = "plain") -> dict:
        out: dict = {}
        for (l1, m1), a in u.items():
            for (l2, m2), b in v.items():
                for T, c in ext_mul({m1: 1}, {m2: 1}).items():
                    k = (tuple(sorted(l1 + l2)), T)
                    out[k] = out.get(k, 0) + a * b * c * _sign(sign_rule, m1, l2, m2)
        return {k: v for k, v in out.items() if v}

    def weights(self) -> list:
        if self._weights is None:
            self._weights = bracket_weights(self.B)
        return self._weights

    def homotopy_image(self, key) -> dict:
        """h(a|w) = sum_i d_i a | d_i* w."""
        lam, mu = key
        out: dict = {}
        e = word_to_exponent(lam, self.B.n)
        for i in range(self.B.n):
            if not e[i] or i not in mu:
                continue
            pos = mu.index(i)
            f = list(e)
            f[i] -= 1
            k = (exponent_to_word(f), mu[:pos] + mu[pos + 1:])
            out[k] = out.get(k, 0) + e[i] * (-1 if pos % 2 else 1)
        return out


def poisson_cochain(B: PoissonBracket, terms) -> dict:
    """Cochain sum p (x) Om_S* from [(polynomial text, S)], where S is a string
    of one-letter generator names or a sequence of names; S is sorted."""
    out: dict = {}
    for poly, S in terms:
        p = parse_commpoly(poly, B.names)
        mu = tuple(sorted(B.names.index(x) for x in S))
        if len(set(mu)) != len(mu):
            continue
        for e, c in p.terms.items():
            k = (exponent_to_word(e), mu)
            out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


def _sign(rule: str, m1, l2, m2) -> int:
    if rule == "plain":
        return 1
    if rule == "internal":  # (-1)^{|mu_1| * deg lambda_2}
        return -1 if (len(m1) * len(l2)) % 2 else 1
    if rule == "homological":  # (-1)^{|mu_1| * |mu_2|}
        return -1 if (len(m1) * len(m2)) % 2 else 1
    raise ValueError(f"unknown sign rule {rule!r}")


# ---------------------------------------------------------------------------


def hochschild_differential(alg: QuadraticAlgebra, dual: QuadraticAlgebra | None, i: int, j: int) -> GradedMatrix:
    return HochschildComplex(alg, dual).matrix(i, j)


def poisson_differential(B: PoissonBracket, i: int, j: int) -> GradedMatrix:
    return PoissonComplex(B).matrix(i, j)


def scaled_form(m: GradedMatrix) -> GradedMatrix:
    """Divide every entry exactly by (q - 1); NotDivisible if impossible."""
    qm1 = Q - 1
    return m.map(lambda x: exact_div(LaurentPoly._coerce(x), qm1), m.ring)


def homotopy_matrix(B: PoissonBracket, i: int, j: int, complex_: PoissonComplex | None = None) -> GradedMatrix:
    """h : C^{i,j} -> C^{i-1,j-2}."""
    K = complex_ or PoissonComplex(B)
    src = K.basis(i, j)
    target = K.basis(i - 1, j - 2) if K.valid(i - 1, j - 2) else []
    index = {k: r for r, k in enumerate(target)}
    cols = [{index[k]: x for k, x in K.homotopy_image(key).items()} for key in src]
    return GradedMatrix(i, j, [K.label(k) for k in target], [K.label(k) for k in src], cols, QQ, target, src)


def weight_decompose(m: GradedMatrix, complex_: KoszulComplex, weights: Sequence[WeightVector]) -> list:
    """Split a matrix into weight blocks: list of (weight, GradedMatrix)."""
    if not weights or all(w.is_zero() for w in weights):
        return [((), m)]
    rw = [complex_.weight_of(k, weights) for k in m.row_keys]
    cw = [complex_.weight_of(k, weights) for k in m.col_keys]
    for c, col in enumerate(m.columns):
        for r in col:
            if rw[r] != cw[c]:
                raise NotHomogeneous(f"entry ({m.rows[r]}, {m.cols[c]}) joins weights {rw[r]} and {cw[c]}")
    out = []
    for w in sorted(set(rw) | set(cw)):
        rsel = [r for r in range(len(rw)) if rw[r] == w]
        csel = [c for c in range(len(cw)) if cw[c] == w]
        rnew = {r: k for k, r in enumerate(rsel)}
        cols = [{rnew[r]: x for r, x in m.columns[c].items()} for c in csel]
        out.append((w, GradedMatrix(m.i, m.j, [m.rows[r] for r in rsel], [m.cols[c] for c in csel], cols, m.ring,
                                    [m.row_keys[r] for r in rsel], [m.col_keys[c] for c in csel])))
    return out


def dga_product(u: dict, v: dict, alg: QuadraticAlgebra, dual: QuadraticAlgebra, sign_rule: str = "plain") -> dict:
    """(l1|m1)(l2|m2) = l1 l2 | m1 m2 (no sign: the tensor product of the
    ungraded algebra Lambda with Lambda^!)."""
    out: dict = {}
    zero = alg.ring.zero
    for (l1, m1), a in u.items():
        for (l2, m2), b in v.items():
            s = _sign(sign_rule, m1, l2, m2)
            alg._steps = dual._steps = 0
            L = alg.mul_word(l1, l2)
            if not L:
                continue
            Mu = dual.mul_word(m1, m2)
            for lw, x in L.items():
                for mw, y in Mu.items():
                    k = (lw, mw)
                    out[k] = out.get(k, zero) + s * a * b * x * y
    return {k: c for k, c in out.items() if c}


def cce_oracle(B: PoissonBracket, i: int, j: int) -> GradedMatrix:
    """Cartan-Chevalley-Eilenberg differential on Alt_A(Omega(A), A).

    A cochain a f_S sends Om(x_S) (increasing) to a and every other
    increasing wedge to 0.  df(Om_{t_0}..Om_{t_i}) = sum_r (-1)^r {x_{t_r}, f(..^r..)}
    + sum_{r<s} (-1)^{r+s} f(Om({x_{t_r}, x_{t_s}}) ^ ..^r..^s..).
    """
    require_jacobi(B)
    n = B.n
    K = PoissonComplex(B, check=False)
    src = K.basis(i, j)
    target = K.basis(i + 1, j + 2) if K.valid(i + 1, j + 2) else []
    index = {k: r for r, k in enumerate(target)}
    cols = []
    for lam, S in src:
        a = CommPoly.monomial(word_to_exponent(lam, n))
        val: dict = {}  # T -> CommPoly
        for T in combinations(range(n), i + 1):
            acc = CommPoly(n)
            for r, t in enumerate(T):
                rest = T[:r] + T[r + 1:]
                if rest == S:
                    term = bracket_eval(B, CommPoly.var(n, t), a)
                    acc = acc + (term if r % 2 == 0 else -term)
            for r in range(len(T)):
                for s in range(r + 1, len(T)):
                    rest = T[:r] + T[r + 1:s] + T[s + 1:]
                    br = B.bracket(T[r], T[s])
                    for m in range(n):
                        cm = br.deriv(m)
                        if not cm:
                            continue
                        wd = wedge_left(m, rest)
                        if wd is None or wd[1] != S:
                            continue
                        sign = wd[0] * (-1 if (r + s) % 2 else 1)
                        acc = acc + cm * a * sign
            if acc:
                val[T] = acc
        col = {}
        for T, p in val.items():
            for e, c in p.terms.items():
                col[index[(exponent_to_word(e), T)]] = c
        cols.append(col)
    return GradedMatrix(i, j, [K.label(k) for k in target], [K.label(k) for k in src], cols, QQ, target, src)
