"""Independent sympy oracles shared by the test modules."""

from fractions import Fraction
from itertools import combinations

import sympy

qs = sympy.Symbol("q")


def cols_of(mat):
    """Column dicts of a dense row-major matrix."""
    n = len(mat)
    return [{r: mat[r][c] for r in range(n) if mat[r][c]} for c in range(len(mat[0]))]


def to_sympy(x):
    if not hasattr(x, "coeffs"):
        return sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)
    out = sympy.Integer(0)
    for k, c in enumerate(x.coeffs):
        out += sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * qs ** (x.low + k)
    return out


def sym_assoc(p):
    """Canonical associate in Q[q, q^-1]: strip q-powers, make monic."""
    num, den = sympy.fraction(sympy.cancel(p))
    assert sympy.Poly(den, qs).is_monomial
    cs = sympy.Poly(num, qs).all_coeffs()[::-1]
    while cs and cs[0] == 0:
        cs.pop(0)
    lead = cs[-1]
    return tuple(Fraction(int((c / lead).p), int((c / lead).q)) for c in cs)


def oracle_invariant_factors(mat):
    """Determinantal divisors: s_k = d_k / d_{k-1}, d_k = gcd of k x k minors."""
    # q is a unit: clear negative powers by one global shift
    shift = max([-x.low for row in mat for x in row if hasattr(x, "low") and x] + [0])
    M = sympy.Matrix([[sympy.expand(to_sympy(x) * qs ** shift) for x in row] for row in mat])
    m, n = M.shape
    out, prev = [], sympy.Integer(1)
    for k in range(1, min(m, n) + 1):
        g = sympy.Integer(0)
        for R in combinations(range(m), k):
            for C in combinations(range(n), k):
                g = sympy.gcd(g, sympy.expand(M.extract(list(R), list(C)).det()))
        if g == 0:
            break
        out.append(sym_assoc(sympy.cancel(g / prev)))
        prev = g
    return out


def dense(m):
    """Row-major dense copy of a GradedMatrix."""
    out = [[0] * len(m.cols) for _ in m.rows]
    for c, col in enumerate(m.columns):
        for r, x in col.items():
            out[r][c] = x
    return out


def from_coeffs(cs):
    return sum((sympy.Rational(c.numerator, c.denominator) * qs ** k for k, c in enumerate(cs)), sympy.Integer(0))


def direct_sum_factors(lists):
    """Invariant factors of a block-diagonal matrix from those of its blocks,
    via elementary divisors (prime powers over Q[q], q itself a unit)."""
    powers: dict = {}
    for fs in lists:
        for f in fs:
            for p, e in sympy.factor_list(from_coeffs(f), qs)[1]:
                if sympy.Poly(p, qs).degree() == 0 or p == qs:
                    continue
                p = sympy.Poly(p, qs).monic().as_expr()
                powers.setdefault(p, []).append(e)
    n = max((len(v) for v in powers.values()), default=0)
    out = [sympy.Integer(1)] * n
    for p, es in powers.items():
        es = sorted(es)
        for k, e in enumerate(es):
            out[n - len(es) + k] *= p ** e
    return [sym_assoc(sympy.expand(f)) for f in out]
