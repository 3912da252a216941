"""Sparse exact linear algebra.

Vectors are dicts ``index -> scalar`` with no zero values.  Three kernels:

* field elimination (``rref``, ``nullspace``, ``field_rank``) over Q or Q(q);
* fraction-free elimination over Z and Z[q] for ranks (``rank_rational``,
  ``rank_laurent``), used for the large cohomology computations;
* Smith normal form over Q[q, q^-1] (``smith_factors``).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .scalars import (
    LaurentPoly, RationalFunction, _num, _pdivmod, _ptrim, laurent_gcd,
    laurent_lcm, ZERO,
)


def to_field(x):
    if isinstance(x, LaurentPoly):
        return RationalFunction(x)
    return x


def _inv(x):
    if isinstance(x, RationalFunction):
        return x.inverse()
    return _num(Fraction(1) / x)


def _axpy(v: dict, c, w: dict) -> dict:
    """v - c*w, dropping zeros; returns a new dict."""
    out = dict(v)
    for k, x in w.items():
        y = out.get(k)
        z = -(c * x) if y is None else y - c * x
        if z:
            out[k] = z
        elif y is not None:
            del out[k]
    return out


def rref(rows: Iterable[dict], key: Callable | None = None) -> list:
    """Reduced row echelon form over a field.

    ``key`` orders columns (smallest key = highest pivot priority).  Returns
    a list of ``(pivot, row)`` with ``row[pivot] == 1``, sorted by pivot key.
    """
    key = key or (lambda c: c)
    piv: dict = {}
    for r in rows:
        v = {k: to_field(x) for k, x in r.items() if x}
        for p in sorted((p for p in v if p in piv), key=key):
            if p in v:
                v = _axpy(v, v[p], piv[p])
        if not v:
            continue
        p = min(v, key=key)
        inv = _inv(v[p])
        v = {k: _num(x * inv) if not isinstance(x, RationalFunction) else x * inv for k, x in v.items()}
        for q_, w in piv.items():
            if p in w:
                piv[q_] = _axpy(w, w[p], v)
        piv[p] = v
    return sorted(piv.items(), key=lambda t: key(t[0]))


def field_rank(rows: Iterable[dict]) -> int:
    """Rank over the fraction field, by forward elimination only."""
    piv: dict = {}
    for r in rows:
        v = {k: to_field(x) for k, x in r.items() if x}
        while v:
            p = min(v)
            if p not in piv:
                inv = _inv(v[p])
                piv[p] = {k: x * inv for k, x in v.items()}
                break
            v = _axpy(v, v[p], piv[p])
    return len(piv)


def nullspace(rows: Sequence[dict], columns: Sequence, key: Callable | None = None) -> list:
    """Basis of {v : <row, v> = 0 for all rows}, one vector per free column."""
    red = rref(rows, key)
    pivots = {p for p, _ in red}
    out = []
    for f in columns:
        if f in pivots:
            continue
        v = {f: 1}
        for p, r in red:
            c = r.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def span_equal(a: Sequence[dict], b: Sequence[dict]) -> bool:
    ra, rb = field_rank(a), field_rank(b)
    return ra == rb and field_rank(list(a) + list(b)) == ra


def reduce_against(v: dict, red: list, key: Callable | None = None) -> dict:
    """Residue of v modulo the span of an rref basis (as returned by rref)."""
    v = {k: to_field(x) for k, x in v.items() if x}
    for p, r in red:
        c = v.get(p)
        if c:
            v = _axpy(v, c, r)
    return v


# ---------------------------------------------------------------------------
# fraction-free elimination over Z


def _int_vector(v: dict) -> dict:
    den = 1
    for x in v.values():
        if isinstance(x, Fraction):
            den = den * x.denominator // math.gcd(den, x.denominator)
    out = {k: int(x * den) for k, x in v.items() if x}
    return _int_primitive(out)


def _int_primitive(v: dict) -> dict:
    g = 0
    for x in v.values():
        g = math.gcd(g, x)
        if g == 1:
            return v
    if g > 1:
        return {k: x // g for k, x in v.items()}
    return v


def rank_rational(vectors: Iterable[dict]) -> int:
    """Rank over Q of sparse rational vectors (fraction-free over Z)."""
    piv: dict = {}
    for r in vectors:
        v = _int_vector(r)
        while v:
            p = min(v)
            w = piv.get(p)
            if w is None:
                piv[p] = v
                break
            a, b = w[p], v[p]
            g = math.gcd(a, b)
            a, b = a // g, b // g
            out = {k: a * x for k, x in v.items()}
            for k, x in w.items():
                y = out.get(k, 0) - b * x
                if y:
                    out[k] = y
                else:
                    out.pop(k, None)
            v = _int_primitive(out)
    return len(piv)


# ---------------------------------------------------------------------------
# fraction-free elimination over Z[q]; polynomials are tuples low -> high


def _zp_mul(a: tuple, b: tuple) -> tuple:
    if len(a) == 1:
        c = a[0]
        return tuple(c * y for y in b)
    if len(b) == 1:
        c = b[0]
        return tuple(c * x for x in a)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return tuple(out)


def _zp_sub(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] -= y
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _zp_vector(v: dict) -> dict:
    """Scale a Laurent vector by a unit so all entries lie in Z[q], primitive."""
    lo = min(x.low for x in v.values())
    den = 1
    for x in v.values():
        for c in x.coeffs:
            if isinstance(c, Fraction):
                den = den * c.denominator // math.gcd(den, c.denominator)
    out = {}
    for k, x in v.items():
        pad = x.low - lo
        out[k] = (0,) * pad + tuple(int(c * den) for c in x.coeffs)
    return _zp_primitive(out)


def _zp_primitive(v: dict) -> dict:
    shift = min(next(i for i, c in enumerate(p) if c) for p in v.values())
    g = 0
    for p in v.values():
        for c in p:
            g = math.gcd(g, c)
    if shift == 0 and g == 1:
        return v
    return {k: tuple(c // g for c in p[shift:]) for k, p in v.items()}


def _zp_key(p: tuple):
    return (len(p), sum(abs(c) for c in p))


def rank_laurent(vectors: Iterable[dict]) -> int:
    """Rank over Q(q) of sparse Laurent vectors, fraction-free over Z[q].

    Leading index is the smallest index; when a pivot already exists there,
    the pair is combined and the result made primitive (integer content and
    powers of q removed).  Pivot rows with a smaller leading entry replace
    existing ones to keep degrees low.
    """
    piv: dict = {}
    for r in vectors:
        r = {k: x for k, x in r.items() if x}
        if not r:
            continue
        v = _zp_vector(r)
        while v:
            p = min(v)
            w = piv.get(p)
            if w is None:
                piv[p] = v
                break
            if _zp_key(v[p]) < _zp_key(w[p]):
                piv[p], v = v, w
                w = piv[p]
            a, b = w[p], v[p]
            if len(a) == 1 and len(b) == 1:
                g = math.gcd(a[0], b[0])
                a, b = (a[0] // g,), (b[0] // g,)
            out = {k: _zp_mul(a, x) for k, x in v.items()}
            for k, x in w.items():
                y = _zp_sub(out.get(k, ()), _zp_mul(b, x))
                if y:
                    out[k] = y
                else:
                    out.pop(k, None)
            v = _zp_primitive(out) if out else out
    return len(piv)


def rank_at(vectors: Iterable[dict], t) -> int:
    """Rank over Q after substituting q = t in every Laurent entry."""
    return rank_rational({k: x.eval(t) for k, x in v.items()} for v in vectors)


# ---------------------------------------------------------------------------
# Smith normal form over Q[q, q^-1]


def _span(x: LaurentPoly) -> int:
    return len(x.coeffs) - 1


def _ldivmod(a: LaurentPoly, b: LaurentPoly) -> tuple:
    """a = quo * b + rem with span(rem) < span(b); q-powers are units."""
    quo, rem = _pdivmod(a.coeffs, b.coeffs)
    return LaurentPoly(quo, a.low - b.low), LaurentPoly(rem, a.low)


def smith_factors(rows: int, cols: int, entries: dict) -> list:
    """Invariant factors (canonical associates, divisibility chain) of a
    Laurent matrix given as ``{(r, c): value}``.  Zero factors are omitted.

    Euclidean elimination with the span (top minus bottom exponent) as norm,
    so every monomial entry is a one-step pivot.
    """
    A = [dict() for _ in range(rows)]
    colrows: dict = {}
    for (r, c), x in entries.items():
        if x:
            A[r][c] = x
            colrows.setdefault(c, set()).add(r)
    live = set(range(rows))
    factors = []

    def sub_row(k, quo, i):
        # row k -= quo * row i
        rk = A[k]
        for c, x in A[i].items():
            y = rk.get(c, ZERO) - quo * x
            if y:
                if c not in rk:
                    colrows.setdefault(c, set()).add(k)
                rk[c] = y
            elif c in rk:
                del rk[c]
                colrows[c].discard(k)

    def sub_col(c, quo, j):
        # column c -= quo * column j
        for k in list(colrows.get(j, ())):
            rk = A[k]
            y = rk.get(c, ZERO) - quo * rk[j]
            if y:
                if c not in rk:
                    colrows.setdefault(c, set()).add(k)
                rk[c] = y
            elif c in rk:
                del rk[c]
                colrows[c].discard(k)

    while True:
        best = None
        for i in live:
            for j, x in A[i].items():
                key = (_span(x), len(A[i]) * len(colrows[j]), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, _, i, j = best
        while True:
            p = A[i][j]
            for k in sorted(colrows[j] - {i}):
                quo, _ = _ldivmod(A[k][j], p)
                if quo:
                    sub_row(k, quo, i)
            for c in sorted(set(A[i]) - {j}):
                quo, _ = _ldivmod(A[i][c], p)
                if quo:
                    sub_col(c, quo, j)
            rest = [(_span(A[k][j]), k, j) for k in colrows[j] if k != i]
            rest += [(_span(A[i][c]), i, c) for c in A[i] if c != j]
            if not rest:
                break
            # a remainder survived; it is smaller than the pivot, use it
            _, k, c = min(rest)
            i, j = k, c
        factors.append(A[i][j])
        live.discard(i)
        for c in A[i]:
            colrows[c].discard(i)
        A[i] = {}
    return chain_normalize(factors)


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return _ptrim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] -= y
    return _ptrim(out)


def chain_normalize(factors: Sequence[LaurentPoly]) -> list:
    """Turn a diagonal into a divisibility chain (gcd/lcm exchanges)."""
    f = [x.canonical_associate() for x in factors if x]
    n = len(f)
    for i in range(n):
        for j in range(i + 1, n):
            g = laurent_gcd(f[i], f[j])
            if g != f[i]:
                f[i], f[j] = g, laurent_lcm(f[i], f[j])
    return f
