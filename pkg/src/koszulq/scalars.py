"""Exact scalars: rationals, Laurent polynomials in q, rational functions in q.

Rationals are plain :class:`fractions.Fraction` values (integers are accepted
wherever a rational is expected).  Laurent polynomials and rational functions
are immutable and hashable.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction
Scalar = Union[int, Fraction, "LaurentPoly", "RationalFunction"]


class NotDivisible(ArithmeticError):
    """Raised when an exact division has a nonzero remainder."""


def _num(c):
    # keep integral values as int: much faster than Fraction in the hot loops
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


# ---------------------------------------------------------------------------
# dense ordinary polynomials over Q, lists indexed by exponent, no trailing 0


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    lead = b[-1]
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = _num(Fraction(a[-1]) / lead)
        k = len(a) - len(b)
        q[k] = c
        for t, bt in enumerate(b):
            a[k + t] = _num(a[k + t] - c * bt)
        a.pop()
        _ptrim(a)
    return _ptrim(q), a


def _pmonic(a):
    lead = Fraction(a[-1])
    return [_num(c / lead) for c in a]


def _pgcd(a, b):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a) if a else []


# ---------------------------------------------------------------------------


class LaurentPoly:
    """Element of Q[q, q^-1] stored as a lowest exponent and a dense tuple."""

    __slots__ = ("low", "coeffs", "_hash")

    def __init__(self, coeffs: Iterable = (), low: int = 0):
        c = [_num(x if isinstance(x, (int, Fraction)) else Fraction(x)) for x in coeffs]
        start = 0
        while start < len(c) and c[start] == 0:
            start += 1
        end = len(c)
        while end > start and c[end - 1] == 0:
            end -= 1
        self.coeffs = tuple(c[start:end])
        self.low = low + start if self.coeffs else 0
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple, low: int) -> "LaurentPoly":
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.low = low if coeffs else 0
        obj._hash = None
        return obj

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly":
        d = {e: c for e, c in d.items() if c != 0}
        if not d:
            return ZERO
        lo, hi = min(d), max(d)
        return cls([d.get(e, 0) for e in range(lo, hi + 1)], lo)

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls((c,), 0)

    @classmethod
    def monomial(cls, e: int, c=1) -> "LaurentPoly":
        return cls((c,), e)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def is_constant(self) -> bool:
        return not self.coeffs or (len(self.coeffs) == 1 and self.low == 0)

    def to_dict(self) -> dict:
        return {self.low + k: c for k, c in enumerate(self.coeffs) if c != 0}

    def __iter__(self):
        for k, c in enumerate(self.coeffs):
            if c != 0:
                yield self.low + k, c

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return LaurentPoly._raw((_num(x),), 0) if x != 0 else ZERO
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        out = [0] * (hi - lo + 1)
        for k, c in enumerate(self.coeffs):
            out[self.low - lo + k] = c
        for k, c in enumerate(other.coeffs):
            i = other.low - lo + k
            out[i] = _num(out[i] + c)
        return LaurentPoly(out, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(tuple(-c for c in self.coeffs), self.low)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return LaurentPoly._raw(tuple(_num(c * other) for c in self.coeffs), self.low)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return ZERO
        a, b = self.coeffs, other.coeffs
        if len(a) == 1:
            x = a[0]
            return LaurentPoly._raw(tuple(_num(x * y) for y in b), self.low + other.low)
        if len(b) == 1:
            y = b[0]
            return LaurentPoly._raw(tuple(_num(x * y) for x in a), self.low + other.low)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for k, y in enumerate(b):
                    out[i + k] += x * y
        return LaurentPoly(out, self.low + other.low)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-unit Laurent polynomial")
            return LaurentPoly.monomial(self.low * e, Fraction(1) / Fraction(self.coeffs[0]) ** (-e))
        out = ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, LaurentPoly):
            if other.is_monomial():
                return self * other ** -1
            return RationalFunction(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        return RationalFunction(LaurentPoly._coerce(other), self)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly._raw(self.coeffs, self.low + k)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.low == other.low and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.coeffs
            return self.low == 0 and self.coeffs == (other,)
        if isinstance(other, RationalFunction):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if not self.coeffs:
                self._hash = hash(0)
            elif self.low == 0 and len(self.coeffs) == 1:
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.low, self.coeffs))
        return self._hash

    # -- evaluation -------------------------------------------------------
    def eval(self, x):
        x = Fraction(x)
        if not self.coeffs:
            return 0
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return _num(acc * x ** self.low)

    def eval_q1(self):
        return _num(sum(self.coeffs, Fraction(0)))

    # -- normalization ----------------------------------------------------
    def ordinary(self) -> list:
        """Coefficient list of q^(-low) * self, an ordinary polynomial."""
        return list(self.coeffs)

    def canonical_associate(self) -> "LaurentPoly":
        """Ordinary monic polynomial with nonzero constant term."""
        if not self.coeffs:
            return ZERO
        lead = Fraction(self.coeffs[-1])
        return LaurentPoly([c / lead for c in self.coeffs], 0)

    def unit_part(self) -> "LaurentPoly":
        """The unit u with self = u * canonical_associate()."""
        if not self.coeffs:
            return ONE
        return LaurentPoly.monomial(self.low, self.coeffs[-1])

    # -- printing ---------------------------------------------------------
    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        return f"LaurentPoly({format_laurent(self)!r})"


ZERO = LaurentPoly._raw((), 0)
ONE = LaurentPoly._raw((1,), 0)
Q = LaurentPoly._raw((1,), 1)


def q_power(k: int) -> LaurentPoly:
    return LaurentPoly._raw((1,), k)


def qint(m: int) -> LaurentPoly:
    """The q-integer [m] = (q^m - 1)/(q - 1); [-m] = -q^-m [m]."""
    if m >= 0:
        return LaurentPoly._raw((1,) * m, 0)
    return LaurentPoly._raw((-1,) * (-m), m)


def eval_q1(p) -> Fraction:
    if isinstance(p, (int, Fraction)):
        return p
    if isinstance(p, RationalFunction):
        return p.eval_q1()
    return p.eval_q1()


def exact_div(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """p / d in Q[q, q^-1], raising NotDivisible if d does not divide p."""
    p, d = LaurentPoly._coerce(p), LaurentPoly._coerce(d)
    if not d:
        raise ZeroDivisionError("exact_div by zero")
    if not p:
        return ZERO
    quo, rem = _pdivmod(list(p.coeffs), list(d.coeffs))
    if rem:
        raise NotDivisible(f"{d} does not divide {p}")
    return LaurentPoly(quo, p.low - d.low)


def divides(d: LaurentPoly, p: LaurentPoly) -> bool:
    try:
        exact_div(p, d)
    except NotDivisible:
        return False
    return True


def laurent_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """gcd in Q[q, q^-1] as a canonical associate; gcd(0, 0) = 0."""
    a, b = LaurentPoly._coerce(a), LaurentPoly._coerce(b)
    if not a:
        return b.canonical_associate()
    if not b:
        return a.canonical_associate()
    return LaurentPoly(_pgcd(a.coeffs, b.coeffs), 0)


def laurent_lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if not a or not b:
        return ZERO
    g = laurent_gcd(a, b)
    return exact_div(a * b, g).canonical_associate()


# ---------------------------------------------------------------------------


class RationalFunction:
    """Element of Q(q): num/den with den a monic ordinary polynomial, den(0) != 0."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = LaurentPoly._coerce(num)
        den = ONE if den is None else LaurentPoly._coerce(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("RationalFunction needs Laurent or rational parts")
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = ZERO, ONE
            return
        if len(den.coeffs) > 1:
            g = laurent_gcd(num, den)
            if len(g.coeffs) > 1:
                num, den = exact_div(num, g), exact_div(den, g)
        u = den.unit_part()
        self.num = num * u ** -1
        self.den = den.canonical_associate()

    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (int, Fraction, LaurentPoly)):
            return RationalFunction(x)
        return NotImplemented

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_laurent(self) -> bool:
        return self.den == ONE

    def to_laurent(self) -> LaurentPoly:
        if self.den != ONE:
            raise NotDivisible(f"{self} is not a Laurent polynomial")
        return self.num

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(RationalFunction)
        obj.num, obj.den = -self.num, self.den
        return obj

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction(self.num ** e, self.den ** e)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self.den == ONE:
            return hash(self.num)
        return hash((self.num, self.den))

    def eval(self, x):
        d = self.den.eval(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at q={x}")
        return _num(Fraction(self.num.eval(x)) / d)

    def eval_q1(self):
        return self.eval(1)

    def __str__(self):
        if self.den == ONE:
            return format_laurent(self.num)
        return f"({format_laurent(self.num)})/({format_laurent(self.den)})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


# ---------------------------------------------------------------------------
# printing and parsing


def format_rational(c) -> str:
    c = _num(c)
    return str(c)


def format_laurent(p: LaurentPoly) -> str:
    """Canonical text, exponents ascending, e.g. ``-q^-2 - q^-1``."""
    if not p.coeffs:
        return "0"
    parts = []
    for e, c in p:
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = format_rational(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if a == 1 else f"{format_rational(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def format_scalar(c) -> str:
    if isinstance(c, (LaurentPoly, RationalFunction)):
        return str(c)
    return format_rational(c)


class ParseError(ValueError):
    """Syntax error with a 1-based column inside the parsed text."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.message = message
        self.column = column


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\^|\*|/|\+|-|\(|\)|\.))")


def tokenize(text: str) -> list:
    """Split an expression into (kind, value, column) triples."""
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), col))
        else:
            toks.append(("op", m.group(3), col))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class ExprParser:
    """Recursive-descent parser for sums of products.

    ``atom(name, column)`` turns an identifier into a value; values must
    support ``+``, ``-``, ``*`` and integer powers.  ``divide(a, b, column)``
    implements ``/``.  ``dot`` enables ``.`` as a product operator.
    """

    def __init__(self, text, atom, number, divide, dot=False):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0
        self.atom = atom
        self.number = number
        self.divide = divide
        self.dot = dot

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}", t[2])
        return t

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 1)
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and (t[1] == "*" or (t[1] == "." and self.dot)):
                self.take()
                v = v * self.unary()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                v = self.divide(v, self.unary(), t[2])
            else:
                return v

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("+", "-"):
            self.take()
            v = self.unary()
            return -v if t[1] == "-" else v
        return self.power()

    def power(self):
        v = self.atom_()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            s = self.peek()
            if s[0] == "op" and s[1] in ("+", "-"):
                self.take()
                sign = -1 if s[1] == "-" else 1
            e = self.take()
            if e[0] != "num":
                raise ParseError("expected integer exponent", e[2])
            try:
                return v ** (sign * e[1])
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), e[2]) from None
        return v

    def atom_(self):
        t = self.take()
        if t[0] == "num":
            return self.number(t[1])
        if t[0] == "name":
            return self.atom(t[1], t[2])
        if t[0] == "op" and t[1] == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError("unexpected " + ("end of input" if t[0] == "end" else repr(t[1])), t[2])


def parse_scalar(text: str, ring: str = "Qq"):
    """Parse a scalar in the ring ``Q``, ``Qq`` (Laurent) or ``Qq_field``."""

    def atom(name, col):
        if name == "q" and ring != "Q":
            return Q
        raise ParseError(f"unknown symbol {name!r}", col)

    def divide(a, b, col):
        if isinstance(b, LaurentPoly) and not b.is_constant():
            if b.is_monomial():
                return a * b ** -1
            if ring != "Qq_field":
                raise ParseError("division by a non-unit requires coeff = Qq_field", col)
            return RationalFunction(a) / b
        if isinstance(b, RationalFunction):
            return RationalFunction(a) / b
        bc = b.eval_q1() if isinstance(b, LaurentPoly) else b
        if bc == 0:
            raise ParseError("division by zero", col)
        return a * (Fraction(1) / Fraction(bc))

    def number(n):
        return n if ring == "Q" else LaurentPoly.const(n)

    value = ExprParser(text, atom, number, divide).parse()
    return coerce_scalar(value, ring)


def coerce_scalar(value, ring: str):
    if ring == "Q":
        if isinstance(value, LaurentPoly):
            return value.eval_q1()
        return _num(Fraction(value))
    if ring == "Qq":
        if isinstance(value, RationalFunction):
            return value.to_laurent()
        return LaurentPoly._coerce(value)
    return RationalFunction._coerce(value)


class Ring:
    """One of the three coefficient rings, addressed by its file-format name."""

    def __init__(self, name: str, zero, one, is_field: bool):
        self.name = name
        self.zero = zero
        self.one = one
        self.is_field = is_field

    def __repr__(self):
        return f"Ring({self.name!r})"

    def __reduce__(self):
        return (ring_by_name, (self.name,))

    def coerce(self, x):
        return coerce_scalar(x, self.name)

    def parse(self, text: str):
        return parse_scalar(text, self.name)

    def has_q(self) -> bool:
        return self.name != "Q"


QQ = Ring("Q", 0, 1, True)
LAURENT = Ring("Qq", ZERO, ONE, False)
QQ_FIELD = Ring("Qq_field", RationalFunction(0), RationalFunction(1), True)
_RINGS = {r.name: r for r in (QQ, LAURENT, QQ_FIELD)}


def ring_by_name(name: str) -> Ring:
    try:
        return _RINGS[name]
    except KeyError:
        raise ValueError(f"unknown coefficient ring {name!r} (use Q, Qq or Qq_field)") from None


def field_of(ring: Ring) -> Ring:
    return QQ if ring is QQ else QQ_FIELD
