"""Rational functions num/den over Q.

Normalization divides out the polynomial gcd and makes the leading
coefficient of the denominator (in registry order) equal to 1.  The gcd
itself is delegated to sympy's sparse polynomial rings.
"""

from fractions import Fraction

from sympy import QQ
from sympy.polys.rings import PolyRing

from .poly import QPoly, as_rat

_RINGS = {}


def _ring(nvars):
    R = _RINGS.get(nvars)
    if R is None:
        R = PolyRing(["z%d" % i for i in range(nvars)], QQ)
        _RINGS[nvars] = R
    return R


def _to_sympy(p, order, R):
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    d = {}
    for m, c in p.terms.items():
        e = [0] * n
        for v in m:
            e[pos[v]] += 1
        d[tuple(e)] = QQ(c.numerator, c.denominator)
    return R.from_dict(d)


def _from_sympy(f, order):
    terms = {}
    for e, c in f.items():
        m = []
        for i, k in enumerate(e):
            if k:
                m.extend([order[i]] * k)
        terms[tuple(m)] = Fraction(int(c.numerator), int(c.denominator))
    return QPoly(terms)


def poly_gcd(a, b):
    """Monic-free gcd of two QPoly (normalized later by the caller)."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_constant() or b.is_constant():
        return QPoly.const(1)
    order = sorted(a.variables() | b.variables())
    R = _ring(len(order))
    g = _to_sympy(a, order, R).gcd(_to_sympy(b, order, R))
    return _from_sympy(g, order)


def poly_div_exact(a, b):
    """a / b when b divides a exactly."""
    if b.is_constant():
        return a * (1 / b.constant_value())
    order = sorted(a.variables() | b.variables())
    R = _ring(len(order))
    q, r = divmod(_to_sympy(a, order, R), _to_sympy(b, order, R))
    if r:
        raise ArithmeticError("inexact polynomial division")
    return _from_sympy(q, order)


class QRatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize=True):
        num = QPoly.coerce(num)
        den = QPoly.const(1) if den is None else QPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def coerce(x):
        if isinstance(x, QRatFunc):
            return x
        if isinstance(x, (int, Fraction, QPoly)):
            return QRatFunc(QPoly.coerce(x), None, normalize=False)
        return NotImplemented

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def as_poly(self):
        if not self.den.is_constant():
            raise ValueError("not a polynomial")
        return self.num * (1 / self.den.constant_value())

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return self.num.constant_value() / self.den.constant_value()

    def variables(self):
        return self.num.variables() | self.den.variables()

    def __neg__(self):
        return QRatFunc(-self.num, self.den, normalize=False)

    def __add__(self, other):
        other = QRatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return QRatFunc(self.num + other.num, self.den)
        if other.den.is_constant():
            return QRatFunc(self.num + other.num * self.den * (1 / other.den.constant_value()), self.den)
        if self.den.is_constant():
            return QRatFunc(self.num * other.den * (1 / self.den.constant_value()) + other.num, other.den)
        g = poly_gcd(self.den, other.den)
        if g.is_constant():
            return QRatFunc(self.num * other.den + other.num * self.den, self.den * other.den)
        a = poly_div_exact(self.den, g)
        b = poly_div_exact(other.den, g)
        return QRatFunc(self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = QRatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return QRatFunc(QPoly())
            return QRatFunc(self.num * other, self.den, normalize=False)
        other = QRatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return QRatFunc(QPoly())
        if self.den.is_constant() and other.den.is_constant():
            c = 1 / (self.den.constant_value() * other.den.constant_value())
            return QRatFunc(self.num * other.num * c, None, normalize=False)
        # cross-cancel before multiplying
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = poly_div_exact(self.num, g1) if not g1.is_constant() else self.num
        d2 = poly_div_exact(other.den, g1) if not g1.is_constant() else other.den
        n2 = poly_div_exact(other.num, g2) if not g2.is_constant() else other.num
        d1 = poly_div_exact(self.den, g2) if not g2.is_constant() else self.den
        return QRatFunc(n1 * n2, d1 * d2, normalize=False)._fix_sign()

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return QRatFunc(self.den, self.num, normalize=False)._fix_sign()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        other = QRatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QRatFunc.coerce(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return QRatFunc(self.num ** e, self.den ** e, normalize=False)

    def __eq__(self, other):
        other = QRatFunc.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def _fix_sign(self):
        if self.den.is_constant():
            c = self.den.constant_value()
            if c != 1:
                self.num = self.num * (1 / c)
                self.den = QPoly.const(1)
            return self
        _, lc = self.den.leading()
        if lc != 1:
            self.num = self.num * (1 / lc)
            self.den = self.den * (1 / lc)
        return self

    def derivative(self, v):
        dn = self.num.derivative(v)
        dd = self.den.derivative(v)
        if dd.is_zero():
            return QRatFunc(dn, self.den)
        return QRatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, assignment):
        n = self.num.substitute(assignment)
        d = self.den.substitute(assignment)
        return QRatFunc.coerce(n) / QRatFunc.coerce(d)

    def evaluate(self, point):
        return self.num.evaluate(point) / self.den.evaluate(point)

    def to_str(self):
        if self.den.is_constant():
            return self.num.to_str()
        return "(%s)/(%s)" % (self.num.to_str(), self.den.to_str())

    __str__ = to_str

    def __repr__(self):
        return "QRatFunc(%s)" % self.to_str()


def _normalize(num, den):
    if num.is_zero():
        return num, QPoly.const(1)
    if den.is_constant():
        c = den.constant_value()
        if c != 1:
            num = num * (1 / c)
        return num, QPoly.const(1)
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = poly_div_exact(num, g)
        den = poly_div_exact(den, g)
    if den.is_constant():
        return num * (1 / den.constant_value()), QPoly.const(1)
    _, lc = den.leading()
    if lc != 1:
        num = num * (1 / lc)
        den = den * (1 / lc)
    return num, den


def ratfunc(num, den=None):
    return QRatFunc(num, den)


def to_field(x):
    """Lift Rat/QPoly into QRatFunc, leave other field elements alone."""
    if isinstance(x, QPoly):
        return QRatFunc(x, None, normalize=False)
    return x


def is_zero(x):
    return not x


def as_rat_or_self(x):
    if isinstance(x, QRatFunc) and x.is_constant():
        return x.constant_value()
    if isinstance(x, QPoly) and x.is_constant():
        return x.constant_value()
    if isinstance(x, int):
        return as_rat(x)
    return x
