"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a sorted tuple of variable indices with repetition, so
x0^2*x3 is (0, 0, 3).  Multiplying monomials is merging tuples.
"""

from fractions import Fraction
from itertools import groupby

Rat = Fraction


class Registry:
    """Append-only table of variable names; the index is the total order."""

    def __init__(self):
        self.names = []
        self.index = {}

    def get(self, name):
        i = self.index.get(name)
        if i is None:
            i = len(self.names)
            self.names.append(name)
            self.index[name] = i
        return i

    def lookup(self, name):
        return self.index[name]

    def name(self, i):
        return self.names[i]

    def __len__(self):
        return len(self.names)


REGISTRY = Registry()
# slice parameters come first so serialized output is stable
REGISTRY.get("t1")
REGISTRY.get("t2")


def var_index(v):
    if isinstance(v, int):
        return v
    if isinstance(v, QPoly):
        return v.as_variable()
    return REGISTRY.get(v)


def as_rat(c):
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def mono_str(m):
    parts = []
    for v, grp in groupby(m):
        e = len(list(grp))
        name = REGISTRY.name(v)
        parts.append(name if e == 1 else "%s^%d" % (name, e))
    return "*".join(parts)


def mono_key(m):
    # exponent pairs in registry order
    return tuple((v, len(list(g))) for v, g in groupby(m))


def rat_str(c):
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


class QPoly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        # terms: dict monomial -> nonzero Rat; trusted, not copied
        self.terms = terms if terms is not None else {}
        self._hash = None

    # constructors
    @staticmethod
    def const(c):
        c = as_rat(c)
        return QPoly({(): c} if c else {})

    @staticmethod
    def var(v):
        return QPoly({(var_index(v),): Fraction(1)})

    @staticmethod
    def from_dict(d):
        out = {}
        for m, c in d.items():
            c = as_rat(c)
            if c:
                m = tuple(sorted(m))
                c = out.get(m, 0) + c
                if c:
                    out[m] = c
                else:
                    out.pop(m, None)
        return QPoly(out)

    @staticmethod
    def coerce(x):
        if isinstance(x, QPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return QPoly.const(x)
        return NotImplemented

    # queries
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        return self.terms.get((), Fraction(0))

    def as_variable(self):
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if len(m) == 1 and c == 1:
                return m[0]
        raise ValueError("not a single variable")

    def variables(self):
        vs = set()
        for m in self.terms:
            vs.update(m)
        return vs

    def total_degree(self):
        return max((len(m) for m in self.terms), default=-1)

    def degree_in(self, v):
        v = var_index(v)
        return max((m.count(v) for m in self.terms), default=0)

    def nterms(self):
        return len(self.terms)

    # arithmetic
    def __neg__(self):
        return QPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        other = QPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return QPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = QPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return QPoly()
            return QPoly({m: c * other for m, c in self.terms.items()})
        other = QPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(other.terms) < len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                s = out.get(m)
                if s is None:
                    out[m] = c1 * c2
                else:
                    s += c1 * c2
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        out = QPoly.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        other = QPoly.coerce(other)
        if other.is_constant() and other:
            return self * (1 / other.constant_value())
        from .ratfunc import QRatFunc
        return QRatFunc(self, other)

    def __rtruediv__(self, other):
        from .ratfunc import QRatFunc
        return QRatFunc(QPoly.coerce(other), self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QPoly.const(other)
        if not isinstance(other, QPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # calculus and substitution
    def derivative(self, v):
        v = var_index(v)
        out = {}
        for m, c in self.terms.items():
            k = m.count(v)
            if k:
                i = m.index(v)
                m2 = m[:i] + m[i + 1:]
                s = out.get(m2, 0) + c * k
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        return QPoly(out)

    def substitute(self, assignment):
        """Simultaneous substitution; values may be Rat, QPoly or any ring element."""
        amap = {var_index(k): v for k, v in assignment.items()}
        if not amap:
            return self
        cache = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                val = amap[v]
                cache[key] = val if e == 1 else power(v, e - 1) * val
            return cache[key]

        result = QPoly()
        kept = {}
        for m, c in self.terms.items():
            rest = []
            factor = None
            for v, g in groupby(m):
                e = len(list(g))
                if v in amap:
                    p = power(v, e)
                    factor = p if factor is None else factor * p
                else:
                    rest.extend([v] * e)
            if factor is None:
                kept[m] = c
                continue
            term = factor * c
            if rest:
                term = term * QPoly({tuple(rest): Fraction(1)})
            result = result + term
        if kept:
            result = result + QPoly(kept)
        return result

    def evaluate(self, point):
        """Evaluate at a full assignment {var: value}; returns a ring element."""
        amap = {var_index(k): v for k, v in point.items()}
        total = 0
        for m, c in self.terms.items():
            t = c
            for v in m:
                t = t * amap[v]
            total = total + t
        return total if not isinstance(total, int) else Fraction(total)

    def content(self):
        """Positive gcd of numerators over lcm of denominators."""
        from math import gcd
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def leading(self):
        """Term that is largest in registry order (used for normalization)."""
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    # serialization
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: (len(mc[0]) > 0, mono_key(mc[0])))

    def to_str(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            if not m:
                out.append(rat_str(c))
            elif c == 1:
                out.append(mono_str(m))
            else:
                out.append(rat_str(c) + "*" + mono_str(m))
        return "+".join(out)

    __str__ = to_str

    def __repr__(self):
        return "QPoly(%s)" % self.to_str()

    @staticmethod
    def parse(s):
        s = s.strip()
        if s == "0" or not s:
            return QPoly()
        out = QPoly()
        for term in _split_terms(s):
            coeff = Fraction(1)
            mono = []
            for i, factor in enumerate(term.split("*")):
                factor = factor.strip()
                if not factor:
                    raise ValueError("empty factor in %r" % term)
                if i == 0 and _is_number(factor):
                    coeff = Fraction(factor)
                    continue
                if i == 0 and factor.startswith("-"):
                    coeff = -coeff
                    factor = factor[1:]
                if "^" in factor:
                    name, e = factor.rsplit("^", 1)
                    mono.extend([REGISTRY.get(name)] * int(e))
                else:
                    mono.append(REGISTRY.get(factor))
            out = out + QPoly({tuple(sorted(mono)): coeff})
        return out


def _is_number(s):
    try:
        Fraction(s)
        return True
    except ValueError:
        return False


def _split_terms(s):
    # '+' separates terms; '-' only ever appears as a sign
    return [t for t in s.split("+") if t]


def var(name):
    return QPoly.var(name)


def const(c):
    return QPoly.const(c)
