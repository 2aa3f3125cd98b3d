"""Small exact fields (Q and GF(q)) and subspace arithmetic over them.

Subspaces of K^n are stored as tuples of reduced row-echelon basis rows,
so equal subspaces have equal representations.
"""

from fractions import Fraction
from itertools import combinations, product


class RationalField:
    q = None
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def coerce(self, v):
        return Fraction(v)

    def __repr__(self):
        return "QQ"


QQ = RationalField()


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            r = q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                raise ValueError("%d is not a prime power" % q)
            return p, k
    raise ValueError("bad field size %r" % q)


def _polymulmod(a, b, mod, p):
    # coefficient lists, low degree first; mod is monic
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    k = len(mod) - 1
    for d in range(len(out) - 1, k - 1, -1):
        c = out[d]
        if c:
            for j in range(k + 1):
                out[d - k + j] = (out[d - k + j] - c * mod[j]) % p
    return out[:k] + [0] * (k - len(out[:k]))


def _irreducible(p, k):
    for tail in product(range(p), repeat=k):
        mod = list(tail) + [1]
        if mod[0] == 0:
            continue
        # no roots and, for k <= 3, that suffices; otherwise test all monic factors
        ok = True
        for d in range(1, k // 2 + 1):
            for f in product(range(p), repeat=d):
                fac = list(f) + [1]
                if _polydivides(fac, mod, p):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return mod
    raise ValueError("no irreducible polynomial found")


def _polydivides(f, g, p):
    g = list(g)
    df = len(f) - 1
    inv = pow(f[-1], p - 2, p)
    for d in range(len(g) - 1, df - 1, -1):
        c = g[d] * inv % p
        if c:
            for j in range(df + 1):
                g[d - df + j] = (g[d - df + j] - c * f[j]) % p
    return not any(g[:df])


class GF:
    """GF(q) with elements 0..q-1 and table arithmetic."""

    _cache = {}

    def __new__(cls, q):
        hit = cls._cache.get(q)
        if hit is not None:
            return hit
        obj = object.__new__(cls)
        obj._build(q)
        cls._cache[q] = obj
        return obj

    def _build(self, q):
        p, k = _factor_prime_power(q)
        self.q, self.p, self.k = q, p, k
        self.zero, self.one = 0, 1
        if k == 1:
            self.add_t = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul_t = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            mod = _irreducible(p, k)
            digits = [[(a // p ** i) % p for i in range(k)] for a in range(q)]

            def enc(c):
                return sum(v * p ** i for i, v in enumerate(c))

            self.add_t = [[enc([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q)]
                          for a in range(q)]
            self.mul_t = [[enc(_polymulmod(digits[a], digits[b], mod, p)) for b in range(q)] for a in range(q)]
        self.neg_t = [self.add_t[a].index(0) for a in range(q)]
        self.inv_t = [None] + [self.mul_t[a].index(1) for a in range(1, q)]

    def add(self, a, b):
        return self.add_t[a][b]

    def sub(self, a, b):
        return self.add_t[a][self.neg_t[b]]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        return self.inv_t[a]

    def coerce(self, v):
        """Image of a rational number (denominator prime to p)."""
        v = Fraction(v)
        num = v.numerator % self.p
        den = v.denominator % self.p
        if den == 0:
            raise ZeroDivisionError("denominator divisible by %d" % self.p)
        return self.mul(num, self.inv(den))

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return "GF(%d)" % self.q


# -- subspaces

def rref_rows(K, vectors):
    """Reduced row echelon basis of the span, as a tuple of tuples."""
    rows = [list(v) for v in vectors if any(v)]
    out = []
    pivots = []
    for r in rows:
        for pc, pr in zip(pivots, out):
            c = r[pc]
            if c:
                r = [K.sub(a, K.mul(c, b)) for a, b in zip(r, pr)]
        lead = next((j for j, a in enumerate(r) if a), None)
        if lead is None:
            continue
        inv = K.inv(r[lead])
        r = [K.mul(inv, a) for a in r]
        for idx, pr in enumerate(out):
            c = pr[lead]
            if c:
                out[idx] = [K.sub(a, K.mul(c, b)) for a, b in zip(pr, r)]
        out.append(r)
        pivots.append(lead)
    order = sorted(range(len(out)), key=lambda i: pivots[i])
    return tuple(tuple(out[i]) for i in order)


def pivot_cols(basis):
    return [next(j for j, a in enumerate(r) if a) for r in basis]


def span(K, *subspaces):
    vecs = []
    for s in subspaces:
        vecs.extend(s)
    return rref_rows(K, vecs)


def contains(K, big, small):
    return len(span(K, big, small)) == len(big)


def full_space(K, n):
    return tuple(tuple(K.one if i == j else K.zero for j in range(n)) for i in range(n))


def apply(K, x, basis):
    """Image of the span of basis under the matrix x (rows of x act on columns)."""
    vecs = []
    for b in basis:
        vecs.append([_dot(K, row, b) for row in x])
    return rref_rows(K, vecs)


def _dot(K, a, b):
    s = K.zero
    for u, v in zip(a, b):
        if u and v:
            s = K.add(s, K.mul(u, v))
    return s


def kernel(K, rows, n):
    """Basis (rref) of {v in K^n : rows . v = 0}."""
    R = rref_rows(K, rows)
    piv = pivot_cols(R)
    free = [j for j in range(n) if j not in piv]
    vecs = []
    for f in free:
        v = [K.zero] * n
        v[f] = K.one
        for pc, r in zip(piv, R):
            v[pc] = K.neg(r[f])
        vecs.append(v)
    return rref_rows(K, vecs)


def annihilator(K, basis, n):
    return kernel(K, basis, n)


def intersect(K, a, b, n):
    ann = list(annihilator(K, a, n)) + list(annihilator(K, b, n))
    return kernel(K, ann, n)


def preimage(K, x, target, n):
    """{v in K^n : x v in target}; x is m x n."""
    ann = annihilator(K, target, len(x))
    rows = [[_dot(K, a, [x[r][c] for r in range(len(x))]) for c in range(n)] for a in ann]
    return kernel(K, rows, n)


def complement_basis(K, lower, upper):
    """Vectors of upper completing a basis of lower to one of upper."""
    cur = lower
    out = []
    for v in upper:
        nxt = span(K, cur, (v,))
        if len(nxt) > len(cur):
            out.append(v)
            cur = nxt
    return out


def enumerate_subspaces(K, lower, upper, dim):
    """All subspaces E with lower <= E <= upper and dim E = dim."""
    d = dim - len(lower)
    comp = complement_basis(K, lower, upper)
    r = len(comp)
    if d < 0 or d > r:
        return
    if d == 0:
        yield lower
        return
    for pivs in combinations(range(r), d):
        slots = []
        for i, pc in enumerate(pivs):
            for j in range(pc + 1, r):
                if j not in pivs:
                    slots.append((i, j))
        for vals in product(list(K.elements()), repeat=len(slots)):
            M = [[K.zero] * r for _ in range(d)]
            for i, pc in enumerate(pivs):
                M[i][pc] = K.one
            for (i, j), v in zip(slots, vals):
                M[i][j] = v
            vecs = []
            for row in M:
                vec = [K.zero] * len(comp[0])
                for c, coef in enumerate(row):
                    if coef:
                        vec = [K.add(a, K.mul(coef, b)) for a, b in zip(vec, comp[c])]
                vecs.append(vec)
            yield span(K, lower, tuple(tuple(v) for v in vecs))


def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
