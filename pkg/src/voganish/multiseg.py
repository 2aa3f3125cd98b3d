"""Segments, multisegments and rank triangles for the equioriented type-A quiver.

Vertices are 0..n and x_i maps vertex i-1 to vertex i.  The rank
r[i, j] = rank(x_i ... x_j), 1 <= j <= i <= n, counts the segments [p, q]
with p <= j-1 and q >= i.
"""

import json
from collections import namedtuple
from fractions import Fraction


class ParseError(ValueError):
    def __init__(self, msg, location=None):
        self.location = location
        if location is not None:
            msg = "%s (at %s)" % (msg, location)
        super().__init__(msg)


class SupportMismatch(ValueError):
    pass


class NegativeRank(ValueError):
    pass


class MultsMismatch(ValueError):
    pass


Segment = namedtuple("Segment", "p q")


class Multisegment:
    """A multiset of vertex segments [p, q] inside 0..n."""

    def __init__(self, n, counts):
        self.n = n
        clean = {}
        for (p, q), c in counts.items():
            if not (0 <= p <= q <= n):
                raise ValueError("segment [%d,%d] outside 0..%d" % (p, q, n))
            if c < 0:
                raise ValueError("negative multiplicity")
            if c:
                clean[Segment(p, q)] = clean.get(Segment(p, q), 0) + c
        self.counts = dict(sorted(clean.items()))

    @staticmethod
    def from_list(n, segs):
        counts = {}
        for s in segs:
            if len(s) == 3:
                p, q, c = s
            else:
                (p, q), c = s, 1
            counts[(p, q)] = counts.get((p, q), 0) + c
        return Multisegment(n, counts)

    def coverage(self, v):
        return sum(c for (p, q), c in self.counts.items() if p <= v <= q)

    def support(self):
        return tuple(self.coverage(v) for v in range(self.n + 1))

    def padded(self, mults):
        """Add singletons so that coverage equals mults."""
        counts = dict(self.counts)
        for v, m in enumerate(mults):
            extra = m - self.coverage(v)
            if extra < 0:
                raise SupportMismatch("coverage %d exceeds m_%d = %d" % (self.coverage(v), v, m))
            if extra:
                counts[(v, v)] = counts.get((v, v), 0) + extra
        return Multisegment(self.n, counts)

    def segments(self):
        out = []
        for s, c in self.counts.items():
            out.extend([s] * c)
        return out

    def __eq__(self, other):
        return isinstance(other, Multisegment) and self.n == other.n and self.counts == other.counts

    def __hash__(self):
        return hash((self.n, tuple(self.counts.items())))

    def __repr__(self):
        parts = []
        for (p, q), c in self.counts.items():
            parts.append(("%d*" % c if c > 1 else "") + "[%d,%d]" % (p, q))
        return "{" + ", ".join(parts) + "}"

    def to_json(self):
        return {"n": self.n, "segments": [{"p": p, "q": q, "mult": c} for (p, q), c in self.counts.items()]}

    @staticmethod
    def from_json(obj):
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as e:
                raise ParseError(str(e), "char %d" % e.pos)
        try:
            n = int(obj["n"])
            counts = {}
            for k, s in enumerate(obj["segments"]):
                key = (int(s["p"]), int(s["q"]))
                counts[key] = counts.get(key, 0) + int(s.get("mult", 1))
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError("bad multisegment JSON: %s" % e)
        try:
            return Multisegment(n, counts)
        except ValueError as e:
            raise ParseError(str(e))

    @staticmethod
    def from_exponents(segs, shift=2, n=4):
        """Segments given by exponent labels [a, b]; vertex = exponent + shift."""
        return Multisegment.from_list(n, [((a + shift, b + shift), c) for (a, b), c in segs])


class RankTriangle:
    """Multiplicities m_0..m_n and ranks r[i, j] for 1 <= j <= i <= n."""

    __slots__ = ("mults", "ranks", "_key")

    def __init__(self, mults, ranks):
        self.mults = tuple(int(m) for m in mults)
        n = len(self.mults) - 1
        self.ranks = {}
        for i in range(1, n + 1):
            for j in range(1, i + 1):
                self.ranks[(i, j)] = int(ranks.get((i, j), 0))
        self._key = (self.mults, tuple(self.ranks[k] for k in sorted(self.ranks)))

    @property
    def n(self):
        return len(self.mults) - 1

    def r(self, i, j):
        return self.ranks[(i, j)]

    def rows(self):
        """Rank rows in display order: row k holds r[i, i-k] for i = n down to k+1."""
        n = self.n
        return [[self.ranks[(i, i - k)] for i in range(n, k, -1)] for k in range(n)]

    @staticmethod
    def from_rows(mults, rows):
        n = len(mults) - 1
        if len(rows) != n:
            raise ParseError("expected %d rank rows, got %d" % (n, len(rows)))
        ranks = {}
        for k, row in enumerate(rows):
            if len(row) != n - k:
                raise ParseError("rank row %d has %d entries, expected %d" % (k + 1, len(row), n - k),
                                 "row %d" % (k + 1))
            for t, val in enumerate(row):
                i = n - t
                ranks[(i, i - k)] = val
        return RankTriangle(mults, ranks)

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, RankTriangle) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return "RankTriangle(%s)" % self.to_text()

    # formats
    def to_text(self):
        top = " ".join(str(m) for m in reversed(self.mults))
        return " / ".join([top] + [" ".join(str(v) for v in row) for row in self.rows()])

    def pretty(self):
        lines = []
        rows = [list(reversed(self.mults))] + self.rows()
        width = max(len(str(v)) for row in rows for v in row)
        for k, row in enumerate(rows):
            lines.append(" " * (k * (width + 1) // 2) + " ".join(str(v).rjust(width) for v in row))
        return "\n".join(lines)

    @staticmethod
    def parse(text):
        parts = [p.strip() for p in text.strip().split("/")]
        rows = []
        for k, p in enumerate(parts):
            try:
                rows.append([int(t) for t in p.split()])
            except ValueError:
                raise ParseError("non-integer entry", "row %d" % (k + 1))
        if not rows or not rows[0]:
            raise ParseError("empty triangle")
        mults = list(reversed(rows[0]))
        return RankTriangle.from_rows(mults, rows[1:])

    def to_json(self):
        return {"mults": list(self.mults), "ranks": self.rows()}

    @staticmethod
    def from_json(obj):
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as e:
                raise ParseError(str(e), "char %d" % e.pos)
        try:
            return RankTriangle.from_rows(list(obj["mults"]), obj["ranks"])
        except (KeyError, TypeError) as e:
            raise ParseError("bad triangle JSON: %s" % e)

    # helpers
    def span_rank(self, a, b):
        """Rank of the composite map from vertex a to vertex b (a <= b); m_a if a == b."""
        if a == b:
            return self.mults[a]
        if a < 0 or b > self.n:
            return 0
        return self.ranks[(b, a + 1)]


def parse_triangle(s):
    s = s.strip()
    if s.startswith("{"):
        return RankTriangle.from_json(s)
    return RankTriangle.parse(s)


def format_triangle(T):
    return T.to_text()


def parse_multisegment(s):
    return Multisegment.from_json(s)


def format_multisegment(m):
    return json.dumps(m.to_json(), sort_keys=True)


def triangle_from_multisegment(m, mults=None):
    """Sum of segment indicator triangles; coverage must equal mults."""
    support = m.support()
    if mults is None:
        mults = support
    if tuple(mults) != support:
        raise SupportMismatch("coverage %s differs from mults %s" % (support, tuple(mults)))
    n = m.n
    ranks = {}
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            ranks[(i, j)] = sum(c for (p, q), c in m.counts.items() if p + 1 <= j and i <= q)
    return RankTriangle(mults, ranks)


def multisegment_from_triangle(T):
    """Greedy extraction: longest remaining rank first, ties to the largest i."""
    n = T.n
    r = dict(T.ranks)
    counts = {}
    order = sorted(r, key=lambda ij: (-(ij[0] - ij[1]), -ij[0]))
    for (i, j) in order:
        c = r[(i, j)]
        if c < 0:
            raise NegativeRank("rank r[%d,%d] went negative" % (i, j))
        if c == 0:
            continue
        counts[(j - 1, i)] = counts.get((j - 1, i), 0) + c
        for k in range(j, i + 1):
            for l in range(j, k + 1):
                r[(k, l)] -= c
                if r[(k, l)] < 0:
                    raise NegativeRank("rank r[%d,%d] went negative" % (k, l))
    m = Multisegment(n, counts)
    try:
        return m.padded(T.mults)
    except SupportMismatch as e:
        raise NegativeRank(str(e))


def segment_counts(T):
    """n_{ab} = number of segments [a, b], by inclusion-exclusion on ranks."""
    n = T.n
    R = T.span_rank
    out = {}
    for a in range(n + 1):
        for b in range(a, n + 1):
            out[(a, b)] = R(a, b) - R(a - 1, b) - R(a, b + 1) + R(a - 1, b + 1)
    return out


def is_valid(T):
    """Bounds, monotonicity and the mixed-difference inequalities.

    The mixed inequalities r[i,j] + r[l,k] <= r[i,k] + r[l,j] for
    k < j <= l+1 <= i, with r[l, l+1] read as m_l, are equivalent to the
    nonnegativity of every segment count.
    """
    n = T.n
    m = T.mults
    if any(v < 0 for v in m) or any(v < 0 for v in T.ranks.values()):
        return False
    for i in range(1, n + 1):
        if T.r(i, i) > min(m[i - 1], m[i]):
            return False
        for j in range(1, i):
            if T.r(i, j) > min(T.r(i, j + 1), T.r(i - 1, j)):
                return False
    return all(c >= 0 for c in segment_counts(T).values())


def enumerate_multisegments(mults):
    """All multisegments with coverage exactly mults, in a fixed order."""
    n = len(mults) - 1
    out = []

    def rec(v, active, counts):
        # active: dict start -> number of segments covering v-1 still open
        if v > n:
            closed = dict(counts)
            for p, c in active.items():
                if c:
                    closed[(p, n)] = closed.get((p, n), 0) + c
            out.append(Multisegment(n, closed))
            return
        starts = sorted(active)
        for choice in _continuations([active[p] for p in starts], mults[v]):
            cont = dict(zip(starts, choice))
            new_counts = dict(counts)
            for p in starts:
                ended = active[p] - cont[p]
                if ended:
                    new_counts[(p, v - 1)] = new_counts.get((p, v - 1), 0) + ended
            nxt = {p: c for p, c in cont.items() if c}
            fresh = mults[v] - sum(choice)
            if fresh:
                nxt[v] = fresh
            rec(v + 1, nxt, new_counts)

    rec(0, {}, {})
    return out


def _continuations(avail, cap):
    # tuples c with 0 <= c_k <= avail_k and sum <= cap
    if not avail:
        yield ()
        return
    for c in range(min(avail[0], cap) + 1):
        for rest in _continuations(avail[1:], cap - c):
            yield (c,) + rest


def enumerate_orbits(mults):
    """Every valid rank triangle with the given multiplicities, sorted."""
    tris = {triangle_from_multisegment(m, tuple(mults)) for m in enumerate_multisegments(mults)}
    return sorted(tris)


def closure_leq(A, B):
    if A.mults != B.mults:
        raise MultsMismatch("different multiplicities")
    return all(A.ranks[k] <= B.ranks[k] for k in A.ranks)


def closure_lt(A, B):
    return A != B and closure_leq(A, B)


def orbits_between(lower, predicate, orbits=None):
    """Orbits C with lower < C that satisfy predicate(C)."""
    if orbits is None:
        orbits = enumerate_orbits(lower.mults)
    return [C for C in orbits if predicate(C)]


def open_orbit(mults):
    n = len(mults) - 1
    ranks = {(i, j): min(mults[j - 1:i + 1]) for i in range(1, n + 1) for j in range(1, i + 1)}
    return RankTriangle(mults, ranks)


def zero_orbit(mults):
    return RankTriangle(mults, {})


def arthur_block(a, b, center, n):
    """The b+1 segments of length a+1 at consecutive starts, symmetric about center."""
    twice = 2 * Fraction(center) - a - b
    if twice.denominator != 1 or twice.numerator % 2:
        return None
    s0 = twice.numerator // 2
    if s0 < 0 or s0 + a + b > n:
        return None
    return [(s0 + t, s0 + t + a) for t in range(b + 1)]


def is_arthur_type(m, center=None):
    """Can m be split exactly into symmetric Arthur blocks?"""
    n = m.n
    if center is None:
        center = Fraction(n, 2)
    blocks = []
    for a in range(n + 1):
        for b in range(n + 1):
            blk = arthur_block(a, b, center, n)
            if blk:
                blocks.append(blk)
    remaining = dict(m.counts)

    def rec():
        live = [s for s, c in remaining.items() if c]
        if not live:
            return True
        first = min(live)
        for blk in blocks:
            if tuple(first) not in blk:
                continue
            if all(remaining.get(Segment(*s), 0) > 0 for s in blk):
                for s in blk:
                    remaining[Segment(*s)] -= 1
                ok = rec()
                for s in blk:
                    remaining[Segment(*s)] += 1
                if ok:
                    return True
        return False

    return rec()


# the (2, 4, 4, 4, 2) instance and its named orbits
KS_MULTS = (2, 4, 4, 4, 2)

NAMED_TRIANGLES = {
    "KS": "2 4 4 4 2 / 2 2 2 2 / 0 2 0 / 0 0 / 0",
    "psi": "2 4 4 4 2 / 2 3 3 2 / 1 2 1 / 1 1 / 0",
    "L": "2 4 4 4 2 / 2 4 2 2 / 2 2 0 / 0 0 / 0",
    "R": "2 4 4 4 2 / 2 2 4 2 / 0 2 2 / 0 0 / 0",
    "l": "2 4 4 4 2 / 2 3 2 2 / 1 2 0 / 0 0 / 0",
    "m": "2 4 4 4 2 / 2 3 3 2 / 1 2 1 / 0 0 / 0",
    "r": "2 4 4 4 2 / 2 2 3 2 / 0 2 1 / 0 0 / 0",
}


def named(name):
    return RankTriangle.parse(NAMED_TRIANGLES[name])


M_KS = Multisegment(4, {(0, 1): 2, (1, 3): 2, (2, 2): 2, (3, 4): 2})
M_PSI = Multisegment(4, {(0, 1): 1, (0, 3): 1, (1, 2): 1, (1, 4): 1, (2, 3): 1, (3, 4): 1})
