"""Partial-flag covers of orbit closures, their affine charts and fibres.

A cover of closure(C) is cut out of V x (product of Grassmannians) by
conditions x_i(S) in T, where S is a retained subspace at vertex i-1 (or the
whole space) and T a retained subspace at vertex i (or zero).  Subspaces at
one vertex form a partial flag.

Subspace labels are pairs (v, k); in variable names they appear as "E{v}l{k}".
"""

import json
from fractions import Fraction
from importlib import resources
from functools import lru_cache
from itertools import combinations, product

from .exactcore import QPoly, var
from .exactcore.fields import (GF, QQ, apply, contains, full_space, gaussian_binomial, intersect,
                               kernel, preimage, rref_rows, span)
from .exactcore.linalg import minors
from .multiseg import RankTriangle, closure_leq, enumerate_orbits
from .vogan import QuiverPoint, VoganSpace, orbit_dim, rank_triangle_of, representative

FULL = "FULL"
ZERO = "ZERO"


class InconsistentChart(ValueError):
    pass


class PointOutsideClosure(ValueError):
    pass


class ChartMissesFibre(ValueError):
    pass


class CountOverflowBudget(RuntimeError):
    pass


def label(s):
    if s in (FULL, ZERO):
        return s
    return "E%dl%d" % s


def parse_label(text):
    if text in (FULL, ZERO):
        return text
    v, k = text[1:].split("l")
    return int(v), int(k)


# -- cover specifications

class CoverSpec:
    """Retained subspaces, map conditions and same-vertex chains."""

    def __init__(self, mults, subspaces, conditions, name=None, triangle=None):
        self.mults = tuple(mults)
        self.subspaces = sorted(subspaces)
        self.conditions = list(conditions)
        self.name = name
        self.triangle = triangle
        self.chains = []
        for v in sorted({s[0] for s in self.subspaces}):
            ks = sorted(k for (w, k) in self.subspaces if w == v)
            for a, b in zip(ks, ks[1:]):
                self.chains.append(((v, a), (v, b)))

    @property
    def n(self):
        return len(self.mults) - 1

    def at_vertex(self, v):
        """Retained subspaces at v, largest first."""
        return sorted((s for s in self.subspaces if s[0] == v), key=lambda s: -s[1])

    def bigger(self, s):
        """Next larger retained subspace at the same vertex, or None."""
        for a, b in self.chains:
            if a == s:
                return b
        return None

    def is_trivial(self):
        return not self.conditions

    def grassmannian_dim(self):
        total = 0
        for v in range(1, self.n + 1):
            prev = self.mults[v]
            for s in self.at_vertex(v):
                total += s[1] * (prev - s[1])
                prev = s[1]
        return total

    def condition_text(self):
        out = []
        for i, S, T in self.conditions:
            lhs = "x%d(%s)" % (i, "V%d" % (i - 1) if S == FULL else label(S))
            out.append(lhs + (" = 0" if T == ZERO else " in " + label(T)))
        return out

    def to_json(self):
        return {"mults": list(self.mults), "name": self.name,
                "subspaces": [label(s) for s in self.subspaces],
                "conditions": [[i, label(S), label(T)] for i, S, T in self.conditions],
                "chains": [[label(a), label(b)] for a, b in self.chains]}

    @staticmethod
    def from_json(obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        conds = [(int(i), parse_label(S), parse_label(T)) for i, S, T in obj["conditions"]]
        return CoverSpec(obj["mults"], [parse_label(s) for s in obj["subspaces"]], conds, obj.get("name"))

    def __eq__(self, other):
        return (isinstance(other, CoverSpec) and self.mults == other.mults
                and self.subspaces == other.subspaces and self.conditions == other.conditions)

    def __repr__(self):
        return "CoverSpec(%s; %s)" % (", ".join(label(s) for s in self.subspaces),
                                      "; ".join(self.condition_text()))


def cover_from_triangle(T, name=None):
    """Flag conditions x_i(E^{r[i-1,j]}) in E^{r[i,j]} for all j <= i."""
    m = T.mults
    conds = []
    for i in range(1, T.n + 1):
        for j in range(1, i + 1):
            kt = T.r(i, j)
            if kt == m[i]:
                continue
            if i - 1 >= j:
                ks = T.r(i - 1, j)
                if ks == 0:
                    continue
                S = FULL if ks == m[i - 1] else (i - 1, ks)
            else:
                S = FULL
                if m[i - 1] == 0:
                    continue
            tgt = ZERO if kt == 0 else (i, kt)
            c = (i, S, tgt)
            if c not in conds:
                conds.append(c)
    used = set()
    for _, S, tgt in conds:
        for s in (S, tgt):
            if s not in (FULL, ZERO):
                used.add(s)
    return CoverSpec(m, used, conds, name=name, triangle=T)


# -- charts

class Chart:
    """Pivot rows for every retained subspace; pivot rows carry the identity."""

    def __init__(self, pivots, index=1, name=None):
        self.pivots = {s: tuple(sorted(p)) for s, p in pivots.items()}
        self.index = index
        self.name = name

    def to_json(self):
        return {"index": self.index, "name": self.name,
                "pivots": {label(s): list(p) for s, p in sorted(self.pivots.items())}}

    @staticmethod
    def from_json(obj):
        return Chart({parse_label(k): v for k, v in obj["pivots"].items()}, obj.get("index", 1), obj.get("name"))

    def __eq__(self, other):
        return isinstance(other, Chart) and self.pivots == other.pivots

    def __hash__(self):
        return hash(tuple(sorted(self.pivots.items())))

    def __repr__(self):
        return "Chart(%d: %s)" % (self.index, " ".join("%s%s" % (label(s), list(p))
                                                         for s, p in sorted(self.pivots.items())))


def check_chart(spec, chart):
    for s in spec.subspaces:
        p = chart.pivots.get(s)
        if p is None:
            raise InconsistentChart("no pivots for %s" % label(s))
        if len(p) != s[1] or len(set(p)) != s[1] or not all(0 <= r < spec.mults[s[0]] for r in p):
            raise InconsistentChart("bad pivots %r for %s" % (p, label(s)))
    for a, b in spec.chains:
        if not set(chart.pivots[a]) <= set(chart.pivots[b]):
            raise InconsistentChart("pivots of %s not inside those of %s" % (label(a), label(b)))


def _var_order(s):
    return s[0], -s[1]


def chart_var_names(spec, chart, s):
    m = spec.mults[s[0]]
    piv = chart.pivots[s]
    names = []
    j = 0
    for r in range(m):
        if r in piv:
            continue
        for c in range(s[1]):
            j += 1
            names.append("%s.a%d" % (label(s), j))
    return names


def chart_vars(spec, chart):
    """Chart variable names; vertices ascending, larger subspaces first."""
    out = []
    for s in sorted(spec.subspaces, key=_var_order):
        out.extend(chart_var_names(spec, chart, s))
    return out


def chart_var_key(name):
    """Sort key (vertex, -dim, index) parsed from a chart variable name."""
    head, tail = name.split(".a")
    v, k = parse_label(head)
    return v, -k, int(tail)


def subspace_matrix(spec, chart, s):
    """m_v x k matrix whose columns span the subspace in the chart."""
    m = spec.mults[s[0]]
    piv = chart.pivots[s]
    names = iter(chart_var_names(spec, chart, s))
    M = []
    for r in range(m):
        if r in piv:
            c0 = piv.index(r)
            M.append([QPoly.const(1 if c == c0 else 0) for c in range(s[1])])
        else:
            M.append([var(next(names)) for _ in range(s[1])])
    return M


def _mat_mul(A, B):
    out = []
    for row in A:
        out.append([sum((a * B[k][c] for k, a in enumerate(row) if a), QPoly()) for c in range(len(B[0]))])
    return out


def _containment(A, B, pivB):
    """Generators of span(A) in span(B) when B has the identity on rows pivB."""
    gens = []
    sub = [A[r] for r in pivB]
    BA = _mat_mul(B, sub)
    for r in range(len(A)):
        if r in pivB:
            continue
        for c in range(len(A[0])):
            g = A[r][c] - BA[r][c]
            if g:
                gens.append(g)
    return gens


def chart_ideal(spec, chart, ambient=None):
    """Polynomial generators of the cover in the chart (x and chart variables)."""
    if spec.is_trivial():
        return []
    check_chart(spec, chart)
    space = ambient or VoganSpace(spec.mults)
    space.register()
    for name in chart_vars(spec, chart):
        var(name)
    X = space.symbolic_x()
    mats = {s: subspace_matrix(spec, chart, s) for s in spec.subspaces}
    gens = []
    for a, b in spec.chains:
        gens.extend(_containment(mats[a], mats[b], chart.pivots[b]))
    for i, S, T in spec.conditions:
        xi = X.x(i)
        img = xi if S == FULL else _mat_mul(xi, mats[S])
        if T == ZERO:
            gens.extend(g for row in img for g in row if g)
        else:
            gens.extend(_containment(img, mats[T], chart.pivots[T]))
    return gens


# -- windows: forced bounds on each subspace at a fixed x

def _reduce_point(x, K):
    return [[[K.coerce(a) for a in row] for row in x.x(i)] for i in range(1, x.n + 1)]


class Windows:
    """Lower and upper bounds L <= E <= U for every retained subspace."""

    def __init__(self, spec, x, K=QQ):
        self.spec = spec
        self.K = K
        self.xs = _reduce_point(x, K)
        self.lower = {}
        self.upper = {}
        self._solve()

    def xmat(self, i):
        return self.xs[i - 1]

    def _image(self, i, S, lower=True):
        K = self.K
        if S == FULL:
            src = full_space(K, self.spec.mults[i - 1])
        else:
            src = self.lower[S] if lower else self.upper[S]
        return apply(K, self.xmat(i), src)

    def _solve(self):
        spec, K = self.spec, self.K
        for s in spec.subspaces:
            self.lower[s] = ()
            self.upper[s] = full_space(K, spec.mults[s[0]])
        for i, S, T in spec.conditions:
            if S == FULL and T == ZERO and self._image(i, FULL):
                raise PointOutsideClosure("x%d is not zero" % i)
        changed = True
        while changed:
            changed = False
            for i, S, T in spec.conditions:
                m_src = spec.mults[i - 1]
                if T != ZERO:
                    img = self._image(i, S)
                    new = span(K, self.lower[T], img)
                    if new != self.lower[T]:
                        self.lower[T] = new
                        changed = True
                if S != FULL:
                    if T == ZERO:
                        pre = kernel(K, self.xmat(i), m_src)
                    else:
                        pre = preimage(K, self.xmat(i), self.upper[T], m_src)
                    new = intersect(K, self.upper[S], pre, m_src)
                    if new != self.upper[S]:
                        self.upper[S] = new
                        changed = True
            for a, b in spec.chains:
                new = span(K, self.lower[b], self.lower[a])
                if new != self.lower[b]:
                    self.lower[b] = new
                    changed = True
                new = intersect(K, self.upper[a], self.upper[b], spec.mults[a[0]])
                if new != self.upper[a]:
                    self.upper[a] = new
                    changed = True
            for s in spec.subspaces:
                lo, up, k = self.lower[s], self.upper[s], s[1]
                if len(lo) > k or len(up) < k or not contains(K, up, lo):
                    raise PointOutsideClosure("no admissible %s" % label(s))
                if len(lo) == k and up != lo:
                    self.upper[s] = lo
                    changed = True
                elif len(up) == k and lo != up:
                    self.lower[s] = up
                    changed = True

    def fixed(self, s):
        return len(self.lower[s]) == s[1]

    def free_subspaces(self):
        return [s for s in self.spec.subspaces if not self.fixed(s)]

    def dim_bound(self):
        """Upper bound for the fibre dimension from the windows alone."""
        total = 0
        for s in self.spec.subspaces:
            k = s[1]
            lo = len(self.lower[s])
            up = len(self.upper[s])
            b = self.spec.bigger(s)
            if b is not None:
                up = min(up, b[1])
            total += (k - lo) * (up - k)
        return min(total, self._tower_bound())

    def _tower_bound(self):
        # choose the flags one vertex at a time, in every order of the
        # vertices; a chosen neighbour forces a minimal image dimension
        # (previous vertex) or a maximal preimage dimension (next vertex)
        from itertools import permutations
        spec, K = self.spec, self.K
        img_min, pre_max = {}, {}
        for i, S, T in spec.conditions:
            if S == FULL or T == ZERO:
                continue
            m = spec.mults[i - 1]
            ker = intersect(K, kernel(K, self.xmat(i), m), self.upper[S], m)
            img_min[(S, T)] = max(len(self._image(i, S)), S[1] - len(ker))
            pre_max[(S, T)] = len(ker) + min(T[1], len(apply(K, self.xmat(i), self.upper[S])))
        verts = [v for v in range(1, spec.n + 1) if spec.at_vertex(v)]
        best = None
        for order in permutations(verts):
            chosen = set()
            total = 0
            for v in order:
                subs = spec.at_vertex(v)
                lo = {s: len(self.lower[s]) for s in subs}
                up = {s: len(self.upper[s]) for s in subs}
                for (S, T), d in img_min.items():
                    if T[0] == v and S[0] in chosen:
                        lo[T] = max(lo[T], d)
                for (S, T), d in pre_max.items():
                    if S[0] == v and T[0] in chosen:
                        up[S] = min(up[S], d)
                total += min(_chain_bound(subs, lo, up, True), _chain_bound(subs, lo, up, False))
                chosen.add(v)
                if best is not None and total >= best:
                    break
            if best is None or total < best:
                best = total
        return best if best is not None else 0


def _chain_bound(subs, lo, up, largest_first):
    """Dimension bound for a flag at one vertex with dimension windows."""
    lo, up = dict(lo), dict(up)
    total = 0
    if largest_first:
        for a, b in zip(subs, subs[1:]):
            lo[a] = max(lo[a], lo[b])
        above = None
        for s in subs:
            u = up[s] if above is None else min(up[s], above)
            total += max(0, s[1] - lo[s]) * max(0, u - s[1])
            above = s[1]
    else:
        for a, b in zip(subs, subs[1:]):
            up[b] = min(up[b], up[a])
        subs = list(reversed(subs))
        below = None
        for s in subs:
            l = lo[s] if below is None else max(lo[s], below)
            total += max(0, s[1] - l) * max(0, up[s] - s[1])
            below = s[1]
    return total


def fibre_dim_bound(spec, x):
    return Windows(spec, x).dim_bound()


# -- point counts over finite fields

def _flags_at(K, spec, v, lower_extra, W, budget):
    """Flags at vertex v inside the windows, with extra lower bounds per subspace."""
    subs = spec.at_vertex(v)
    if not subs:
        yield {}
        return

    def rec(idx, above, chosen):
        if idx == len(subs):
            yield dict(chosen)
            return
        s = subs[idx]
        lo = span(K, W.lower[s], *lower_extra.get(s, ()))
        up = W.upper[s] if above is None else intersect(K, W.upper[s], above, spec.mults[v])
        if len(lo) > s[1] or not contains(K, up, lo):
            return
        for E in _subspaces_between(K, lo, up, s[1]):
            budget[0] -= 1
            if budget[0] < 0:
                raise CountOverflowBudget("enumeration budget exhausted")
            chosen[s] = E
            yield from rec(idx + 1, E, chosen)
        chosen.pop(s, None)

    yield from rec(0, None, {})


def _subspaces_between(K, lo, up, k):
    if len(lo) == k:
        yield lo
        return
    if len(up) == k:
        yield up
        return
    from .exactcore.fields import enumerate_subspaces
    yield from enumerate_subspaces(K, lo, up, k)


def point_count_fibre(spec, stratum, q, budget=2_000_000):
    """Number of F_q-points of the fibre over a point of the stratum.

    The stratum is a RankTriangle (its 0/1 representative is used) or a
    QuiverPoint with entries whose denominators are prime to q.
    """
    x = representative(stratum) if isinstance(stratum, RankTriangle) else stratum
    if spec.is_trivial():
        return 1
    K = GF(q)
    try:
        W = Windows(spec, x, K)
    except PointOutsideClosure:
        return 0
    n = spec.n
    # conditions grouped by the vertex of their target
    incoming = {v: [] for v in range(1, n + 1)}
    for c in spec.conditions:
        incoming[c[0]].append(c)
    sources = {v: sorted({S for i, S, _ in spec.conditions if i == v + 1 and S != FULL})
               for v in range(0, n + 1)}
    zero_sources = {S for i, S, T in spec.conditions if T == ZERO and S != FULL}
    left = [budget]
    states = {(): 1}
    for v in range(1, n + 1):
        new_states = {}
        prev_sources = sources[v - 1]
        for key, weight in states.items():
            images = dict(zip(prev_sources, key))
            extra = {}
            for i, S, T in incoming[v]:
                if T == ZERO:
                    continue
                img = W._image(i, S) if S == FULL else images[S]
                extra.setdefault(T, []).append(img)
            for flag in _flags_at(K, spec, v, extra, W, left):
                out = []
                ok = True
                for S in sources[v]:
                    img = apply(K, W.xmat(v + 1), flag[S])
                    if S in zero_sources and img:
                        ok = False
                        break
                    out.append(img)
                if not ok:
                    continue
                k2 = tuple(out)
                new_states[k2] = new_states.get(k2, 0) + weight
        states = new_states
        if not states:
            return 0
    return sum(states.values())


QS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37)


def fit_polynomial(points):
    """Exact interpolating polynomial through (q, count) pairs, low degree first."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (qi, ci) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (qj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= qj * basis[k + 1]
            denom *= qi - qj
        for k, b in enumerate(basis):
            coeffs[k] += ci * b / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class CountFit:
    """Point counts and the polynomial through them.

    settled is "stable" when dropping the last count does not change the fit,
    "bound" when there are more counts than the known degree bound, else None.
    """

    def __init__(self, counts, coeffs, settled):
        self.counts = counts
        self.coeffs = coeffs
        self.settled = settled

    @property
    def stable(self):
        return self.settled is not None

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def to_json(self):
        return {"counts": {str(q): c for q, c in self.counts}, "coeffs": [str(c) for c in self.coeffs],
                "degree": self.degree, "settled": self.settled, "integral": self.integral}


def count_polynomial(spec, stratum, qs=QS, min_points=4, max_degree=None, budget=2_000_000):
    """Fit the point-count polynomial, adding fields until the fit settles."""
    counts = []
    for q in qs:
        counts.append((q, point_count_fibre(spec, stratum, q, budget)))
        if len(counts) < min_points:
            continue
        full = fit_polynomial(counts)
        if not all(c.denominator == 1 for c in full):
            continue
        if fit_polynomial(counts[:-1]) == full:
            return CountFit(counts, full, "stable")
        if max_degree is not None and len(counts) > max_degree:
            return CountFit(counts, full, "bound")
    return CountFit(counts, fit_polynomial(counts), None)


def fibre_dim_via_counts(spec, stratum, **kw):
    fit = count_polynomial(spec, stratum, **kw)
    if not fit.stable:
        raise CountOverflowBudget("point counts did not stabilize to a polynomial")
    return fit.degree


# -- exact fibre dimension from subrepresentation chains
#
# With T monotone in j, the subspaces E_v^{r[v,j]} (full below vertex j)
# form subrepresentations F_1 <= F_2 <= ... <= F_n <= M, M the point.  The
# chains with fixed isomorphism types form a tower whose steps have
# dimension dim Hom(N, N') - dim End(N) whenever N embeds in N'.

def _hom_pair(s, t):
    # Hom([a,b], [c,d]) is one-dimensional iff c <= a <= d <= b
    (a, b), (c, d) = s, t
    return c <= a <= d <= b


def hom_dim(N, M):
    """dim Hom(N, M) for multisegments (right-pointing interval modules)."""
    return sum(cn * cm for s, cn in N.counts.items() for t, cm in M.counts.items() if _hom_pair(s, t))


def embeds(N, M):
    """True iff a generic homomorphism N -> M is injective.

    At each vertex the generic map has independent entries on the allowed
    pattern, so its rank is a maximum bipartite matching.
    """
    ns, ms = N.segments(), M.segments()
    for v in range(N.n + 1):
        left = [s for s in ns if s[0] <= v <= s[1]]
        right = [t for t in ms if t[0] <= v <= t[1]]
        if len(left) > len(right):
            return False
        adj = [[k for k, t in enumerate(right) if _hom_pair(s, t)] for s in left]
        match = {}

        def augment(i, seen):
            for k in adj[i]:
                if k not in seen:
                    seen.add(k)
                    if k not in match or augment(match[k], seen):
                        match[k] = i
                        return True
            return False

        for i in range(len(left)):
            if not augment(i, set()):
                return False
    return True


def chain_dims(T):
    """Dimension vectors of F_1, ..., F_n, or None if T is not monotone in j."""
    n, m = T.n, T.mults
    dims = []
    for j in range(1, n + 1):
        dims.append(tuple(m[v] if v < j else T.r(v, j) for v in range(n + 1)))
    for a, b in zip(dims, dims[1:]):
        if any(x > y for x, y in zip(a, b)):
            return None
    return dims


@lru_cache(maxsize=None)
def _types(d):
    from .multiseg import enumerate_multisegments
    return tuple(enumerate_multisegments(d))


@lru_cache(maxsize=None)
def _best_chain(dims, cur):
    # largest dimension of chains F_1 <= ... <= F_j inside cur, j = len(dims)
    if not dims:
        return 0
    if dims[-1] == cur.support():
        return _best_chain(dims[:-1], cur)
    out = -1
    for N in _types(dims[-1]):
        if not embeds(N, cur):
            continue
        rest = _best_chain(dims[:-1], N)
        if rest >= 0:
            out = max(out, rest + hom_dim(N, cur) - hom_dim(N, N))
    return out


def fibre_dim_exact(triangle, stratum):
    """Dimension of the fibre over the stratum, or -1 if it is empty."""
    from .multiseg import multisegment_from_triangle
    dims = chain_dims(triangle)
    if dims is None:
        raise ValueError("triangle is not monotone; no chain structure")
    return _best_chain(tuple(dims), multisegment_from_triangle(stratum))


# -- fibre description

class FibreDescription:
    """Projective coordinates of the free subspaces, relations, dimension."""

    def __init__(self, factors, relations, dimension, fixed, counts=None):
        self.factors = factors
        self.relations = relations
        self.dimension = dimension
        self.fixed = fixed
        self.counts = counts

    @property
    def coordinates(self):
        return [c for f in self.factors for c in f["coords"]]

    def is_point(self):
        return self.dimension == 0 and not self.factors

    def to_json(self):
        return {"dimension": self.dimension,
                "fixed": {label(s): [[str(a) for a in r] for r in b] for s, b in self.fixed.items()},
                "factors": [{"subspace": label(f["subspace"]), "grassmannian": f["grassmannian"],
                             "coords": f["coords"]} for f in self.factors],
                "relations": [r.to_str() for r in self.relations],
                "counts": self.counts.to_json() if self.counts else None}


def _span_matrix(W, s, coords):
    """Column-free description: rows spanning E = L + coords * complement(L in U)."""
    K = W.K
    lo = list(W.lower[s])
    comp = _complement(K, W.lower[s], W.upper[s])
    rows = [[QPoly.const(a) for a in r] for r in lo]
    d = s[1] - len(lo)
    for a in range(d):
        row = [QPoly() for _ in range(W.spec.mults[s[0]])]
        for b, vec in enumerate(comp):
            c = var(coords[a * len(comp) + b])
            row = [p + c * QPoly.const(e) for p, e in zip(row, vec)]
        rows.append(row)
    return rows


def _complement(K, lo, up):
    from .exactcore.fields import complement_basis
    return complement_basis(K, lo, up)


def fibre_over(spec, x, counts=True):
    """Describe the fibre of the cover over x."""
    W = Windows(spec, x, QQ)
    fixed = {s: W.lower[s] for s in spec.subspaces if W.fixed(s)}
    factors = []
    coords = {}
    for s in spec.subspaces:
        if W.fixed(s):
            continue
        lo, up = len(W.lower[s]), len(W.upper[s])
        d = s[1] - lo
        names = ["fib.%s.%d" % (label(s), j) for j in range(d * (up - lo))]
        for nm in names:
            var(nm)
        coords[s] = names
        factors.append({"subspace": s, "grassmannian": [d, up - lo], "coords": names})
    rows = {}
    for s in spec.subspaces:
        if s in coords:
            rows[s] = _span_matrix(W, s, coords[s])
        else:
            rows[s] = [[QPoly.const(a) for a in r] for r in W.lower[s]]
    rels = []
    pairs = [(a, b, None) for a, b in spec.chains] + [(S, T, i) for i, S, T in spec.conditions]
    for S, T, i in pairs:
        if T == ZERO or S == FULL or (S not in coords and T not in coords):
            continue
        src = rows[S]
        if i is not None:
            xi = W.xmat(i)
            src = [[sum((QPoly.const(xi[r][c]) * row[c] for c in range(len(row)) if xi[r][c]), QPoly())
                    for r in range(len(xi))] for row in src]
        stacked = rows[T] + src
        size = len(rows[T]) + 1
        if size > len(stacked[0]):
            continue
        for g in minors(stacked, size):
            if g and not g.is_constant():
                g = _normalize(g)
                if g not in rels and -g not in rels:
                    rels.append(g)
    fit = None
    dim = 0
    if factors:
        bound = W.dim_bound()
        if counts:
            fit = count_polynomial(spec, x, max_degree=bound)
        if spec.triangle is not None and chain_dims(spec.triangle) is not None:
            dim = fibre_dim_exact(spec.triangle, rank_triangle_of(x))
        elif fit is not None and fit.stable:
            dim = fit.degree
        else:
            dim = bound
    return FibreDescription(factors, rels, dim, fixed, fit)


def _normalize(g):
    _, c = g.leading()
    return g * (1 / c)


# -- solving the fibre inside a chart

class ChartFibre:
    def __init__(self, chart, solution, free, relations):
        self.chart = chart
        self.solution = solution
        self.free = free
        self.relations = relations

    def to_json(self):
        return {"chart": self.chart.index, "free": self.free,
                "solution": {k: v.to_str() for k, v in sorted(self.solution.items(), key=lambda kv: chart_var_key(kv[0]))},
                "relations": [r.to_str() for r in self.relations]}


def _linear_candidates(g, allowed):
    """Variables of g appearing only linearly with a constant coefficient."""
    out = []
    for v in g.variables():
        if v not in allowed:
            continue
        if g.degree_in(v) != 1:
            continue
        c = g.derivative(v)
        if c.is_constant():
            out.append((v, c.constant_value()))
    return out


def solve_fibre_in_chart(spec, chart, x, keep=()):
    """Eliminate chart variables determined by the fibre over x.

    Repeatedly picks a chart variable appearing linearly with a constant
    coefficient, preferring the latest one in (vertex, -dim, index) order,
    and never one listed in keep.
    """
    from .exactcore.poly import REGISTRY
    gens = chart_ideal(spec, chart)
    sub = x.substitute_map()
    gens = [g.substitute(sub) for g in gens]
    names = chart_vars(spec, chart)
    idx = {REGISTRY.get(nm): nm for nm in names}
    allowed = {i for i, nm in idx.items() if nm not in set(keep)}
    solution = {}
    gens = [g for g in gens if g]
    while True:
        for g in gens:
            if g.is_constant():
                raise ChartMissesFibre("chart %s does not meet the fibre" % chart.index)
        best = None
        for g in gens:
            for v, c in _linear_candidates(g, allowed):
                key = chart_var_key(idx[v])
                if best is None or key > best[0]:
                    best = (key, v, c, g)
        if best is None:
            break
        _, v, c, g = best
        value = (g - QPoly.var(v) * c) * (-1 / c)
        nm = idx[v]
        solution = {k: p.substitute({v: value}) for k, p in solution.items()}
        solution[nm] = value
        allowed.discard(v)
        gens = [h.substitute({v: value}) for h in gens]
        gens = [h for h in gens if h]
    free = [nm for nm in names if nm not in solution]
    rels = []
    for g in gens:
        g = _normalize(g)
        if g not in rels:
            rels.append(g)
    return ChartFibre(chart, solution, free, rels)


# -- shipped charts and the generic enumerator

def _data_file(name):
    return resources.files("voganish").joinpath("data", "charts", name + ".json")


def shipped_names():
    base = resources.files("voganish").joinpath("data", "charts")
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def load_chart_data(name):
    with _data_file(name).open() as fh:
        data = json.load(fh)
    data["triangle"] = RankTriangle.from_json(data["triangle"])
    data["charts"] = [Chart.from_json(c) for c in data["charts"]]
    return data


def find_shipped(spec):
    T = spec.triangle
    if T is None:
        return None
    for name in shipped_names():
        data = load_chart_data(name)
        if data["triangle"] == T:
            return data
    return None


def enumerate_charts(spec):
    """All nested pivot patterns for the retained subspaces."""
    per = []
    for s in sorted(spec.subspaces, key=_var_order):
        per.append([(s, p) for p in combinations(range(spec.mults[s[0]]), s[1])])
    for choice in product(*per):
        chart = Chart(dict(choice))
        try:
            check_chart(spec, chart)
        except InconsistentChart:
            continue
        yield chart


def charts_covering_fibre(spec, x=None):
    """Charts covering the fibre: shipped data when available, else enumerated."""
    data = find_shipped(spec)
    if data is not None:
        return data["charts"]
    if spec.is_trivial():
        return [Chart({})]
    from .vogan import x_KS
    x = x if x is not None else x_KS()
    W = Windows(spec, x, QQ)
    out = []
    covered = set()
    for chart in enumerate_charts(spec):
        # pivots of fixed subspaces must be valid at the fibre
        if not all(_pivots_ok(W.lower[s], chart.pivots[s]) for s in spec.subspaces if W.fixed(s)):
            continue
        key = tuple(sorted((s, p) for s, p in chart.pivots.items() if not W.fixed(s)))
        if key in covered:
            continue
        try:
            solve_fibre_in_chart(spec, chart, x)
        except ChartMissesFibre:
            continue
        covered.add(key)
        chart.index = len(out) + 1
        out.append(chart)
    return out


def _pivots_ok(basis, piv):
    from .exactcore.linalg import rank_over_field
    cols = [[r[p] for p in piv] for r in basis]
    return rank_over_field(cols) == len(piv)


def keep_vars(spec):
    data = find_shipped(spec)
    return tuple(data.get("keep", ())) if data else ()


# -- semismallness

class StratumEntry:
    def __init__(self, stratum, stratum_dim, fibre_dim, exact, relevant):
        self.stratum = stratum
        self.stratum_dim = stratum_dim
        self.fibre_dim = fibre_dim
        self.exact = exact
        self.relevant = relevant

    def to_json(self):
        return {"stratum": self.stratum.to_json(), "stratum_dim": self.stratum_dim,
                "fibre_dim": self.fibre_dim, "exact": self.exact, "relevant": self.relevant}

    def __repr__(self):
        return "StratumEntry(%s, dim=%d, fibre=%s%s)" % (self.stratum.to_text(), self.stratum_dim,
                                                         self.fibre_dim, ", relevant" if self.relevant else "")


class SemismallReport:
    def __init__(self, base, total_dim, entries):
        self.base = base
        self.total_dim = total_dim
        self.entries = entries

    @property
    def relevant(self):
        return [e.stratum for e in self.entries if e.relevant]

    @property
    def violations(self):
        return [e for e in self.entries if 2 * e.fibre_dim + e.stratum_dim > self.total_dim]

    @property
    def semismall(self):
        return not self.violations

    @property
    def small(self):
        return self.semismall and all(e.stratum == self.base for e in self.entries if e.relevant)

    def to_json(self):
        return {"base": self.base.to_json(), "dim": self.total_dim, "semismall": self.semismall,
                "small": self.small, "relevant": [t.to_json() for t in self.relevant],
                "strata": [e.to_json() for e in self.entries]}


def semismall_report(spec, base, orbits=None, check_counts=False, budget=2_000_000):
    """Fibre dimensions over every stratum of closure(base).

    Strata whose window bound already gives 2d + dim < dim base are settled
    without further work; fibre_dim is then the bound and exact is False.
    Otherwise the dimension comes from subrepresentation chains, and with
    check_counts also from point counts, which must agree.
    """
    total = orbit_dim(base)
    orbits = orbits if orbits is not None else enumerate_orbits(base.mults)
    triangle = spec.triangle
    chains = triangle is not None and chain_dims(triangle) is not None
    entries = []
    for T in orbits:
        if not closure_leq(T, base):
            continue
        dT = orbit_dim(T)
        x = representative(T)
        bound = fibre_dim_bound(spec, x)
        if 2 * bound + dT < total:
            entries.append(StratumEntry(T, dT, bound, False, False))
            continue
        if bound == 0:
            d = 0
        elif chains:
            d = fibre_dim_exact(triangle, T)
            if check_counts:
                c = fibre_dim_via_counts(spec, T, max_degree=bound, budget=budget)
                if c != d:
                    raise AssertionError("fibre dimension %d from chains, %d from counts over %s"
                                         % (d, c, T.to_text()))
        else:
            d = fibre_dim_via_counts(spec, T, max_degree=bound, budget=budget)
        entries.append(StratumEntry(T, dT, d, True, 2 * d + dT == total))
    entries.sort(key=lambda e: (-e.stratum_dim, e.stratum.key()))
    return SemismallReport(base, total, entries)


__all__ = ["FULL", "ZERO", "CoverSpec", "Chart", "FibreDescription", "ChartFibre", "Windows",
           "InconsistentChart", "PointOutsideClosure", "ChartMissesFibre", "CountOverflowBudget",
           "cover_from_triangle", "chart_ideal", "chart_vars", "chart_var_key", "subspace_matrix",
           "check_chart", "fibre_over", "fibre_dim_bound", "point_count_fibre", "fit_polynomial",
           "count_polynomial", "fibre_dim_via_counts", "solve_fibre_in_chart", "charts_covering_fibre",
           "enumerate_charts", "load_chart_data", "keep_vars", "semismall_report", "SemismallReport",
           "StratumEntry", "gaussian_binomial", "fibre_dim_exact", "hom_dim", "embeds", "chain_dims"]
