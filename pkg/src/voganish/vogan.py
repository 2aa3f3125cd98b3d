"""Points of V and V*, the H-action, conormal fibres, duality, closure ideals.

x = (x_1, ..., x_n) with x_i of shape m_i x m_{i-1}; y = (y_1, ..., y_n)
with y_i of shape m_{i-1} x m_i.  H = prod GL(m_v) acts by
h.x_i = h_i x_i h_{i-1}^-1 and h.y_i = h_{i-1} y_i h_i^-1.
"""

import random
from fractions import Fraction

from .exactcore import QPoly, kernel_basis, rank_over_field, var
from .exactcore.linalg import det_expand, identity, matmul, minors, solve, transpose, zeros
from .multiseg import RankTriangle, multisegment_from_triangle


class GenericityFailure(RuntimeError):
    pass


class SingularBlock(ValueError):
    pass


class VoganSpace:
    def __init__(self, mults):
        self.mults = tuple(mults)
        self.n = len(self.mults) - 1

    @property
    def dim_V(self):
        m = self.mults
        return sum(m[i - 1] * m[i] for i in range(1, self.n + 1))

    @property
    def dim_H(self):
        return sum(v * v for v in self.mults)

    def x_shape(self, i):
        return self.mults[i], self.mults[i - 1]

    def y_shape(self, i):
        return self.mults[i - 1], self.mults[i]

    def x_names(self):
        return [["x%d.%d.%d" % (i, r, c) for r in range(self.mults[i]) for c in range(self.mults[i - 1])]
                for i in range(1, self.n + 1)]

    def x_vars(self):
        return [v for block in self.x_names() for v in block]

    def y_vars(self):
        m = self.mults
        return ["y%d.%d.%d" % (i, r, c) for i in range(1, self.n + 1) for r in range(m[i - 1]) for c in range(m[i])]

    def symbolic_x(self):
        m = self.mults
        return QuiverPoint(self.mults, [[[var("x%d.%d.%d" % (i, r, c)) for c in range(m[i - 1])]
                                         for r in range(m[i])] for i in range(1, self.n + 1)])

    def symbolic_y(self):
        m = self.mults
        return DualPoint(self.mults, [[[var("y%d.%d.%d" % (i, r, c)) for c in range(m[i])]
                                       for r in range(m[i - 1])] for i in range(1, self.n + 1)])

    def register(self):
        """Register x then y variables so the serialization order is fixed."""
        self.symbolic_x()
        self.symbolic_y()


def _frac_matrix(M):
    return [[v if not isinstance(v, int) else Fraction(v) for v in row] for row in M]


def _transpose(M, ncols):
    # a 0 x k matrix is [] and would lose k
    return transpose(M) if M else [[] for _ in range(ncols)]


class QuiverPoint:
    """x_1..x_n; mats[i-1] is x_i."""

    def __init__(self, mults, mats):
        self.mults = tuple(mults)
        self.mats = [_frac_matrix(M) for M in mats]
        for i, M in enumerate(self.mats, start=1):
            if len(M) != self.mults[i] or any(len(r) != self.mults[i - 1] for r in M):
                raise ValueError("x_%d has the wrong shape" % i)

    @property
    def n(self):
        return len(self.mults) - 1

    def x(self, i):
        return self.mats[i - 1]

    def entries(self):
        return [v for M in self.mats for row in M for v in row]

    def substitute_map(self, space=None):
        space = space or VoganSpace(self.mults)
        names = space.x_vars()
        return dict(zip(names, self.entries()))

    def transpose(self):
        m = self.mults
        return DualPoint(m, [_transpose(M, m[i - 1]) for i, M in enumerate(self.mats, start=1)])

    def to_json(self):
        return {"mults": list(self.mults), "x": [[[str(v) for v in r] for r in M] for M in self.mats]}

    @staticmethod
    def from_json(obj):
        return QuiverPoint(obj["mults"], [[[Fraction(v) for v in r] for r in M] for M in obj["x"]])

    def __eq__(self, other):
        return isinstance(other, QuiverPoint) and self.mults == other.mults and self.mats == other.mats


class DualPoint:
    """y_1..y_n; mats[i-1] is y_i of shape m_{i-1} x m_i."""

    def __init__(self, mults, mats):
        self.mults = tuple(mults)
        self.mats = [_frac_matrix(M) for M in mats]
        for i, M in enumerate(self.mats, start=1):
            if len(M) != self.mults[i - 1] or any(len(r) != self.mults[i] for r in M):
                raise ValueError("y_%d has the wrong shape" % i)

    @property
    def n(self):
        return len(self.mults) - 1

    def y(self, i):
        return self.mats[i - 1]

    def entries(self):
        return [v for M in self.mats for row in M for v in row]

    def substitute_map(self, space=None):
        space = space or VoganSpace(self.mults)
        return dict(zip(space.y_vars(), self.entries()))

    def transpose(self):
        m = self.mults
        return QuiverPoint(m, [_transpose(M, m[i]) for i, M in enumerate(self.mats, start=1)])

    def to_json(self):
        return {"mults": list(self.mults), "y": [[[str(v) for v in r] for r in M] for M in self.mats]}

    @staticmethod
    def from_json(obj):
        return DualPoint(obj["mults"], [[[Fraction(v) for v in r] for r in M] for M in obj["y"]])


def zero_point(mults):
    return QuiverPoint(mults, [zeros(mults[i], mults[i - 1]) for i in range(1, len(mults))])


def zero_dual(mults):
    return DualPoint(mults, [zeros(mults[i - 1], mults[i]) for i in range(1, len(mults))])


def point_from_vector(mults, vec, dual=False):
    """Unflatten a coordinate vector (row-major, i = 1..n)."""
    mats = []
    k = 0
    for i in range(1, len(mults)):
        r, c = (mults[i - 1], mults[i]) if dual else (mults[i], mults[i - 1])
        mats.append([[vec[k + a * c + b] for b in range(c)] for a in range(r)])
        k += r * c
    return DualPoint(mults, mats) if dual else QuiverPoint(mults, mats)


# -- representatives and rank triangles

def segment_basis(T):
    """Basis bookkeeping for the interval-module representative of T.

    Returns (segments, index) where index[(s, v)] is the basis position at
    vertex v of the s-th segment copy.
    """
    ms = multisegment_from_triangle(T)
    segs = ms.segments()
    index = {}
    fill = [0] * (T.n + 1)
    for s, (p, q) in enumerate(segs):
        for v in range(p, q + 1):
            index[(s, v)] = fill[v]
            fill[v] += 1
    return segs, index


def representative(T):
    """Direct sum of interval modules realizing T, with 0/1 entries."""
    segs, index = segment_basis(T)
    m = T.mults
    mats = [zeros(m[i], m[i - 1]) for i in range(1, T.n + 1)]
    for s, (p, q) in enumerate(segs):
        for v in range(p + 1, q + 1):
            mats[v - 1][index[(s, v)]][index[(s, v - 1)]] = Fraction(1)
    return QuiverPoint(m, mats)


def _product(mats):
    out = mats[0]
    for M in mats[1:]:
        out = matmul(out, M)
    return out


def path_product(x, i, j):
    """x_i x_{i-1} ... x_j."""
    if 0 in x.mults[j - 1:i + 1]:
        return zeros(x.mults[i], x.mults[j - 1])
    return _product([x.x(k) for k in range(i, j - 1, -1)])


def dual_path_product(y, i, j):
    """y_j y_{j+1} ... y_i (vertex i to vertex j-1)."""
    if 0 in y.mults[j - 1:i + 1]:
        return zeros(y.mults[j - 1], y.mults[i])
    return _product([y.y(k) for k in range(j, i + 1)])


def rank_triangle_of(x):
    n = x.n
    ranks = {}
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            ranks[(i, j)] = rank_over_field(path_product(x, i, j))
    return RankTriangle(x.mults, ranks)


def dual_rank_triangle_of(y):
    """Triangle of the transposed point: r[i,j] = rank(y_j ... y_i)."""
    return rank_triangle_of(y.transpose())


# -- bracket, pairing, linearized actions

def _mm(A, B):
    return matmul(A, B)


def _sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def bracket(x, y):
    """[x, y] as h_0..h_n: component at vertex v is x_v y_v - y_{v+1} x_{v+1}."""
    n = x.n
    m = x.mults
    out = []
    for v in range(n + 1):
        comp = zeros(m[v], m[v], 0)
        if v >= 1:
            comp = _mm(x.x(v), y.y(v))
        if v < n:
            comp = _sub(comp, _mm(y.y(v + 1), x.x(v + 1)))
        out.append(comp)
    return out


def pairing(x, y):
    total = 0
    for i in range(1, x.n + 1):
        X = x.x(i)
        Y = y.y(i)
        for r in range(len(X)):
            for c in range(len(X[0])):
                a = X[r][c]
                if a:
                    b = Y[c][r]
                    if b:
                        total = total + a * b
    return Fraction(total) if isinstance(total, int) else total


def symbolic_pairing(space):
    return pairing(space.symbolic_x(), space.symbolic_y())


def _h_offsets(mults):
    off = []
    k = 0
    for m in mults:
        off.append(k)
        k += m * m
    return off, k


def action_matrix_x(x):
    """Rows: entries of x_i; columns: entries of h_0..h_n; h -> h_i x_i - x_i h_{i-1}."""
    m = x.mults
    off, _ = _h_offsets(m)
    rows = []
    for i in range(1, x.n + 1):
        X = x.x(i)
        for r in range(m[i]):
            for c in range(m[i - 1]):
                row = {}
                for k in range(m[i]):
                    a = X[k][c]
                    if a:
                        col = off[i] + r * m[i] + k
                        row[col] = row.get(col, 0) + a
                for k in range(m[i - 1]):
                    a = X[r][k]
                    if a:
                        col = off[i - 1] + k * m[i - 1] + c
                        row[col] = row.get(col, 0) - a
                rows.append({j: v for j, v in row.items() if v})
    return rows


def action_matrix_y(y):
    """h -> h_{i-1} y_i - y_i h_i on V*."""
    m = y.mults
    off, _ = _h_offsets(m)
    rows = []
    for i in range(1, y.n + 1):
        Y = y.y(i)
        for r in range(m[i - 1]):
            for c in range(m[i]):
                row = {}
                for k in range(m[i - 1]):
                    a = Y[k][c]
                    if a:
                        col = off[i - 1] + r * m[i - 1] + k
                        row[col] = row.get(col, 0) + a
                for k in range(m[i]):
                    a = Y[r][k]
                    if a:
                        col = off[i] + k * m[i] + c
                        row[col] = row.get(col, 0) - a
                rows.append({j: v for j, v in row.items() if v})
    return rows


def bracket_matrix(x):
    """Linear map y -> [x, y]; rows are entries of h_0..h_n, columns entries of y."""
    m = x.mults
    n = x.n
    yoff = []
    k = 0
    for i in range(1, n + 1):
        yoff.append(k)
        k += m[i - 1] * m[i]
    rows = []
    for v in range(n + 1):
        for r in range(m[v]):
            for c in range(m[v]):
                row = {}
                if v >= 1:
                    X = x.x(v)  # m_v x m_{v-1}; y_v is m_{v-1} x m_v
                    for t in range(m[v - 1]):
                        a = X[r][t]
                        if a:
                            col = yoff[v - 1] + t * m[v] + c
                            row[col] = row.get(col, 0) + a
                if v < n:
                    X = x.x(v + 1)  # m_{v+1} x m_v; y_{v+1} is m_v x m_{v+1}
                    for t in range(m[v + 1]):
                        a = X[t][c]
                        if a:
                            col = yoff[v] + r * m[v + 1] + t
                            row[col] = row.get(col, 0) - a
                rows.append({j: w for j, w in row.items() if w})
    return rows, k


def conormal_fiber(x):
    """Basis (coordinate vectors in V*) of {y : [x, y] = 0}."""
    rows, ncols = bracket_matrix(x)
    return kernel_basis(rows, ncols)


def conormal_dim(x):
    rows, ncols = bracket_matrix(x)
    return ncols - rank_over_field(rows)


def stabilizer_dim(x):
    _, dimH = _h_offsets(x.mults)
    return dimH - rank_over_field(action_matrix_x(x))


def pair_stabilizer_dim(x, y):
    _, dimH = _h_offsets(x.mults)
    return dimH - rank_over_field(action_matrix_x(x) + action_matrix_y(y))


def orbit_dim(T):
    return VoganSpace(T.mults).dim_H - stabilizer_dim(representative(T))


def compute_dual(T, samples=3, lo=-50, hi=50, seed=0, max_tries=4):
    """Zelevinsky dual from generic elements of the conormal fibre.

    The transpose of y_i has the shape of x_i, so the dual triangle is the
    rank triangle of the transposed generic conormal element.
    """
    x = representative(T)
    basis = conormal_fiber(x)
    rng = random.Random(seed)
    for attempt in range(max_tries):
        found = []
        for _ in range(samples):
            coeffs = [rng.randint(lo, hi) for _ in basis]
            vec = [Fraction(0)] * len(basis[0]) if basis else []
            for c, b in zip(coeffs, basis):
                if c:
                    vec = [v + c * w for v, w in zip(vec, b)]
            if not basis:
                vec = [Fraction(0)] * VoganSpace(T.mults).dim_V
            y = point_from_vector(T.mults, vec, dual=True)
            found.append(dual_rank_triangle_of(y))
        top = {k: max(t.ranks[k] for t in found) for k in found[0].ranks}
        best = RankTriangle(T.mults, top)
        if best in found:
            return best
        lo, hi = 2 * lo, 2 * hi
    raise GenericityFailure("conormal samples did not stabilize for %s" % T.to_text())


# -- closure ideals

def symbolic_path(space, i, j, side="V"):
    if side == "V":
        X = space.symbolic_x()
        return path_product(X, i, j)
    Y = space.symbolic_y()
    return dual_path_product(Y, i, j)


def active_bounds(T):
    """(i, j, r, rows, cols) for every rank bound that is not automatic."""
    m = T.mults
    out = []
    for i in range(1, T.n + 1):
        for j in range(1, i + 1):
            r = T.r(i, j)
            rows, cols = m[i], m[j - 1]
            if r < min(rows, cols):
                out.append((i, j, r, rows, cols))
    return out


def closure_ideal(T, side="V"):
    """(r+1)-minors of the symbolic path products.

    side "V":  rank(X_i ... X_j) <= r[i,j].
    side "V*": rank(Y_j ... Y_i) <= r[i,j]; pass the triangle of the
    transposed orbit (for C*_KS that is the dual of C_KS, i.e. C_KS).
    """
    space = VoganSpace(T.mults)
    space.register()
    X = space.symbolic_x() if side == "V" else space.symbolic_y()
    gens = []
    for i, j, r, rows, cols in active_bounds(T):
        if side == "V":
            P = path_product(X, i, j)
        else:
            P = dual_path_product(X, i, j)
        for g in minors(P, r + 1):
            if g:
                gens.append(g)
    return gens


def closure_ideal_count(T):
    from math import comb
    return sum(comb(rows, r + 1) * comb(cols, r + 1) for _, _, r, rows, cols in active_bounds(T))


# -- Jordan type

def embed(x):
    """The nilpotent (sum m) x (sum m) block matrix of x."""
    m = x.mults
    off = [sum(m[:v]) for v in range(len(m))]
    N = sum(m)
    A = zeros(N, N)
    for i in range(1, x.n + 1):
        X = x.x(i)
        for r in range(m[i]):
            for c in range(m[i - 1]):
                if X[r][c]:
                    A[off[i] + r][off[i - 1] + c] = X[r][c]
    return A


def embed_dual(y):
    m = y.mults
    off = [sum(m[:v]) for v in range(len(m))]
    N = sum(m)
    A = zeros(N, N)
    for i in range(1, y.n + 1):
        Y = y.y(i)
        for r in range(m[i - 1]):
            for c in range(m[i]):
                if Y[r][c]:
                    A[off[i - 1] + r][off[i] + c] = Y[r][c]
    return A


def jordan_partition(x):
    A = embed(x)
    N = len(A)
    ranks = [N]
    P = identity(N)
    while ranks[-1] > 0:
        P = matmul(P, A)
        ranks.append(rank_over_field(P))
    # number of blocks of size >= k is rank(A^{k-1}) - rank(A^k)
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    parts = []
    for k in range(len(ge), 0, -1):
        count = ge[k - 1] - (ge[k] if k < len(ge) else 0)
        parts.extend([k] * count)
    return tuple(parts)


# -- the Kashiwara-Saito points

KS = (2, 4, 4, 4, 2)


def _blocks(rows_of_blocks):
    """Assemble a matrix from a grid of 2x2 blocks (None means zero)."""
    out = []
    for brow in rows_of_blocks:
        for r in range(2):
            line = []
            for B in brow:
                line.extend([Fraction(0)] * 2 if B is None else list(B[r]))
            out.append(line)
    return out


def _I():
    return [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]


def x_KS():
    x4 = _blocks([[None, _I()]])
    x3 = _blocks([[_I(), None], [None, None]])
    x2 = _blocks([[None, _I()], [None, None]])
    x1 = _blocks([[_I()], [None]])
    return QuiverPoint(KS, [x1, x2, x3, x4])


def y_KS(a, b, c, d):
    y1 = _blocks([[None, a]])
    y2 = _blocks([[a, b], [None, None]])
    y3 = _blocks([[None, c], [None, d]])
    y4 = _blocks([[c], [None]])
    return DualPoint(KS, [y1, y2, y3, y4])


def y_KS_slice(t1=None, t2=None):
    """y_KS(1, [[t1, 1], [0, t2]], 1, 1); symbolic t by default."""
    t1 = var("t1") if t1 is None else t1
    t2 = var("t2") if t2 is None else t2
    b = [[t1, Fraction(1)], [Fraction(0), t2]]
    return y_KS(_I(), b, _I(), _I())


def stab_element(h0, h4, k1, k2, u, v):
    """The element of Z_H(x_KS) with the given blocks, as h_0..h_4."""
    h1 = _blocks([[h0, u], [None, k1]])
    h2 = _blocks([[k1, None], [None, k2]])
    h3 = _blocks([[k1, v], [None, h4]])
    return [_frac_matrix(h0), h1, h2, h3, _frac_matrix(h4)]


def inverse(M):
    return solve(M, identity(len(M)))


def act_x(h, x):
    return QuiverPoint(x.mults, [matmul(matmul(h[i], x.x(i)), inverse(h[i - 1])) for i in range(1, x.n + 1)])


def act_y(h, y):
    return DualPoint(y.mults, [matmul(matmul(h[i - 1], y.y(i)), inverse(h[i])) for i in range(1, y.n + 1)])


def ks_blocks(y):
    """(a, b, c, d) of a point of the form y_KS(a, b, c, d)."""
    y1, y2, y3, y4 = y.mats
    a = [row[2:4] for row in y1[0:2]]
    b = [row[2:4] for row in y2[0:2]]
    c = [row[0:2] for row in y4[0:2]]
    d = [row[2:4] for row in y3[2:4]]
    return a, b, c, d


def q_invariant(y):
    """(trace, det) of (ac)^-1 (bd)."""
    a, b, c, d = ks_blocks(y)
    ac = matmul(a, c)
    if not det_expand(ac):
        raise SingularBlock("a*c is not invertible")
    q = matmul(inverse(ac), matmul(b, d))
    tr = q[0][0] + q[1][1]
    dt = q[0][0] * q[1][1] - q[0][1] * q[1][0]
    return tr, dt


def random_gl(n, rng, lo=-3, hi=3):
    while True:
        M = [[Fraction(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)]
        if rank_over_field(M) == n:
            return M


def random_h(mults, rng, lo=-3, hi=3):
    return [random_gl(m, rng, lo, hi) for m in mults]
