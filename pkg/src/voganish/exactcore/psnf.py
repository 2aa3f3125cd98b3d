"""Partial Smith normal form: pivot only on units, log every operation.

Entries are polynomials in some variables with coefficients in Q or in
Q(params).  A unit is a nonzero entry involving only the parameter
variables.  Operations in the log:

    ("swap_rows", i, j)      ("swap_cols", i, j)
    ("scale_row", i, c)      row_i <- c * row_i
    ("add_row", d, s, c)     row_d <- row_d + c * row_s
    ("add_col", d, s, c)     col_d <- col_d + c * col_s
"""

from .matrix import PolyMatrix
from .poly import QPoly, var_index
from .ratfunc import QRatFunc


class PSNFResult:
    def __init__(self, ops, identity_size, residual, shape):
        self.ops = ops
        self.identity_size = identity_size
        self.residual = residual
        self.shape = shape

    def trimmed_residual(self):
        R = self.residual
        rows = [i for i in range(R.nrows) if any(R.rows[i])]
        cols = [j for j in range(R.ncols) if any(R.rows[i][j] for i in range(R.nrows))]
        return R.submatrix(rows, cols)

    def block_form(self):
        """block-diag(I_s, B) as a dense PolyMatrix of the original shape."""
        m, n = self.shape
        s = self.identity_size
        one = QRatFunc.coerce(1)
        zero = QRatFunc.coerce(0)
        rows = [[zero] * n for _ in range(m)]
        for i in range(s):
            rows[i][i] = one
        for i in range(self.residual.nrows):
            for j in range(self.residual.ncols):
                rows[s + i][s + j] = self.residual.rows[i][j]
        return PolyMatrix(rows, n)


def _lift(v):
    if isinstance(v, QRatFunc):
        return v
    return QRatFunc.coerce(v)


def _weight(v):
    return v.num.total_degree() + v.den.total_degree(), v.num.nterms() + v.den.nterms()


def psnf(M, params=()):
    """Reduce M to block-diag(I_s, B) using unit pivots only."""
    if not isinstance(M, PolyMatrix):
        M = PolyMatrix(M)
    params = {var_index(p) for p in params}
    m, n = M.shape
    rows = []
    for r in M.rows:
        rows.append({j: _lift(v) for j, v in enumerate(r) if v})
    ops = []
    unit_cache = {}

    def is_unit(v):
        key = id(v)
        hit = unit_cache.get(key)
        if hit is not None and hit[0] is v:
            return hit[1]
        u = v.variables() <= params
        unit_cache[key] = (v, u)
        return u

    s = 0
    while s < min(m, n):
        best = None
        for i in range(s, m):
            for j, v in rows[i].items():
                if j < s or not is_unit(v):
                    continue
                key = _weight(v) + (i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, _, pi, pj = best
        if pi != s:
            rows[s], rows[pi] = rows[pi], rows[s]
            ops.append(("swap_rows", s, pi))
        if pj != s:
            for r in rows:
                a = r.pop(s, None)
                b = r.pop(pj, None)
                if a is not None:
                    r[pj] = a
                if b is not None:
                    r[s] = b
            ops.append(("swap_cols", s, pj))
        p = rows[s][s]
        inv = p.inverse()
        if p != 1:
            rows[s] = {j: v * inv for j, v in rows[s].items()}
            ops.append(("scale_row", s, inv))
        prow = rows[s]
        for i in range(m):
            if i == s:
                continue
            f = rows[i].get(s)
            if not f:
                continue
            c = -f
            r = rows[i]
            for j, v in prow.items():
                t = r.get(j)
                t = c * v if t is None else t + c * v
                if t:
                    r[j] = t
                else:
                    r.pop(j, None)
            ops.append(("add_row", i, s, c))
        for j, v in sorted(prow.items()):
            if j != s:
                ops.append(("add_col", j, s, -v))
        rows[s] = {s: prow[s]}
        s += 1
    zero = QRatFunc.coerce(0)
    residual = PolyMatrix([[rows[i].get(j, zero) for j in range(s, n)] for i in range(s, m)], n - s)
    return PSNFResult(ops, s, residual, (m, n))


def replay(M, ops):
    """Apply a logged operation sequence to M (dense), returning a PolyMatrix."""
    if not isinstance(M, PolyMatrix):
        M = PolyMatrix(M)
    A = [[_lift(v) for v in r] for r in M.rows]
    for op in ops:
        kind = op[0]
        if kind == "swap_rows":
            _, i, j = op
            A[i], A[j] = A[j], A[i]
        elif kind == "swap_cols":
            _, i, j = op
            for r in A:
                r[i], r[j] = r[j], r[i]
        elif kind == "scale_row":
            _, i, c = op
            A[i] = [v * c for v in A[i]]
        elif kind == "add_row":
            _, d, s, c = op
            A[d] = [a + c * b if b else a for a, b in zip(A[d], A[s])]
        elif kind == "add_col":
            _, d, s, c = op
            for r in A:
                if r[s]:
                    r[d] = r[d] + c * r[s]
        else:
            raise ValueError("unknown op %r" % (kind,))
    return PolyMatrix(A, M.ncols)


def ops_invertible(ops):
    """Every logged operation is invertible over the coefficient field."""
    for op in ops:
        if op[0] == "scale_row" and not op[2]:
            return False
        if op[0] in ("add_row", "add_col") and op[1] == op[2]:
            return False
    return True


__all__ = ["psnf", "replay", "PSNFResult", "ops_invertible", "QPoly"]
