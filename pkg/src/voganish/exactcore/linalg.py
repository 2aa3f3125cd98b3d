"""Exact linear algebra on sparse rows.

A matrix is a list of rows, each row a list of field elements (dense) or a
dict {col: value} (sparse).  Integer and rational matrices go through a
fraction-free path; anything else is treated as a field element with
+, -, *, / and truth value.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

from .poly import QPoly
from .ratfunc import QRatFunc, to_field


def shape(M):
    return len(M), (len(M[0]) if M else 0)


def to_sparse(M):
    if M and isinstance(M[0], dict):
        return [dict(r) for r in M]
    return [{j: v for j, v in enumerate(row) if v} for row in M]


def _all_rational(rows):
    for r in rows:
        for v in r.values():
            if not isinstance(v, (int, Fraction)):
                return False
    return True


def _int_row(r):
    den = 1
    for v in r.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for j, v in r.items():
        out[j] = int(v * den) if den != 1 else int(v)
    return _primitive(out)


def _primitive(r):
    g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            return r
    if g > 1:
        return {j: v // g for j, v in r.items()}
    return r


def _field_rows(rows):
    out = []
    for r in rows:
        out.append({j: to_field(v) for j, v in r.items() if v})
    return out


def echelon_int(rows):
    """Fraction-free incremental echelon form; returns {lead col: row}."""
    piv = {}
    for r in rows:
        r = _int_row(r)
        while r:
            lead = min(r)
            p = piv.get(lead)
            if p is None:
                piv[lead] = r
                break
            a = p[lead]
            b = r[lead]
            new = {}
            for j, v in r.items():
                new[j] = a * v
            for j, v in p.items():
                s = new.get(j, 0) - b * v
                if s:
                    new[j] = s
                else:
                    new.pop(j, None)
            r = _primitive(new)
    return piv


def echelon_field(rows):
    piv = {}
    for r in rows:
        r = {j: v for j, v in r.items() if v}
        while r:
            lead = min(r)
            p = piv.get(lead)
            if p is None:
                inv = 1 / r[lead]
                piv[lead] = {j: v * inv for j, v in r.items()}
                break
            b = r[lead]
            new = dict(r)
            for j, v in p.items():
                s = new.get(j)
                s = -(b * v) if s is None else s - b * v
                if s:
                    new[j] = s
                else:
                    new.pop(j, None)
            r = new
    return piv


def rank_over_field(M):
    """Exact rank of a matrix over Q or over a field of rational functions."""
    rows = to_sparse(M)
    if _all_rational(rows):
        return len(echelon_int(rows))
    return len(echelon_field(_field_rows(rows)))


rank = rank_over_field


def rref(M, ncols=None):
    """Reduced row echelon form over the field; returns (pivot cols, rows)."""
    rows = to_sparse(M)
    if _all_rational(rows):
        rows = [{j: Fraction(v) for j, v in r.items()} for r in rows]
    else:
        rows = _field_rows(rows)
    piv = echelon_field(rows)
    cols = sorted(piv)
    # back substitution
    for c in reversed(cols):
        pr = piv[c]
        for c2 in cols:
            if c2 >= c:
                break
            r2 = piv[c2]
            f = r2.get(c)
            if f:
                for j, v in pr.items():
                    s = r2.get(j)
                    s = -(f * v) if s is None else s - f * v
                    if s:
                        r2[j] = s
                    else:
                        r2.pop(j, None)
    return cols, [piv[c] for c in cols]


def kernel_basis(M, ncols=None):
    """Basis of the right kernel, as dense lists."""
    if ncols is None:
        ncols = shape(M)[1]
    cols, rows = rref(M)
    pivset = set(cols)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in zip(cols, rows):
            x = r.get(f)
            if x:
                v[c] = -x
        basis.append(v)
    return basis


def solve(A, B):
    """Solve A X = B for square invertible A; B is a list of columns or a matrix."""
    n = len(A)
    Bm = B if B and isinstance(B[0], list) else [[b] for b in B]
    k = len(Bm[0]) if Bm else 0
    aug = []
    for i in range(n):
        row = {j: v for j, v in enumerate(A[i]) if v}
        for j in range(k):
            if Bm[i][j]:
                row[n + j] = Bm[i][j]
        aug.append(row)
    cols, rows = rref(aug)
    if cols[:n] != list(range(n)) or (len(cols) > n):
        raise ArithmeticError("singular system")
    zero = Fraction(0)
    X = [[r.get(n + j, zero) for j in range(k)] for r in rows[:n]]
    return X


def det(M):
    """Determinant over a field (Gaussian elimination with division)."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [list(r) for r in M]
    if not _all_rational(to_sparse(A)):
        A = [[to_field(v) for v in r] for r in A]
    sign = 1
    d = Fraction(1)
    for c in range(n):
        p = None
        for r in range(c, n):
            if A[r][c]:
                p = r
                break
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        pv = A[c][c]
        d = d * pv
        inv = 1 / pv
        for r in range(c + 1, n):
            f = A[r][c]
            if f:
                f = f * inv
                A[r] = [A[r][j] - f * A[c][j] if j >= c else A[r][j] for j in range(n)]
    return d * sign


def det_expand(M):
    """Cofactor expansion; exact for polynomial entries, meant for small sizes."""
    n = len(M)
    if n == 0:
        return QPoly.const(1)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = 0
    for j in range(n):
        a = M[0][j]
        if not a:
            continue
        sub = [row[:j] + row[j + 1:] for row in M[1:]]
        term = a * det_expand(sub)
        total = total + term if j % 2 == 0 else total - term
    if isinstance(total, int):
        return QPoly.const(total)
    return total


def minors(M, k):
    """All k x k minors in lexicographic order of (row subset, column subset)."""
    m, n = shape(M)
    if k > min(m, n):
        raise ValueError("minor size exceeds matrix")
    for rs in combinations(range(m), k):
        for cs in combinations(range(n), k):
            yield det_expand([[M[r][c] for c in cs] for r in rs])


def matmul(A, B):
    m = len(A)
    k = len(B)
    n = len(B[0]) if B else 0
    out = []
    for i in range(m):
        row = []
        Ai = A[i]
        for j in range(n):
            s = 0
            for t in range(k):
                a = Ai[t]
                if a:
                    b = B[t][j]
                    if b:
                        s = s + a * b
            row.append(s)
        out.append(row)
    return out


def transpose(A):
    if not A:
        return []
    return [list(c) for c in zip(*A)]


def identity(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(m, n, zero=Fraction(0)):
    return [[zero] * n for _ in range(m)]


def is_zero_matrix(A):
    return all(not v for r in A for v in r)


def nullity(M, ncols=None):
    if ncols is None:
        ncols = shape(M)[1]
    return ncols - rank_over_field(M)
