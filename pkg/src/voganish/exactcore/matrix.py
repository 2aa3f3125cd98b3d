"""Matrices of polynomials and rational functions, and Monte Carlo generic rank."""

import random
from fractions import Fraction

from .linalg import det_expand, minors, rank_over_field, to_sparse
from .poly import REGISTRY, QPoly, var_index
from .ratfunc import QRatFunc


class PolyMatrix:
    """Rectangular array of QPoly or QRatFunc entries."""

    def __init__(self, rows, ncols=None):
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = ncols if ncols is not None else (len(self.rows[0]) if self.rows else 0)
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")

    @staticmethod
    def jacobian(polys, variables):
        vs = [var_index(v) for v in variables]
        return PolyMatrix([[p.derivative(v) for v in vs] for p in polys], len(vs))

    @property
    def shape(self):
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, f):
        return PolyMatrix([[f(v) for v in r] for r in self.rows], self.ncols)

    def substitute(self, assignment):
        return self.map(lambda v: v.substitute(assignment) if hasattr(v, "substitute") else v)

    def evaluate(self, point):
        return [[v.evaluate(point) if hasattr(v, "evaluate") else v for v in r] for r in self.rows]

    def variables(self):
        vs = set()
        for r in self.rows:
            for v in r:
                if hasattr(v, "variables"):
                    vs |= v.variables()
        return vs

    def transpose(self):
        return PolyMatrix([list(c) for c in zip(*self.rows)], self.nrows)

    def submatrix(self, rows, cols):
        return PolyMatrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def nonzero_count(self):
        return sum(1 for r in self.rows for v in r if v)

    def minors(self, k):
        return minors(self.rows, k)

    def is_symmetric(self):
        if self.nrows != self.ncols:
            return False
        for i in range(self.nrows):
            for j in range(i + 1, self.ncols):
                if self.rows[i][j] != self.rows[j][i]:
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def to_lists(self):
        return [[v.to_str() if hasattr(v, "to_str") else str(v) for v in r] for r in self.rows]

    def __repr__(self):
        return "PolyMatrix(%dx%d)" % (self.nrows, self.ncols)


class GenericRank(int):
    """An int carrying the Monte Carlo metadata of how it was obtained."""

    def __new__(cls, value, samples=(), seed=None, agreed=True, method="monte-carlo"):
        obj = int.__new__(cls, value)
        obj.samples = list(samples)
        obj.seed = seed
        obj.agreed = agreed
        obj.method = method
        return obj

    def metadata(self):
        return {"rank": int(self), "samples": self.samples, "seed": self.seed,
                "agreed": self.agreed, "method": self.method}


def generic_rank(M, k=3, lo=-100, hi=100, seed=0, keep=None):
    """Rank over the fraction field by evaluation at random rational points.

    Variables listed in `keep` are left symbolic (they become field
    parameters); every other variable gets an independent random integer.
    """
    if isinstance(M, PolyMatrix):
        rows = M.rows
        vs = M.variables()
    else:
        rows = M
        vs = set()
        for r in rows:
            for v in r:
                if hasattr(v, "variables"):
                    vs |= v.variables()
    keep = {var_index(v) for v in (keep or ())}
    rng = random.Random(seed)
    samples = []
    for _ in range(k):
        point = {v: Fraction(rng.randint(lo, hi)) for v in sorted(vs) if v not in keep}
        if keep:
            ev = [[_partial_eval(v, point) for v in r] for r in rows]
        else:
            ev = [[v.evaluate(point) if hasattr(v, "evaluate") else v for v in r] for r in rows]
        samples.append(rank_over_field(ev))
    best = max(samples) if samples else 0
    return GenericRank(best, samples, seed, agreed=len(set(samples)) <= 1)


def _partial_eval(v, point):
    if not hasattr(v, "substitute"):
        return v
    out = v.substitute(point)
    if isinstance(out, QPoly) and out.is_constant():
        return out.constant_value()
    return out


def symbolic_rank(M, limit=30):
    """Deterministic rank over the fraction field; only for small matrices."""
    rows = M.rows if isinstance(M, PolyMatrix) else M
    if len(rows) > limit or (rows and len(rows[0]) > limit):
        raise ValueError("symbolic rank limited to %dx%d" % (limit, limit))
    field_rows = [[v if isinstance(v, QRatFunc) else QRatFunc.coerce(v) for v in r] for r in rows]
    return rank_over_field(field_rows)


def variable_names(indices):
    return [REGISTRY.name(i) for i in indices]


__all__ = ["PolyMatrix", "GenericRank", "generic_rank", "symbolic_rank", "det_expand", "to_sparse"]
