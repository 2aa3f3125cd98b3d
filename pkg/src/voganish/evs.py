"""Conormal systems over a cover, slice restriction, singular loci, Hessians.

The system for a cover chart U and a target orbit C is U x closure(C*) cut
by f = <x, y>; C* is the orbit in V* whose transpose is the dual of C.
On the slice x = x_KS, y = y_KS(t1, t2) everything is computed over the
field Q(t1, t2), with the admissible locus t1 t2 (t1 - t2)(1 + t1)(1 + t2) != 0.
"""

import random
import time
from fractions import Fraction

import sympy

from .cover import (Chart, Windows, chart_ideal, chart_vars, keep_vars, solve_fibre_in_chart)
from .exactcore import PolyMatrix, QPoly, QRatFunc, psnf, var, var_index
from .exactcore.linalg import rank_over_field, rref, solve, transpose
from .exactcore.matrix import GenericRank
from .exactcore.poly import REGISTRY
from .multiseg import RankTriangle
from .vogan import (VoganSpace, act_x, act_y, closure_ideal, compute_dual, orbit_dim, pairing,
                    random_h, representative, symbolic_pairing, x_KS, y_KS_slice)

PARAMS = ("t1", "t2")


class RankDisagreement(AssertionError):
    pass


class ChartMissesFibre(ValueError):
    pass


class NonTriangular(ValueError):
    pass


class NotSmoothPoint(ValueError):
    pass


class SingularSystem(ArithmeticError):
    pass


class NotCritical(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class Budget:
    """Wall-clock and term-count limits for the heavy paths."""

    def __init__(self, max_seconds=None, max_terms=None):
        self.max_seconds = max_seconds
        self.max_terms = max_terms
        self.start = time.monotonic()

    def check(self, terms=0):
        if self.max_seconds is not None and time.monotonic() - self.start > self.max_seconds:
            raise BudgetExceeded("time budget of %ss exceeded" % self.max_seconds)
        if self.max_terms is not None and terms > self.max_terms:
            raise BudgetExceeded("term budget of %d exceeded (%d)" % (self.max_terms, terms))


_NO_BUDGET = Budget()


def _admissible_factors():
    t1, t2 = sympy.symbols("t1 t2")
    return [t1, t2, t1 - t2, 1 + t1, 1 + t2]


# -- the system

class EvsSystem:
    def __init__(self, variables, generators, f, base, target, dual, chart, cover):
        self.variables = variables
        self.generators = generators
        self.f = f
        self.base = base
        self.target = target
        self.dual = dual
        self.chart = chart
        self.cover = cover
        self._jac = None

    @property
    def nvars(self):
        return len(self.variables)

    def variety_generators(self):
        return self.generators[:-1]

    def jacobian(self):
        if self._jac is None:
            self._jac = PolyMatrix.jacobian(self.generators, self.variables)
        return self._jac

    def metadata(self):
        return {"base": self.base.to_json(), "target": self.target.to_json(),
                "chart": self.chart.index if self.chart else None, "nvars": self.nvars,
                "ngens": len(self.generators)}


def assemble_system(cover, chart, target):
    """Generators of (cover chart) x closure(C*) and f, with f last."""
    space = VoganSpace(cover.mults)
    space.register()
    cvars = chart_vars(cover, chart) if not cover.is_trivial() else []
    for name in cvars:
        var(name)
    gens = chart_ideal(cover, chart, space) if not cover.is_trivial() else []
    dual = compute_dual(target)
    gens = gens + closure_ideal(dual, side="V*")
    f = symbolic_pairing(space)
    gens.append(f)
    variables = space.x_vars() + space.y_vars() + cvars
    base = cover.triangle
    return EvsSystem(variables, gens, f, base, target, dual, chart, cover)


def dimension_count_rank(sys):
    """#vars - dim of the zero fibre of f on U x C*."""
    return sys.nvars - (orbit_dim(sys.base) + orbit_dim(sys.dual) - 1)


def random_point(sys, rng, tries=20):
    """A rational point of U x C* with f = 0, generic for the group action."""
    cover, base = sys.cover, sys.base
    x0 = representative(base)
    W = Windows(cover, x0) if not cover.is_trivial() else None
    if W is not None and W.free_subspaces():
        raise ValueError("cover is not birational over the base orbit")
    y0 = representative(sys.dual).transpose()
    space = VoganSpace(cover.mults)
    for _ in range(tries):
        h = random_h(cover.mults, rng)
        x = act_x(h, x0)
        point = dict(x.substitute_map(space))
        ok = True
        if W is not None:
            for s in cover.subspaces:
                vals = _chart_coordinates(h[s[0]], W.lower[s], sys.chart.pivots[s])
                if vals is None:
                    ok = False
                    break
                names = [nm for nm in sys.variables if nm.startswith("E%dl%d." % s)]
                point.update(zip(names, vals))
        if not ok:
            continue
        g = random_h(cover.mults, rng)
        y = act_y(g, y0)
        pairs = [_trace_pair(x.x(i), y.y(i)) for i in range(1, x.n + 1)]
        c = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3])) for _ in pairs]
        if any(pairs):
            last = max(i for i, p in enumerate(pairs) if p)
            rest = sum(c[i] * pairs[i] for i in range(len(pairs)) if i != last)
            c[last] = -rest / pairs[last]
            if not c[last]:
                continue
        y_mats = [[[c[i] * a for a in row] for row in y.y(i + 1)] for i in range(len(pairs))]
        for i, M in enumerate(y_mats, start=1):
            for r, row in enumerate(M):
                for col, a in enumerate(row):
                    point["y%d.%d.%d" % (i, r, col)] = a
        return point
    raise ValueError("no generic point found")


def _trace_pair(X, Y):
    return sum(X[r][c] * Y[c][r] for r in range(len(X)) for c in range(len(X[0])))


def _chart_coordinates(hv, basis, piv):
    # columns h_v b for the rows b of the basis, then M M[P]^-1
    m = len(hv)
    M = [[sum(hv[r][j] * b[j] for j in range(m)) for b in basis] for r in range(m)]
    MP = [M[p] for p in piv]
    if rank_over_field(MP) < len(piv):
        return None
    inv = solve(MP, [[Fraction(int(i == j)) for j in range(len(piv))] for i in range(len(piv))])
    C = [[sum(M[r][k] * inv[k][c] for k in range(len(piv))) for c in range(len(piv))] for r in range(m)]
    return [C[r][c] for r in range(m) if r not in piv for c in range(len(piv))]


def evaluate_jacobian(sys, point):
    idx = {var_index(k): v for k, v in point.items()}
    J = sys.jacobian()
    return [[e.evaluate(idx) if e else Fraction(0) for e in row] for row in J.rows]


def monte_carlo_rank(sys, samples=2, seed=0, check=True):
    rng = random.Random(seed)
    ranks = []
    for _ in range(samples):
        point = random_point(sys, rng)
        if check:
            idx = {var_index(k): v for k, v in point.items()}
            bad = [g for g in sys.generators if g.evaluate(idx)]
            if bad:
                raise ValueError("sample point is not on the variety (%d generators fail)" % len(bad))
        ranks.append(rank_over_field(evaluate_jacobian(sys, point)))
    return GenericRank(max(ranks), ranks, seed, agreed=len(set(ranks)) == 1, method="variety-sample")


def expected_generic_rank(sys, samples=2, seed=0):
    """Dimension count, cross-checked by the rank at random points of the variety."""
    expected = dimension_count_rank(sys)
    mc = monte_carlo_rank(sys, samples, seed)
    if int(mc) != expected or not mc.agreed:
        raise RankDisagreement("dimension count %d, sampled ranks %s" % (expected, mc.samples))
    return GenericRank(expected, mc.samples, seed, agreed=True, method="dimension-count")


# -- slice restriction

class SliceRestriction:
    def __init__(self, matrix, free, substitution, fibre, system):
        self.matrix = matrix
        self.free = free
        self.substitution = substitution
        self.fibre = fibre
        self.system = system

    def variables(self):
        return sorted(REGISTRY.name(v) for v in self.matrix.variables())


def slice_substitution(sys, fibre, t1=None, t2=None):
    space = VoganSpace(sys.cover.mults)
    sub = dict(x_KS().substitute_map(space))
    sub.update(y_KS_slice(t1, t2).substitute_map(space))
    sub.update(fibre.solution)
    return sub


def restrict_to_slice(sys, chart=None, keep=None):
    """Jacobian at (x_KS, y_KS(t1, t2)) over the fibre coordinates of the chart."""
    from . import cover as _cover
    chart = chart or sys.chart
    keep = keep_vars(sys.cover) if keep is None else keep
    try:
        fib = solve_fibre_in_chart(sys.cover, chart, x_KS(), keep)
    except _cover.ChartMissesFibre as e:
        raise ChartMissesFibre(str(e))
    if fib.relations:
        raise ChartMissesFibre("fibre in chart %s is not an affine space" % chart.index)
    sub = slice_substitution(sys, fib)
    M = sys.jacobian().substitute(sub)
    return SliceRestriction(M, fib.free, sub, fib, sys)


# -- the singular locus on the slice

def _to_sympy(p, names):
    syms = [sympy.Symbol(n) for n in names]
    pos = {var_index(n): i for i, n in enumerate(names)}
    d = {}
    for m, c in p.terms.items():
        e = [0] * len(names)
        for v in m:
            e[pos[v]] += 1
        d[tuple(e)] = sympy.Rational(c.numerator, c.denominator)
    return sympy.Poly.from_dict(d, *syms, domain="QQ") if syms else sympy.Poly(d.get((), 0), domain="QQ")


def _from_sympy(P, names):
    idx = [var_index(n) for n in names]
    terms = {}
    for e, c in P.as_dict().items():
        m = []
        for i, k in enumerate(e):
            m.extend([idx[i]] * k)
        c = sympy.Rational(c)
        terms[tuple(sorted(m))] = Fraction(int(c.p), int(c.q))
    return QPoly.from_dict(terms)


def factor_poly(p):
    """Irreducible non-constant factors of a QPoly over Q."""
    names = sorted(REGISTRY.name(v) for v in p.variables())
    if not names:
        return []
    _, facs = sympy.factor_list(_to_sympy(p, names))
    return [_from_sympy(F, names) for F, _ in facs]


def is_admissible_unit(p):
    """Every factor of the t-polynomial p is one of the excluded factors."""
    allowed = _admissible_factors()
    for fac in factor_poly(p):
        e = sympy.sympify(fac.to_str().replace("^", "**"), locals={n: sympy.Symbol(n) for n in PARAMS})
        if not any(sympy.simplify(e / a).is_number for a in allowed):
            return False
    return True


def _param_only(p, params):
    return p.variables() <= params


def _numerator(e):
    if isinstance(e, QRatFunc):
        return e.num
    return e


def _normalize(p):
    _, c = p.leading()
    return p * (1 / c)


class SolutionSet:
    def __init__(self, solutions, conditions, variables):
        self.solutions = solutions
        self.conditions = conditions
        self.variables = variables

    def __len__(self):
        return len(self.solutions)

    def as_strings(self):
        return [{k: v.to_str() for k, v in sorted(s.items())} for s in self.solutions]

    def to_json(self):
        return {"solutions": self.as_strings(),
                "discarded_t_conditions": [c.to_str() for c in self.conditions]}


def solve_triangular(eqs, variables, params=PARAMS, max_branches=512, budget=_NO_BUDGET):
    """Solve a polynomial system for generic admissible values of the parameters.

    Variables appearing linearly with a coefficient in Q(params) are solved
    and back-substituted; reducible equations split into their factors;
    otherwise a linear variable with a non-unit coefficient a is solved with
    a != 0 recorded, and the branch a = 0 is explored separately.
    """
    params = {var_index(p) for p in params}
    vidx = [var_index(v) for v in variables]
    names = {var_index(v): REGISTRY.name(var_index(v)) for v in variables}
    stack = [([QRatFunc.coerce(QPoly.coerce(e)) for e in eqs], [], {})]
    found = []
    conditions = []
    branches = 0
    while stack:
        budget.check()
        branches += 1
        if branches > max_branches:
            raise NonTriangular("too many branches")
        eqs, ineqs, sol = stack.pop()
        cur = []
        dead = False
        for e in eqs:
            p = _numerator(e.substitute(sol) if sol else e)
            if not p:
                continue
            if _param_only(p, params):
                conditions.append(_normalize(p))
                dead = True
                break
            p = _normalize(p)
            if p not in cur:
                cur.append(p)
        if dead:
            continue
        for a in ineqs:
            if not _numerator(a.substitute(sol) if sol else a):
                dead = True
                break
        if dead:
            continue
        if not cur:
            found.append(dict(sol))
            continue
        pick = _unit_linear(cur, vidx, params)
        if pick is not None:
            e, v, a = pick
            value = QRatFunc.coerce(e - QPoly.var(v) * a) * QRatFunc.coerce(a).inverse() * -1
            stack.append((cur, ineqs, _extend(sol, v, value)))
            continue
        split = None
        for k, e in enumerate(cur):
            facs = [f for f in factor_poly(e) if not _param_only(f, params)]
            if len(facs) > 1:
                split = (k, facs)
                break
        if split is not None:
            k, facs = split
            for fac in reversed(facs):
                stack.append(([QRatFunc.coerce(fac)] + [QRatFunc.coerce(c) for j, c in enumerate(cur) if j != k],
                              ineqs, sol))
            continue
        pick = _any_linear(cur, vidx)
        if pick is None:
            raise NonTriangular("no variable appears linearly in %s" % [c.to_str() for c in cur])
        e, v, a = pick
        b = e - QPoly.var(v) * a
        value = QRatFunc.coerce(b) * QRatFunc.coerce(a).inverse() * -1
        stack.append(([QRatFunc.coerce(c) for c in cur] + [QRatFunc.coerce(a), QRatFunc.coerce(b)], ineqs, sol))
        stack.append(([QRatFunc.coerce(c) for c in cur], ineqs + [QRatFunc.coerce(a)], _extend(sol, v, value)))
    out = []
    seen = set()
    for s in found:
        named = {names[v]: val for v, val in s.items()}
        key = tuple(sorted((k, v.to_str()) for k, v in named.items()))
        if key not in seen:
            seen.add(key)
            out.append(named)
    out.sort(key=lambda s: sorted((k, v.to_str()) for k, v in s.items()))
    conds = []
    for c in conditions:
        if c not in conds:
            conds.append(c)
    return SolutionSet(out, conds, [names[v] for v in vidx])


def _extend(sol, v, value):
    new = {k: val.substitute({v: value}) for k, val in sol.items()}
    new[v] = value
    return new


def _unit_linear(eqs, vidx, params):
    best = None
    for e in eqs:
        for v in vidx:
            if v not in e.variables() or e.degree_in(v) != 1:
                continue
            a = e.derivative(v)
            if _param_only(a, params):
                key = (e.nterms(), a.nterms(), -vidx.index(v))
                if best is None or key < best[0]:
                    best = (key, e, v, a)
    return None if best is None else best[1:]


def _any_linear(eqs, vidx):
    best = None
    for e in eqs:
        for v in vidx:
            if v not in e.variables() or e.degree_in(v) != 1:
                continue
            a = e.derivative(v)
            key = (a.nterms(), a.total_degree(), e.nterms(), -vidx.index(v))
            if best is None or key < best[0]:
                best = (key, e, v, a)
    return None if best is None else best[1:]


class SingularLocus:
    def __init__(self, identity_size, residual, system, solutions, expected_rank, pivot_units, ops):
        self.identity_size = identity_size
        self.residual = residual
        self.system = system
        self.solutions = solutions
        self.expected_rank = expected_rank
        self.pivot_units = pivot_units
        self.ops = ops

    @property
    def empty(self):
        return len(self.solutions) == 0

    def to_json(self):
        return {"psnf_identity": self.identity_size, "expected_rank": self.expected_rank,
                "residual_shape": [self.residual.nrows, self.residual.ncols],
                "residual": self.residual.to_lists(),
                "residual_rankdrop_system": [g.to_str() for g in self.system],
                "pivot_units_admissible": all(is_admissible_unit(u) for u in self.pivot_units),
                **self.solutions.to_json()}


def singular_locus(restriction, expected_rank=None, budget=_NO_BUDGET):
    """Points of the slice fibre where the Jacobian drops below its generic rank."""
    from itertools import combinations
    from .exactcore.linalg import det_expand
    if expected_rank is None:
        expected_rank = dimension_count_rank(restriction.system)
    res = psnf(restriction.matrix, PARAMS)
    budget.check()
    B = res.trimmed_residual()
    e = expected_rank - res.identity_size
    system = []
    if e > 0 and B.nrows >= e and B.ncols >= e:
        for rs in combinations(range(B.nrows), e):
            for cs in combinations(range(B.ncols), e):
                d = det_expand([[B.rows[r][c] for c in cs] for r in rs])
                p = _numerator(QRatFunc.coerce(d) if not isinstance(d, QRatFunc) else d)
                if p:
                    p = _normalize(p)
                    if p not in system:
                        system.append(p)
    elif e > 0:
        # the residual cannot carry the missing rank: every point is singular
        system = []
    units = []
    for op in res.ops:
        if op[0] == "scale_row":
            c = op[2]
            for part in (c.num, c.den):
                if not part.is_constant():
                    units.append(part)
    if e <= 0:
        sols = SolutionSet([], [], restriction.free)
    else:
        sols = solve_triangular(system, restriction.free, budget=budget)
    return SingularLocus(res.identity_size, B, system, sols, expected_rank, units, res.ops)


# -- local coordinates and the Hessian

def _at(e, point):
    if not e:
        return QRatFunc.coerce(0)
    v = e.substitute(point)
    return QRatFunc.coerce(v) if not isinstance(v, QRatFunc) else v


def _jacobian_at(gens, variables, point):
    vs = [var_index(v) for v in variables]
    out = []
    for g in gens:
        gv = g.variables()
        out.append([_at(g.derivative(v), point) if v in gv else QRatFunc.coerce(0) for v in vs])
    return out


class LocalSplit:
    def __init__(self, implicit, local, rows, rank):
        self.implicit = implicit
        self.local = local
        self.rows = rows
        self.rank = rank

    def to_json(self):
        return {"implicit": self.implicit, "local": self.local, "rows": self.rows, "rank": self.rank}


def local_coordinates(gens, variables, point, expected_rank=None):
    """Split variables into implicit ones (an invertible Jacobian minor) and local ones.

    Columns are taken greedily in the given variable order.
    """
    J = _jacobian_at(gens, variables, point)
    cols, _ = rref(J, len(variables))
    s = len(cols)
    if expected_rank is not None and s != expected_rank:
        raise NotSmoothPoint("Jacobian rank %d at the point, expected %d" % (s, expected_rank))
    sub = [[row[c] for c in cols] for row in J]
    rows, _ = rref(transpose(sub), len(J))
    implicit = [variables[c] for c in cols]
    local = [v for k, v in enumerate(variables) if k not in set(cols)]
    return LocalSplit(implicit, local, list(rows), s)


def _solve(A, B):
    try:
        return solve(A, B)
    except ArithmeticError as e:
        raise SingularSystem(str(e))


class Derivatives:
    def __init__(self, first, second=None):
        self.first = first
        self.second = second


def implicit_derivatives(gens, split, point, order=1):
    """w_u (and w_uu for order 2) at the point, over the coefficient field.

    first[k][a] = d w_k / d u_a;  second[k][(a, b)] = d^2 w_k / du_a du_b.
    """
    G = [gens[r] for r in split.rows]
    W, U = split.implicit, split.local
    Gw = _jacobian_at(G, W, point)
    Gu = _jacobian_at(G, U, point)
    X = _solve(Gw, Gu)
    first = [[-a for a in row] for row in X]
    if order < 2:
        return Derivatives(first)
    s, nu = len(W), len(U)
    H = [_hessian_at(g, W + U, point) for g in G]
    second = [dict() for _ in range(s)]
    rhs_cols = []
    pairs = [(a, b) for a in range(nu) for b in range(a, nu)]
    for a, b in pairs:
        col = []
        for k in range(s):
            h = H[k]
            val = h(s + a, s + b)
            for j in range(s):
                val = val + h(s + a, j) * first[j][b] + h(s + b, j) * first[j][a]
                for l in range(s):
                    val = val + first[j][a] * h(j, l) * first[l][b]
            col.append(-val)
        rhs_cols.append(col)
    if pairs:
        Y = _solve(Gw, [[rhs_cols[c][k] for c in range(len(pairs))] for k in range(s)])
        for c, (a, b) in enumerate(pairs):
            for k in range(s):
                second[k][(a, b)] = Y[k][c]
                second[k][(b, a)] = Y[k][c]
    return Derivatives(first, second)


def _hessian_at(g, variables, point):
    """Lookup h(i, j) = d^2 g / dv_i dv_j at the point (sparse)."""
    vs = [var_index(v) for v in variables]
    pos = {v: i for i, v in enumerate(vs)}
    present = [v for v in g.variables() if v in pos]
    table = {}
    for v in present:
        dv = g.derivative(v)
        for w in dv.variables():
            if w in pos:
                val = _at(dv.derivative(w), point)
                if val:
                    table[(pos[v], pos[w])] = val
    zero = QRatFunc.coerce(0)

    def h(i, j):
        return table.get((i, j), zero)

    h.table = table
    return h


class HessianReport:
    def __init__(self, local, implicit, matrix, rank, expected_rank, minor=None, isotropic=None,
                 verdict="UNKNOWN", multipliers=None):
        self.local = local
        self.implicit = implicit
        self.matrix = matrix
        self.rank = rank
        self.expected_rank = expected_rank
        self.minor = minor
        self.isotropic = isotropic
        self.verdict = verdict
        self.multipliers = multipliers

    @property
    def isotropic_dim(self):
        return len(self.isotropic) if self.isotropic is not None else 0

    def to_json(self):
        return {"nlocal": len(self.local), "nimplicit": len(self.implicit), "rank": self.rank,
                "expected_rank": self.expected_rank, "minor": self.minor,
                "isotropic": [self.local[i] for i in self.isotropic] if self.isotropic else [],
                "isotropic_dim": self.isotropic_dim, "verdict": self.verdict}


def hessian(f, gens, split, point, expected_rank=None, budget=_NO_BUDGET):
    """Hessian of f restricted to the variety, in the local coordinates of split.

    With multipliers lam solving lam G_w = f_w and L = f - lam G, the second
    order terms of w cancel:
    H = L_uu + L_uw w_u + (L_uw w_u)^T + w_u^T L_ww w_u.
    """
    G = [gens[r] for r in split.rows]
    W, U = split.implicit, split.local
    s, nu = len(W), len(U)
    allv = W + U
    Gw = _jacobian_at(G, W, point)
    fw = _jacobian_at([f], W, point)[0]
    fu = _jacobian_at([f], U, point)[0]
    lam = [r[0] for r in _solve(transpose(Gw), [[a] for a in fw])] if s else []
    budget.check()
    wu = implicit_derivatives(gens, split, point).first if s else []
    grad = [fu[a] + sum((fw[k] * wu[k][a] for k in range(s)), QRatFunc.coerce(0)) for a in range(nu)]
    if any(grad):
        raise NotCritical("f is not critical at the point (%d nonzero gradient entries)" % sum(1 for g in grad if g))
    zero = QRatFunc.coerce(0)
    L = {}
    hf = _hessian_at(f, allv, point)
    for key, val in hf.table.items():
        L[key] = L.get(key, zero) + val
    for k, g in enumerate(G):
        if not lam[k]:
            continue
        hg = _hessian_at(g, allv, point)
        for key, val in hg.table.items():
            L[key] = L.get(key, zero) - lam[k] * val
        budget.check()
    L = {k: v for k, v in L.items() if v}

    def Lget(i, j):
        return L.get((i, j), zero)

    # A = L_uw w_u  (nu x nu), M = L_ww w_u (s x nu)
    Luw = {}
    Lww = {}
    for (i, j), v in L.items():
        if i >= s and j < s:
            Luw.setdefault(i - s, {})[j] = v
        elif i < s and j < s:
            Lww.setdefault(i, {})[j] = v
    H = [[Lget(s + a, s + b) for b in range(nu)] for a in range(nu)]
    A = [[zero] * nu for _ in range(nu)]
    for a, row in Luw.items():
        for j, v in row.items():
            for b in range(nu):
                if wu[j][b]:
                    A[a][b] = A[a][b] + v * wu[j][b]
    budget.check()
    M = [[zero] * nu for _ in range(s)]
    for i, row in Lww.items():
        for j, v in row.items():
            for b in range(nu):
                if wu[j][b]:
                    M[i][b] = M[i][b] + v * wu[j][b]
    budget.check()
    for a in range(nu):
        for b in range(nu):
            val = H[a][b] + A[a][b] + A[b][a]
            for i in range(s):
                if wu[i][a] and M[i][b]:
                    val = val + wu[i][a] * M[i][b]
            H[a][b] = val
        budget.check()
    Hm = PolyMatrix(H, nu)
    rank = rank_over_field(H)
    return HessianReport(U, W, Hm, rank, expected_rank, multipliers=lam)


def hessian_expected_rank(base, target_dual):
    """dim C - (dim V - dim C*)."""
    return orbit_dim(base) - (VoganSpace(base.mults).dim_V - orbit_dim(target_dual))


def square_certificate(report, max_nodes=20000):
    """Look for a constant isotropic subspace of half the rank.

    A set S of coordinate vectors with H[S, S] = 0 and H[S, :] of rank |S|
    = rank/2 gives a principal minor I = S + T of full rank with
    det H[I, I] = (-1)^|S| det(H[S, T])^2.
    """
    H = report.matrix.rows if isinstance(report, HessianReport) else report.rows
    n = len(H)
    rk = report.rank if isinstance(report, HessianReport) else rank_over_field(H)
    if rk % 2:
        return _set_verdict(report, None, None, "UNKNOWN")
    half = rk // 2
    cand = [i for i in range(n) if not H[i][i] and any(H[i])]
    zero_pairs = {i: {j for j in cand if not H[i][j]} for i in cand}
    nodes = [0]

    def grow(chosen, pool):
        if len(chosen) == half:
            return chosen
        nodes[0] += 1
        if nodes[0] > max_nodes or len(chosen) + len(pool) < half:
            return None
        for k, i in enumerate(pool):
            new = chosen + [i]
            if rank_over_field([H[j] for j in new]) < len(new):
                continue
            rest = [j for j in pool[k + 1:] if j in zero_pairs[i]]
            got = grow(new, rest)
            if got is not None:
                return got
        return None

    S = grow([], cand) if half else []
    if S is None:
        return _set_verdict(report, None, None, "UNKNOWN")
    rows = [H[i] for i in S]
    T, _ = rref(rows, n)
    minor = sorted(S + list(T))
    return _set_verdict(report, S, minor, "SQUARE")


def _set_verdict(report, S, minor, verdict):
    if isinstance(report, HessianReport):
        report.isotropic = S
        report.minor = minor
        report.verdict = verdict
        return report
    return HessianReport([], [], report, rank_over_field(report.rows), None, minor, S, verdict)


def certificate_determinant(report):
    """(sign, B) with det H[I, I] = sign * det(B)^2 for the certified minor."""
    H = report.matrix.rows
    S = report.isotropic
    T = [i for i in report.minor if i not in set(S)]
    B = [[H[i][j] for j in T] for i in S]
    return (-1) ** len(S), B


# -- the two Kashiwara-Saito cases

def ks_self_variety():
    """closure(C_KS) x closure(C*_KS) in V x V* and the pairing."""
    from .multiseg import named
    T = named("KS")
    space = VoganSpace(T.mults)
    space.register()
    var("t1"), var("t2")
    gens = closure_ideal(T, "V") + closure_ideal(compute_dual(T), "V*")
    variables = space.x_vars() + space.y_vars()
    point = dict(x_KS().substitute_map(space))
    point.update(y_KS_slice().substitute_map(space))
    return gens, variables, point, symbolic_pairing(space)


def ks_self_hessian(budget=_NO_BUDGET):
    from .multiseg import named
    gens, variables, point, f = ks_self_variety()
    T = named("KS")
    codim = len(variables) - 2 * orbit_dim(T)
    split = local_coordinates(gens, variables, point, expected_rank=codim)
    rep = hessian(f, gens, split, point, hessian_expected_rank(T, compute_dual(T)), budget)
    return square_certificate(rep)


def chart_point(sys, restriction, solution):
    """Full point of the chart system for values of the free fibre coordinates."""
    vals = {var_index(k): v for k, v in solution.items()}
    point = {}
    for k, v in restriction.substitution.items():
        if hasattr(v, "substitute"):
            v = v.substitute(vals)
        point[k] = v
    for k, v in solution.items():
        point[k] = v
    return point


def solution_flags(sys, restriction, solution):
    """Chart-independent form of a solution: the reduced basis of each subspace."""
    from .cover import label, subspace_matrix
    point = chart_point(sys, restriction, solution)
    vals = {var_index(k): v for k, v in point.items()}
    out = {}
    for s in sys.cover.subspaces:
        M = subspace_matrix(sys.cover, restriction.fibre.chart, s)
        cols = [[_at(M[r][c], vals) for r in range(len(M))] for c in range(s[1])]
        _, rows = rref(cols, len(M))
        out[label(s)] = tuple(tuple(QRatFunc.coerce(r.get(j, 0)).to_str() for j in range(len(M))) for r in rows)
    return tuple(sorted(out.items()))


def singular_points_over_charts(cover, target, charts, budget=_NO_BUDGET):
    """Singular points of every chart, merged by their flags.

    Returns (points, per_chart) where points maps a flag key to the list of
    chart indices in which the point was found.
    """
    points = {}
    per_chart = []
    for chart in charts:
        sys = assemble_system(cover, chart, target)
        R = restrict_to_slice(sys, chart)
        L = singular_locus(R, budget=budget)
        keys = []
        for sol in L.solutions.solutions:
            key = solution_flags(sys, R, sol)
            points.setdefault(key, []).append(chart.index)
            keys.append(key)
        per_chart.append((chart.index, L, keys))
        budget.check()
    return points, per_chart


def cover_hessian(sys, restriction, solution, budget=_NO_BUDGET):
    """Hessian of f on the chart variety at a singular point of the slice."""
    point = chart_point(sys, restriction, solution)
    gens = sys.variety_generators()
    codim = sys.nvars - (orbit_dim(sys.base) + orbit_dim(sys.dual))
    split = local_coordinates(gens, sys.variables, point, expected_rank=codim)
    rep = hessian(sys.f, gens, split, point, hessian_expected_rank(sys.base, sys.dual), budget)
    return square_certificate(rep)


__all__ = ["EvsSystem", "SliceRestriction", "HessianReport", "SingularLocus", "SolutionSet", "LocalSplit",
           "RankDisagreement", "ChartMissesFibre", "NonTriangular", "NotSmoothPoint", "SingularSystem",
           "NotCritical", "BudgetExceeded", "Budget", "assemble_system", "dimension_count_rank",
           "expected_generic_rank", "monte_carlo_rank", "restrict_to_slice", "singular_locus",
           "solve_triangular", "local_coordinates", "implicit_derivatives", "hessian", "square_certificate",
           "certificate_determinant", "hessian_expected_rank", "ks_self_hessian", "cover_hessian",
           "factor_poly", "is_admissible_unit", "solution_flags", "singular_points_over_charts",
           "chart_point", "ks_self_variety"]
