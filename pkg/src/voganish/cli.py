"""Command-line interface, the on-disk orbit catalog and the ks-verify runner.

Every command prints JSON on stdout.  Exit codes: 1 parse error,
2 precondition violation, 3 check failure, 4 budget exceeded.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .multiseg import (KS_MULTS, NAMED_TRIANGLES, Multisegment, MultsMismatch, NegativeRank, ParseError,
                       RankTriangle, SupportMismatch, closure_leq, closure_lt, enumerate_orbits,
                       is_arthur_type, multisegment_from_triangle, named, triangle_from_multisegment)
from .vogan import VoganSpace, compute_dual, jordan_partition, orbit_dim, representative

EXIT_PARSE, EXIT_PRECONDITION, EXIT_CHECK, EXIT_BUDGET = 1, 2, 3, 4


class CacheCorrupt(ValueError):
    pass


class CheckFailed(AssertionError):
    pass


# -- orbit catalog

class OrbitCatalog:
    """All orbits for one mults vector with dimensions and duals."""

    def __init__(self, mults, triangles, dims, duals, meta=None):
        self.mults = tuple(mults)
        self.triangles = triangles
        self.dims = dims
        self.duals = duals
        self.meta = meta or {}
        self.from_cache = False
        self._index = {T: k for k, T in enumerate(triangles)}

    def __len__(self):
        return len(self.triangles)

    def index(self, T):
        return self._index[T]

    def dim(self, T):
        return self.dims[self._index[T]]

    def dual(self, T):
        return self.triangles[self.duals[self._index[T]]]

    def multisegment(self, T):
        return multisegment_from_triangle(T)

    def check(self):
        n = len(self.triangles)
        dimV = VoganSpace(self.mults).dim_V
        if len(self.dims) != n or len(self.duals) != n:
            raise CacheCorrupt("column lengths differ")
        for k, d in enumerate(self.duals):
            if not 0 <= d < n or self.duals[d] != k:
                raise CacheCorrupt("dual column is not an involution at %d" % k)
        if any(not 0 <= d <= dimV for d in self.dims):
            raise CacheCorrupt("dimension out of range")

    @staticmethod
    def build(mults, cache_dir=None, seed=0):
        """Load from the cache if present and sound, else compute and store."""
        mults = tuple(mults)
        path = _cache_path(mults, cache_dir)
        if path and os.path.exists(path):
            try:
                cat = OrbitCatalog.load(path)
                cat.from_cache = True
                return cat
            except CacheCorrupt:
                pass
        triangles = enumerate_orbits(mults)
        index = {T: k for k, T in enumerate(triangles)}
        dims = [orbit_dim(T) for T in triangles]
        duals = [index[compute_dual(T, seed=seed)] for T in triangles]
        meta = {"seed": seed, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "version": __version__}
        cat = OrbitCatalog(mults, triangles, dims, duals, meta)
        cat.check()
        if path:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(cat.to_json(), fh)
            os.replace(tmp, path)
        return cat

    # thin estimator-style alias
    @classmethod
    def fit(cls, mults, cache_dir=None, seed=0):
        return cls.build(mults, cache_dir, seed)

    @staticmethod
    def load(path):
        try:
            with open(path) as fh:
                obj = json.load(fh)
            if obj.get("meta", {}).get("version") != __version__:
                raise CacheCorrupt("cache written by another version")
            mults = tuple(obj["mults"])
            triangles = [RankTriangle.parse(e["triangle"]) for e in obj["entries"]]
            dims = [int(e["dim"]) for e in obj["entries"]]
            duals = [int(e["dual"]) for e in obj["entries"]]
        except (OSError, ValueError, KeyError, TypeError) as e:
            if isinstance(e, CacheCorrupt):
                raise
            raise CacheCorrupt("unreadable cache %s: %s" % (path, e))
        if any(T.mults != mults for T in triangles):
            raise CacheCorrupt("mults disagree")
        cat = OrbitCatalog(mults, triangles, dims, duals, obj.get("meta"))
        cat.check()
        return cat

    def to_json(self):
        entries = []
        for T, d, k in zip(self.triangles, self.dims, self.duals):
            entries.append({"triangle": T.to_text(), "dim": d, "dual": k,
                            "multisegment": multisegment_from_triangle(T).to_json()})
        return {"mults": list(self.mults), "meta": self.meta, "entries": entries}


def cache_dir_default():
    return os.environ.get("VOGANISH_CACHE") or os.path.join(os.path.expanduser("~"), ".cache", "voganish")


def _cache_path(mults, cache_dir):
    if cache_dir is False:
        return None
    d = cache_dir or cache_dir_default()
    return os.path.join(d, "catalog-%s-v%s.json" % ("_".join(map(str, mults)), __version__))


# -- verification report

class Check:
    def __init__(self, name, expected, computed, tag, source, passed, note=None):
        self.name = name
        self.expected = expected
        self.computed = computed
        self.tag = tag
        self.source = source
        self.passed = passed
        self.note = note

    def to_json(self):
        out = {"name": self.name, "expected": self.expected, "computed": self.computed,
               "tag": self.tag, "source": self.source, "passed": self.passed}
        if self.note:
            out["note"] = self.note
        return out


class VerifyReport:
    def __init__(self, checks, seed):
        self.checks = checks
        self.seed = seed

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return {"schema": "report-v1", "version": __version__, "seed": self.seed,
                "verdict": "PASS" if self.passed else "FAIL",
                "checks": [c.to_json() for c in self.checks]}


def _tri(name):
    return named(name).to_text()


def check_orbit_count(seed):
    n = len(enumerate_orbits(KS_MULTS))
    return Check("orbit_count", 1138, n, "exact", "number of H-orbits in V for mults 2,4,4,4,2", n == 1138)


def small_mults(total, max_len=5):
    """Every mults vector of length 2..max_len with entry sum at most total."""
    def rec(k, left):
        if k == 0:
            yield ()
            return
        for v in range(left + 1):
            for rest in rec(k - 1, left - v):
                yield (v,) + rest
    for k in range(2, max_len + 1):
        yield from rec(k, total)


def check_bijection(seed):
    fails = 0
    total = 0
    cases = [enumerate_orbits(KS_MULTS)] + [enumerate_orbits(m) for m in small_mults(8)]
    for orbs in cases:
        for T in orbs:
            total += 1
            if triangle_from_multisegment(multisegment_from_triangle(T), T.mults) != T:
                fails += 1
    return Check("bijection_roundtrip", 0, fails, "exact",
                 "triangle -> multisegment -> triangle over %d triangles" % total, fails == 0)


def check_orbit_dims(seed):
    got = {k: orbit_dim(named(k)) for k in ("KS", "psi", "R")}
    sp = VoganSpace(KS_MULTS)
    got["dim_V"], got["dim_H"] = sp.dim_V, sp.dim_H
    exp = {"KS": 32, "psi": 40, "R": 36, "dim_V": 48, "dim_H": 56}
    return Check("orbit_dimensions", exp, got, "exact", "orbit dimensions and dim V, dim H", got == exp)


def check_duality(seed, catalog=None):
    cat = catalog or OrbitCatalog.build(KS_MULTS, cache_dir=False, seed=seed)
    got = {"KS": cat.dual(named("KS")).to_text(), "psi": cat.dual(named("psi")).to_text(),
           "L": cat.dual(named("L")).to_text()}
    exp = {"KS": _tri("KS"), "psi": _tri("psi"), "L": _tri("R")}
    invol = all(cat.duals[cat.duals[k]] == k for k in range(len(cat)))
    # order reversal: A <= B should give dual(B) <= dual(A); counted over all comparable pairs
    tris = cat.triangles
    broken = 0
    for A in tris:
        for B in tris:
            if A != B and closure_leq(A, B) and not closure_leq(cat.dual(B), cat.dual(A)):
                broken += 1
    rev = broken == 0
    got["involution"], got["order_reversing"] = invol, rev
    exp["involution"], exp["order_reversing"] = True, True
    return Check("duality", exp, got, "exact", "Zelevinsky duals from generic conormal vectors", got == exp,
                 note="comparable pairs whose duals are not reversed: %d" % broken)


def six_orbits(catalog):
    ks = named("KS")
    return [C for C in catalog.triangles if closure_lt(ks, C) and closure_lt(ks, catalog.dual(C))]


def check_six_orbits(seed, catalog=None):
    cat = catalog or OrbitCatalog.build(KS_MULTS, cache_dir=False, seed=seed)
    got = sorted(C.to_text() for C in six_orbits(cat))
    exp = sorted(_tri(k) for k in ("L", "psi", "R", "l", "m", "r"))
    return Check("six_orbits_above_ks", exp, got, "exact", "orbits above C_KS whose duals are also above C_KS",
                 got == exp)


def check_conormal(seed):
    from .vogan import conormal_dim, pair_stabilizer_dim, stabilizer_dim, x_KS, y_KS
    x = x_KS()
    I = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    Z = [[Fraction(0)] * 2 for _ in range(2)]
    D = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]]
    p1 = pair_stabilizer_dim(x, y_KS(I, Z, I, Z))
    p2 = pair_stabilizer_dim(x, y_KS(I, D, I, I))
    dim_lambda = orbit_dim(named("KS")) + conormal_dim(x)
    sp = VoganSpace(KS_MULTS)
    got = {"conormal_fibre": conormal_dim(x), "stabilizer": stabilizer_dim(x), "pair_max": p1, "pair_min": p2,
           "codim_min": dim_lambda - (sp.dim_H - p2), "codim_max": dim_lambda - (sp.dim_H - p1)}
    exp = {"conormal_fibre": 16, "stabilizer": 24, "pair_max": 16, "pair_min": 10, "codim_min": 2, "codim_max": 8}
    return Check("conormal_stabilizer", exp, got, "exact", "conormal and stabilizer dimensions at x_KS",
                 got == exp)


def check_jordan(seed):
    from .vogan import x_KS
    got = {"KS": list(jordan_partition(x_KS())), "psi": list(jordan_partition(representative(named("psi"))))}
    exp = {"KS": [3, 3, 2, 2, 2, 2, 1, 1], "psi": [4, 4, 2, 2, 2, 2]}
    return Check("jordan_partitions", exp, got, "exact", "Jordan types of the 16 x 16 nilpotent embeddings",
                 got == exp)


EXPECTED_CONDITIONS = {
    "r": ["x1(E0) in E1^2", "x2(E1) in E2^3", "x3(E2) in E3^2", "x2(E1^2) in E2^1", "x3(E2^3) in E3^2",
          "x3(E2^1) = 0", "x4(E3^2) = 0"],
    "m": ["x1(E0) in E1^2", "x2(E1) in E2^3", "x3(E2) in E3^3", "x2(E1^2) in E2^1", "x3(E2^3) in E3^2",
          "x4(E3^3) in E4^1", "x3(E2^1) = 0", "x4(E3^2) = 0"],
    "R": ["x1(E0) in E1^2", "x3(E2) in E3^2", "x2(E1^2) in E2^2", "x4(E3^2) = 0", "x3(E2^2) = 0"],
    "psi": ["x1(E0) in E1^2", "x2(E1) in E2^3", "x3(E2) in E3^3", "x2(E1^2) in E2^1", "x3(E2^3) in E3^2",
            "x4(E3^3) in E4^1", "x3(E2^1) in E3^1", "x4(E3^2) in E4^1", "x4(E3^1) = 0"],
}


def condition_strings(spec):
    from .cover import FULL, ZERO
    out = []
    for i, S, T in spec.conditions:
        src = "E%d" % (i - 1) if S == FULL else "E%d^%d" % S
        if T == ZERO:
            out.append("x%d(%s) = 0" % (i, src))
        else:
            out.append("x%d(%s) in E%d^%d" % (i, src, T[0], T[1]))
    return out


def check_covers(seed):
    from .cover import count_polynomial, cover_from_triangle, fibre_over
    from .vogan import x_KS
    got, exp = {}, {}
    for nm in ("r", "m", "R", "psi"):
        spec = cover_from_triangle(named(nm), nm)
        got["conditions_" + nm] = sorted(condition_strings(spec))
        exp["conditions_" + nm] = sorted(EXPECTED_CONDITIONS[nm])
        fd = fibre_over(spec, x_KS())
        got["fibre_" + nm] = {"dim": fd.dimension, "grassmannians": [f["grassmannian"] for f in fd.factors],
                              "relations": len(fd.relations)}
    exp["fibre_r"] = {"dim": 1, "grassmannians": [[1, 2], [1, 2]], "relations": 1}
    exp["fibre_m"] = {"dim": 2, "grassmannians": [[1, 2]] * 4, "relations": 2}
    exp["fibre_R"] = {"dim": 0, "grassmannians": [], "relations": 0}
    exp["fibre_psi"] = {"dim": 4, "grassmannians": [[1, 4], [1, 2], [1, 2], [1, 2], [1, 2]], "relations": 3}
    fit = count_polynomial(cover_from_triangle(named("psi"), "psi"), named("KS"))
    got["psi_count"] = {"q2": dict(fit.counts)[2], "degree": fit.degree, "leading": str(fit.leading)}
    exp["psi_count"] = {"q2": 81, "degree": 4, "leading": "1"}
    return Check("cover_construction", exp, got, "exact", "flag conditions from rank triangles, fibres over x_KS",
                 got == exp)


def check_semismall(seed):
    from .cover import cover_from_triangle, semismall_report
    orbs = enumerate_orbits(KS_MULTS)
    got, exp = {}, {}
    for nm in ("r", "m", "R", "psi"):
        rep = semismall_report(cover_from_triangle(named(nm), nm), named(nm), orbs)
        got[nm] = {"semismall": rep.semismall, "small": rep.small,
                   "relevant": sorted(T.to_text() for T in rep.relevant if T != named(nm))}
    base = "2 4 4 4 2 / "
    exp["r"] = {"semismall": True, "small": False,
                "relevant": sorted([base + "2 2 2 2 / 0 1 1 / 0 0 / 0", base + "2 2 2 1 / 0 1 1 / 0 0 / 0"])}
    exp["m"] = {"semismall": True, "small": False, "relevant": sorted(base + s for s in [
        "2 2 2 1 / 0 1 1 / 0 0 / 0", "1 3 2 1 / 0 1 1 / 0 0 / 0", "2 2 2 2 / 0 1 1 / 0 0 / 0",
        "1 3 2 2 / 0 1 1 / 0 0 / 0", "1 2 3 2 / 0 1 1 / 0 0 / 0", "2 2 3 2 / 0 2 1 / 0 0 / 0",
        "1 3 3 2 / 0 2 1 / 0 0 / 0"])}
    exp["R"] = {"semismall": True, "small": True, "relevant": []}
    exp["psi"] = {"semismall": True, "small": False, "relevant": [_tri("KS")]}
    return Check("semismall_reports", exp, got, "exact", "fibre dimensions over every stratum", got == exp)


def _chart1(nm):
    from .cover import charts_covering_fibre, cover_from_triangle
    spec = cover_from_triangle(named(nm), nm)
    return spec, charts_covering_fibre(spec)


def check_generic_ranks(seed):
    from .evs import assemble_system, dimension_count_rank, monte_carlo_rank
    got = {}
    for nm in ("r", "m", "R", "psi"):
        spec, charts = _chart1(nm)
        S = assemble_system(spec, charts[0], named("KS"))
        mc = monte_carlo_rank(S, samples=2, seed=seed)
        got[nm] = {"formula": dimension_count_rank(S), "sampled": int(mc), "agreed": mc.agreed}
    exp = {k: {"formula": v, "sampled": v, "agreed": True} for k, v in
           {"r": 44, "m": 46, "R": 41, "psi": 46}.items()}
    return Check("generic_ranks", exp, got, "derived", "Jacobian ranks of the cover charts times closure(C*_KS)",
                 got == exp)


def check_singular(seed):
    from .evs import singular_points_over_charts
    got = {}
    for nm in ("r", "m", "R"):
        spec, charts = _chart1(nm)
        pts, per = singular_points_over_charts(spec, named("KS"), charts)
        got[nm] = {"charts": len(charts), "points": len(pts)}
    spec, charts = _chart1("psi")
    pts, per = singular_points_over_charts(spec, named("KS"), charts)
    sols = per[0][1].solutions.solutions
    expected = psi_points()
    matched = len(sols) == len(expected) and all(any(_same_point(s, e) for s in sols) for e in expected)
    new_later = sum(1 for where in pts.values() if 1 not in where)
    got["psi"] = {"charts": len(charts), "points": len(pts), "chart1_matches": matched,
                  "new_in_other_charts": new_later}
    exp = {"r": {"charts": 2, "points": 0}, "m": {"charts": 4, "points": 0}, "R": {"charts": 1, "points": 0},
           "psi": {"charts": 16, "points": 2, "chart1_matches": True, "new_in_other_charts": 0}}
    return Check("singular_locus", exp, got, "exact", "rank drops of the slice Jacobian over t1, t2", got == exp,
                 note="chart 1 points: %s" % [{k: v.to_str() for k, v in sorted(p.items())} for p in sols])


def psi_points():
    """The two singular points in chart 1 of the psi cover, as rational functions of t1, t2."""
    from .exactcore import QRatFunc, var
    t1, t2 = QRatFunc.coerce(var("t1")), QRatFunc.coerce(var("t2"))
    zero = QRatFunc.coerce(0)
    p1 = {"E2l1.a1": zero, "E2l1.a2": -1 / t1, "E2l3.a3": zero, "E3l3.a3": zero}
    p2 = {"E2l1.a1": t2 - t1, "E2l1.a2": -1 / t2, "E2l3.a3": t2 - t1, "E3l3.a3": t2 - t1}
    return [p1, p2]


def _same_point(sol, ref):
    from .exactcore import QRatFunc
    return set(sol) == set(ref) and all(QRatFunc.coerce(sol[k]) == ref[k] for k in ref)


def check_hessians(seed, budget=None):
    from .evs import assemble_system, cover_hessian, ks_self_hessian, restrict_to_slice, singular_locus
    rep = ks_self_hessian(budget) if budget else ks_self_hessian()
    got = {"KS": {"rank": rep.rank, "verdict": rep.verdict, "isotropic_dim": rep.isotropic_dim,
                  "symmetric": rep.matrix.is_symmetric()}}
    spec, charts = _chart1("psi")
    S = assemble_system(spec, charts[0], named("KS"))
    R = restrict_to_slice(S, charts[0])
    L = singular_locus(R)
    got["psi"] = []
    for sol in L.solutions.solutions:
        h = cover_hessian(S, R, sol, budget) if budget else cover_hessian(S, R, sol)
        got["psi"].append({"rank": h.rank, "verdict": h.verdict, "isotropic_dim": h.isotropic_dim,
                           "symmetric": h.matrix.is_symmetric()})
    exp = {"KS": {"rank": 16, "verdict": "SQUARE", "isotropic_dim": 8, "symmetric": True},
           "psi": [{"rank": 24, "verdict": "SQUARE", "isotropic_dim": 12, "symmetric": True}] * 2}
    return Check("hessian_certificates", exp, got, "exact", "Hessian of the pairing on the variety at the slice",
                 got == exp)


def check_arthur(seed):
    from .multiseg import M_KS, M_PSI
    got = {"psi": is_arthur_type(M_PSI), "KS": is_arthur_type(M_KS)}
    exp = {"psi": True, "KS": False}
    return Check("arthur_shape", exp, got, "exact", "decomposition into symmetric Arthur blocks", got == exp)


def check_properties(seed, catalog=None):
    import random
    from .exactcore import replay
    from .vogan import conormal_dim
    cat = catalog or OrbitCatalog.build(KS_MULTS, cache_dir=False, seed=seed)
    bad = sum(1 for T, d in zip(cat.triangles, cat.dims) if conormal_dim(representative(T)) + d != 48)
    # PSNF replay on the restricted Jacobian of the r cover
    from .evs import assemble_system, restrict_to_slice, PARAMS
    from .exactcore import psnf
    spec, charts = _chart1("r")
    S = assemble_system(spec, charts[0], named("KS"))
    R = restrict_to_slice(S, charts[0])
    res = psnf(R.matrix, PARAMS)
    replay_ok = replay(R.matrix, res.ops).rows == res.block_form().rows
    got = {"conormal_plus_orbit_failures": bad, "psnf_replay": replay_ok}
    exp = {"conormal_plus_orbit_failures": 0, "psnf_replay": True}
    return Check("property_suites", exp, got, "derived",
                 "dim conormal fibre + dim orbit = dim V on every orbit; PSNF log replay", got == exp,
                 note="Hessian symmetry, criticality and rank agreement are asserted inside the other checks")


CHECKS = [
    ("orbit_count", check_orbit_count),
    ("bijection_roundtrip", check_bijection),
    ("orbit_dimensions", check_orbit_dims),
    ("duality", check_duality),
    ("six_orbits_above_ks", check_six_orbits),
    ("conormal_stabilizer", check_conormal),
    ("jordan_partitions", check_jordan),
    ("cover_construction", check_covers),
    ("semismall_reports", check_semismall),
    ("generic_ranks", check_generic_ranks),
    ("singular_locus", check_singular),
    ("hessian_certificates", check_hessians),
    ("arthur_shape", check_arthur),
    ("property_suites", check_properties),
]


def _run_check(args):
    name, seed = args
    fn = dict(CHECKS)[name]
    try:
        return fn(seed)
    except Exception as e:  # a crashing check is a failed check
        return Check(name, None, None, "error", type(e).__name__, False, note=str(e))


def ks_verify(seed=0, jobs=1, only=None, log=None):
    names = [n for n, _ in CHECKS if not only or n in only]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            checks = list(pool.map(_run_check, [(n, seed) for n in names]))
    else:
        checks = []
        for n in names:
            t = time.time()
            checks.append(_run_check((n, seed)))
            if log:
                log("%-22s %s  %.1fs" % (n, "pass" if checks[-1].passed else "FAIL", time.time() - t))
    return VerifyReport(checks, seed)


# -- input helpers

def read_text(arg):
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg) as fh:
            return fh.read()
    return arg


def read_triangle(arg, mults=None):
    if arg in NAMED_TRIANGLES:
        return named(arg)
    text = read_text(arg).strip()
    if text.startswith("{"):
        T = RankTriangle.from_json(text)
    else:
        T = RankTriangle.parse(text)
    if mults is not None and tuple(T.mults) != tuple(mults):
        raise MultsMismatch("triangle has mults %s, expected %s" % (T.mults, tuple(mults)))
    return T


def parse_mults(s):
    try:
        return tuple(int(v) for v in s.split(","))
    except ValueError:
        raise ParseError("bad mults %r" % s)


def _emit(obj, args, pretty_text=None):
    if getattr(args, "pretty", False) and pretty_text is not None:
        print(pretty_text)
    else:
        print(json.dumps(obj, indent=None if not getattr(args, "pretty", False) else 2, sort_keys=True))


def _budget(args):
    from .evs import Budget
    return Budget(args.max_seconds, args.max_terms)


# -- commands

def cmd_orbits(args):
    orbs = enumerate_orbits(args.mults)
    if args.count:
        _emit({"count": len(orbs)}, args, str(len(orbs)))
    else:
        _emit([T.to_text() for T in orbs], args, "\n\n".join(T.pretty() for T in orbs))


def cmd_dual(args):
    T = read_triangle(args.triangle)
    D = compute_dual(T, seed=args.seed)
    _emit(D.to_text(), args, D.pretty())


def cmd_dim(args):
    T = read_triangle(args.triangle)
    _emit({"dim": orbit_dim(T), "dim_V": VoganSpace(T.mults).dim_V}, args)


def cmd_leq(args):
    A, B = read_triangle(args.a), read_triangle(args.b)
    _emit(closure_leq(A, B), args)


def cmd_between(args):
    lower = read_triangle(args.lower)
    cat = OrbitCatalog.build(lower.mults, args.cache_dir, args.seed)
    out = [C for C in cat.triangles if closure_lt(lower, C) and (not args.dual_above
                                                                   or closure_lt(lower, cat.dual(C)))]
    _emit([C.to_text() for C in out], args, "\n\n".join(C.pretty() for C in out))


def cmd_partition(args):
    T = read_triangle(args.triangle)
    _emit(list(jordan_partition(representative(T))), args)


def cmd_equations(args):
    from .vogan import closure_ideal, closure_ideal_count
    T = read_triangle(args.triangle)
    if args.count:
        _emit({"count": closure_ideal_count(T)}, args)
    else:
        _emit([g.to_str() for g in closure_ideal(T, args.side)], args)


def _cover(arg):
    from .cover import cover_from_triangle
    T = read_triangle(arg)
    name = arg if arg in NAMED_TRIANGLES else None
    return cover_from_triangle(T, name), T


def cmd_cover(args):
    spec, _ = _cover(args.triangle)
    obj = spec.to_json()
    obj["conditions_text"] = condition_strings(spec)
    _emit(obj, args, "\n".join(condition_strings(spec)))


def cmd_fibre(args):
    from .cover import fibre_dim_exact, fibre_over
    spec, T = _cover(args.cover)
    S = read_triangle(args.at) if args.at else named("KS")
    if not closure_leq(S, T):
        from .cover import PointOutsideClosure
        raise PointOutsideClosure("%s is not in the closure of %s" % (S.to_text(), T.to_text()))
    fd = fibre_over(spec, representative(S), counts=args.count)
    obj = fd.to_json()
    obj["dimension_from_chains"] = fibre_dim_exact(T, S)
    _emit(obj, args)


def cmd_semismall(args):
    from .cover import semismall_report
    spec, T = _cover(args.cover)
    rep = semismall_report(spec, T, check_counts=args.count)
    _emit(rep.to_json(), args)


def cmd_evs_rank(args):
    from .evs import assemble_system, expected_generic_rank
    spec, charts = _chart_args(args)
    S = assemble_system(spec, charts[0], read_triangle(args.target))
    r = expected_generic_rank(S, seed=args.seed)
    _emit({"cover": spec.name, "chart": charts[0].index, "nvars": S.nvars, "expected_rank": int(r),
           "sampled": list(r.samples), "seed": args.seed}, args)


def _chart_args(args):
    from .cover import charts_covering_fibre
    spec, _ = _cover(args.cover)
    charts = charts_covering_fibre(spec)
    if getattr(args, "chart", None):
        charts = [c for c in charts if c.index == args.chart]
        if not charts:
            raise ValueError("no chart with index %d" % args.chart)
    return spec, charts


def cmd_singular(args):
    from .evs import assemble_system, restrict_to_slice, singular_locus
    spec, charts = _chart_args(args)
    if not args.all_charts and not args.chart:
        charts = charts[:1]
    budget = _budget(args)
    out = []
    for ch in charts:
        S = assemble_system(spec, ch, read_triangle(args.target))
        R = restrict_to_slice(S, ch)
        L = singular_locus(R, budget=budget)
        obj = {"cover": spec.name, "chart": ch.index, "nvars": S.nvars, "free": list(R.free)}
        obj.update(L.to_json())
        obj["residual"] = [[str(e) for e in row] for row in obj["residual"]]
        out.append(obj)
    _emit(out, args)


def cmd_hessian(args):
    from .evs import assemble_system, cover_hessian, ks_self_hessian, restrict_to_slice, singular_locus
    budget = _budget(args)
    if args.cover in (None, "KS"):
        rep = ks_self_hessian(budget)
        _emit({"case": "KS", "hessian": rep.to_json(), "symmetric": rep.matrix.is_symmetric()}, args)
        return
    spec, charts = _chart_args(args)
    ch = charts[0]
    S = assemble_system(spec, ch, named("KS"))
    R = restrict_to_slice(S, ch)
    L = singular_locus(R, budget=budget)
    out = []
    for sol in L.solutions.solutions:
        rep = cover_hessian(S, R, sol, budget)
        out.append({"point": {k: v.to_str() for k, v in sorted(sol.items())}, "hessian": rep.to_json(),
                    "symmetric": rep.matrix.is_symmetric()})
    _emit({"case": spec.name, "chart": ch.index, "points": out}, args)


def cmd_ks_verify(args):
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    rep = ks_verify(args.seed, args.jobs, args.only, log)
    text = json.dumps(rep.to_json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if not rep.passed:
        return EXIT_CHECK


COMMANDS = {
    "orbits": cmd_orbits, "dual": cmd_dual, "dim": cmd_dim, "leq": cmd_leq, "between": cmd_between,
    "partition": cmd_partition, "equations": cmd_equations, "cover": cmd_cover, "fibre": cmd_fibre,
    "semismall": cmd_semismall, "evs-rank": cmd_evs_rank, "singular": cmd_singular, "hessian": cmd_hessian,
    "ks-verify": cmd_ks_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="voganish", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mults", type=parse_mults, default=KS_MULTS)
    common.add_argument("--pretty", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--max-seconds", type=float, default=None)
    common.add_argument("--max-terms", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[common], help=help)

    s = add("orbits", "list the orbits (rank triangles)")
    s.add_argument("--count", action="store_true")
    s = add("dual", "Zelevinsky dual of an orbit")
    s.add_argument("--triangle", required=True)
    s = add("dim", "orbit dimension")
    s.add_argument("--triangle", required=True)
    s = add("leq", "closure order A <= B")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s = add("between", "orbits strictly above a given one")
    s.add_argument("--lower", required=True)
    s.add_argument("--dual-above", action="store_true", help="also require the dual to lie above")
    s = add("partition", "Jordan type of the orbit representative")
    s.add_argument("--triangle", required=True)
    s = add("equations", "rank-minor generators of the orbit closure")
    s.add_argument("--triangle", required=True)
    s.add_argument("--side", choices=["V", "V*"], default="V")
    s.add_argument("--count", action="store_true")
    s = add("cover", "flag conditions of the cover built from a triangle")
    s.add_argument("--triangle", required=True)
    s = add("fibre", "fibre of a cover over an orbit")
    s.add_argument("--cover", required=True)
    s.add_argument("--at", default=None, help="stratum (default KS)")
    s.add_argument("--count", action="store_true", help="also fit point counts")
    s = add("semismall", "fibre dimensions over all strata")
    s.add_argument("--cover", required=True)
    s.add_argument("--count", action="store_true", help="cross-check dimensions by point counts")
    for name, help in (("evs-rank", "generic Jacobian rank of a cover chart"),
                       ("singular", "singular locus on the slice")):
        s = add(name, help)
        s.add_argument("--cover", required=True)
        s.add_argument("--chart", type=int, default=None)
        s.add_argument("--target", default="KS")
        if name == "singular":
            s.add_argument("--all-charts", action="store_true")
    s = add("hessian", "Hessian certificate (KS self-case or a cover)")
    s.add_argument("--cover", default=None)
    s.add_argument("--chart", type=int, default=None)
    s = add("ks-verify", "run every check and write the report")
    s.add_argument("--out", default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--only", nargs="*", default=None)
    s.add_argument("--verbose", action="store_true")
    return p


def main(argv=None):
    from .cover import CountOverflowBudget
    from .evs import BudgetExceeded, RankDisagreement, NotCritical
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else 0
    try:
        return COMMANDS[args.command](args) or 0
    except (ParseError, json.JSONDecodeError) as e:
        print("parse error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except (BudgetExceeded, CountOverflowBudget) as e:
        print("budget exceeded: %s" % e, file=sys.stderr)
        return EXIT_BUDGET
    except (RankDisagreement, NotCritical, CheckFailed) as e:
        print("check failed: %s" % e, file=sys.stderr)
        return EXIT_CHECK
    except (MultsMismatch, SupportMismatch, NegativeRank, ValueError, KeyError) as e:
        print("precondition violated: %s" % e, file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
