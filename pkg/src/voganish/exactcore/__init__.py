"""Exact arithmetic: rationals, sparse polynomials, rational functions, matrices."""

from .poly import REGISTRY, QPoly, Rat, Registry, as_rat, const, var, var_index
from .ratfunc import QRatFunc, poly_gcd, poly_div_exact, to_field
from .linalg import (det, det_expand, identity, kernel_basis, matmul, minors, rank,
                     rank_over_field, rref, solve, transpose, zeros)
from .matrix import GenericRank, PolyMatrix, generic_rank, symbolic_rank
from .psnf import PSNFResult, ops_invertible, psnf, replay
from .fields import GF, QQ, gaussian_binomial


def poly_arith(p, q, op):
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    raise ValueError("op must be 'add' or 'mul'")


def poly_derivative(p, v):
    return p.derivative(v)


def substitute(p, assignment):
    return p.substitute(assignment)
