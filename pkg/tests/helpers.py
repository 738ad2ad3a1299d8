"""Shared exact-comparison helpers for the test suite."""

from fractions import Fraction

from wavesym.canonical import canonicalize, equals
from wavesym.expr import Const, add, mul
from wavesym.vfields import VectorField


def field_is_zero(f: VectorField) -> bool:
    return all(canonicalize(c).is_zero() for c in f.coefficients.values())


def fields_equal(a: VectorField, b: VectorField) -> bool:
    for v in set(a.coefficients) | set(b.coefficients):
        if not equals(a.coefficient(v), b.coefficient(v)):
            return False
    return True


def field_combination(*pairs) -> VectorField:
    """Linear combination sum(c * X) of fields on a common chart."""
    coords = set()
    for _, f in pairs:
        coords |= set(f.coefficients)
    out = {}
    for v in coords:
        out[v] = add(*(mul(Const(Fraction(c)), f.coefficient(v))
                       for c, f in pairs))
    return VectorField(pairs[0][1].space, out)


def in_integer_lattice(vector, basis) -> bool:
    """Whether ``vector`` is an integer combination of the basis vectors
    (enough for the rank-one kernels exercised here: check both signs)."""
    if not basis:
        return all(x == 0 for x in vector)
    for b in basis:
        if tuple(vector) == tuple(b) or tuple(-x for x in vector) == tuple(b):
            return True
    return False
