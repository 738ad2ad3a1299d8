"""Vector fields on jet charts.

A field is a first-order operator sum(coeff_v * d_v) stored as a sparse map
from coordinate names to coefficient expressions.  Prolongation follows the
usual recursion zeta_{J,i} = D_i(zeta_J) - sum_j f_{J,j} D_i(xi^j) with
zeta_empty the coefficient on the dependent coordinate.

Point transformations acting on (t, x, u) induce generators on the chart
(t, x, u, sigma, f) via their second prolongation in the u-jet: the increments
of sigma = u_t^2 - u_x^2 and of f = u_tt - u_xx are computed, u_tt is
eliminated through the equation itself and u_t^2 through sigma, and the
result must come out independent of the remaining u-derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .canonical import Poly, canonicalize, _normalized
from .expr import (
    Coord,
    Const,
    Expr,
    ZERO,
    add,
    as_expr,
    diff_partial,
    free_coordinates,
    mul,
    substitute,
    to_string,
)
from .jetspace import JetSpace, u_jet


class NotProjectableError(Exception):
    """A point action does not induce a well-defined generator on the
    (u, sigma, f) chart."""


def _simplify(e: Expr) -> Expr:
    return canonicalize(e).to_expr()


@dataclass(frozen=True)
class VectorField:
    space: JetSpace
    coefficients: Mapping[str, Expr] = field(default_factory=dict)

    def __post_init__(self):
        cleaned: dict[str, Expr] = {}
        for name, coeff in self.coefficients.items():
            if name not in self.space:
                raise ValueError(f"{name!r} is not a coordinate of the chart")
            e = as_expr(coeff)
            if not (isinstance(e, Const) and e.value == 0):
                cleaned[name] = e
        object.__setattr__(self, "coefficients", cleaned)

    def coefficient(self, name: str) -> Expr:
        return self.coefficients.get(name, ZERO)

    def is_zero(self) -> bool:
        return all(canonicalize(c).is_zero() for c in self.coefficients.values())

    def __str__(self):
        parts = [f"({to_string(c)}) d_{v}" for v, c in self.coefficients.items()]
        return " + ".join(parts) if parts else "0"


def apply(x: VectorField, f_expr: Expr) -> Expr:
    """X(F) = sum coeff_v * d_v F, canonicalized.

    Atom-free inputs with polynomial coefficients take a direct route on the
    canonical fraction N/D via X(N/D) = (X(N) D - N X(D)) / D^2, which keeps
    the rational-invariant computations from churning expression trees.
    """
    fast = _apply_polynomial(x, f_expr)
    if fast is not None:
        return fast
    free = free_coordinates(f_expr)
    terms = []
    for name, coeff in x.coefficients.items():
        if name not in free:
            continue
        terms.append(mul(coeff, diff_partial(f_expr, name)))
    return _simplify(add(*terms))


def _apply_polynomial(x: VectorField, f_expr: Expr) -> Expr | None:
    cf = canonicalize(f_expr)
    num, den = cf.numerator, cf.denominator
    if num.has_atom_generators() or den.has_atom_generators():
        return None
    coeff_polys = {}
    for name, coeff in x.coefficients.items():
        ccf = canonicalize(coeff)
        if not ccf.is_polynomial() or ccf.numerator.has_atom_generators():
            return None
        coeff_polys[name] = ccf.numerator

    def derive(p: Poly) -> Poly:
        out = Poly()
        for name, cp in coeff_polys.items():
            d = p.diff(name)
            if not d.is_zero():
                out = out + cp * d
        return out

    x_num = derive(num)
    if den.is_one():
        return _normalized(x_num, den).to_expr()
    x_den = derive(den)
    return _normalized(x_num * den - num * x_den, den * den).to_expr()


def bracket(x: VectorField, y: VectorField) -> VectorField:
    """[X, Y], coefficient on v is X(coeff_Y(v)) - Y(coeff_X(v))."""
    if x.space != y.space:
        raise ValueError("bracket requires fields on the same chart")
    coords = set(x.coefficients) | set(y.coefficients)
    coeffs: dict[str, Expr] = {}
    for v in coords:
        e = add(apply(x, y.coefficient(v)),
                mul(Const(Fraction(-1)), apply(y, x.coefficient(v))))
        e = _simplify(e)
        if not (isinstance(e, Const) and e.value == 0):
            coeffs[v] = e
    return VectorField(x.space, coeffs)


def prolong(x: VectorField, target_order: int, given_order: int = 0) -> VectorField:
    """Lift to the order-``target_order`` chart.

    Coefficients on derivative coordinates up to ``given_order`` are taken
    from the field as given (zero when absent); higher ones come from the
    zeta-recursion.  Lowering the order just restricts the chart.
    """
    space = JetSpace(target_order, x.space.passengers, x.space.bases,
                     x.space.dependent)
    coeffs = {v: c for v, c in x.coefficients.items() if v in space}
    if target_order <= given_order:
        return VectorField(space, coeffs)
    b0, b1 = space.bases
    xi = {b0: x.coefficient(b0), b1: x.coefficient(b1)}
    zeta: dict[tuple[int, int], Expr] = {}
    for m in range(given_order + 1):
        for a in range(m, -1, -1):
            name = space.derivative_name(a, m - a)
            zeta[(a, m - a)] = coeffs.get(name, ZERO)
    for m in range(given_order + 1, target_order + 1):
        for a in range(m, -1, -1):
            b = m - a
            if a > 0:
                parent, direction = (a - 1, b), b0
            else:
                parent, direction = (0, b - 1), b1
            pa, pb = parent
            e = space.total_derivative(zeta[parent], direction)
            for j, base in enumerate(space.bases):
                d_xi = space.total_derivative(xi[base], direction)
                bumped = (pa + 1, pb) if j == 0 else (pa, pb + 1)
                e = add(e, mul(Const(Fraction(-1)),
                               Coord(space.derivative_name(*bumped)), d_xi))
            z = _simplify(e)
            zeta[(a, b)] = z
            if not (isinstance(z, Const) and z.value == 0):
                coeffs[space.derivative_name(a, b)] = z
    return VectorField(space, coeffs)


# ---------------------------------------------------------------------------
# point actions


@dataclass(frozen=True)
class PointAction:
    """Infinitesimal point transformation of (t, x, u); coefficients are
    expressions in (t, x, u).  Explicit first-prolongation coefficients on
    (u_t, u_x) may be supplied, otherwise they are derived."""

    xi_t: Expr
    xi_x: Expr
    eta_u: Expr
    zeta_ut: Expr | None = None
    zeta_ux: Expr | None = None

    def __post_init__(self):
        for label, e in (("xi_t", self.xi_t), ("xi_x", self.xi_x),
                         ("eta_u", self.eta_u)):
            bad = free_coordinates(as_expr(e)) - {"t", "x", "u"}
            if bad:
                raise ValueError(f"{label} may only use (t, x, u); found {sorted(bad)}")
        for label, e in (("zeta_ut", self.zeta_ut), ("zeta_ux", self.zeta_ux)):
            if e is None:
                continue
            bad = free_coordinates(as_expr(e)) - {"t", "x", "u", "u_t", "u_x"}
            if bad:
                raise ValueError(
                    f"{label} may only use (t, x, u, u_t, u_x); found {sorted(bad)}")


def _fold_even_powers(p: Poly, var: str, replacement: Poly) -> Poly:
    """Rewrite var^k as var^(k mod 2) * replacement^(k div 2)."""
    out = Poly()
    for e, coeff in p.coeffs_in(var).items():
        piece = coeff * (replacement ** (e // 2))
        if e % 2:
            piece = piece * Poly.var(var)
        out = out + piece
    return out


def induce_from_point_action(action: PointAction) -> VectorField:
    """Generator on the chart (t, x, u, sigma, f) induced by a point action.

    The second prolongation in the u-jet gives the increments of sigma and f;
    u_tt is eliminated first via u_tt = f + u_xx, then u_t^2 via
    u_t^2 = sigma + u_x^2.  Residual dependence on u_t, u_x, u_tt, u_tx or
    u_xx raises NotProjectableError.
    """
    jet = u_jet(2)
    xi_t = as_expr(action.xi_t)
    xi_x = as_expr(action.xi_x)
    eta = as_expr(action.eta_u)

    def dt(e: Expr) -> Expr:
        return jet.total_derivative(e, "t")

    def dx(e: Expr) -> Expr:
        return jet.total_derivative(e, "x")

    u_t, u_x = Coord("u_t"), Coord("u_x")
    u_tt, u_tx, u_xx = Coord("u_tt"), Coord("u_tx"), Coord("u_xx")
    minus = Const(Fraction(-1))

    if action.zeta_ut is not None:
        zeta_t = as_expr(action.zeta_ut)
    else:
        zeta_t = add(dt(eta), mul(minus, u_t, dt(xi_t)), mul(minus, u_x, dt(xi_x)))
    if action.zeta_ux is not None:
        zeta_x = as_expr(action.zeta_ux)
    else:
        zeta_x = add(dx(eta), mul(minus, u_t, dx(xi_t)), mul(minus, u_x, dx(xi_x)))

    zeta_tt = add(dt(zeta_t), mul(minus, u_tt, dt(xi_t)), mul(minus, u_tx, dt(xi_x)))
    zeta_xx = add(dx(zeta_x), mul(minus, u_tx, dx(xi_t)), mul(minus, u_xx, dx(xi_x)))

    delta_sigma = add(mul(Const(Fraction(2)), u_t, zeta_t),
                      mul(Const(Fraction(-2)), u_x, zeta_x))
    delta_f = add(zeta_tt, mul(minus, zeta_xx))

    sigma_plus_ux2 = Poly.var("sigma") + Poly.var("u_x") * Poly.var("u_x")
    f_plus_uxx = Poly.var("f") + Poly.var("u_xx")
    residual_vars = ("u_t", "u_x", "u_tt", "u_tx", "u_xx")

    def project(e: Expr, label: str) -> Expr:
        e = substitute(e, {"u_tt": add(Coord("f"), u_xx)})
        cf = canonicalize(e)
        num = _fold_even_powers(cf.numerator.substitute("u_tt", f_plus_uxx),
                                "u_t", sigma_plus_ux2)
        den = _fold_even_powers(cf.denominator.substitute("u_tt", f_plus_uxx),
                                "u_t", sigma_plus_ux2)
        reduced = _normalized(num, den)
        leftover = ((reduced.numerator.variables() | reduced.denominator.variables())
                    & set(residual_vars))
        if leftover:
            raise NotProjectableError(
                f"the induced {label}-coefficient still depends on "
                f"{sorted(leftover)}; the point action does not project to "
                f"the (u, sigma, f) chart"
            )
        return reduced.to_expr()

    coeffs = {
        "t": _simplify(xi_t),
        "x": _simplify(xi_x),
        "u": _simplify(eta),
        "sigma": project(delta_sigma, "sigma"),
        "f": project(delta_f, "f"),
    }
    return VectorField(JetSpace(0), coeffs)
