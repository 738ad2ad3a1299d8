"""Invariant signatures of concrete wave-class equations and the
signature-based equivalence criterion.

For an equation u_tt - u_xx = f(u, sigma) the verified second-order basis is
evaluated on f, producing a pair (rho1, rho2) of exact rational functions of
(u, sigma).  Equations with sigma*f_sigma - f identically zero sit on the
special manifold and carry no signature.

The criterion compares signatures at identical (u, sigma) arguments; that is
the published statement, sound as-is for constant signatures.  An orbit-aware
grid search over affine u-reparameterizations and rational dilations is
offered separately and clearly labeled heuristic.

A finite-transformation oracle provides the exact push-forward of f under
u' = phi(u) composed with a t, x dilation, for end-to-end validation.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .canonical import CanonicalForm, canonicalize, equals
from .expr import (
    Const,
    Coord,
    Expr,
    add,
    as_expr,
    diff_partial,
    free_coordinates,
    mul,
    parse,
    pow_,
    substitute,
    to_string,
)


class NonInvertibleError(Exception):
    """The supplied reparameterization has no usable inverse."""


class DegenerateEquationError(Exception):
    """The operation requires sigma*f_sigma - f != 0."""


_EQUATION_COORDS = ("u", "sigma")


@dataclass(frozen=True)
class EquationInstance:
    """One member of the class, given by its parameter function f(u, sigma)."""

    f: Expr

    def __post_init__(self):
        object.__setattr__(self, "f", as_expr(self.f))
        extra = free_coordinates(self.f) - set(_EQUATION_COORDS)
        if extra:
            raise ValueError(
                f"the parameter function may only use (u, sigma); found "
                f"{sorted(extra)}")

    @classmethod
    def from_text(cls, text: str) -> "EquationInstance":
        return cls(parse(text, _EQUATION_COORDS))

    def __str__(self):
        return to_string(self.f)


def _special_manifold_residual(f: Expr) -> Expr:
    return add(mul(Coord("sigma"), diff_partial(f, "sigma")),
               mul(Const(Fraction(-1)), f))


@dataclass(frozen=True)
class Signature:
    """Canonical pair (rho1, rho2) in (u, sigma); absent when degenerate."""

    degenerate: bool
    rho1: CanonicalForm | None = None
    rho2: CanonicalForm | None = None

    def matches(self, other: "Signature") -> bool:
        if self.degenerate or other.degenerate:
            return False
        return self.rho1 == other.rho1 and self.rho2 == other.rho2

    def as_dict(self) -> dict:
        if self.degenerate:
            return {"degenerate": True, "rho1": None, "rho2": None}
        return {"degenerate": False, "rho1": str(self.rho1),
                "rho2": str(self.rho2)}


def signature_of(eq: EquationInstance) -> Signature:
    """Evaluate the verified second-order basis on f and its partials."""
    f = eq.f
    f_u = diff_partial(f, "u")
    f_s = diff_partial(f, "sigma")
    f_ss = diff_partial(f_s, "sigma")
    f_su = diff_partial(f_s, "u")
    sigma = Coord("sigma")
    r = _special_manifold_residual(f)
    if canonicalize(r).is_zero():
        return Signature(degenerate=True)
    rho1 = mul(pow_(sigma, 2), f_ss, pow_(r, -1))
    rho2 = mul(
        add(mul(Const(Fraction(-2)), pow_(sigma, 2), f, f_ss),
            mul(sigma, add(f_u, mul(Const(Fraction(-1)), sigma, f_su))),
            mul(f, r)),
        pow_(r, -2),
    )
    return Signature(False, canonicalize(rho1), canonicalize(rho2))


class Verdict(str, enum.Enum):
    EQUIVALENT = "equivalent-per-criterion"
    NOT_EQUIVALENT = "not-equivalent"
    BOTH_DEGENERATE = "both-degenerate"
    MIXED_DEGENERATE = "mixed-degenerate"


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: Verdict
    signature_a: Signature
    signature_b: Signature

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "a": self.signature_a.as_dict(),
            "b": self.signature_b.as_dict(),
        }


def check_equivalence(a: EquationInstance, b: EquationInstance) -> EquivalenceResult:
    """The literal criterion: equal signatures at identical (u, sigma).

    Degenerate equations fall outside the criterion and get their own
    verdicts instead of an equivalence claim.
    """
    sig_a = signature_of(a)
    sig_b = signature_of(b)
    if sig_a.degenerate and sig_b.degenerate:
        verdict = Verdict.BOTH_DEGENERATE
    elif sig_a.degenerate or sig_b.degenerate:
        verdict = Verdict.MIXED_DEGENERATE
    elif sig_a.matches(sig_b):
        verdict = Verdict.EQUIVALENT
    else:
        verdict = Verdict.NOT_EQUIVALENT
    return EquivalenceResult(verdict, sig_a, sig_b)


@dataclass(frozen=True)
class FiniteTransformation:
    """u' = phi(u) composed with the t, x dilation scaling sigma by
    ``dilation``.  The inverse must be supplied; it is verified, not
    computed."""

    phi: Expr
    phi_inverse: Expr
    dilation: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "phi", as_expr(self.phi))
        object.__setattr__(self, "phi_inverse", as_expr(self.phi_inverse))
        object.__setattr__(self, "dilation", Fraction(self.dilation))
        for label, e in (("phi", self.phi), ("phi_inverse", self.phi_inverse)):
            extra = free_coordinates(e) - {"u"}
            if extra:
                raise ValueError(f"{label} must be an expression in u alone")
        if self.dilation <= 0:
            raise ValueError("the dilation factor must be positive")
        if canonicalize(diff_partial(self.phi, "u")).is_zero():
            raise NonInvertibleError("phi has identically zero derivative")
        composed = substitute(self.phi, {"u": self.phi_inverse})
        if not equals(composed, Coord("u")):
            raise NonInvertibleError(
                "phi(phi_inverse(u)) does not simplify to u")

    def __str__(self):
        return (f"u -> {to_string(self.phi)}, sigma scale {self.dilation}")


def apply_finite_transformation(eq: EquationInstance,
                                t: FiniteTransformation) -> EquationInstance:
    """Exact push-forward of the parameter function.

    With w = phi_inverse(u) and c the sigma scale, the new parameter function
    is c * (phi'(w) * f(w, sigma/(c*phi'(w)^2)) + phi''(w) * sigma/(c*phi'(w)^2)).
    Atom-bearing f can only be pushed forward when the substitution keeps
    atom arguments plain coordinates (e.g. identity phi with a dilation).
    """
    c = Const(t.dilation)
    w = t.phi_inverse
    phi_prime = diff_partial(t.phi, "u")
    phi_second = diff_partial(phi_prime, "u")
    pp_w = substitute(phi_prime, {"u": w})
    ps_w = substitute(phi_second, {"u": w})
    sigma_scaled = mul(Coord("sigma"), pow_(mul(c, pow_(pp_w, 2)), -1))
    f_moved = substitute(eq.f, {"u": w, "sigma": sigma_scaled})
    new_f = mul(c, add(mul(pp_w, f_moved), mul(ps_w, sigma_scaled)))
    return EquationInstance(canonicalize(new_f).to_expr())


def pde_residual(eq: EquationInstance, rho1: Expr, rho2: Expr) -> tuple[Expr, Expr]:
    """Residuals of the signature system at (rho1, rho2); (0, 0) certifies
    membership in that equivalence class."""
    sig = signature_of(eq)
    if sig.degenerate:
        raise DegenerateEquationError(
            "the equation lies on the special manifold sigma*f_sigma - f = 0")
    first = canonicalize(add(sig.rho1.to_expr(),
                             mul(Const(Fraction(-1)), as_expr(rho1)))).to_expr()
    second = canonicalize(add(sig.rho2.to_expr(),
                              mul(Const(Fraction(-1)), as_expr(rho2)))).to_expr()
    return first, second


# ---------------------------------------------------------------------------
# heuristic orbit search (labeled: not part of the literal criterion)

_ORBIT_SCALES = (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3, -3,
                 Fraction(1, 3), Fraction(-1, 3))
_ORBIT_SHIFTS = (0, 1, -1, 2, -2)
_ORBIT_DILATIONS = (1, 2, 3, 4, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4),
                    9, Fraction(1, 9))


def affine_transformation(a, b, c) -> FiniteTransformation:
    """u' = a*u + b with sigma scale c; the inverse is supplied exactly."""
    a = Fraction(a)
    if a == 0:
        raise NonInvertibleError("affine scale must be nonzero")
    b = Fraction(b)
    u = Coord("u")
    phi = add(mul(Const(a), u), Const(b))
    inverse = mul(add(u, Const(-b)), Const(1 / a))
    return FiniteTransformation(phi, inverse, Fraction(c))


def search_orbit_match(
    a: EquationInstance,
    b: EquationInstance,
    scales=_ORBIT_SCALES,
    shifts=_ORBIT_SHIFTS,
    dilations=_ORBIT_DILATIONS,
) -> FiniteTransformation | None:
    """Heuristic: scan affine reparameterizations and rational dilations for
    a transformation whose push-forward of ``a`` matches ``b``'s signature
    literally.  Finding none proves nothing."""
    sig_b = signature_of(b)
    if sig_b.degenerate:
        return None
    from .expr import ExprError

    for av, bv, cv in itertools.product(scales, shifts, dilations):
        t = affine_transformation(av, bv, cv)
        try:
            moved = apply_finite_transformation(a, t)
        except (ExprError, ValueError):
            continue
        if signature_of(moved).matches(sig_b):
            return t
    return None


# ---------------------------------------------------------------------------
# corpus classification


def class_id_of(sig: Signature) -> str:
    if sig.degenerate:
        return "degenerate"
    digest = hashlib.sha256(f"{sig.rho1}|{sig.rho2}".encode()).hexdigest()
    return digest[:12]


def classify_corpus(lines: list[str]) -> list[dict]:
    """One record per corpus expression: signature fields plus a stable
    class id (hash of the canonical signature strings)."""
    records = []
    for line in lines:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        eq = EquationInstance.from_text(text)
        sig = signature_of(eq)
        record = {"input": text, **sig.as_dict(), "class_id": class_id_of(sig)}
        records.append(record)
    return records
