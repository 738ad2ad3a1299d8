"""The discretized equivalence algebra of the wave class and its structure.

Generators are Y0 (boost/rotation of t, x), Y1, Y2 (translations), Y3
(dilation) and the family Y^k obtained from the u-reparameterization
generator at the monomials u^k.  Two coefficient sources are supported:

* ``derived``       -- induced from the point actions by second prolongation
                       and elimination; this source is self-consistent.
* ``paper_printed`` -- verbatim transcription of the published first-order
                       coefficient formulas, carried so their documented
                       internal inconsistencies can be reported rather than
                       silently overwritten.

Structure is verified exactly: brackets are decomposed in the basis by an
exact linear solve on polynomial coefficients.  Generic ranks of prolonged
coefficient matrices are computed by exact evaluation at seeded random
integer points, taking the maximum over samples.
"""

from __future__ import annotations

import enum
import functools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .canonical import canonicalize
from .expr import (
    Const,
    Coord,
    Expr,
    ONE,
    ZERO,
    ZeroDenominatorError,
    add,
    eval_at,
    mul,
    pow_,
)
from .jetspace import JetSpace
from .vfields import PointAction, VectorField, bracket, induce_from_point_action, prolong

DEFAULT_SEED = 1729
DEFAULT_SAMPLES = 8
DEFAULT_COORDINATE_RANGE = 50
DEFAULT_K = 6
DEFAULT_K_MAX = 12
_MAX_RESAMPLES = 200


class SamplingExhaustedError(Exception):
    """No valid evaluation point was found within the retry budget."""


class NotSolvableError(Exception):
    """A manifold constraint cannot be solved for any chart coordinate."""


class CapExceededError(Exception):
    """The truncation sweep hit its cap before the rank stabilized."""


class Source(str, enum.Enum):
    DERIVED = "derived"
    PAPER_PRINTED = "paper"


FAMILY_PREFIX = "Y^"
STATIC_NAMES = ("Y0", "Y1", "Y2", "Y3")


def family_name(k: int) -> str:
    return f"{FAMILY_PREFIX}{k}"


def _u_power(k: int, drop: int) -> Expr:
    """d^drop/du^drop of u^k: the falling-factorial coefficient times
    u^(k-drop), identically zero once drop exceeds k."""
    if drop > k:
        return ZERO
    c = 1
    for i in range(drop):
        c *= k - i
    return mul(Const(Fraction(c)), pow_(Coord("u"), k - drop))


@functools.lru_cache(maxsize=None)
def _derived_static(name: str) -> VectorField:
    t, x = Coord("t"), Coord("x")
    actions = {
        "Y0": PointAction(x, t, ZERO),
        "Y1": PointAction(ONE, ZERO, ZERO),
        "Y2": PointAction(ZERO, ONE, ZERO),
        "Y3": PointAction(t, x, ZERO),
    }
    return induce_from_point_action(actions[name])


@functools.lru_cache(maxsize=None)
def _derived_family(k: int) -> VectorField:
    return induce_from_point_action(PointAction(ZERO, ZERO, _u_power(k, 0)))


def _printed_static(name: str) -> VectorField:
    space = JetSpace(1)
    t, x = Coord("t"), Coord("x")
    if name == "Y0":
        return VectorField(space, {"t": x, "x": t})
    if name == "Y1":
        return VectorField(space, {"t": ONE})
    if name == "Y2":
        return VectorField(space, {"x": ONE})
    # printed Y3 carries -sigma (not -2*sigma) and no f_sigma coefficient
    return VectorField(space, {
        "t": t,
        "x": x,
        "sigma": mul(Const(Fraction(-1)), Coord("sigma")),
        "f": mul(Const(Fraction(-2)), Coord("f")),
        "f_u": mul(Const(Fraction(-2)), Coord("f_u")),
    })


def _printed_family(k: int) -> VectorField:
    space = JetSpace(1)
    sigma, f, f_sigma = Coord("sigma"), Coord("f"), Coord("f_sigma")
    phi = _u_power(k, 0)
    phi1 = _u_power(k, 1)
    phi2 = _u_power(k, 2)
    phi3 = _u_power(k, 3)
    two = Const(Fraction(2))
    return VectorField(space, {
        "u": phi,
        "sigma": mul(two, phi1, sigma),
        # printed f-coefficient has the doubled bracket 2(phi' f + phi'' sigma)
        "f": mul(two, add(mul(phi1, f), mul(phi2, sigma))),
        "f_u": add(mul(phi2, f), mul(phi3, sigma),
                   mul(Const(Fraction(-2)), sigma, f_sigma, phi2)),
        "f_sigma": add(phi2, mul(Const(Fraction(-1)), f_sigma, phi1)),
    })


@dataclass(frozen=True)
class GeneratorSet:
    """The generators [Y0, Y1, Y2, Y3, Y^0, ..., Y^K] for one source.

    ``base_order`` records at which jet order the stored coefficients are
    authoritative: 0 for the derived source (everything above is produced by
    the prolongation recursion), 1 for the printed source (the published
    first-order coefficients are data, not recomputed).
    """

    source: Source
    truncation: int
    names: tuple[str, ...]
    base_fields: tuple[VectorField, ...]
    base_order: int
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def field_named(self, name: str) -> VectorField:
        return self.base_fields[self.names.index(name)]

    def prolonged(self, order: int) -> tuple[VectorField, ...]:
        if order not in self._cache:
            self._cache[order] = tuple(
                prolong(f, order, given_order=self.base_order)
                for f in self.base_fields
            )
        return self._cache[order]

    def prolonged_named(self, order: int) -> dict[str, VectorField]:
        return dict(zip(self.names, self.prolonged(order)))


def build_generators(source: Source | str = Source.DERIVED,
                     truncation: int = DEFAULT_K) -> GeneratorSet:
    """Construct the generator list for the chosen coefficient source."""
    source = Source(source)
    if truncation < 0:
        raise ValueError("truncation must be non-negative")
    names = STATIC_NAMES + tuple(family_name(k) for k in range(truncation + 1))
    if source is Source.DERIVED:
        fields = tuple(_derived_static(n) for n in STATIC_NAMES) + tuple(
            _derived_family(k) for k in range(truncation + 1))
        base_order = 0
    else:
        fields = tuple(_printed_static(n) for n in STATIC_NAMES) + tuple(
            _printed_family(k) for k in range(truncation + 1))
        base_order = 1
    return GeneratorSet(source, truncation, names, fields, base_order)


# ---------------------------------------------------------------------------
# exact span decomposition and the commutator table


def _field_coefficient_table(f: VectorField) -> dict[tuple[str, tuple], Fraction]:
    """Flatten a field with polynomial coefficients into (coordinate,
    monomial) -> rational entries."""
    out: dict[tuple[str, tuple], Fraction] = {}
    for v, coeff in f.coefficients.items():
        cf = canonicalize(coeff)
        if not cf.is_polynomial():
            raise ValueError(f"coefficient on {v} is not polynomial: {coeff}")
        for m, c in cf.numerator.terms.items():
            out[(v, m)] = c
    return out


def solve_in_span(basis: dict[str, VectorField],
                  target: VectorField) -> dict[str, Fraction] | None:
    """Express ``target`` as an exact rational combination of ``basis``
    fields, or None when it lies outside their span."""
    names = list(basis)
    tables = [_field_coefficient_table(basis[n]) for n in names]
    target_table = _field_coefficient_table(target)
    keys = sorted(set().union(target_table, *tables))
    a = [[table.get(key, Fraction(0)) for table in tables] for key in keys]
    b = [target_table.get(key, Fraction(0)) for key in keys]
    solution = linalg.solve(a, b)
    if solution is None:
        return None
    return {n: c for n, c in zip(names, solution) if c != 0}


@dataclass(frozen=True)
class BracketEntry:
    left: str
    right: str
    decomposition: dict[str, Fraction] | None  # None means outside the span

    @property
    def in_span(self) -> bool:
        return self.decomposition is not None

    def is_zero(self) -> bool:
        return self.decomposition == {}


@dataclass(frozen=True)
class CommutatorTable:
    source: Source
    truncation: int
    entries: dict[tuple[str, str], BracketEntry]

    def entry(self, left: str, right: str) -> BracketEntry:
        return self.entries[(left, right)]

    def outside_span(self) -> list[tuple[str, str]]:
        return [pair for pair, e in self.entries.items() if not e.in_span]


def _pair_brackets(g: GeneratorSet) -> dict[tuple[str, str], VectorField]:
    key = "brackets"
    if key not in g._cache:
        fields = g.prolonged_named(1)
        out = {}
        names = list(g.names)
        for i, left in enumerate(names):
            for right in names[i + 1:]:
                out[(left, right)] = bracket(fields[left], fields[right])
        g._cache[key] = out
    return g._cache[key]


def commutator_table(g: GeneratorSet) -> CommutatorTable:
    """Every pairwise bracket, decomposed exactly in the generator basis."""
    fields = g.prolonged_named(1)
    entries = {}
    for (left, right), br in _pair_brackets(g).items():
        entries[(left, right)] = BracketEntry(left, right, solve_in_span(fields, br))
    return CommutatorTable(g.source, g.truncation, entries)


def expected_relations(truncation: int) -> dict[tuple[str, str], dict[str, Fraction]]:
    """The published commutation table as exact decompositions:
    [Y^n, Y^m] = (m-n) Y^(m+n-1) while the result index stays within the
    truncation, the Y0..Y3 block, and zeros elsewhere."""
    out: dict[tuple[str, str], dict[str, Fraction]] = {
        ("Y0", "Y1"): {"Y2": Fraction(-1)},
        ("Y0", "Y2"): {"Y1": Fraction(-1)},
        ("Y0", "Y3"): {},
        ("Y1", "Y2"): {},
        ("Y1", "Y3"): {"Y1": Fraction(1)},
        ("Y2", "Y3"): {"Y2": Fraction(1)},
    }
    for k in range(truncation + 1):
        for name in STATIC_NAMES:
            out[(name, family_name(k))] = {}
    for n in range(truncation + 1):
        for m in range(n + 1, truncation + 1):
            if m + n - 1 <= truncation:
                out[(family_name(n), family_name(m))] = {
                    family_name(m + n - 1): Fraction(m - n)}
    return out


def verify_commutator_table(g: GeneratorSet) -> dict:
    """Compare the exact table against the published relations.

    Returns a report with one status per expected relation ('exact',
    'mismatch', or 'outside_span') plus any brackets outside the span that
    the published table says nothing about.
    """
    table = commutator_table(g)
    expected = expected_relations(g.truncation)
    statuses = {}
    for pair, decomposition in expected.items():
        entry = table.entry(*pair)
        if entry.decomposition is None:
            statuses[pair] = "outside_span"
        elif entry.decomposition == decomposition:
            statuses[pair] = "exact"
        else:
            statuses[pair] = "mismatch"
    unexpected = [pair for pair in table.outside_span() if pair in expected]
    all_exact = all(s == "exact" for s in statuses.values())
    return {
        "source": g.source.value,
        "truncation": g.truncation,
        "relations_checked": len(statuses),
        "all_exact": all_exact,
        "statuses": statuses,
        "failing": sorted(p for p, s in statuses.items() if s != "exact"),
        "outside_span_expected_zero_or_family": unexpected,
        "table": table,
    }


def bracket_closed(g: GeneratorSet, subset: tuple[str, ...]) -> bool:
    """Whether the span of the named subset is closed under brackets."""
    fields = g.prolonged_named(1)
    chosen = {n: fields[n] for n in subset}
    brackets = _pair_brackets(g)
    names = list(subset)
    for i, left in enumerate(names):
        for right in names[i + 1:]:
            pair = (left, right) if (left, right) in brackets else (right, left)
            if solve_in_span(chosen, brackets[pair]) is None:
                return False
    return True


def closure_max_k(g: GeneratorSet) -> int:
    """Largest k with span{Y0..Y3, Y^0..Y^k} bracket-closed."""
    if g.truncation < 4:
        raise ValueError("closure sweep needs truncation K >= 4")
    best = -1
    for k in range(g.truncation + 1):
        subset = STATIC_NAMES + tuple(family_name(i) for i in range(k + 1))
        if bracket_closed(g, subset):
            best = k
    return best


# ---------------------------------------------------------------------------
# generic ranks by exact sampling


@dataclass(frozen=True)
class RankReport:
    order: int
    rank: int
    samples_used: int
    seed: int
    variable_count: int

    @property
    def invariant_count(self) -> int:
        return self.variable_count - self.rank

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "rank": self.rank,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "variable_count": self.variable_count,
            "invariant_count": self.invariant_count,
        }


def _sample_point(rng: random.Random, coords: tuple[str, ...],
                  coordinate_range: int) -> dict[str, Fraction]:
    return {c: Fraction(rng.randint(-coordinate_range, coordinate_range))
            for c in coords}


def _evaluate_matrix(fields, coords, point) -> list[list[Fraction]]:
    return [[eval_at(f.coefficient(c), point) if c in f.coefficients
             else Fraction(0) for c in coords] for f in fields]


def matrix_rank_at_samples(
    fields,
    coords: tuple[str, ...],
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
    point_filter=None,
) -> tuple[int, int]:
    """Max exact rank of the coefficient matrix over seeded integer points.

    ``point_filter`` may adjust a candidate point (e.g. force it onto a
    constraint locus) or reject it by returning None.  Returns (rank,
    samples_used).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = random.Random(seed)
    sample_seeds = [rng.randrange(2 ** 32) for _ in range(samples)]
    best = 0
    used = 0
    for s in sample_seeds:
        sub = random.Random(s)
        for _ in range(_MAX_RESAMPLES):
            point = _sample_point(sub, coords, coordinate_range)
            if point_filter is not None:
                point = point_filter(point)
                if point is None:
                    continue
            try:
                rows = _evaluate_matrix(fields, coords, point)
            except (ZeroDenominatorError, ZeroDivisionError):
                continue
            best = max(best, linalg.rank(rows))
            used += 1
            break
        else:
            raise SamplingExhaustedError(
                f"no valid sample point found in {_MAX_RESAMPLES} tries")
    return best, used


def prolonged_rank(
    g: GeneratorSet,
    order: int,
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
) -> RankReport:
    """Generic rank of the order-``order`` prolonged coefficient matrix."""
    fields = g.prolonged(order)
    coords = JetSpace(order).coordinates
    best, used = matrix_rank_at_samples(
        fields, coords, samples=samples, seed=seed,
        coordinate_range=coordinate_range)
    return RankReport(order, best, used, seed, len(coords))


def _linear_solve_coordinate(constraint: Expr, coords: tuple[str, ...],
                             solve_for: str | None):
    """Pick the coordinate to isolate: the constraint numerator must be
    degree 1 in it.  Constant-coefficient candidates are preferred; ties go
    to the earlier chart coordinate."""
    num = canonicalize(constraint).numerator
    candidates = []
    for v in coords:
        if num.degree_in(v) != 1:
            continue
        decomposition = num.coeffs_in(v)
        a = decomposition[1]
        b = decomposition.get(0, None)
        if v in a.variables():
            continue
        candidates.append((v, a, b))
    if solve_for is not None:
        for v, a, b in candidates:
            if v == solve_for:
                return v, a, b
        raise NotSolvableError(
            f"constraint cannot be solved for {solve_for!r} by exact "
            f"rational rearrangement")
    if not candidates:
        raise NotSolvableError(
            "constraint is not linear in any chart coordinate")
    constant_first = sorted(
        candidates,
        key=lambda item: (not item[1].is_const(), coords.index(item[0])))
    return constant_first[0]


def rank_on_manifold(
    g: GeneratorSet,
    constraint: Expr,
    order: int,
    *,
    solve_for: str | None = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
) -> RankReport:
    """Generic rank on the locus ``constraint = 0``.

    The constraint must isolate one chart coordinate by exact rational
    rearrangement; sample points are then drawn on the locus.
    """
    coords = JetSpace(order).coordinates
    cf = canonicalize(constraint)
    if cf.is_zero():
        return prolonged_rank(g, order, samples=samples, seed=seed,
                              coordinate_range=coordinate_range)
    v, a, b = _linear_solve_coordinate(constraint, coords, solve_for)

    def on_locus(point):
        partial = {name: value for name, value in point.items() if name != v}
        denom = a.eval_partial(partial)
        if not denom.is_const() or denom.as_const() == 0:
            return None
        value = Fraction(0)
        if b is not None:
            numer = b.eval_partial(partial)
            if not numer.is_const():
                return None
            value = -numer.as_const() / denom.as_const()
        partial[v] = value
        return partial

    fields = g.prolonged(order)
    best, used = matrix_rank_at_samples(
        fields, coords, samples=samples, seed=seed,
        coordinate_range=coordinate_range, point_filter=on_locus)
    return RankReport(order, best, used, seed, len(coords))


def minimal_generating_set(
    g: GeneratorSet,
    order: int,
    *,
    exhaustive: bool = False,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
) -> tuple[str, ...]:
    """A subset of generators whose prolongation keeps the full generic rank.

    Greedy elimination by default: the result cannot lose any single member
    (greedy-minimal) but is not guaranteed to be a globally minimum subset.
    ``exhaustive=True`` searches all subsets (only for up to 10 generators).
    """
    fields = g.prolonged_named(order)
    coords = JetSpace(order).coordinates
    rng = random.Random(seed)
    sample_seeds = [rng.randrange(2 ** 32) for _ in range(samples)]
    matrices = []
    for s in sample_seeds:
        sub = random.Random(s)
        for _ in range(_MAX_RESAMPLES):
            point = _sample_point(sub, coords, coordinate_range)
            try:
                matrices.append({
                    name: [eval_at(f.coefficient(c), point)
                           if c in f.coefficients else Fraction(0)
                           for c in coords]
                    for name, f in fields.items()})
            except (ZeroDenominatorError, ZeroDivisionError):
                continue
            break
        else:
            raise SamplingExhaustedError(
                f"no valid sample point found in {_MAX_RESAMPLES} tries")

    def subset_rank(names) -> int:
        return max(linalg.rank([mat[n] for n in names]) for mat in matrices)

    full_rank = subset_rank(g.names)
    if exhaustive:
        if len(g.names) > 10:
            raise ValueError("exhaustive search is limited to 10 generators")
        import itertools
        for size in range(1, len(g.names) + 1):
            for combo in itertools.combinations(g.names, size):
                if subset_rank(combo) == full_rank:
                    return combo
    current = list(g.names)
    changed = True
    while changed:
        changed = False
        for name in list(current):
            if len(current) == 1:
                break
            trial = [n for n in current if n != name]
            if subset_rank(trial) == full_rank:
                current = trial
                changed = True
    return tuple(current)


def invariant_count(
    g: GeneratorSet,
    order: int,
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
) -> int:
    """Functional-basis size at this order: variable count minus generic
    rank."""
    report = prolonged_rank(g, order, samples=samples, seed=seed,
                            coordinate_range=coordinate_range)
    return report.invariant_count


@dataclass(frozen=True)
class StabilizationReport:
    order: int
    k_star: int
    window: int
    ranks: dict[int, int]

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "k_star": self.k_star,
            "window": self.window,
            "ranks": {str(k): r for k, r in sorted(self.ranks.items())},
        }


def stabilized_truncation(
    order: int,
    *,
    seed: int = DEFAULT_SEED,
    source: Source | str = Source.DERIVED,
    samples: int = DEFAULT_SAMPLES,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
    k_max: int = DEFAULT_K_MAX,
    window: int = 4,
) -> StabilizationReport:
    """Smallest truncation K whose generic rank repeats over a window of
    ``window`` consecutive K values; the sweep is returned with it."""
    ranks: dict[int, int] = {}
    for k in range(k_max + 1):
        g = build_generators(source, k)
        ranks[k] = prolonged_rank(g, order, samples=samples, seed=seed,
                                  coordinate_range=coordinate_range).rank
        start = k - window + 1
        if start >= 0 and len({ranks[i] for i in range(start, k + 1)}) == 1:
            return StabilizationReport(order, start, window, ranks)
    raise CapExceededError(
        f"rank did not stabilize over a window of {window} with K <= {k_max}")
