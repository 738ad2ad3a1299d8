from fractions import Fraction

import pytest

from wavesym.canonical import equals
from wavesym.eqalgebra import (
    GeneratorSet,
    NotSolvableError,
    Source,
    build_generators,
    bracket_closed,
    closure_max_k,
    commutator_table,
    expected_relations,
    invariant_count,
    matrix_rank_at_samples,
    minimal_generating_set,
    prolonged_rank,
    rank_on_manifold,
    stabilized_truncation,
    verify_commutator_table,
)
from wavesym.expr import Coord, parse
from wavesym.jetspace import JetSpace

R_EXPR = parse("sigma*f_sigma - f", JetSpace(1))


# --- construction ------------------------------------------------------------

def test_printed_family_sigma_coefficient():
    g = build_generators("paper", 2)
    y2 = g.field_named("Y^2")
    assert equals(y2.coefficient("sigma"), parse("4*u*sigma", JetSpace(1)))


def test_derived_family_f_coefficient():
    g = build_generators("derived", 1)
    y1 = g.field_named("Y^1")
    assert equals(y1.coefficient("f"), Coord("f"))


def test_derived_zeroth_family_member_is_u_shift():
    g = build_generators("derived", 0)
    y0 = g.field_named("Y^0")
    assert set(y0.coefficients) == {"u"}
    assert equals(y0.coefficient("u"), parse("1", JetSpace(0)))


def test_generator_names():
    g = build_generators("derived", 3)
    assert g.names == ("Y0", "Y1", "Y2", "Y3", "Y^0", "Y^1", "Y^2", "Y^3")


# --- commutator table --------------------------------------------------------

def test_family_bracket_doubles(derived6):
    table = commutator_table(derived6)
    assert table.entry("Y^0", "Y^2").decomposition == {"Y^1": Fraction(2)}


def test_translation_dilation_bracket(derived6):
    table = commutator_table(derived6)
    assert table.entry("Y1", "Y3").decomposition == {"Y1": Fraction(1)}


def test_static_generators_commute_with_family(derived6):
    table = commutator_table(derived6)
    for k in range(7):
        assert table.entry("Y0", f"Y^{k}").decomposition == {}


def test_derived_table_reproduces_every_relation(derived6):
    report = verify_commutator_table(derived6)
    assert report["all_exact"]
    assert report["relations_checked"] == len(expected_relations(6)) == 49


def test_printed_table_has_documented_failures(printed6):
    """The printed first-order coefficients do not satisfy the published
    family brackets (the f-coefficient normalization is inconsistent);
    the failures are reported, never corrected."""
    report = verify_commutator_table(printed6)
    assert not report["all_exact"]
    assert ("Y^1", "Y^2") in report["failing"]
    assert ("Y3", "Y^2") in report["failing"]
    # the pure Y0..Y3 block and the [Y^0, .] brackets still agree
    assert report["statuses"][("Y0", "Y1")] == "exact"
    assert report["statuses"][("Y^0", "Y^2")] == "exact"


def test_structure_constants_match_where_printed_in_span(derived6, printed6):
    derived_table = commutator_table(derived6)
    printed_table = commutator_table(printed6)
    compared = 0
    for pair, printed_entry in printed_table.entries.items():
        if printed_entry.decomposition is None:
            continue
        assert printed_entry.decomposition == derived_table.entry(*pair).decomposition
        compared += 1
    assert compared >= 30


# --- closure -----------------------------------------------------------------

def test_closure_of_derived_algebra(derived6):
    assert closure_max_k(derived6) == 2


def test_closure_of_printed_algebra(printed6):
    """With the printed coefficients taken literally, span{Y0..Y3, Y^0..Y^2}
    is not bracket-closed ([Y^1, Y^2] falls outside), so the closure index
    drops to 1.  The derived coefficients give 2."""
    assert closure_max_k(printed6) == 1


def test_translations_form_closed_subalgebra(derived6):
    assert bracket_closed(derived6, ("Y1", "Y2"))


def test_closure_requires_window():
    g = build_generators("derived", 3)
    with pytest.raises(ValueError):
        closure_max_k(g)


# --- ranks -------------------------------------------------------------------

def test_first_order_rank(derived6):
    report = prolonged_rank(derived6, 1)
    assert report.rank == 7
    assert report.variable_count == 7
    assert report.invariant_count == 0


def test_second_order_rank(derived6):
    report = prolonged_rank(derived6, 2)
    assert report.rank == 8
    assert report.variable_count == 10
    assert report.invariant_count == 2


def test_single_translation_has_rank_one(derived6):
    field = derived6.prolonged_named(1)["Y1"]
    rank, _ = matrix_rank_at_samples([field], JetSpace(1).coordinates)
    assert rank == 1


def test_rank_determinism(derived6):
    a = prolonged_rank(derived6, 2, seed=99)
    b = prolonged_rank(derived6, 2, seed=99)
    assert a == b


def test_rank_monotone_in_order_and_truncation():
    # Y0..Y3, Y^0..Y^k is a prefix of the K=12 generator list, so prefix
    # ranks of one prolonged set sweep the whole truncation range
    g = build_generators("derived", 12)
    ranks = {}
    for order in (0, 1, 2):
        fields = g.prolonged(order)
        coords = JetSpace(order).coordinates
        last = 0
        for k in range(13):
            prefix = fields[:4 + k + 1]
            r, _ = matrix_rank_at_samples(prefix, coords)
            assert r >= last
            last = r
            ranks[(order, k)] = r
    for k in range(13):
        assert ranks[(0, k)] <= ranks[(1, k)] <= ranks[(2, k)]


def test_rank_on_special_manifold(derived6):
    report = rank_on_manifold(derived6, R_EXPR, 1)
    assert report.rank == 6


def test_rank_on_trivial_constraint_matches_unconstrained(derived6):
    zero = parse("u - u", JetSpace(1))
    assert rank_on_manifold(derived6, zero, 1) == prolonged_rank(derived6, 1)


def test_rank_on_sigma_zero(derived6):
    report = rank_on_manifold(derived6, Coord("sigma"), 1)
    assert report.rank <= 7


def test_unsolvable_constraint(derived6):
    with pytest.raises(NotSolvableError):
        rank_on_manifold(derived6, parse("sigma^2 - f^2", JetSpace(1)), 1)


# --- minimal generating sets -------------------------------------------------

def test_minimal_generating_set_size(derived6):
    subset = minimal_generating_set(derived6, 2)
    assert len(subset) == 8
    sub = GeneratorSet(derived6.source, derived6.truncation, subset,
                       tuple(derived6.field_named(n) for n in subset),
                       derived6.base_order)
    assert prolonged_rank(sub, 2).rank == 8


def test_duplicate_generators_are_removed():
    g = build_generators("derived", 0)
    y1, y2 = g.field_named("Y1"), g.field_named("Y2")
    dup = GeneratorSet(Source.DERIVED, 0, ("A", "B", "C"), (y1, y2, y1), 0)
    subset = minimal_generating_set(dup, 1)
    assert len(subset) == 2


def test_singleton_is_kept():
    g = build_generators("derived", 0)
    single = GeneratorSet(Source.DERIVED, 0, ("A",), (g.field_named("Y1"),), 0)
    assert minimal_generating_set(single, 1) == ("A",)


def test_exhaustive_matches_greedy_rank(derived6):
    g = build_generators("derived", 3)
    greedy = minimal_generating_set(g, 1)
    exhaustive = minimal_generating_set(g, 1, exhaustive=True)
    assert len(exhaustive) <= len(greedy)
    sub = GeneratorSet(g.source, g.truncation, exhaustive,
                       tuple(g.field_named(n) for n in exhaustive), g.base_order)
    assert prolonged_rank(sub, 1).rank == prolonged_rank(g, 1).rank


# --- invariant counts and stabilization --------------------------------------

def test_invariant_counts(derived6):
    assert invariant_count(derived6, 1) == 0
    assert invariant_count(derived6, 2) == 2


def test_empty_generator_set_leaves_everything_invariant():
    empty = GeneratorSet(Source.DERIVED, 0, (), (), 0)
    assert invariant_count(empty, 1) == 7


def test_stabilization_first_order():
    report = stabilized_truncation(1)
    assert report.ranks[report.k_star] == 7
    assert report.k_star == 3
    for k in range(report.k_star, max(report.ranks)):
        assert report.ranks[k] == 7


def test_stabilization_second_order():
    report = stabilized_truncation(2)
    assert report.ranks[report.k_star] == 8


def test_stabilization_zeroth_order():
    report = stabilized_truncation(0)
    assert report.ranks[report.k_star] == 5


def test_stabilization_cap_exceeded():
    from wavesym.eqalgebra import CapExceededError
    with pytest.raises(CapExceededError):
        stabilized_truncation(1, k_max=2)


def test_sampling_exhausted():
    from wavesym.eqalgebra import SamplingExhaustedError
    g = build_generators("derived", 0)
    fields = g.prolonged(1)
    with pytest.raises(SamplingExhaustedError):
        matrix_rank_at_samples(fields, JetSpace(1).coordinates,
                               point_filter=lambda point: None)
