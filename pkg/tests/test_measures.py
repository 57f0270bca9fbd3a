import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect import create_binf
from biperfect.coordring import coordinate_ring, extract_crystal, match_binf, sl3_basis
from biperfect.measures import (
    d_bar, d_bar_seq, evaluate_at_nx, first_moment, ft_d, ft_d_seq, morphism_check,
    origin_coefficient, shuffle_identity_holds, shuffles, solve_nx, support_hull, top_coefficient,
)
from biperfect.rootdata import CartanData, RootVector
from biperfect.symbolic import torus_for

A2 = CartanData.from_string("A2")


def test_d_bar_seq_product_of_tails():
    torus = torus_for(A2)
    a1 = torus.linear_fn(RootVector((1, 0)))
    a2 = torus.linear_fn(RootVector((0, 1)))
    assert d_bar_seq(A2, (1, 2)) == torus.one / ((a1 + a2) * a2)
    assert d_bar_seq(A2, ()) == torus.one


def test_shuffles_count_with_multiplicity():
    assert sorted(shuffles((1,), (1,))) == [(1, 1), (1, 1)]
    assert len(list(shuffles((1, 2), (2,)))) == 3


@pytest.mark.parametrize("first, second", [((1,), (2,)), ((1, 2), (1,)), ((2,), (2, 1))])
def test_shuffle_identities(first, second):
    assert shuffle_identity_holds(A2, first, second) == (True, True)


def test_ft_d_seq_length_limit():
    with pytest.raises(ValueError):
        ft_d_seq(A2, (1, 2, 1, 2, 1, 2, 1))


def test_solve_nx_entries():
    nx = solve_nx(3)
    torus = nx.torus
    a1 = torus.linear_fn(RootVector((1, 0)))
    a2 = torus.linear_fn(RootVector((0, 1)))
    assert nx.entries[0][1] == torus.one / a1
    assert nx.entries[1][2] == torus.one / a2
    assert nx.entries[0][2] == torus.one / (a2 * (a1 + a2))
    assert nx.residual_is_zero()

    with pytest.raises(ValueError):
        solve_nx(5)


def test_d_bar_is_evaluation_at_nx():
    cr = coordinate_ring(3)
    for key in sl3_basis(3).keys_up_to(3):
        f = sl3_basis(3)[key]
        assert d_bar(cr, f) == evaluate_at_nx(cr, f)


@pytest.mark.parametrize("n, text", [(2, "x12"), (2, "x12**2"), (3, "x"), (3, "y"), (3, "z"), (3, "x*y - z")])
def test_morphism_check(n, text):
    cr = coordinate_ring(n)
    check = morphism_check(cr, cr.parse(text))
    assert check.passed, (check.ft_lhs, check.ft_rhs)


def test_morphism_check_rank_limit():
    cr = coordinate_ring(4)
    with pytest.raises(ValueError):
        morphism_check(cr, cr.x(1, 2))


def test_top_and_origin_coefficients():
    cr = coordinate_ring(3)
    family = sl3_basis(3)
    for key in family.keys_up_to(3):
        f = family[key]
        assert top_coefficient(cr, f) == d_bar(cr, f)
        assert origin_coefficient(cr, f) == evaluate_at_nx(cr, f, inverse=True)
        assert origin_coefficient(cr, f) == d_bar(cr, cr.star(f))


def test_support_hull_of_z():
    cr = coordinate_ring(3)
    polytope = support_hull(A2, ft_d(cr, cr.x(1, 3)))
    assert polytope.vertices == (RootVector((0, 0)), RootVector((1, 0)), RootVector((1, 1)))


def test_first_moment_of_x_squared():
    cr = coordinate_ring(2)
    assert first_moment(cr, cr.x(1, 2) ** 2) == Fraction(4)
    assert ft_d(cr, cr.x(1, 2) ** 2).limit_at_origin() == Fraction(1)


def sequence_pairs(total):
    for size in range(1, total):
        for first in product((1, 2), repeat=size):
            for second in product((1, 2), repeat=total - size):
                yield first, second


@pytest.mark.parametrize("total", [2, 3, 4, 5])
def test_shuffle_identities_for_all_short_pairs(total):
    for first, second in sequence_pairs(total):
        assert shuffle_identity_holds(A2, first, second) == (True, True), (first, second)


def test_coefficient_laws_up_to_degree_four():
    cr = coordinate_ring(3)
    family = sl3_basis(4)
    for key in family.keys_up_to(4):
        f = family[key]
        assert top_coefficient(cr, f) == d_bar(cr, f), key
        assert origin_coefficient(cr, f) == evaluate_at_nx(cr, f, inverse=True), key
        assert origin_coefficient(cr, f) == d_bar(cr, cr.star(f)), key


def test_morphism_check_on_basis_up_to_degree_three():
    cr = coordinate_ring(3)
    family = sl3_basis(3)
    for key in family.keys_up_to(3):
        check = morphism_check(cr, family[key])
        assert check.passed, (key, check.ft_lhs, check.ft_rhs)

    sl2 = coordinate_ring(2)
    for power in range(4):
        assert morphism_check(sl2, sl2.x(1, 2) ** power).passed, power


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nx_residual_vanishes(n):
    nx = solve_nx(n)
    assert nx.residual_is_zero()
    # 对角线为 1，严格下三角为 0
    for i in range(n):
        assert nx.entries[i][i] == nx.torus.one
        for j in range(i):
            assert not nx.entries[i][j]


def test_support_hull_equals_mv_polytope_up_to_degree_three():
    cr = coordinate_ring(3)
    family = sl3_basis(3)
    binf = create_binf("A2")
    matching = match_binf(extract_crystal(family, 3), binf)
    for key in family.keys_up_to(3):
        polytope = support_hull(A2, ft_d(cr, family[key]))
        assert polytope.equals(binf.mv_polytope(matching[key]).polytope), key
