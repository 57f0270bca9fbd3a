import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect.common import UnsupportedCartanTypeError
from biperfect.rootdata import (
    CartanData, RootVector, Weight,
    all_reduced_words_w0, braid_neighbors, is_reduced, kostant_partition,
    kostant_partition_by_product, longest_element_word, opposition, parse_int_list,
    positive_roots, roots_of_height, weyl_group, word_roots,
)


@pytest.mark.parametrize("name, count", [
    ("A1", 1), ("A2", 3), ("A3", 6), ("B2", 4), ("G2", 6), ("D4", 12), ("E6", 36), ("A1xA1", 2),
])
def test_positive_root_counts(name, count):
    assert len(positive_roots(CartanData.from_string(name))) == count


@pytest.mark.parametrize("name, order", [("A1", 2), ("A2", 6), ("A3", 24), ("B2", 8), ("G2", 12)])
def test_weyl_group_order(name, order):
    assert len(weyl_group(CartanData.from_string(name))) == order


def test_cartan_matrix_convention():
    # a_ij = ⟨α_i^∨, α_j⟩，B2 中 α1 为长根
    b2 = CartanData.from_string("B2")
    assert b2.matrix == ((2, -1), (-2, 2))
    assert not b2.is_simply_laced
    assert CartanData.from_string("A1xA1").matrix == ((2, 0), (0, 2))


def test_unknown_type_is_rejected():
    with pytest.raises(UnsupportedCartanTypeError, match="Z3"):
        CartanData.from_string("Z3")
    with pytest.raises(ValueError):
        CartanData.from_string("D3")
    with pytest.raises(UnsupportedCartanTypeError):
        CartanData.from_string("G2").require_simply_laced()


def test_weight_root_conversion():
    a2 = CartanData.from_string("A2")
    assert a2.alpha_weight(1) == Weight((2, -1))
    assert a2.weight_to_root(Weight((1, 1))) == RootVector((1, 1))
    with pytest.raises(ValueError, match="根格"):
        a2.weight_to_root(Weight((1, 0)))


def test_reduced_words_of_a2_and_a3():
    a2 = CartanData.from_string("A2")
    assert all_reduced_words_w0(a2) == ((1, 2, 1), (2, 1, 2))
    assert len(all_reduced_words_w0(CartanData.from_string("A3"))) == 16
    assert not is_reduced(a2, (1, 1))


def test_word_roots_follow_the_word():
    a2 = CartanData.from_string("A2")
    assert word_roots(a2, (1, 2, 1)) == [RootVector((1, 0)), RootVector((1, 1)), RootVector((0, 1))]
    with pytest.raises(ValueError):
        word_roots(a2, (1, 1, 2))


def test_braid_neighbors():
    a3 = CartanData.from_string("A3")
    neighbors = braid_neighbors(a3, (1, 2, 1, 3, 2, 1))
    assert (2, 1, 2, 3, 2, 1) in neighbors
    assert (1, 2, 3, 1, 2, 1) in neighbors
    assert all(n in all_reduced_words_w0(a3) for n in neighbors)


@pytest.mark.parametrize("name, sigma", [
    ("A2", (2, 1)), ("A3", (3, 2, 1)), ("D4", (1, 2, 3, 4)), ("A1xA1", (1, 2)),
])
def test_opposition_involution(name, sigma):
    assert opposition(CartanData.from_string(name)) == sigma


def test_longest_word_length():
    e6 = CartanData.from_string("E6")
    assert len(longest_element_word(e6)) == 36


def test_kostant_partition_values():
    a2 = CartanData.from_string("A2")
    assert kostant_partition(a2, RootVector((1, 1))) == 2
    assert kostant_partition(a2, RootVector((2, 2))) == 3
    assert kostant_partition(a2, RootVector((-1, 1))) == 0


def test_kostant_partition_two_methods_agree():
    a3 = CartanData.from_string("A3")
    for height in range(5):
        for nu in roots_of_height(a3, height):
            assert kostant_partition(a3, nu) == kostant_partition_by_product(a3, nu)


def test_roots_of_height():
    a2 = CartanData.from_string("A2")
    assert roots_of_height(a2, 2) == [RootVector((0, 2)), RootVector((1, 1)), RootVector((2, 0))]


def test_parse_int_list():
    assert parse_int_list(" 1, 2,1 ") == (1, 2, 1)
    assert parse_int_list("") == ()
    with pytest.raises(ValueError, match="无法解析"):
        parse_int_list("1,a")
