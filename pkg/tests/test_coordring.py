import random
import sys
from itertools import combinations_with_replacement, permutations
from pathlib import Path

import pytest
from sympy import QQ

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect import create_binf
from biperfect.coordring import (
    BiperfectBasisFamily, coordinate_ring, count_bicrystal_isomorphisms, extract_crystal,
    match_binf, mutated_sl3_basis, psi_image_basis, shuffle_splittings, sl2_basis, sl3_basis,
    star_index_map, uniqueness_search, verify_biperfect,
)
from biperfect.crystal import BinfElement
from biperfect.rootdata import RootVector, Weight, kostant_partition, roots_of_height


@pytest.fixture(scope="module")
def sl3():
    return coordinate_ring(3)


def test_ring_bounds():
    with pytest.raises(ValueError):
        coordinate_ring(5)


def test_parse_aliases_and_weights(sl3):
    w = sl3.parse("x*y - z")
    assert w == sl3.x(1, 2) * sl3.x(2, 3) - sl3.x(1, 3)
    assert sl3.weight_of(w) == RootVector((1, 1))
    assert sl3.dimension(RootVector((1, 1))) == 2
    with pytest.raises(ValueError, match="齐次"):
        sl3.weight_of(sl3.parse("x + y"))


def test_chevalley_derivations(sl3):
    x, y, z = sl3.x(1, 2), sl3.x(2, 3), sl3.x(1, 3)
    assert sl3.e_left(1, z) == y
    assert sl3.e_left(2, z) == 0
    assert sl3.e_right(2, z) == x
    assert sl3.e_right(1, z) == 0
    assert sl3.epsilon("left", 1, x ** 3) == 3


def test_pairing_applies_first_index_first(sl3):
    z = sl3.x(1, 3)
    w = sl3.parse("x*y - z")
    assert sl3.pairing((1, 2), z) == 1
    assert sl3.pairing((2, 1), z) == 0
    assert sl3.pairings(w) == {(2, 1): 1}


def test_star_swaps_z_and_w(sl3):
    z = sl3.x(1, 3)
    w = sl3.parse("x*y - z")
    assert sl3.star(z) == w
    assert sl3.star(w) == z
    assert sl3.star(sl3.x(1, 2)) == -sl3.x(1, 2)


@pytest.mark.parametrize("family, height", [(sl2_basis, 6), (sl3_basis, 6)])
def test_reference_families_are_biperfect(family, height):
    report = verify_biperfect(family(height), height, max_workers=2)
    assert report.passed, report.failures


def test_mutated_family_fails(sl3):
    report = verify_biperfect(mutated_sl3_basis(3), 3, max_workers=2)
    assert not report.passed
    assert report.failures


def test_family_json_round_trip():
    data = sl3_basis(3).to_json(3)
    assert data["group"] == "sl3"
    family = BiperfectBasisFamily.from_json(data)
    assert verify_biperfect(family, 3).passed

    with pytest.raises(ValueError, match="group"):
        BiperfectBasisFamily.from_json({"group": "gl3"})


def test_extracted_crystal_matches_binf():
    crystal = extract_crystal(sl3_basis(3), 3)
    assert crystal.level_sizes() == [1, 2, 4, 6]

    binf = create_binf("A2")
    assert count_bicrystal_isomorphisms(crystal, binf) == 1
    matching = match_binf(crystal, binf)
    assert matching["x:1,0,0"] == BinfElement((1, 0, 0))
    assert matching["y:1,0,0"] == BinfElement((0, 0, 1))
    assert matching["x:0,1,0"] == BinfElement((1, 0, 1))
    assert matching["x:0,0,1"] == BinfElement((0, 1, 0))


def test_uniqueness_search_recovers_basis(sl3):
    result = uniqueness_search(3)
    assert result.unique
    assert result.family_count == 1
    assert result.solutions[BinfElement((1, 0, 0))] == sl3.x(1, 2)
    assert result.solutions[BinfElement((1, 0, 1))] == sl3.x(1, 3)
    assert result.solutions[BinfElement((0, 1, 0))] == sl3.parse("x*y - z")

    with pytest.raises(ValueError):
        uniqueness_search(5)


def test_star_index_map():
    mapping = star_index_map(sl3_basis(2), 2)
    assert mapping["x:0,1,0"] == ("x:0,0,1", 1)
    assert mapping["x:1,0,0"] == ("x:1,0,0", -1)


def test_psi_image_of_fundamental_weight():
    image = psi_image_basis(sl3_basis(2), Weight((1, 0)))
    assert image.passed
    assert sorted(image.keys) == ["x:0,0,0", "x:0,0,1", "x:1,0,0"]


def test_shuffle_splittings_count():
    splittings = list(shuffle_splittings((1, 2, 1)))
    assert len(splittings) == 8
    assert ((1, 2, 1), ()) in splittings


def test_extracted_crystal_at_height_six():
    crystal = extract_crystal(sl3_basis(6), 6)
    cd = crystal.cr.cd
    expected = [sum(kostant_partition(cd, nu) for nu in roots_of_height(cd, h)) for h in range(7)]
    assert crystal.level_sizes() == expected == [1, 2, 4, 6, 9, 12, 16]
    assert count_bicrystal_isomorphisms(crystal, create_binf("A2")) == 1


def test_uniqueness_search_returns_reference_family():
    family = sl3_basis(4)
    result = uniqueness_search(4)
    assert result.unique
    assert result.family_count == 1
    assert len(result.families()) == 1

    matching = match_binf(extract_crystal(family, 4), create_binf("A2"))
    assert len(matching) == len(result.solutions)
    for key, b in matching.items():
        assert result.solutions[b] == family[key], key


def test_left_only_search_without_normalization_leaves_free_lines():
    # 只有左侧条件且不归一化时 α1+α2 上每个元素都有一条自由直线
    result = uniqueness_search(2, use_right=False, normalize=False)
    assert not result.unique
    assert result.family_count == "infinite"
    assert result.families() == []
    assert result.free_dims[BinfElement((1, 0, 1))] == 1
    assert result.free_dims[BinfElement((0, 1, 0))] == 1

    # 加上归一化后左侧条件在这一权上已经足够
    pinned = uniqueness_search(2, use_right=False)
    assert pinned.free_dims[BinfElement((1, 0, 1))] == 0
    assert pinned.solutions[BinfElement((0, 1, 0))] == coordinate_ring(3).parse("x*y - z")


def sequences_of_weight(cr, nu):
    letters = [i for i, c in enumerate(nu.coords, start=1) for _ in range(c)]
    return sorted(set(permutations(letters)))


def test_pairing_is_multiplicative_over_splittings(sl3):
    family = sl3_basis(4)
    keys = family.keys_up_to(4)
    for first, second in combinations_with_replacement(keys, 2):
        f, g = family[first], family[second]
        nu = sl3.weight_of(f) + sl3.weight_of(g)
        if nu.height > 4:
            continue
        for seq in sequences_of_weight(sl3, nu):
            expected = sum(
                (sl3.pairing(left, f) * sl3.pairing(right, g) for left, right in shuffle_splittings(seq)),
                QQ.zero,
            )
            assert sl3.pairing(seq, f * g) == expected, (first, second, seq)


def random_polynomial(cr, rng, degree, terms=6):
    gens = [cr.var[pair] for pair in cr.pairs]
    total = cr.ring.zero
    for _ in range(terms):
        monomial = cr.ring.one
        for _ in range(rng.randint(0, degree)):
            monomial *= rng.choice(gens)
        total += monomial * rng.randint(-3, 3)
    return total


@pytest.mark.parametrize("n", [3, 4])
def test_left_and_right_actions_commute(n):
    cr = coordinate_ring(n)
    rng = random.Random(n)
    for _ in range(15):
        f = random_polynomial(cr, rng, 5)
        for i in range(1, n):
            for j in range(1, n):
                assert cr.e_left(i, cr.e_right(j, f)) == cr.e_right(j, cr.e_left(i, f)), (i, j, f)


@pytest.mark.parametrize("n", [3, 4])
def test_graded_dimensions_are_kostant_numbers(n):
    cr = coordinate_ring(n)
    for height in range(7):
        for nu in roots_of_height(cr.cd, height):
            assert cr.dimension(nu) == kostant_partition(cr.cd, nu), nu
            assert len(cr.monomial_basis(nu)) == cr.dimension(nu)
