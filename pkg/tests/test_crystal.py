import random
import sys
from collections import Counter
from itertools import product
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect import create_binf
from biperfect.common import UnsupportedCartanTypeError
from biperfect.crystal import BInfinity, BinfElement, LusztigDatum
from biperfect.repcheck import tensor_product_multiplicities, weyl_character, weyl_dimension
from biperfect.rootdata import CartanData, RootVector, Weight, braid_neighbors


@pytest.fixture(scope="module")
def a2():
    return create_binf("A2", max_workers=2)


def test_a2_braid_move(a2):
    assert a2.braid_move((1, 2, 1), (3, 2, 1), (2, 1, 2)) == (2, 1, 4)
    moved = a2.transition(LusztigDatum((1, 2, 1), (3, 2, 1)), (2, 1, 2))
    assert moved.values == (2, 1, 4)
    back = a2.transition(moved, (1, 2, 1))
    assert back.values == (3, 2, 1)


def test_invalid_datum_is_rejected(a2):
    with pytest.raises(ValueError):
        a2.transition(LusztigDatum((1, 2, 1), (1, -1, 0)), (2, 1, 2))
    with pytest.raises(ValueError):
        a2.transition(LusztigDatum((1, 1, 2), (0, 0, 0)), (2, 1, 2))


@pytest.mark.parametrize("cartan, depth, sizes", [
    ("A2", 4, [1, 2, 4, 6, 9]),
    ("A3", 2, [1, 3, 8]),
    ("A1xA1", 3, [1, 2, 3, 4]),
])
def test_level_sizes(cartan, depth, sizes):
    graph = create_binf(cartan).enumerate_binf(depth)
    assert graph.level_sizes() == sizes


def test_crystal_operators(a2):
    top = a2.highest()
    assert a2.f_tilde(top, 1) == BinfElement((1, 0, 0))
    assert a2.f_tilde(top, 2) == BinfElement((0, 0, 1))
    assert a2.weight(BinfElement((1, 0, 0))) == Weight((-2, 1))
    with pytest.raises(ValueError):
        a2.e_tilde(top, 1)


def test_crystal_axioms_on_truncation(a2):
    graph = a2.enumerate_binf(3)
    for b in graph.nodes:
        assert a2.star(a2.star(b)) == b
        assert a2.nu(a2.star(b)) == a2.nu(b)
        for i in (1, 2):
            f = a2.f_tilde(b, i)
            assert a2.e_tilde(f, i) == b
            assert a2.epsilon(f, i) == a2.epsilon(b, i) + 1
            assert a2.e_star(a2.f_star(b, i), i) == b


def test_epsilons_of_height_two_element(a2):
    b = BinfElement((1, 0, 1))
    assert a2.epsilon_vector(b) == (1, 0)
    assert a2.epsilon_star_vector(b) == (0, 1)
    assert a2.star(b) == BinfElement((0, 1, 0))


def test_mv_polytope_and_path_recovery(a2):
    b = a2.element(LusztigDatum((1, 2, 1), (1, 0, 1)))
    polytope = a2.mv_polytope(b)
    assert polytope.vertices == (RootVector((0, 0)), RootVector((1, 0)), RootVector((1, 1)))

    b = a2.element_from_values((3, 2, 1))
    polytope = a2.mv_polytope(b)
    for word in a2.words:
        assert a2.lusztig_datum_from_path(polytope, word) == a2.datum(b, word)


@pytest.mark.parametrize("lam, size", [((1, 0), 3), ((1, 1), 8), ((2, 0), 6)])
def test_b_lambda_sizes(a2, lam, size):
    assert len(a2.b_lambda(Weight(lam)).nodes) == size


def test_b_lambda_rejects_non_dominant(a2):
    with pytest.raises(ValueError, match="支配权"):
        a2.b_lambda(Weight((1, -1)))


def test_multiplicities_agree_with_oracle(a2):
    assert a2.weight_multiplicity(Weight((1, 1)), Weight((0, 0))) == 2
    assert a2.weight_multiplicity(Weight((1, 0)), Weight((0, 0))) == 0
    for lam, mu in [((1, 0), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (1, 0))]:
        lam, mu = Weight(lam), Weight(mu)
        assert a2.tensor_table(lam, mu) == tensor_product_multiplicities(a2.cd, lam, mu)


def test_non_simply_laced_is_rejected():
    with pytest.raises(UnsupportedCartanTypeError):
        BInfinity(CartanData.from_string("B2"))


def test_graph_export(a2):
    graph = a2.enumerate_binf(1)
    dot = graph.to_dot()
    assert dot.startswith('digraph "B_infinity_A2" {')
    assert 'b_1_0_0 -> b_0_0_0 [label="e1"];' in dot

    data = graph.to_json()
    assert data["levels"] == [1, 2]
    assert data["reference_word"] == [1, 2, 1]
    assert {"source": "b_0_0_1", "label": "e2", "target": "b_0_0_0"} in data["edges"]


A2_GRID = [Weight((a, b)) for a in range(3) for b in range(3)]


@pytest.mark.parametrize("lam", A2_GRID)
def test_tensor_tables_on_a2_grid(a2, lam):
    for mu in A2_GRID:
        table = a2.tensor_table(lam, mu)
        assert table == tensor_product_multiplicities(a2.cd, lam, mu), (lam, mu)
        total = sum(c * weyl_dimension(a2.cd, nu) for nu, c in table.items())
        assert total == weyl_dimension(a2.cd, lam) * weyl_dimension(a2.cd, mu)


@pytest.mark.parametrize("lam", [lam for lam in A2_GRID if lam.coords != (0, 0)])
def test_b_lambda_weights_match_character(a2, lam):
    counts = Counter(lam + a2.weight(b) for b in a2.b_lambda(lam).nodes)
    assert dict(counts) == weyl_character(a2.cd, lam)


@pytest.mark.parametrize("lam, mu", [
    ((1, 0, 0), (1, 0, 0)),
    ((1, 0, 0), (0, 0, 1)),
    ((0, 1, 0), (0, 1, 0)),
    ((1, 0, 1), (0, 1, 0)),
    ((1, 1, 0), (0, 0, 1)),
    ((1, 1, 1), (1, 0, 0)),
])
def test_a3_tensor_spot_checks(lam, mu):
    a3 = create_binf("A3")
    lam, mu = Weight(lam), Weight(mu)
    table = a3.tensor_table(lam, mu)
    assert table == tensor_product_multiplicities(a3.cd, lam, mu)
    total = sum(c * weyl_dimension(a3.cd, nu) for nu, c in table.items())
    assert total == weyl_dimension(a3.cd, lam) * weyl_dimension(a3.cd, mu)


@pytest.mark.parametrize("cartan, bound", [("A2", 3), ("A3", 3)])
def test_transition_does_not_depend_on_path(cartan, bound):
    binf = create_binf(cartan)
    edges = [(word, other) for word in binf.words for other in braid_neighbors(binf.cd, word)]
    for values in product(range(bound + 1), repeat=binf.length):
        b = BinfElement(values)
        data = {word: binf.datum(b, word).values for word in binf.words}
        # 辫子图的每条边都与生成树上的路径一致
        for word, other in edges:
            assert binf.braid_move(word, data[word], other) == data[other], (values, word, other)


def test_transition_along_closed_walk_returns_datum():
    binf = create_binf("A3")
    rng = random.Random(3)
    for _ in range(20):
        walk = [binf.reference]
        for _ in range(12):
            walk.append(rng.choice(braid_neighbors(binf.cd, walk[-1])))
        back = list(reversed(walk))
        values = tuple(rng.randint(0, 3) for _ in range(binf.length))
        there = binf.transition_along(LusztigDatum(binf.reference, values), walk)
        assert there == binf.transition(LusztigDatum(binf.reference, values), walk[-1])
        assert binf.transition_along(there, back).values == values


def test_a3_mv_polytope_is_independent_of_word():
    a3 = create_binf("A3")
    for level in a3.iter_levels(3):
        for b in level:
            polytope = a3.mv_polytope(b)
            for word in a3.words:
                assert all(polytope.polytope.contains(p) for p in a3.path_points(b, word))
                assert a3.lusztig_datum_from_path(polytope, word) == a3.datum(b, word)
