import sys
from fractions import Fraction
from pathlib import Path

import pytest
from sympy import eye

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect import create_binf
from biperfect.common import UnsupportedCartanTypeError
from biperfect.repcheck import (
    adjoint_rep, force_sl3_adjoint, irrep, multiplicity_space_dim, tensor,
    tensor_product_multiplicities, verify_perfect, weyl_character, weyl_dimension,
)
from biperfect.rootdata import CartanData, Weight

A1 = CartanData.from_string("A1")
A2 = CartanData.from_string("A2")


@pytest.mark.parametrize("lam, dim", [((1, 0), 3), ((0, 1), 3), ((1, 1), 8), ((2, 0), 6)])
def test_irrep_dimensions_and_relations(lam, dim):
    rep = irrep(A2, Weight(lam))
    assert rep.dim == dim
    assert rep.check_relations() == []
    assert rep.weight_multiplicities() == weyl_character(A2, Weight(lam))


def test_a3_irrep():
    a3 = CartanData.from_string("A3")
    rep = irrep(a3, Weight((1, 0, 1)))
    assert rep.dim == 15
    assert rep.check_relations() == []


def test_unsupported_irreps():
    with pytest.raises(UnsupportedCartanTypeError):
        irrep(CartanData.from_string("B2"), Weight((1, 0)))
    with pytest.raises(ValueError, match="支配权"):
        irrep(A2, Weight((-1, 0)))


def test_tensor_satisfies_relations():
    v = irrep(A1, Weight((1,)))
    product = tensor(v, v)
    assert product.dim == 4
    assert product.check_relations() == []
    assert product.weight_multiplicities() == {Weight((-2,)): 1, Weight((0,)): 2, Weight((2,)): 1}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sl2_monomial_basis_is_perfect(n):
    report = verify_perfect(irrep(A1, Weight((n,))))
    assert report.passed
    assert sorted(e[0] for e in report.epsilons.values()) == list(range(n + 1))


def test_non_perfect_basis_reports_certificate():
    rep = irrep(A1, Weight((2,)))
    # 把中间的基向量换成 2 倍：e 作用后系数不再等于 ε
    basis = [eye(3)[:, k] for k in range(3)]
    basis[1] = 2 * basis[1]
    report = verify_perfect(rep, basis)
    assert not report.passed
    assert report.failures()


def test_adjoint_representation():
    adjoint = adjoint_rep()
    assert adjoint.rep.dim == 8
    assert adjoint.rep.check_relations() == []


def test_forced_cartan_vectors():
    forced = force_sl3_adjoint()
    assert forced.a == Fraction(1, 3)
    assert forced.b == Fraction(1, 3)
    assert forced.d_a == (Fraction(-1, 3), Fraction(-1, 3), Fraction(2, 3))
    assert forced.d_b == (Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3))
    assert forced.report.passed


@pytest.mark.parametrize("lam, mu, nu", [
    ((1, 0), (1, 0), (2, 0)),
    ((1, 0), (1, 0), (0, 1)),
    ((1, 0), (0, 1), (0, 0)),
    ((1, 0), (0, 1), (1, 1)),
    ((1, 1), (1, 0), (1, 0)),
    ((1, 1), (1, 0), (0, 2)),
])
def test_multiplicity_space_matches_crystal(lam, mu, nu):
    binf = create_binf("A2")
    lam, mu, nu = Weight(lam), Weight(mu), Weight(nu)
    expected = binf.tensor_multiplicity(lam, mu, nu)
    assert expected > 0
    assert multiplicity_space_dim(A2, lam, mu, nu) == expected


def test_oracle_values():
    assert weyl_dimension(A2, Weight((1, 1))) == 8
    assert weyl_dimension(CartanData.from_string("B2"), Weight((0, 1))) == 4
    assert tensor_product_multiplicities(A2, Weight((1, 0)), Weight((1, 0))) == {
        Weight((0, 1)): 1, Weight((2, 0)): 1,
    }


SMALL_WEIGHTS = [Weight((1, 0)), Weight((0, 1)), Weight((1, 1))]


@pytest.mark.parametrize("lam", SMALL_WEIGHTS)
@pytest.mark.parametrize("mu", SMALL_WEIGHTS)
def test_multiplicity_spaces_cover_tensor_table(lam, mu):
    binf = create_binf("A2")
    table = tensor_product_multiplicities(A2, lam, mu)
    for nu, count in table.items():
        assert multiplicity_space_dim(A2, lam, mu, nu) == count == binf.tensor_multiplicity(lam, mu, nu)
    # 表外的支配权重数为零
    assert multiplicity_space_dim(A2, lam, mu, lam + mu + Weight((1, 1))) == 0
