"""
精确线性代数辅助函数
基于 sympy DomainMatrix，在 QQ 或 GF(p) 上做行化简、秩、零空间与仿射方程求解
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import Rational
from sympy.polys.domains import QQ, GF
from sympy.polys.matrices import DomainMatrix


def convert(value, domain=QQ):
    """把 int / Fraction / sympy 有理数转换为域元素"""
    if isinstance(value, Fraction):
        return domain.convert(value.numerator) / domain.convert(value.denominator)
    return domain.convert(value)


def to_fraction(value) -> Fraction:
    """QQ 元素或 sympy 有理数转为 Fraction"""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(int(value.numerator), int(value.denominator))


def to_int_mod(value, p: int) -> int:
    """GF(p) 元素转为 0..p-1 的整数"""
    return int(GF(p).to_int(value)) % p


def domain_matrix(rows: Sequence[Sequence], ncols: int, domain=QQ) -> DomainMatrix:
    data = [[convert(entry, domain) for entry in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), domain)


def rref(rows: Sequence[Sequence], ncols: int, domain=QQ) -> Tuple[List[List], Tuple[int, ...]]:
    """
    行最简形

    :param rows: 行列表
    :param ncols: 列数（行为空时需要）
    :param domain: 基域
    :return: (非零行列表, 主元列)
    """
    if not rows:
        return [], ()
    reduced, pivots = domain_matrix(rows, ncols, domain).rref()
    return reduced.to_list()[:len(pivots)], tuple(pivots)


def rank(rows: Sequence[Sequence], ncols: int, domain=QQ) -> int:
    if not rows or ncols == 0:
        return 0
    return len(rref(rows, ncols, domain)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, domain=QQ) -> List[List]:
    """齐次方程组 A x = 0 的解空间基"""
    reduced, pivots = rref(rows, ncols, domain)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vector = [domain.zero] * ncols
        vector[f] = domain.one
        for r, p in enumerate(pivots):
            vector[p] = -reduced[r][f]
        basis.append(vector)
    return basis


def solve_affine(rows: Sequence[Sequence], rhs: Sequence, ncols: int,
                 domain=QQ) -> Tuple[Optional[List], List[List]]:
    """
    求解 A x = b

    :return: (特解或None, 齐次解空间基)
    """
    if not rows:
        return [domain.zero] * ncols, nullspace([], ncols, domain)

    augmented = [list(row) + [value] for row, value in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1, domain)
    if ncols in pivots:
        return None, []

    particular = [domain.zero] * ncols
    for r, p in enumerate(pivots):
        particular[p] = reduced[r][ncols]
    return particular, nullspace(rows, ncols, domain)


def in_span(vectors: Sequence[Sequence], target: Sequence, domain=QQ) -> bool:
    """target 是否在 vectors 张成的空间内"""
    if not any(convert(v, domain) for v in target):
        return True
    if not vectors:
        return False
    ncols = len(target)
    return rank(list(vectors) + [list(target)], ncols, domain) == rank(vectors, ncols, domain)
