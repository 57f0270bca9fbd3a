"""
洗牌测度
D̄_i 有理函数、D_i 的Fourier变换、C[N] 上的态射 D̄ 与 FT∘D、n_x 的求解与态射检查
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .common import logger
from .coordring import CoordinateRing
from .polytope import LatticePolytope, hull
from .rootdata import CartanData, RootVector
from .symbolic import ExpSum, TorusFunctions, ft_simplex, torus_for


def _root_sum(cd: CartanData, seq: Sequence[int]) -> RootVector:
    total = cd.zero_root()
    for i in seq:
        total = total + cd.simple_root(i)
    return total


def d_bar_seq(cd: CartanData, seq: Sequence[int]):
    """
    D̄_i = ∏_{k=1}^{p} 1 / (α_{i_k} + ··· + α_{i_p})

    :param cd: Cartan数据
    :param seq: 单根下标序列
    :return: RationalFn
    """
    torus = torus_for(cd)
    result = torus.one
    for k in range(len(seq)):
        result = result / torus.linear_fn(_root_sum(cd, seq[k:]))
    return result


@lru_cache(maxsize=None)
def _ft_d_seq_cached(cd: CartanData, seq: Tuple[int, ...]) -> ExpSum:
    torus = torus_for(cd)
    nodes = [_root_sum(cd, seq[:k]) for k in range(len(seq) + 1)]
    return ft_simplex(torus, nodes)


def ft_d_seq(cd: CartanData, seq: Sequence[int]) -> ExpSum:
    """
    FT(D_i)：部分和 β_k = α_{i_1} + … + α_{i_k}（β_0 = 0）上的单纯形Fourier变换

    :param cd: Cartan数据
    :param seq: 长度 ≤ 6 的序列
    :return: ExpSum
    """
    seq = tuple(seq)
    if len(seq) > 6:
        raise ValueError("序列长度不能超过 6")
    for i in seq:
        cd.check_index(i)
    return _ft_d_seq_cached(cd, seq)


def d_bar(cr: CoordinateRing, f):
    """D̄(f) = Σ ⟨e_i, f⟩ D̄_i"""
    torus = torus_for(cr.cd)
    result = torus.zero
    for seq, value in cr.pairings(f).items():
        result += d_bar_seq(cr.cd, seq) * torus.constant(value)
    return result


def ft_d(cr: CoordinateRing, f) -> ExpSum:
    """FT(D(f)) = Σ ⟨e_i, f⟩ FT(D_i)"""
    torus = torus_for(cr.cd)
    if f and cr.weight_of(f).height > 6:
        raise ValueError("元素高度不能超过 6")
    result = ExpSum.zero(torus)
    for seq, value in cr.pairings(f).items():
        result = result + ft_d_seq(cr.cd, seq).scale(torus.constant(value))
    return result


def shuffles(first: Sequence[int], second: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """两个序列的全部交错（按位置计重数）"""
    total = len(first) + len(second)
    for positions in combinations(range(total), len(first)):
        chosen = set(positions)
        a, b = iter(first), iter(second)
        yield tuple(next(a) if k in chosen else next(b) for k in range(total))


def shuffle_identity_holds(cd: CartanData, first: Sequence[int], second: Sequence[int]) -> Tuple[bool, bool]:
    """
    检查 D̄_j·D̄_k = Σ D̄_{shuffle} 与 FT(D_j)·FT(D_k) = Σ FT(D_{shuffle})

    :return: (D̄ 是否成立, FT(D) 是否成立)
    """
    torus = torus_for(cd)
    dbar_rhs = torus.zero
    ft_rhs = ExpSum.zero(torus)
    for word in shuffles(first, second):
        dbar_rhs += d_bar_seq(cd, word)
        ft_rhs = ft_rhs + ft_d_seq(cd, word)
    dbar_ok = d_bar_seq(cd, first) * d_bar_seq(cd, second) == dbar_rhs
    ft_ok = ft_d_seq(cd, first) * ft_d_seq(cd, second) == ft_rhs
    return dbar_ok, ft_ok


@dataclass
class UnipotentSymbolic:
    """
    上三角幺幂矩阵，元素为 t 上的有理函数

    t 的矩阵坐标取 X = diag(X_k)，X_k = −(u_k − u_{k−1})，u_0 = u_n = 0，
    于是 α_i(X) = X_{i+1} − X_i = linear_form(α_i)
    """
    torus: TorusFunctions
    entries: List[List]

    @property
    def n(self) -> int:
        return len(self.entries)

    def inverse(self) -> "UnipotentSymbolic":
        torus = self.torus
        n = self.n
        nilpotent = [[-self.entries[i][j] if i < j else torus.zero for j in range(n)] for i in range(n)]
        result = _identity(torus, n)
        power = _identity(torus, n)
        for _ in range(n - 1):
            power = _matmul(power, nilpotent, torus.zero)
            result = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(result, power)]
        return UnipotentSymbolic(torus, result)

    def diagonal(self) -> List:
        torus = self.torus
        u = [torus.zero] + [torus.field.field_new(g) for g in torus.ring.gens] + [torus.zero]
        return [-(u[k] - u[k - 1]) for k in range(1, self.n + 1)]

    def residual(self) -> List[List]:
        """Ad_{n}(X) − X − e"""
        torus = self.torus
        n = self.n
        diagonal = self.diagonal()
        x = [[diagonal[i] if i == j else torus.zero for j in range(n)] for i in range(n)]
        conjugated = _matmul(_matmul(self.entries, x, torus.zero), self.inverse().entries, torus.zero)
        return [
            [conjugated[i][j] - x[i][j] - (torus.one if j == i + 1 else torus.zero) for j in range(n)]
            for i in range(n)
        ]

    def residual_is_zero(self) -> bool:
        return not any(entry for row in self.residual() for entry in row)

    def to_text(self) -> str:
        return "\n".join("[" + ", ".join(str(e) for e in row) + "]" for row in self.entries)


def _identity(torus: TorusFunctions, n: int) -> List[List]:
    return [[torus.one if i == j else torus.zero for j in range(n)] for i in range(n)]


def _matmul(a, b, zero):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), zero) for j in range(n)] for i in range(n)]


def solve_nx(n: int) -> UnipotentSymbolic:
    """
    求唯一的 n_x ∈ N 使 Ad_{n_x}(x) = x + e
    按超对角线自上而下：n_ij = n_{i+1,j} / ⟨α_i + … + α_{j−1}, x⟩

    :param n: 2..4
    :return: UnipotentSymbolic
    """
    if not 2 <= n <= 4:
        raise ValueError(f"只支持 2 ≤ n ≤ 4，收到 n = {n}")
    cd = CartanData.from_string(f"A{n - 1}")
    torus = torus_for(cd)
    entries = _identity(torus, n)
    for offset in range(1, n):
        for i in range(n - offset):
            j = i + offset
            form = torus.linear_fn(_root_sum(cd, range(i + 1, j + 1)))
            entries[i][j] = entries[i + 1][j] / form
    result = UnipotentSymbolic(torus, entries)
    if not result.residual_is_zero():
        raise RuntimeError("n_x 的残差不为零")
    return result


def _substitute(cr: CoordinateRing, f, values: Dict[Tuple[int, int], object], lift, zero):
    """把 x_ij 替换为 values 中的元素；lift 把有理系数送入目标环"""
    total = zero
    for monom, coefficient in f.terms():
        term = lift(coefficient)
        for exponent, pair in zip(monom, cr.pairs):
            for _ in range(exponent):
                term = term * values[pair]
        total = total + term
    return total


def conjugated_matrix(cr: CoordinateRing) -> List[List[ExpSum]]:
    """t^{-1} n_x t n_x^{-1}，元素为 ExpSum"""
    nx = solve_nx(cr.n)
    torus = nx.torus
    n = cr.n
    twisted = [[ExpSum.zero(torus) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if nx.entries[i][j]:
                weight = cr.cd.root_to_weight(_root_sum(cr.cd, range(i + 1, j + 1)))
                twisted[i][j] = ExpSum.monomial(torus, weight, nx.entries[i][j])
    inverse = nx.inverse().entries
    inverse_sums = [[ExpSum.monomial(torus, cr.cd.zero_weight(), e) if e else ExpSum.zero(torus)
                     for e in row] for row in inverse]
    return _matmul(twisted, inverse_sums, ExpSum.zero(torus))


@dataclass
class MorphismCheck:
    """态射检查结果"""
    ft_passed: bool
    dbar_passed: bool
    ft_lhs: str
    ft_rhs: str
    dbar_lhs: str
    dbar_rhs: str

    @property
    def passed(self) -> bool:
        return self.ft_passed and self.dbar_passed


def pullback_exp(cr: CoordinateRing, f) -> ExpSum:
    """f(t^{-1} n_x t n_x^{-1}) 作为 ExpSum"""
    matrix = conjugated_matrix(cr)
    torus = torus_for(cr.cd)
    values = {(i, j): matrix[i - 1][j - 1] for i, j in cr.pairs}
    return _substitute(cr, f, values, lambda c: ExpSum.one(torus).scale(torus.constant(c)), ExpSum.zero(torus))


def evaluate_at_nx(cr: CoordinateRing, f, inverse: bool = False):
    """f(n_x) 或 f(n_x^{-1})"""
    nx = solve_nx(cr.n)
    if inverse:
        nx = nx.inverse()
    torus = nx.torus
    values = {(i, j): nx.entries[i - 1][j - 1] for i, j in cr.pairs}
    return _substitute(cr, f, values, torus.constant, torus.zero)


def morphism_check(cr: CoordinateRing, f) -> MorphismCheck:
    """
    检查 FT(D(f)) = f(t^{-1} n_x t n_x^{-1}) 与 D̄(f) = f(n_x)

    :param cr: 坐标环（n ≤ 3）
    :param f: 次数 ≤ 4 的元素
    :return: MorphismCheck
    """
    if cr.n > 3:
        raise ValueError("态射检查只支持 n ≤ 3")
    lhs = ft_d(cr, f)
    rhs = pullback_exp(cr, f)
    dbar_lhs = d_bar(cr, f)
    dbar_rhs = evaluate_at_nx(cr, f)
    result = MorphismCheck(lhs == rhs, dbar_lhs == dbar_rhs,
                           lhs.to_text(), rhs.to_text(), str(dbar_lhs), str(dbar_rhs))
    if not result.passed:
        logger.warning(f"态射检查失败: {f}")
    return result


def top_coefficient(cr: CoordinateRing, f):
    """FT(D(f)) 中 e^{ν} 的系数（ν 为 f 的权）"""
    weight = cr.cd.root_to_weight(cr.weight_of(f))
    return ft_d(cr, f).coefficient(weight)


def origin_coefficient(cr: CoordinateRing, f):
    """FT(D(f)) 中 e^0 的系数"""
    return ft_d(cr, f).coefficient(cr.cd.zero_weight())


def support_hull(cd: CartanData, s: ExpSum) -> LatticePolytope:
    """非零系数所在权的凸包（单根坐标）"""
    if s.is_zero():
        raise ValueError("零指数和没有支撑")
    return hull(cd.weight_to_root(w) for w in s.support())


def first_moment(cr: CoordinateRing, f, direction: Optional[Sequence[int]] = None):
    """D(f) 沿方向的一阶矩"""
    return ft_d(cr, f).first_moment(direction)
