"""
环面 t 上的精确符号计算
多项式（MultiPoly）、有理函数（RationalFn）与有限指数和（ExpSum）

MultiPoly 与 RationalFn 直接使用 sympy 的 PolyElement / FracElement，
后者总是约分后的规范形式，因此可以直接比较和哈希。
t 上的坐标 u_1..u_r 与基本权对偶：linear_form(β) = Σ β_j u_j（β 用 ω 坐标）。
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import QQ, Symbol
from sympy.polys.fields import field

from .common import logger, PoleError
from .linalg import to_fraction
from .rootdata import CartanData, RootVector, Weight

# 单纯形测度取Lebesgue测度，p维单纯形总质量为 1/p!
SIMPLEX_MASS = "1/p!"

# 求极限和矩时使用的默认一般方向
DEFAULT_LINE = (2, 3, 5, 7, 11, 13, 17, 19)


def simplex_mass(p: int) -> Fraction:
    return Fraction(1, factorial(p))


class TorusFunctions:
    """
    环面 t 上的多项式环与有理函数域

    :param cd: Cartan数据
    """

    def __init__(self, cd: CartanData):
        self.cd = cd
        self.names = [f"u{i}" for i in range(1, cd.rank + 1)]
        self.field, *self.gens = field(",".join(self.names), QQ)
        self.ring = self.field.ring
        self.symbols = [Symbol(name) for name in self.names]

    def as_weight(self, beta: Union[Weight, RootVector]) -> Weight:
        if isinstance(beta, RootVector):
            return self.cd.root_to_weight(beta)
        return beta

    def linear_form(self, beta: Union[Weight, RootVector]):
        """⟨β, ·⟩ 作为 u 的一次多项式"""
        weight = self.as_weight(beta)
        result = self.ring.zero
        for coefficient, gen in zip(weight.coords, self.ring.gens):
            result += coefficient * gen
        return result

    def linear_fn(self, beta: Union[Weight, RootVector]):
        """同 linear_form，但作为有理函数域中的元素"""
        return self.field.field_new(self.linear_form(beta))

    def constant(self, value) -> object:
        value = to_fraction(value)
        return self.field.field_new(QQ(value.numerator, value.denominator))

    @property
    def one(self):
        return self.field.one

    @property
    def zero(self):
        return self.field.zero

    def to_sympy(self, fn) -> sympy.Expr:
        return fn.as_expr(*self.symbols)

    def evaluate(self, fn, point: Sequence) -> Fraction:
        """
        在有理点处精确求值

        :param fn: MultiPoly 或 RationalFn
        :param point: u 坐标
        :return: Fraction
        """
        point = [to_fraction(v) for v in point]
        if len(point) != self.cd.rank:
            raise ValueError(f"求值点维数 {len(point)} 与秩 {self.cd.rank} 不符")
        if hasattr(fn, "numer"):
            numer, denom = fn.numer, fn.denom
        else:
            numer, denom = fn, self.ring.one
        bottom = _evaluate_poly(denom, point)
        if bottom == 0:
            factor = _vanishing_factor(denom, point)
            raise PoleError(f"分母在 {tuple(str(v) for v in point)} 处为零，消失因子: {factor}", factor)
        return _evaluate_poly(numer, point) / bottom


def _evaluate_poly(poly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for monom, coefficient in poly.terms():
        term = to_fraction(coefficient)
        for value, exponent in zip(point, monom):
            if exponent:
                term *= value ** exponent
        total += term
    return total


def _vanishing_factor(poly, point: Sequence[Fraction]):
    _, factors = poly.factor_list()
    for factor, _ in factors:
        if _evaluate_poly(factor, point) == 0:
            return factor
    return poly


@lru_cache(maxsize=None)
def torus_for(cd: CartanData) -> TorusFunctions:
    return TorusFunctions(cd)


class ExpSum:
    """
    有限指数和 Σ c_β e^β，c_β ∈ C(t)

    零系数不存储；按项比较相等。
    """

    def __init__(self, torus: TorusFunctions, terms: Optional[Dict[Weight, object]] = None):
        self.torus = torus
        self.terms: Dict[Weight, object] = {}
        for weight, coefficient in (terms or {}).items():
            if coefficient:
                self.terms[weight] = coefficient

    @classmethod
    def monomial(cls, torus: TorusFunctions, weight: Weight, coefficient=None) -> "ExpSum":
        return cls(torus, {weight: torus.one if coefficient is None else coefficient})

    @classmethod
    def one(cls, torus: TorusFunctions) -> "ExpSum":
        return cls.monomial(torus, torus.cd.zero_weight())

    @classmethod
    def zero(cls, torus: TorusFunctions) -> "ExpSum":
        return cls(torus)

    def __add__(self, other: "ExpSum") -> "ExpSum":
        terms = dict(self.terms)
        for weight, coefficient in other.terms.items():
            terms[weight] = terms.get(weight, self.torus.zero) + coefficient
        return ExpSum(self.torus, terms)

    def __neg__(self) -> "ExpSum":
        return ExpSum(self.torus, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def __mul__(self, other) -> "ExpSum":
        if not isinstance(other, ExpSum):
            return self.scale(other)
        terms: Dict[Weight, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                key = w1 + w2
                terms[key] = terms.get(key, self.torus.zero) + c1 * c2
        return ExpSum(self.torus, terms)

    __rmul__ = __mul__

    def scale(self, factor) -> "ExpSum":
        if isinstance(factor, (int, Fraction)):
            factor = self.torus.constant(factor)
        return ExpSum(self.torus, {w: c * factor for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, weight: Weight):
        return self.terms.get(weight, self.torus.zero)

    def support(self) -> List[Weight]:
        return sorted(self.terms)

    def evaluate(self, point: Sequence) -> Dict[Fraction, Fraction]:
        """
        在有理点 x 处求值，结果为 {⟨β,x⟩: 系数} 的合并形式

        :param point: u 坐标
        :return: 指数到系数的映射（零项已删去）
        """
        point = [to_fraction(v) for v in point]
        values: Dict[Fraction, Fraction] = {}
        for weight, coefficient in self.terms.items():
            exponent = sum((a * v for a, v in zip(weight.coords, point)), Fraction(0))
            values[exponent] = values.get(exponent, Fraction(0)) + self.torus.evaluate(coefficient, point)
        return {e: c for e, c in sorted(values.items()) if c != 0}

    def restrict_to_line(self, direction: Optional[Sequence[int]] = None,
                         parameter: Symbol = Symbol("s")) -> sympy.Expr:
        """沿直线 x = s·v 的限制，返回 s 的 sympy 表达式"""
        direction = tuple(direction or DEFAULT_LINE[:self.torus.cd.rank])
        substitution = {u: parameter * v for u, v in zip(self.torus.symbols, direction)}
        expression = sympy.Integer(0)
        for weight, coefficient in self.terms.items():
            exponent = sum(a * v for a, v in zip(weight.coords, direction))
            denominator = coefficient.denom.as_expr(*self.torus.symbols).subs(substitution)
            if sympy.simplify(denominator) == 0:
                raise PoleError(f"方向 {direction} 落在系数的极点超平面上", coefficient.denom)
            expression += self.torus.to_sympy(coefficient).subs(substitution) * sympy.exp(parameter * exponent)
        return expression

    def limit_at_origin(self, direction: Optional[Sequence[int]] = None) -> Fraction:
        """x → 0 的极限，即测度的总质量"""
        s = Symbol("s")
        value = sympy.limit(self.restrict_to_line(direction, s), s, 0)
        return to_fraction(sympy.Rational(value))

    def first_moment(self, direction: Optional[Sequence[int]] = None) -> Fraction:
        """沿方向 v 的一阶矩 ∫⟨y, v⟩ dμ(y)"""
        s = Symbol("s")
        series = sympy.series(self.restrict_to_line(direction, s), s, 0, 2).removeO()
        return to_fraction(sympy.Rational(sympy.expand(series).coeff(s, 1)))

    def to_sympy(self) -> sympy.Expr:
        total = sympy.Integer(0)
        for weight, coefficient in self.terms.items():
            exponent = sum(a * u for a, u in zip(weight.coords, self.torus.symbols))
            total += self.torus.to_sympy(coefficient) * sympy.exp(exponent)
        return total

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        lines = [f"e^({weight}): {self.terms[weight]}" for weight in sorted(self.terms)]
        return "\n".join(lines)

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"weight": list(weight.coords), "coefficient": str(self.terms[weight])}
            for weight in sorted(self.terms)
        ]

    def __repr__(self) -> str:
        return f"ExpSum({self.to_text()!r})"


def ft_simplex(torus: TorusFunctions, nodes: Sequence[Union[Weight, RootVector]]) -> ExpSum:
    """
    单纯形上Lebesgue测度推前的Fourier变换
    ∫_{Δ^p} exp(Σ c_k ⟨β_k, x⟩)，总质量 1/p!

    逐个节点做卷积积分。状态 (w, m) ↦ R 表示 R·s^m e^{s w}，最后取 s = 1；
    重复节点自然产生合流项。

    :param torus: 环面函数
    :param nodes: β_0..β_p
    :return: ExpSum
    """
    nodes = [torus.as_weight(beta) for beta in nodes]
    if not nodes:
        raise ValueError("单纯形至少需要一个节点")

    state: Dict[Tuple[Weight, int], object] = {(nodes[0], 0): torus.one}
    for beta in nodes[1:]:
        updated: Dict[Tuple[Weight, int], object] = {}

        def add(key, value):
            updated[key] = updated.get(key, torus.zero) + value

        for (weight, m), coefficient in state.items():
            if weight == beta:
                add((beta, m + 1), coefficient * torus.constant(Fraction(1, m + 1)))
                continue
            d = torus.linear_fn(weight - beta)
            power = torus.one
            for k in range(m + 1):
                power = power * d
                factor = Fraction((-1) ** k * factorial(m), factorial(m - k))
                add((weight, m - k), coefficient * torus.constant(factor) / power)
            add((beta, 0), coefficient * torus.constant((-1) ** (m + 1) * factorial(m)) / power)
        state = {key: value for key, value in updated.items() if value}

    terms: Dict[Weight, object] = {}
    for (weight, _), coefficient in state.items():
        terms[weight] = terms.get(weight, torus.zero) + coefficient
    result = ExpSum(torus, terms)
    logger.debug(f"单纯形Fourier变换: {len(nodes)} 个节点, {len(result.terms)} 项")
    return result


def divided_difference(torus: TorusFunctions, nodes: Sequence[Union[Weight, RootVector]]) -> ExpSum:
    """
    互异节点的闭式 Σ_k e^{β_k} / ∏_{j≠k} (z_k − z_j)

    :param torus: 环面函数
    :param nodes: 两两不同的节点
    :return: ExpSum
    """
    nodes = [torus.as_weight(beta) for beta in nodes]
    if len(set(nodes)) != len(nodes):
        raise ValueError("闭式展开要求节点两两不同")
    terms = {}
    for k, beta in enumerate(nodes):
        denominator = torus.one
        for j, gamma in enumerate(nodes):
            if j != k:
                denominator = denominator * torus.linear_fn(beta - gamma)
        terms[beta] = torus.one / denominator
    return ExpSum(torus, terms)


def parse_point(text: str) -> Tuple[Fraction, ...]:
    """解析 "1/2,3" 形式的有理点"""
    return tuple(Fraction(part.strip()) for part in text.split(",") if part.strip())
