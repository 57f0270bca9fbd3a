"""
预投射代数模
关系检查、合成列簇的Euler特征数、ξ_M、子模维数向量与Harder–Narasimhan多面体

χ 的计算方式：在若干素数 p 上数 F_p 点，Lagrange插值出计数多项式，再在 q = 1 处取值。
旗子按 socle 方向构造：M^1 是 M 的单子模，M^k/M^{k−1} ≅ S_{i_k}。
"""

import random
import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

import sympy
from sympy import Matrix, Symbol, eye, isprime, kronecker_product, nextprime
from sympy.polys.domains import GF, QQ
from sympy.polys.polyfuncs import interpolate
from sympy.utilities.iterables import multiset_permutations

from .common import (DEFAULT_EXTRA_PRIMES, DEFAULT_MAX_WORKERS, SCHEMA_VERSION,
                     FieldStabilityError, InterpolationError, logger)
from .coordring import coordinate_ring
from .crystal import BInfinity, BinfElement
from .linalg import domain_matrix, nullspace, rank, solve_affine, to_fraction, to_int_mod
from .polytope import LatticePolytope, hull
from .rootdata import CartanData, RootVector
from .symbolic import DEFAULT_LINE

Arrow = Tuple[int, int]
Rows = Tuple[Tuple, ...]

# 规模上限
MAX_FLAG_DIM = 5
MAX_SUBMODULE_DIM = 5
MAX_LOOP_DIM = 3
MAX_TRUNCATED_DIM = 6

# 有理数模的子模枚举抽样的好素数个数
SAMPLE_FIELD_COUNT = 2


# ---- 箭图与模 ----

class QuiverData:
    """
    单边型Dynkin图的二重箭图

    顶点为 1..r，每条边 i-j 给出两支箭头 (i, j) 与 (j, i)，
    (i, j) 表示 M_i → M_j；τ(i, j) = +1 当 i < j，否则 −1。
    """

    def __init__(self, cd: CartanData):
        cd.require_simply_laced()
        self.cd = cd
        self.vertices = tuple(range(1, cd.rank + 1))
        self.arrows: Tuple[Arrow, ...] = tuple(
            (i, j) for i in self.vertices for j in self.vertices
            if i != j and cd.matrix[i - 1][j - 1] == -1
        )

    @staticmethod
    def bar(h: Arrow) -> Arrow:
        return h[1], h[0]

    @staticmethod
    def tau(h: Arrow) -> int:
        return 1 if h[0] < h[1] else -1

    def outgoing(self, i: int) -> List[Arrow]:
        return [h for h in self.arrows if h[0] == i]

    def incoming(self, i: int) -> List[Arrow]:
        return [h for h in self.arrows if h[1] == i]

    def __eq__(self, other) -> bool:
        return isinstance(other, QuiverData) and self.cd == other.cd

    def __hash__(self):
        return hash(self.cd)


@lru_cache(maxsize=None)
def quiver_for(cd: CartanData) -> QuiverData:
    return QuiverData(cd)


def _parse_field(text: str) -> int:
    text = str(text).strip()
    if text.upper() in ("QQ", "Q"):
        return 0
    match = re.fullmatch(r"(?:GF\(|F_?)(\d+)\)?", text, re.IGNORECASE)
    if not match or not isprime(int(match.group(1))):
        raise ValueError(f"无法识别的基域: {text}")
    return int(match.group(1))


def _field_name(p: int) -> str:
    return "QQ" if p == 0 else f"GF({p})"


class PPModule:
    """
    预投射代数模

    :param quiver: 二重箭图
    :param dims: 各顶点的维数
    :param arrows: 箭头 (i, j) 到 d_j × d_i 矩阵的映射，缺省箭头视为零
    :param field: 0 表示有理数域，素数 p 表示 F_p
    """

    def __init__(self, quiver: QuiverData, dims: Sequence[int],
                 arrows: Optional[Dict[Arrow, Sequence[Sequence]]] = None, field: int = 0):
        self.quiver = quiver
        self.dims = tuple(int(d) for d in dims)
        self.field = field
        if len(self.dims) != quiver.cd.rank or any(d < 0 for d in self.dims):
            raise ValueError(f"维数向量 {self.dims} 与 {quiver.cd.name} 不符")

        self.arrows: Dict[Arrow, Rows] = {}
        for h, rows in sorted((arrows or {}).items()):
            h = tuple(h)
            if h not in quiver.arrows:
                raise ValueError(f"箭图中没有箭头 {h[0]}→{h[1]}")
            rows = tuple(tuple(self._coerce(v) for v in row) for row in rows)
            source, target = self.dims[h[0] - 1], self.dims[h[1] - 1]
            if len(rows) != target or any(len(row) != source for row in rows):
                raise ValueError(f"箭头 {h[0]}→{h[1]} 的矩阵形状应为 {target}×{source}")
            # 只保存非零箭头
            if any(any(row) for row in rows):
                self.arrows[h] = rows

    def _coerce(self, value):
        if self.field == 0:
            return Fraction(value)
        return int(value) % self.field

    @property
    def cd(self) -> CartanData:
        return self.quiver.cd

    @property
    def domain(self):
        return QQ if self.field == 0 else GF(self.field)

    @property
    def dim_vector(self) -> RootVector:
        return RootVector(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def key(self) -> Tuple:
        return self.field, self.dims, tuple(self.arrows.items())

    def matrix(self, h: Arrow) -> Rows:
        if h in self.arrows:
            return self.arrows[h]
        zero = Fraction(0) if self.field == 0 else 0
        return tuple((zero,) * self.dims[h[0] - 1] for _ in range(self.dims[h[1] - 1]))

    def __eq__(self, other) -> bool:
        return isinstance(other, PPModule) and self.quiver == other.quiver and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self) -> str:
        return f"PPModule({self.cd.name}, dims={self.dims}, field={_field_name(self.field)})"

    @classmethod
    def zero(cls, quiver: QuiverData, field: int = 0) -> "PPModule":
        return cls(quiver, (0,) * quiver.cd.rank, {}, field)

    @classmethod
    def simple(cls, quiver: QuiverData, i: int, field: int = 0) -> "PPModule":
        """单模 S_i"""
        quiver.cd.check_index(i)
        return cls(quiver, tuple(int(k == i) for k in quiver.vertices), {}, field)

    def direct_sum(self, other: "PPModule") -> "PPModule":
        if self.quiver != other.quiver or self.field != other.field:
            raise ValueError("只能对同一箭图、同一基域上的模作直和")
        zero = Fraction(0) if self.field == 0 else 0
        arrows = {}
        for h in self.quiver.arrows:
            if h not in self.arrows and h not in other.arrows:
                continue
            top, bottom = self.matrix(h), other.matrix(h)
            pad_right = (zero,) * other.dims[h[0] - 1]
            pad_left = (zero,) * self.dims[h[0] - 1]
            arrows[h] = [row + pad_right for row in top] + [pad_left + row for row in bottom]
        dims = tuple(a + b for a, b in zip(self.dims, other.dims))
        return PPModule(self.quiver, dims, arrows, self.field)

    def reduce_mod(self, p: int) -> "PPModule":
        """约化到 F_p；分母被 p 整除时报错"""
        if self.field == p:
            return self
        if self.field != 0:
            raise ValueError(f"{_field_name(self.field)} 上的模不能约化到 F_{p}")
        arrows = {}
        for h, rows in self.arrows.items():
            reduced = []
            for row in rows:
                values = []
                for value in row:
                    if value.denominator % p == 0:
                        raise ValueError(f"箭头 {h[0]}→{h[1]} 的元素 {value} 在 F_{p} 上没有定义")
                    values.append(value.numerator * pow(value.denominator, -1, p) % p)
                reduced.append(values)
            arrows[h] = reduced
        return PPModule(self.quiver, self.dims, arrows, p)

    def to_json(self) -> Dict[str, object]:
        def entry(value):
            return str(value) if self.field == 0 else value

        return {
            "schema": SCHEMA_VERSION,
            "cartan": self.cd.name,
            "field": _field_name(self.field),
            "dims": list(self.dims),
            "arrows": [
                {"from": h[0], "to": h[1], "entries": [[entry(v) for v in row] for row in rows]}
                for h, rows in self.arrows.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "PPModule":
        for key in ("cartan", "dims"):
            if key not in data:
                raise ValueError(f"模文件缺少字段: {key}")
        quiver = quiver_for(CartanData.from_string(str(data["cartan"])))
        field = _parse_field(data.get("field", "QQ"))
        arrows = {}
        for item in data.get("arrows", []):
            try:
                h = (int(item["from"]), int(item["to"]))
                arrows[h] = item["entries"]
            except (KeyError, TypeError) as e:
                raise ValueError(f"箭头格式错误: {item}") from e
        return cls(quiver, data["dims"], arrows, field)


# ---- 基域上的小工具 ----

def _from_domain(value, p: int):
    return to_fraction(value) if p == 0 else to_int_mod(value, p)


def _normalize(value, p: int):
    return Fraction(value) if p == 0 else value % p


def _inverse(value, p: int):
    return 1 / Fraction(value) if p == 0 else pow(value, -1, p)


def _apply(rows: Rows, vector: Sequence, p: int) -> Tuple:
    return tuple(_normalize(sum(a * b for a, b in zip(row, vector)), p) for row in rows)


def check_relation(module: PPModule) -> bool:
    """
    在每个顶点检查 Σ_h τ(h) M_h M_h̄ = 0

    :param module: 预投射代数模
    :return: 是否满足关系
    """
    quiver = module.quiver
    domain = module.domain
    for i in quiver.vertices:
        d = module.dims[i - 1]
        if d == 0:
            continue
        total = None
        for h in quiver.incoming(i):
            back = quiver.bar(h)
            if h not in module.arrows or back not in module.arrows:
                continue
            m_h = domain_matrix(module.arrows[h], module.dims[h[0] - 1], domain)
            m_back = domain_matrix(module.arrows[back], d, domain)
            term = m_h * m_back if quiver.tau(h) > 0 else -(m_h * m_back)
            total = term if total is None else total + term
        if total is not None and not total.is_zero_matrix:
            logger.debug(f"顶点 {i} 处预投射关系不成立")
            return False
    return True


def _socle_basis(module: PPModule, i: int) -> List[List]:
    """顶点 i 处出箭头的公共核"""
    d = module.dims[i - 1]
    if d == 0:
        return []
    rows = [list(row) for h in module.quiver.outgoing(i) for row in module.matrix(h)]
    if not rows:
        one = Fraction(1) if module.field == 0 else 1
        zero = Fraction(0) if module.field == 0 else 0
        return [[one if k == c else zero for k in range(d)] for c in range(d)]
    return [[_from_domain(v, module.field) for v in vector]
            for vector in nullspace(rows, d, module.domain)]


def socle_dims(module: PPModule) -> Tuple[int, ...]:
    return tuple(len(_socle_basis(module, i)) for i in module.quiver.vertices)


def top_dims(module: PPModule) -> Tuple[int, ...]:
    """顶点 i 处入箭头像空间的余维"""
    result = []
    for i in module.quiver.vertices:
        d = module.dims[i - 1]
        columns = []
        for h in module.quiver.incoming(i):
            rows = module.matrix(h)
            columns.extend([rows[r][c] for r in range(d)] for c in range(module.dims[h[0] - 1]))
        result.append(d - rank(columns, d, module.domain) if d else 0)
    return tuple(result)


def epsilons(module: PPModule) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    模的晶体统计量

    :return: (ε, ε*)，ε_i 为 socle 在顶点 i 的维数，ε*_i 为 top 在顶点 i 的维数
    """
    return socle_dims(module), top_dims(module)


def _quotient(module: PPModule, i: int, vector: Sequence) -> PPModule:
    """商掉顶点 i 处 socle 中的向量 v 张成的单子模"""
    p = module.field
    k = next(index for index, value in enumerate(vector) if value)
    inverse = _inverse(vector[k], p)
    arrows = {}
    for h, rows in module.arrows.items():
        new = [list(row) for row in rows]
        if h[0] == i:
            new = [row[:k] + row[k + 1:] for row in new]
        if h[1] == i:
            pivot_row = new[k]
            new = [
                [_normalize(x - y * inverse * vector[r], p) for x, y in zip(row, pivot_row)]
                for r, row in enumerate(new) if r != k
            ]
        arrows[h] = new
    dims = list(module.dims)
    dims[i - 1] -= 1
    return PPModule(module.quiver, dims, arrows, p)


def _projective_points(s: int, p: int) -> Iterator[Tuple[int, ...]]:
    """F_p^s 中的直线，首个非零坐标取 1"""
    for lead in range(s):
        for tail in product(range(p), repeat=s - lead - 1):
            yield (0,) * lead + (1,) + tail


def _check_sequence(module: PPModule, seq: Sequence[int]):
    total = module.cd.zero_root()
    for i in seq:
        total = total + module.cd.simple_root(i)
    if total != module.dim_vector:
        raise ValueError(f"序列 {tuple(seq)} 的权 {total} 与维数向量 {module.dim_vector} 不符")


# ---- 旗子计数 ----

def count_flags(module: PPModule, seq: Sequence[int], p: Optional[int] = None) -> int:
    """
    F_p 上类型为 seq 的合成列个数

    :param module: 有理数模（约化到 F_p）或 F_p 上的模
    :param seq: 顶点序列
    :param p: 素数，F_p 上的模可以省略
    :return: 旗子个数
    """
    p = p or module.field
    if not p:
        raise ValueError("有限域计数需要指定素数 p")
    module = module.reduce_mod(p)
    _check_sequence(module, seq)
    return _count_flags(module, tuple(seq), {})


def _count_flags(module: PPModule, seq: Tuple[int, ...], memo: Dict) -> int:
    if not seq:
        return 1
    key = (module.key, seq)
    if key in memo:
        return memo[key]

    p = module.field
    i = seq[0]
    socle = _socle_basis(module, i)
    total = 0
    if socle and not any(i in h for h in module.arrows):
        # 顶点 i 与其余部分断开，商模与所选直线无关
        lines = (p ** len(socle) - 1) // (p - 1)
        total = lines * _count_flags(_quotient(module, i, socle[0]), seq[1:], memo)
    elif socle:
        for coefficients in _projective_points(len(socle), p):
            vector = [
                sum(c * basis[k] for c, basis in zip(coefficients, socle)) % p
                for k in range(module.dims[i - 1])
            ]
            total += _count_flags(_quotient(module, i, vector), seq[1:], memo)
    memo[key] = total
    return total


def finite_flag_count(module: PPModule, seq: Sequence[int]) -> Optional[int]:
    """
    每一步 socle 直线都被唯一确定时，在有理数域上直接数旗子

    :return: 旗子个数；某一步有多于一条直线可选时返回 None
    """
    if module.field:
        raise ValueError("直接计数只对有理数模定义")
    _check_sequence(module, seq)
    return _finite_count(module, tuple(seq))


def _finite_count(module: PPModule, seq: Tuple[int, ...]) -> Optional[int]:
    if not seq:
        return 1
    socle = _socle_basis(module, seq[0])
    if not socle:
        return 0
    if len(socle) > 1:
        return None
    return _finite_count(_quotient(module, seq[0], socle[0]), seq[1:])


# ---- 子空间与子模枚举 ----

@lru_cache(maxsize=None)
def _subspaces(dim: int, p: int) -> Tuple[Rows, ...]:
    """F_p^dim 的全部子空间，按行最简形给出基"""
    result = []
    for k in range(dim + 1):
        for pivots in combinations(range(dim), k):
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, dim) if c not in pivots]
            for values in product(range(p), repeat=len(free)):
                rows = [[0] * dim for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), value in zip(free, values):
                    rows[r][c] = value
                result.append(tuple(tuple(row) for row in rows))
    return tuple(result)


def _maps_into(source: Rows, target: Rows, rows: Rows, target_dim: int, p: int) -> bool:
    """A(source) ⊆ target"""
    images = [image for image in (_apply(rows, u, p) for u in source) if any(image)]
    if not images:
        return True
    return rank(list(target) + images, target_dim, GF(p)) == len(target)


def _contains(big: Rows, small: Rows, dim: int, p: int) -> bool:
    if len(small) > len(big):
        return False
    return not small or rank(list(big) + list(small), dim, GF(p)) == len(big)


def _stable_tuples(dims: Sequence[int], arrows: Dict[Arrow, Rows],
                   loops: Dict[int, Rows], p: int) -> List[Tuple[Rows, ...]]:
    """各顶点子空间的组合，要求被箭头（以及顶点上的自环）保持"""
    candidates = []
    for i, d in enumerate(dims, start=1):
        spaces = _subspaces(d, p)
        if i in loops:
            spaces = [u for u in spaces if _maps_into(u, u, loops[i], d, p)]
        candidates.append(spaces)

    result = []
    for choice in product(*candidates):
        if all(_maps_into(choice[h[0] - 1], choice[h[1] - 1], rows, dims[h[1] - 1], p)
               for h, rows in arrows.items()):
            result.append(choice)
    return result


def _submodules(module: PPModule) -> List[Tuple[Rows, ...]]:
    return _stable_tuples(module.dims, module.arrows, {}, module.field)


def count_flags_bruteforce(module: PPModule, seq: Sequence[int], p: int) -> int:
    """枚举全部子模再数链，作为 count_flags 的独立校验"""
    module = module.reduce_mod(p)
    _check_sequence(module, seq)
    cd = module.cd
    submodules = _submodules(module)

    targets = [cd.zero_root()]
    for i in seq:
        targets.append(targets[-1] + cd.simple_root(i))

    def dimvector(sub) -> RootVector:
        return RootVector(tuple(len(u) for u in sub))

    counts = {sub: 1 for sub in submodules if dimvector(sub) == targets[0]}
    for target in targets[1:]:
        counts = {
            sub: sum(
                n for smaller, n in counts.items()
                if all(_contains(b, s, d, p) for b, s, d in zip(sub, smaller, module.dims))
            )
            for sub in submodules if dimvector(sub) == target
        }
    return sum(counts.values())


def submodule_dimvectors(module: PPModule, fields: Optional[Sequence[int]] = None) -> Set[RootVector]:
    """
    全部子模的维数向量

    有理数模在若干好素数（箭头元素的分子分母都不被整除）上分别枚举，
    结果不一致时报 FieldStabilityError。

    :param module: 总维数 ≤ 5 的模
    :param fields: 抽样的素数，缺省取最小的 SAMPLE_FIELD_COUNT 个好素数
    :return: 维数向量集合
    """
    if module.total_dim > MAX_SUBMODULE_DIM:
        raise ValueError(f"子模枚举只支持总维数 ≤ {MAX_SUBMODULE_DIM}")
    if module.field:
        fields = (module.field,)
    elif fields is None:
        fields = _sample_primes(module, SAMPLE_FIELD_COUNT)

    results = {}
    for p in fields:
        reduced = module.reduce_mod(p)
        results[p] = {RootVector(tuple(len(u) for u in sub)) for sub in _submodules(reduced)}
    first = results[fields[0]]
    for p, found in results.items():
        if found != first:
            logger.error(f"F_{fields[0]} 与 F_{p} 上的子模维数向量不同")
            raise FieldStabilityError(f"子模集合不是域稳定的: F_{fields[0]} 与 F_{p} 的结果不一致")
    return first


def hn_polytope(module: PPModule) -> LatticePolytope:
    """Harder–Narasimhan 多面体：子模维数向量的凸包"""
    return hull(submodule_dimvectors(module))


def match_crystal_element(module: PPModule, binf: Optional[BInfinity] = None) -> BinfElement:
    """
    按 (wt, ε, ε*) 匹配 B(∞) 中的元素

    :return: 唯一匹配的元素
    """
    binf = binf or BInfinity(module.cd)
    socle, top = epsilons(module)
    candidates = [
        b for b in binf.elements_of_weight(module.dim_vector)
        if binf.epsilon_vector(b) == socle and binf.epsilon_star_vector(b) == top
    ]
    if len(candidates) != 1:
        raise ValueError(f"{module} 在 B(∞) 中有 {len(candidates)} 个 (wt, ε, ε*) 匹配")
    return candidates[0]


# ---- Euler特征数 ----

def _is_good_prime(module: PPModule, p: int) -> bool:
    return all(
        value.numerator % p and value.denominator % p
        for rows in module.arrows.values() for row in rows for value in row if value
    )


def _sample_primes(module: PPModule, count: int, start: int = 2) -> List[int]:
    primes = []
    p = start if isprime(start) else nextprime(start)
    while len(primes) < count:
        if _is_good_prime(module, p):
            primes.append(p)
        else:
            logger.warning(f"跳过坏素数 {p}")
        p = nextprime(p)
    return primes


def _interpolate_at_one(samples: Sequence[Tuple[int, int]], degree: int) -> int:
    """用前 degree+1 个点插值，其余点校验，返回 q = 1 处的值"""
    q = Symbol("q")
    poly = sympy.sympify(interpolate(list(samples[:degree + 1]), q))
    for p, count in samples[degree + 1:]:
        if poly.subs(q, p) != count:
            logger.error(f"计数多项式 {poly} 在 q = {p} 处给出 {poly.subs(q, p)}，实际为 {count}")
            raise InterpolationError(f"点数在 q = {p} 处不符合插值多项式 {poly}")
    value = to_fraction(sympy.Rational(poly.subs(q, 1)))
    if value.denominator != 1:
        raise InterpolationError(f"计数多项式 {poly} 在 q = 1 处不是整数")
    return int(value)


def _count_over_primes(worker, primes: Sequence[int], max_workers: int) -> Dict[int, object]:
    results = {}
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(worker, p): p for p in primes}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


def chi_flag(module: PPModule, seq: Sequence[int], primes_start: int = 2,
             extra_primes: int = DEFAULT_EXTRA_PRIMES,
             max_workers: int = DEFAULT_MAX_WORKERS) -> int:
    """
    合成列簇 F_seq(M) 的Euler特征数

    :param module: 有理数模，总维数 ≤ 5
    :param seq: 顶点序列，权等于维数向量
    :param primes_start: 从该数起取素数
    :param extra_primes: 额外用于校验的素数个数
    :param max_workers: 并行线程数
    :return: χ(F_seq(M))
    """
    if module.field:
        raise ValueError("Euler特征数只对有理数模定义")
    if module.total_dim > MAX_FLAG_DIM:
        raise ValueError(f"旗子计数只支持总维数 ≤ {MAX_FLAG_DIM}")
    _check_sequence(module, seq)

    # F_seq(M) 落在各顶点完全旗簇的乘积中
    degree = sum(d * (d - 1) // 2 for d in module.dims)
    primes = _sample_primes(module, degree + 1 + extra_primes, primes_start)
    counts = _count_over_primes(lambda p: count_flags(module, seq, p), primes, max_workers)
    chi = _interpolate_at_one([(p, counts[p]) for p in primes], degree)

    finite = finite_flag_count(module, seq)
    if finite is not None and finite != chi:
        raise InterpolationError(f"插值结果 {chi} 与直接计数 {finite} 不一致")
    logger.debug(f"χ(F_{tuple(seq)}) = {chi}，素数 {primes}")
    return chi


def flag_sequences(module: PPModule) -> List[Tuple[int, ...]]:
    """权等于维数向量的全部顶点序列"""
    letters = [i for i, d in zip(module.quiver.vertices, module.dims) for _ in range(d)]
    if not letters:
        return [()]
    return [tuple(s) for s in multiset_permutations(letters)]


def xi(module: PPModule, **options) -> Union[object, Dict[Tuple[int, ...], int]]:
    """
    ξ_M：满足 ⟨e_{i_1}···e_{i_p}, ξ_M⟩ = χ(F_i(M)) 的函数

    A1、A2、A3 型时在 C[N]_ν 的单项式基上解配对方程组，返回多项式；
    其余类型返回序列到 χ 的映射。

    :param module: 总维数 ≤ 5 的有理数模
    :param options: 传给 chi_flag 的参数
    """
    if module.total_dim > MAX_FLAG_DIM:
        raise ValueError(f"ξ 的重建只支持高度 ≤ {MAX_FLAG_DIM}")
    sequences = flag_sequences(module)
    chis = {seq: chi_flag(module, seq, **options) for seq in sequences}

    cd = module.cd
    if not re.fullmatch(r"A[1-3]", cd.name):
        return chis

    cr = coordinate_ring(cd.rank + 1)
    nu = module.dim_vector
    basis = cr.monomial_basis(nu)
    rows = [[cr.pairing(seq, b) for b in basis] for seq in sequences]
    particular, kernel = solve_affine(rows, [chis[seq] for seq in sequences], len(basis))
    if particular is None:
        logger.error(f"{module} 的 χ 值与 C[N]_{nu} 上的配对不相容")
        raise RuntimeError("配对方程组无解")
    if kernel:
        logger.error(f"C[N]_{nu} 上的配对矩阵不满秩")
        raise RuntimeError("配对矩阵奇异")
    return sum((b * c for b, c in zip(basis, particular)), cr.ring.zero)


# ---- 一般性检验 ----

_UNITS = (5, 7, 11, 13)


def _unit_shift(old: Fraction, rng: random.Random) -> Fraction:
    """选一个扰动量，使新元素非零"""
    shifts = list(range(1, 31))
    rng.shuffle(shifts)
    return Fraction(next(shift for shift in shifts if old + shift))


def _perturbations(module: PPModule, rng: random.Random) -> Iterator[PPModule]:
    quiver = module.quiver

    # 环面伸缩：t_h · t_h̄ = 1 保持关系
    scaled = {}
    for h, rows in module.arrows.items():
        s = Fraction(rng.choice(_UNITS))
        factor = s if h[0] < h[1] else 1 / s
        scaled[h] = [[v * factor for v in row] for row in rows]
    yield PPModule(quiver, module.dims, scaled)

    # 单个元素的扰动，只保留仍满足关系的
    for h in quiver.arrows:
        rows = module.matrix(h)
        for r, row in enumerate(rows):
            for c, old in enumerate(row):
                new = [list(x) for x in rows]
                new[r][c] = old + _unit_shift(old, rng)
                arrows = dict(module.arrows)
                arrows[h] = new
                candidate = PPModule(quiver, module.dims, arrows)
                if check_relation(candidate):
                    yield candidate


def is_stably_generic(module: PPModule, seed: int = 0) -> bool:
    """
    在保持关系的有理扰动下 ε、ε* 与子模维数向量是否不变

    :param module: 有理数模
    :param seed: 随机种子
    """
    if module.field:
        raise ValueError("一般性检验只对有理数模定义")
    reference = (epsilons(module), submodule_dimvectors(module))
    rng = random.Random(seed)
    for candidate in _perturbations(module, rng):
        try:
            stats = (epsilons(candidate), submodule_dimvectors(candidate))
        except FieldStabilityError as e:
            logger.warning(f"扰动后的模子模集合不稳定: {e}")
            return False
        if stats != reference:
            logger.info(f"{module} 在扰动下统计量改变")
            return False
    return True


# ---- 截断模 M[t]/t^n 的Grassmann簇 ----

def _truncated(module: PPModule, n: int) -> Tuple[Tuple[int, ...], Dict[Arrow, Rows], Dict[int, Rows]]:
    """M ⊗ k[t]/t^n：箭头为 M_h ⊗ I_n，t 作用为 I ⊗ J_n"""
    shift = Matrix(n, n, lambda r, c: 1 if r == c + 1 else 0)
    dims = tuple(d * n for d in module.dims)
    arrows = {}
    for h, rows in module.arrows.items():
        big = kronecker_product(Matrix(rows), eye(n))
        arrows[h] = tuple(tuple(int(v) for v in big.row(r)) for r in range(big.rows))
    loops = {}
    for i, d in zip(module.quiver.vertices, module.dims):
        if d:
            big = kronecker_product(eye(d), shift)
            loops[i] = tuple(tuple(int(v) for v in big.row(r)) for r in range(big.rows))
    return dims, arrows, loops


def _count_truncated(module: PPModule, n: int, p: int) -> Dict[RootVector, int]:
    reduced = module.reduce_mod(p)
    dims, arrows, loops = _truncated(reduced, n)
    arrows = {h: tuple(tuple(v % p for v in row) for row in rows) for h, rows in arrows.items()}
    counts: Dict[RootVector, int] = {}
    for sub in _stable_tuples(dims, arrows, loops, p):
        mu = RootVector(tuple(len(u) for u in sub))
        counts[mu] = counts.get(mu, 0) + 1
    return counts


def _a1_fixed_points(d: int, n: int) -> Dict[RootVector, int]:
    """(k[t]/t^n)^d 中环面不动的 t-稳定子空间：各分量取截断理想"""
    counts: Dict[RootVector, int] = {}
    for lengths in product(range(n + 1), repeat=d):
        mu = RootVector((sum(lengths),))
        counts[mu] = counts.get(mu, 0) + 1
    return dict(sorted(counts.items()))


def grassmannian_lattice_dist(module: PPModule, n: int, primes_start: int = 2,
                              extra_primes: int = DEFAULT_EXTRA_PRIMES,
                              max_workers: int = DEFAULT_MAX_WORKERS) -> Dict[RootVector, int]:
    """
    μ ↦ χ(G_μ(M[t]/t^n))

    总维数 · n ≤ 6 且每个顶点 ≤ 3 时走有限域计数与插值；
    更大的 A1 模用环面不动点计数。

    :param module: 有理数模
    :param n: 截断阶
    :return: 维数向量到Euler特征数的映射（只含非零项）
    """
    if n < 1:
        raise ValueError("截断阶 n 必须为正")
    if module.field:
        raise ValueError("Grassmann簇的Euler特征数只对有理数模定义")

    dims = [d * n for d in module.dims]
    if max(dims, default=0) <= MAX_LOOP_DIM and sum(dims) <= MAX_TRUNCATED_DIM:
        degree = sum(d * d // 4 for d in dims)
        primes = _sample_primes(module, degree + 1 + extra_primes, primes_start)
        counts = _count_over_primes(lambda p: _count_truncated(module, n, p), primes, max_workers)
        weights = sorted(set().union(*(c.keys() for c in counts.values())))
        result = {}
        for mu in weights:
            chi = _interpolate_at_one([(p, counts[p].get(mu, 0)) for p in primes], degree)
            if chi:
                result[mu] = chi
        return result

    if module.cd.rank == 1:
        logger.info(f"A1 截断模 (n = {n}) 使用环面不动点计数")
        return _a1_fixed_points(module.dims[0], n)
    raise ValueError(f"截断模 M[t]/t^{n} 超出可计数规模")


def lattice_first_moment(module: PPModule, dist: Dict[RootVector, int], n: int,
                         direction: Optional[Sequence[int]] = None) -> Fraction:
    """(1/n^{dim M}) (τ_n)_* 分布沿方向的一阶矩，τ_n 为按 1/n 缩放"""
    cd = module.cd
    direction = tuple(direction or DEFAULT_LINE[:cd.rank])
    total = Fraction(0)
    for mu, chi in dist.items():
        weight = cd.root_to_weight(mu)
        total += chi * sum(a * v for a, v in zip(weight.coords, direction))
    return total / n ** (module.total_dim + 1)


# ---- 固定的测试模 ----

def sl2_module(n: int) -> PPModule:
    """A1 型的 k^n"""
    return PPModule(quiver_for(CartanData.from_string("A1")), (n,))


def sl3_example(a, b) -> PPModule:
    """A2 型维数向量 (1,1) 的模，M_{1→2} = a，M_{2→1} = b"""
    quiver = quiver_for(CartanData.from_string("A2"))
    return PPModule(quiver, (1, 1), {(1, 2): [[a]], (2, 1): [[b]]})


def sl3_fixtures() -> Dict[str, PPModule]:
    """
    A2 型的刚性测试模

    X_a 只有 2→1 非零，子模维数向量为 {0, α1, α1+α2}；X_b 只有 1→2 非零
    """
    quiver = quiver_for(CartanData.from_string("A2"))
    s1 = PPModule.simple(quiver, 1)
    s2 = PPModule.simple(quiver, 2)
    x_a = sl3_example(0, 1)
    x_b = sl3_example(1, 0)
    return {
        "S1": s1,
        "S2": s2,
        "S1+S1": s1.direct_sum(s1),
        "X_a": x_a,
        "X_b": x_b,
        "S1+S2": s1.direct_sum(s2),
        "S1+X_a": s1.direct_sum(x_a),
    }
