"""
有限型根系数据
Cartan矩阵、正根、Weyl群、约化词与Kostant配分函数

约定：
- 权用基本权坐标（ω坐标）表示，根用单根坐标（α坐标）表示；
- 换算通过Cartan矩阵完成：λ_k = Σ_j a_kj v_j；
- 所有公开接口的单根下标从1开始。
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from sympy import Matrix

from .common import logger, UnsupportedCartanTypeError

ReducedWord = Tuple[int, ...]

# 秩的上限与穷举上限
MAX_RANK = 8
MAX_ENUMERATION_RANK = 4
MAX_KOSTANT_HEIGHT = 12


@dataclass(frozen=True, order=True)
class Weight:
    """权，基本权坐标下的整数向量"""
    coords: Tuple[int, ...]

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coords))

    def scale(self, k: int) -> "Weight":
        return Weight(tuple(k * a for a in self.coords))

    def is_dominant(self) -> bool:
        return all(a >= 0 for a in self.coords)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.coords)


@dataclass(frozen=True, order=True)
class RootVector:
    """根格向量，单根坐标"""
    coords: Tuple[int, ...]

    def __add__(self, other: "RootVector") -> "RootVector":
        return RootVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "RootVector") -> "RootVector":
        return RootVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "RootVector":
        return RootVector(tuple(-a for a in self.coords))

    def scale(self, k: int) -> "RootVector":
        return RootVector(tuple(k * a for a in self.coords))

    @property
    def height(self) -> int:
        return sum(self.coords)

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for a in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.coords)


def _chain(n: int) -> List[List[int]]:
    matrix = [[0] * n for _ in range(n)]
    for i in range(n):
        matrix[i][i] = 2
        if i + 1 < n:
            matrix[i][i + 1] = -1
            matrix[i + 1][i] = -1
    return matrix


def _graph(n: int, edges: List[Tuple[int, int]]) -> List[List[int]]:
    matrix = [[0] * n for _ in range(n)]
    for i in range(n):
        matrix[i][i] = 2
    for i, j in edges:
        matrix[i - 1][j - 1] = -1
        matrix[j - 1][i - 1] = -1
    return matrix


def _simple_cartan(letter: str, rank: int) -> List[List[int]]:
    """单个不可约分量的Cartan矩阵（Bourbaki编号）"""
    if letter == "A" and rank >= 1:
        return _chain(rank)
    if letter == "B" and rank >= 2:
        matrix = _chain(rank)
        matrix[rank - 1][rank - 2] = -2
        return matrix
    if letter == "C" and rank >= 2:
        matrix = _chain(rank)
        matrix[rank - 2][rank - 1] = -2
        return matrix
    if letter == "D" and rank >= 4:
        edges = [(i, i + 1) for i in range(1, rank - 1)] + [(rank - 2, rank)]
        return _graph(rank, edges)
    if letter == "E" and rank in (6, 7, 8):
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)] + [(k, k + 1) for k in range(5, rank)]
        return _graph(rank, edges)
    if letter == "F" and rank == 4:
        matrix = _chain(4)
        matrix[2][1] = -2
        return matrix
    if letter == "G" and rank == 2:
        return [[2, -3], [-1, 2]]
    raise UnsupportedCartanTypeError(f"未知的Cartan类型: {letter}{rank}")


@dataclass(frozen=True)
class CartanData:
    """
    有限型Cartan数据

    matrix[i][j] = ⟨α_i^∨, α_j⟩
    """
    name: str
    matrix: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_string(cls, text: str) -> "CartanData":
        """
        从 "A2"、"D4"、"A1xA1" 之类的字符串构造

        :param text: 类型字符串
        :return: CartanData
        """
        parts = [p for p in re.split(r"[x×*]", text.strip().upper()) if p]
        if not parts:
            raise UnsupportedCartanTypeError(f"无法解析Cartan类型: {text!r}")

        blocks = []
        for part in parts:
            match = re.fullmatch(r"([A-G])(\d+)", part)
            if not match:
                raise UnsupportedCartanTypeError(f"无法解析Cartan类型: {text!r}")
            blocks.append(_simple_cartan(match.group(1), int(match.group(2))))

        rank = sum(len(b) for b in blocks)
        if rank > MAX_RANK:
            raise ValueError(f"秩 {rank} 超过上限 {MAX_RANK}")

        matrix = [[0] * rank for _ in range(rank)]
        offset = 0
        for block in blocks:
            for i, row in enumerate(block):
                for j, entry in enumerate(row):
                    matrix[offset + i][offset + j] = entry
            offset += len(block)

        name = "x".join(parts)
        return cls(name, tuple(tuple(row) for row in matrix))

    @classmethod
    def from_type(cls, letter: str, rank: int) -> "CartanData":
        return cls.from_string(f"{letter}{rank}")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def is_simply_laced(self) -> bool:
        return all(
            self.matrix[i][j] in (0, -1)
            for i in range(self.rank) for j in range(self.rank) if i != j
        )

    def require_simply_laced(self):
        if not self.is_simply_laced:
            raise UnsupportedCartanTypeError(f"{self.name} 不是单边型，暂不支持该晶体运算")

    def check_index(self, i: int):
        if not 1 <= i <= self.rank:
            raise ValueError(f"单根下标 {i} 超出范围 1..{self.rank}")

    def pairing(self, i: int, weight: Weight) -> int:
        """⟨α_i^∨, λ⟩"""
        self.check_index(i)
        return weight.coords[i - 1]

    def simple_root(self, i: int) -> RootVector:
        self.check_index(i)
        return RootVector(tuple(1 if k == i - 1 else 0 for k in range(self.rank)))

    def fundamental_weight(self, i: int) -> Weight:
        self.check_index(i)
        return Weight(tuple(1 if k == i - 1 else 0 for k in range(self.rank)))

    def zero_weight(self) -> Weight:
        return Weight((0,) * self.rank)

    def zero_root(self) -> RootVector:
        return RootVector((0,) * self.rank)

    def rho(self) -> Weight:
        return Weight((1,) * self.rank)

    def root_to_weight(self, root: RootVector) -> Weight:
        return Weight(tuple(
            sum(self.matrix[k][j] * root.coords[j] for j in range(self.rank))
            for k in range(self.rank)
        ))

    def alpha_weight(self, i: int) -> Weight:
        return self.root_to_weight(self.simple_root(i))

    def weight_to_root_fractions(self, weight: Weight) -> Tuple[Fraction, ...]:
        inverse = _inverse_cartan(self)
        return tuple(
            sum((inverse[k][j] * weight.coords[j] for j in range(self.rank)), Fraction(0))
            for k in range(self.rank)
        )

    def weight_to_root(self, weight: Weight) -> RootVector:
        """权在根格中时换算为单根坐标，否则报错"""
        coords = self.weight_to_root_fractions(weight)
        if any(c.denominator != 1 for c in coords):
            raise ValueError(f"权 {weight} 不在根格中")
        return RootVector(tuple(int(c) for c in coords))

    def reflect_root(self, i: int, root: RootVector) -> RootVector:
        """s_i(v) = v − ⟨α_i^∨, v⟩ α_i"""
        row = self.matrix[i - 1]
        shift = sum(row[j] * root.coords[j] for j in range(self.rank))
        coords = list(root.coords)
        coords[i - 1] -= shift
        return RootVector(tuple(coords))

    def reflect_weight(self, i: int, weight: Weight) -> Weight:
        value = weight.coords[i - 1]
        return Weight(tuple(
            weight.coords[k] - value * self.matrix[k][i - 1] for k in range(self.rank)
        ))

    def apply_word_to_root(self, word: ReducedWord, root: RootVector) -> RootVector:
        """s_{i1}···s_{ik}(v)，最右边的反射先作用"""
        for i in reversed(word):
            root = self.reflect_root(i, root)
        return root

    def apply_word_to_weight(self, word: ReducedWord, weight: Weight) -> Weight:
        for i in reversed(word):
            weight = self.reflect_weight(i, weight)
        return weight

    def __str__(self) -> str:
        return self.name


@lru_cache(maxsize=None)
def _inverse_cartan(cd: CartanData) -> Tuple[Tuple[Fraction, ...], ...]:
    inverse = Matrix(cd.matrix).inv()
    return tuple(
        tuple(Fraction(int(inverse[k, j].p), int(inverse[k, j].q)) for j in range(cd.rank))
        for k in range(cd.rank)
    )


@lru_cache(maxsize=None)
def positive_roots(cd: CartanData) -> Tuple[RootVector, ...]:
    """
    正根列表：单根在单反射作用下的轨道闭包

    :param cd: Cartan数据
    :return: 按(高度, 坐标)排序的正根
    """
    roots = {cd.simple_root(i) for i in range(1, cd.rank + 1)}
    frontier = list(roots)
    while frontier:
        next_frontier = []
        for root in frontier:
            for i in range(1, cd.rank + 1):
                image = cd.reflect_root(i, root)
                if image not in roots:
                    roots.add(image)
                    next_frontier.append(image)
        frontier = next_frontier

    positives = sorted((r for r in roots if r.is_nonnegative()), key=lambda r: (r.height, r.coords))
    logger.debug(f"{cd.name} 共有 {len(positives)} 个正根")
    return tuple(positives)


def is_positive(root: RootVector) -> bool:
    return root.is_nonnegative() and not root.is_zero()


def is_reduced(cd: CartanData, word: ReducedWord) -> bool:
    """词约化当且仅当每个 β_k = s_{i1}···s_{i_{k-1}}(α_{ik}) 都是正根"""
    for k, i in enumerate(word):
        if not 1 <= i <= cd.rank:
            return False
        if not is_positive(cd.apply_word_to_root(tuple(word[:k]), cd.simple_root(i))):
            return False
    return True


def word_roots(cd: CartanData, word: ReducedWord) -> List[RootVector]:
    """
    约化词对应的根序列 β_k = s_{i1}···s_{i_{k-1}}(α_{ik})

    :param cd: Cartan数据
    :param word: 约化词
    :return: 根序列
    """
    word = tuple(word)
    if not is_reduced(cd, word):
        raise ValueError(f"词 {word} 不是约化词")
    return [cd.apply_word_to_root(word[:k], cd.simple_root(i)) for k, i in enumerate(word)]


def _check_enumeration_rank(cd: CartanData):
    if cd.rank > MAX_ENUMERATION_RANK:
        raise ValueError(f"秩 {cd.rank} 超过穷举上限 {MAX_ENUMERATION_RANK}")


def reduced_words_w0(cd: CartanData) -> Iterator[ReducedWord]:
    """
    按字典序枚举最长元 w0 的全部约化词

    :param cd: Cartan数据（秩 ≤ 4）
    :return: 约化词迭代器
    """
    _check_enumeration_rank(cd)
    length = len(positive_roots(cd))

    def extend(prefix: Tuple[int, ...]) -> Iterator[ReducedWord]:
        if len(prefix) == length:
            yield prefix
            return
        for i in range(1, cd.rank + 1):
            if is_positive(cd.apply_word_to_root(prefix, cd.simple_root(i))):
                yield from extend(prefix + (i,))

    yield from extend(())


@lru_cache(maxsize=None)
def all_reduced_words_w0(cd: CartanData) -> Tuple[ReducedWord, ...]:
    words = tuple(reduced_words_w0(cd))
    logger.debug(f"{cd.name} 的 w0 共有 {len(words)} 个约化词")
    return words


def braid_order(cd: CartanData, i: int, j: int) -> int:
    """s_i s_j 的阶 m_ij"""
    product = cd.matrix[i - 1][j - 1] * cd.matrix[j - 1][i - 1]
    return {0: 2, 1: 3, 2: 4, 3: 6}[product]


def braid_neighbors(cd: CartanData, word: ReducedWord) -> List[ReducedWord]:
    """
    经过一次秩2辫子关系得到的所有相邻约化词

    :param cd: Cartan数据
    :param word: 约化词
    :return: 排序后的相邻词列表
    """
    word = tuple(word)
    neighbors = set()
    for k in range(len(word) - 1):
        i, j = word[k], word[k + 1]
        if i == j:
            continue
        m = braid_order(cd, i, j)
        segment = word[k:k + m]
        if len(segment) < m:
            continue
        pattern = tuple(i if t % 2 == 0 else j for t in range(m))
        if segment == pattern:
            swapped = tuple(j if t % 2 == 0 else i for t in range(m))
            neighbors.add(word[:k] + swapped + word[k + m:])
    return sorted(neighbors)


def longest_element_word(cd: CartanData) -> ReducedWord:
    """贪心构造 w0 的一个约化词（不需要穷举）"""
    word: Tuple[int, ...] = ()
    while True:
        for i in range(1, cd.rank + 1):
            if is_positive(cd.apply_word_to_root(word, cd.simple_root(i))):
                word = word + (i,)
                break
        else:
            return word


@lru_cache(maxsize=None)
def opposition(cd: CartanData) -> Tuple[int, ...]:
    """
    对合 σ：−w0(α_i) = α_{σ(i)}

    :return: 元组，第 i-1 位是 σ(i)
    """
    w0 = longest_element_word(cd)
    sigma = []
    for i in range(1, cd.rank + 1):
        image = -cd.apply_word_to_root(w0, cd.simple_root(i))
        sigma.append(image.coords.index(1) + 1)
    return tuple(sigma)


@dataclass(frozen=True)
class WeylElement:
    """Weyl群元素：一个约化词以及它在 ρ 上的像"""
    word: ReducedWord
    rho_image: Weight

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1


@lru_cache(maxsize=None)
def weyl_group(cd: CartanData) -> Tuple[WeylElement, ...]:
    """
    广度优先生成Weyl群（ρ 的轨道是自由的，深度即长度）

    :param cd: Cartan数据（秩 ≤ 4）
    :return: 按长度排序的全部元素
    """
    _check_enumeration_rank(cd)
    rho = cd.rho()
    elements = [WeylElement((), rho)]
    seen = {rho}
    frontier = elements[:]
    while frontier:
        next_frontier = []
        for element in frontier:
            for i in range(1, cd.rank + 1):
                image = cd.reflect_weight(i, element.rho_image)
                if image not in seen:
                    seen.add(image)
                    new = WeylElement((i,) + element.word, image)
                    elements.append(new)
                    next_frontier.append(new)
        frontier = next_frontier
    logger.debug(f"{cd.name} 的Weyl群阶为 {len(elements)}")
    return tuple(elements)


def kostant_partition(cd: CartanData, nu: RootVector) -> int:
    """
    Kostant配分函数：把 ν 写成正根之和的方式数

    :param cd: Cartan数据
    :param nu: Q_+ 中的元素
    :return: 方式数
    """
    if not nu.is_nonnegative():
        return 0
    if nu.height > MAX_KOSTANT_HEIGHT:
        raise ValueError(f"高度 {nu.height} 超过上限 {MAX_KOSTANT_HEIGHT}")
    return _kostant(cd, nu.coords, 0)


@lru_cache(maxsize=None)
def _kostant(cd: CartanData, remaining: Tuple[int, ...], start: int) -> int:
    if not any(remaining):
        return 1
    roots = positive_roots(cd)
    total = 0
    for k in range(start, len(roots)):
        beta = roots[k].coords
        current = remaining
        while True:
            current = tuple(a - b for a, b in zip(current, beta))
            if any(a < 0 for a in current):
                break
            total += _kostant(cd, current, k + 1)
    return total


def kostant_partition_by_product(cd: CartanData, nu: RootVector) -> int:
    """
    第二个独立的计算：展开 ∏_{β>0} (1 − x^β)^{-1} 并截断到 ν

    :param cd: Cartan数据
    :param nu: Q_+ 中的元素
    :return: x^ν 的系数
    """
    if not nu.is_nonnegative():
        return 0
    series: Dict[Tuple[int, ...], int] = {cd.zero_root().coords: 1}
    for beta in positive_roots(cd):
        updated: Dict[Tuple[int, ...], int] = {}
        for monomial, coefficient in series.items():
            current = monomial
            while all(a <= b for a, b in zip(current, nu.coords)):
                updated[current] = updated.get(current, 0) + coefficient
                current = tuple(a + b for a, b in zip(current, beta.coords))
        series = updated
    return series.get(nu.coords, 0)


def roots_of_height(cd: CartanData, height: int) -> List[RootVector]:
    """Q_+ 中给定高度的全部元素"""
    result = []

    def build(prefix: Tuple[int, ...], left: int):
        if len(prefix) == cd.rank - 1:
            result.append(RootVector(prefix + (left,)))
            return
        for a in range(left, -1, -1):
            build(prefix + (a,), left - a)

    if cd.rank == 0:
        return result
    build((), height)
    return sorted(result)


def parse_int_list(text: str) -> Tuple[int, ...]:
    """解析 "1,2,1" 这样的整数列表"""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"无法解析整数列表: {text!r}")
