"""
通过Lusztig数据实现的 B(∞) 晶体（单边型）
晶体算子、ε/ε*、Kashiwara对合、B(λ)、MV多面体与晶体图导出
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .common import logger, DEFAULT_MAX_WORKERS, SCHEMA_VERSION
from .polytope import LatticePolytope, hull
from .rootdata import (
    CartanData, ReducedWord, RootVector, Weight,
    all_reduced_words_w0, braid_neighbors, braid_order, opposition, roots_of_height, word_roots,
)


@dataclass(frozen=True)
class LusztigDatum:
    """相对某个 w0 约化词的Lusztig数据"""
    word: ReducedWord
    values: Tuple[int, ...]

    def nu(self, cd: CartanData) -> RootVector:
        total = cd.zero_root()
        for c, beta in zip(self.values, word_roots(cd, self.word)):
            total = total + beta.scale(c)
        return total

    def __str__(self) -> str:
        word = ",".join(str(i) for i in self.word)
        values = ",".join(str(c) for c in self.values)
        return f"[{word}]({values})"


@dataclass(frozen=True, order=True)
class BinfElement:
    """B(∞) 的元素，按参考词（字典序最小的 w0 约化词）下的Lusztig数据存储"""
    values: Tuple[int, ...]

    @property
    def node_id(self) -> str:
        return "b_" + "_".join(str(c) for c in self.values)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.values) + ")"


@dataclass(frozen=True)
class MVPolytope:
    """MV多面体：格多面体 + 按Weyl群元素标记的路径顶点"""
    polytope: LatticePolytope
    vertices_by_weyl: Tuple[Tuple[ReducedWord, RootVector], ...]

    @property
    def vertices(self) -> Tuple[RootVector, ...]:
        return self.polytope.vertices

    def to_json(self) -> Dict[str, object]:
        return {
            "vertices": [list(v.coords) for v in self.vertices],
            "weyl_vertices": [
                {"word": list(word), "point": list(point.coords)}
                for word, point in self.vertices_by_weyl
            ],
        }


@dataclass
class CrystalGraph:
    """晶体图：节点按 (高度, 数据) 排序，边为 ẽ_i（可选 ẽ_i*）"""
    crystal: "BInfinity"
    nodes: List[BinfElement]
    edges: List[Tuple[BinfElement, str, BinfElement]] = field(default_factory=list)

    def level_sizes(self) -> List[int]:
        sizes: Dict[int, int] = {}
        for b in self.nodes:
            height = self.crystal.nu(b).height
            sizes[height] = sizes.get(height, 0) + 1
        return [sizes[h] for h in sorted(sizes)]

    def to_dot(self) -> str:
        lines = [f'digraph "B_infinity_{self.crystal.cd.name}" {{']
        for b in self.nodes:
            lines.append(f'  {b.node_id} [label="{b}"];')
        for source, label, target in self.edges:
            lines.append(f'  {source.node_id} -> {target.node_id} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> Dict[str, object]:
        crystal = self.crystal
        return {
            "schema": SCHEMA_VERSION,
            "cartan": crystal.cd.name,
            "reference_word": list(crystal.reference),
            "levels": self.level_sizes(),
            "nodes": [
                {
                    "id": b.node_id,
                    "datum": list(b.values),
                    "nu": list(crystal.nu(b).coords),
                    "wt": list(crystal.weight(b).coords),
                    "epsilon": list(crystal.epsilon_vector(b)),
                    "epsilon_star": list(crystal.epsilon_star_vector(b)),
                }
                for b in self.nodes
            ],
            "edges": [
                {"source": s.node_id, "label": label, "target": t.node_id}
                for s, label, t in self.edges
            ],
        }


class BInfinity:
    """
    B(∞) 晶体

    :param cd: 单边型Cartan数据（秩 ≤ 4）
    :param max_workers: 逐层展开时的线程数
    """

    def __init__(self, cd: CartanData, max_workers: int = DEFAULT_MAX_WORKERS):
        cd.require_simply_laced()
        self.cd = cd
        self.max_workers = max_workers
        self.words = all_reduced_words_w0(cd)
        self.word_set = set(self.words)
        self.reference = self.words[0]
        self.length = len(self.reference)
        self.sigma = opposition(cd)
        self._parent = self._braid_tree()
        self._start_words = {
            i: next(w for w in self.words if w[0] == i) for i in range(1, cd.rank + 1)
        }
        self._star_word = tuple(self.sigma[i - 1] for i in reversed(self.reference))
        self._transition_cache: Dict[Tuple[Tuple[int, ...], ReducedWord], Tuple[int, ...]] = {}
        logger.info(f"初始化 B(∞)，类型 {cd.name}，参考词 {self.reference}，共 {len(self.words)} 个约化词")

    # ---- 辫子移动 ----

    def _braid_tree(self) -> Dict[ReducedWord, Optional[ReducedWord]]:
        parent: Dict[ReducedWord, Optional[ReducedWord]] = {self.reference: None}
        queue = deque([self.reference])
        while queue:
            word = queue.popleft()
            for neighbor in braid_neighbors(self.cd, word):
                if neighbor not in parent:
                    parent[neighbor] = word
                    queue.append(neighbor)
        if len(parent) != len(self.words):
            raise RuntimeError("辫子移动图不连通")
        return parent

    def _path_to_reference(self, word: ReducedWord) -> List[ReducedWord]:
        path = [word]
        while self._parent[path[-1]] is not None:
            path.append(self._parent[path[-1]])
        return path

    def braid_move(self, word: ReducedWord, values: Tuple[int, ...],
                   target: ReducedWord) -> Tuple[int, ...]:
        """
        沿一次辫子关系把数据从 word 搬到相邻词 target

        交换型：(a, b) ↦ (b, a)
        A2型：(a, b, c) ↦ (b + c − m, m, a + b − m)，m = min(a, c)
        """
        k = next(p for p in range(len(word)) if word[p] != target[p])
        m = braid_order(self.cd, word[k], word[k + 1])
        if word[k + m:] != target[k + m:]:
            raise ValueError(f"{word} 与 {target} 不是一次辫子移动")
        values = list(values)
        if m == 2:
            values[k], values[k + 1] = values[k + 1], values[k]
        elif m == 3:
            a, b, c = values[k:k + 3]
            low = min(a, c)
            values[k:k + 3] = [b + c - low, low, a + b - low]
        else:
            raise ValueError(f"不支持阶为 {m} 的辫子关系")
        return tuple(values)

    def transition_along(self, datum: LusztigDatum, path: Sequence[ReducedWord]) -> LusztigDatum:
        """沿显式给定的词路径（相邻两词相差一次辫子移动）逐步变换"""
        if path[0] != datum.word:
            raise ValueError("路径起点必须是数据所在的词")
        values = datum.values
        for current, following in zip(path, path[1:]):
            values = self.braid_move(current, values, following)
        return LusztigDatum(path[-1], values)

    def _check_datum(self, datum: LusztigDatum):
        if datum.word not in self.word_set:
            raise ValueError(f"{datum.word} 不是 w0 的约化词")
        if len(datum.values) != self.length or any(c < 0 for c in datum.values):
            raise ValueError(f"Lusztig数据无效: {datum.values}")

    def transition(self, datum: LusztigDatum, target: ReducedWord) -> LusztigDatum:
        """
        Lusztig数据换词

        :param datum: 原数据
        :param target: 目标约化词
        :return: 目标词下的数据
        """
        target = tuple(target)
        self._check_datum(datum)
        if target not in self.word_set:
            raise ValueError(f"{target} 不是 w0 的约化词")
        if datum.word == target:
            return datum

        if datum.word != self.reference:
            datum = self.transition_along(datum, self._path_to_reference(datum.word))
        if target == self.reference:
            return datum

        key = (datum.values, target)
        if key not in self._transition_cache:
            path = list(reversed(self._path_to_reference(target)))
            self._transition_cache[key] = self.transition_along(datum, path).values
        return LusztigDatum(target, self._transition_cache[key])

    # ---- 元素与统计量 ----

    def element(self, datum: LusztigDatum) -> BinfElement:
        return BinfElement(self.transition(datum, self.reference).values)

    def element_from_values(self, values: Sequence[int], word: Optional[ReducedWord] = None) -> BinfElement:
        return self.element(LusztigDatum(tuple(word or self.reference), tuple(values)))

    def highest(self) -> BinfElement:
        return BinfElement((0,) * self.length)

    def datum(self, b: BinfElement, word: Optional[ReducedWord] = None) -> LusztigDatum:
        reference = LusztigDatum(self.reference, b.values)
        return self.transition(reference, tuple(word or self.reference))

    def nu(self, b: BinfElement) -> RootVector:
        return LusztigDatum(self.reference, b.values).nu(self.cd)

    def weight(self, b: BinfElement) -> Weight:
        """wt(b) = −ν"""
        return -self.cd.root_to_weight(self.nu(b))

    def epsilon(self, b: BinfElement, i: int) -> int:
        self.cd.check_index(i)
        return self.datum(b, self._start_words[i]).values[0]

    def e_tilde(self, b: BinfElement, i: int) -> BinfElement:
        self.cd.check_index(i)
        datum = self.datum(b, self._start_words[i])
        if datum.values[0] == 0:
            raise ValueError(f"ẽ_{i} 在 {b} 上无定义（ε_{i} = 0）")
        values = (datum.values[0] - 1,) + datum.values[1:]
        return self.element(LusztigDatum(datum.word, values))

    def f_tilde(self, b: BinfElement, i: int) -> BinfElement:
        self.cd.check_index(i)
        datum = self.datum(b, self._start_words[i])
        values = (datum.values[0] + 1,) + datum.values[1:]
        return self.element(LusztigDatum(datum.word, values))

    def star(self, b: BinfElement) -> BinfElement:
        """
        Kashiwara对合
        取相对 (σ(i_N),…,σ(i_1)) 的数据并反转，作为参考词下的数据
        """
        twisted = self.datum(b, self._star_word)
        return BinfElement(tuple(reversed(twisted.values)))

    def epsilon_star(self, b: BinfElement, i: int) -> int:
        return self.epsilon(self.star(b), i)

    def e_star(self, b: BinfElement, i: int) -> BinfElement:
        return self.star(self.e_tilde(self.star(b), i))

    def f_star(self, b: BinfElement, i: int) -> BinfElement:
        return self.star(self.f_tilde(self.star(b), i))

    def epsilon_vector(self, b: BinfElement) -> Tuple[int, ...]:
        return tuple(self.epsilon(b, i) for i in range(1, self.cd.rank + 1))

    def epsilon_star_vector(self, b: BinfElement) -> Tuple[int, ...]:
        starred = self.star(b)
        return tuple(self.epsilon(starred, i) for i in range(1, self.cd.rank + 1))

    # ---- MV多面体 ----

    def path_points(self, b: BinfElement, word: ReducedWord) -> List[RootVector]:
        datum = self.datum(b, word)
        points = [self.cd.zero_root()]
        for c, beta in zip(datum.values, word_roots(self.cd, word)):
            points.append(points[-1] + beta.scale(c))
        return points

    def mv_polytope(self, b: BinfElement) -> MVPolytope:
        """
        所有约化词路径上部分和点的凸包

        :param b: B(∞) 元素
        :return: MVPolytope
        """
        by_weyl: Dict[Weight, Tuple[ReducedWord, RootVector]] = {}
        points = set()
        for word in self.words:
            path = self.path_points(b, word)
            points.update(path)
            for k, point in enumerate(path):
                key = self.cd.apply_word_to_weight(word[:k], self.cd.rho())
                if key not in by_weyl:
                    by_weyl[key] = (word[:k], point)
                elif by_weyl[key][1] != point:
                    raise RuntimeError(f"{b} 的路径顶点与约化词选择有关: {word[:k]}")
        ordered = tuple(sorted(by_weyl.values(), key=lambda item: (len(item[0]), item[0])))
        return MVPolytope(hull(points), ordered)

    def lusztig_datum_from_path(self, polytope: MVPolytope, word: ReducedWord) -> LusztigDatum:
        """沿 word 的路径读取边长，恢复Lusztig数据"""
        lookup = dict(polytope.vertices_by_weyl)
        keys = {self.cd.apply_word_to_weight(w, self.cd.rho()): p for w, p in lookup.items()}
        points = [keys[self.cd.apply_word_to_weight(word[:k], self.cd.rho())] for k in range(len(word) + 1)]
        values = []
        for beta, start, end in zip(word_roots(self.cd, word), points, points[1:]):
            step = end - start
            k = next(j for j, a in enumerate(beta.coords) if a)
            values.append(step.coords[k] // beta.coords[k])
        return LusztigDatum(tuple(word), tuple(values))

    # ---- 枚举 ----

    def _expand(self, b: BinfElement) -> List[BinfElement]:
        return [self.f_tilde(b, i) for i in range(1, self.cd.rank + 1)]

    def iter_levels(self, depth: int, keep=None) -> Iterator[List[BinfElement]]:
        """逐层生成：每层由上一层在所有 f̃_i 下的像组成，keep 可剪枝"""
        level = [self.highest()]
        for height in range(depth + 1):
            yield level
            if height == depth:
                return
            found = set()
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                futures = [executor.submit(self._expand, b) for b in level]
                for future in as_completed(futures):
                    found.update(future.result())
            if keep is not None:
                found = {b for b in found if keep(b)}
            level = sorted(found)
            if not level:
                return

    def enumerate_binf(self, depth: int, star_edges: bool = False) -> CrystalGraph:
        """
        高度不超过 depth 的全部元素及 ẽ_i 边

        :param depth: 最大高度
        :param star_edges: 是否同时导出 ẽ_i* 边
        :return: CrystalGraph
        """
        nodes = []
        for height, level in enumerate(self.iter_levels(depth)):
            nodes.extend(level)
            logger.info(f"第 {height} 层: {len(level)} 个元素")
        return self._graph(nodes, star_edges)

    def _graph(self, nodes: List[BinfElement], star_edges: bool = False) -> CrystalGraph:
        node_set = set(nodes)
        edges = []
        for b in nodes:
            for i in range(1, self.cd.rank + 1):
                if self.epsilon(b, i) > 0:
                    target = self.e_tilde(b, i)
                    if target in node_set:
                        edges.append((b, f"e{i}", target))
                if star_edges and self.epsilon_star(b, i) > 0:
                    target = self.e_star(b, i)
                    if target in node_set:
                        edges.append((b, f"e{i}*", target))
        return CrystalGraph(self, nodes, edges)

    def in_b_lambda(self, b: BinfElement, lam: Weight) -> bool:
        return all(e <= l for e, l in zip(self.epsilon_star_vector(b), lam.coords))

    def b_lambda(self, lam: Weight) -> CrystalGraph:
        """
        B(λ) = {b : ε_i*(b) ≤ ⟨α_i^∨, λ⟩}

        :param lam: 支配权
        :return: 晶体图（节点为 B(∞) 中的代表元）
        """
        if not lam.is_dominant():
            raise ValueError(f"{lam} 不是支配权")
        bound = self.cd.weight_to_root(lam - self.cd.apply_word_to_weight(self.reference, lam)).height
        nodes = []
        for level in self.iter_levels(bound, keep=lambda b: self.in_b_lambda(b, lam)):
            nodes.extend(level)
        return self._graph(nodes)

    def elements_of_weight(self, nu: RootVector) -> List[BinfElement]:
        """直接枚举满足 Σ c_k β_k = ν 的参考词数据"""
        roots = word_roots(self.cd, self.reference)
        result = []

        def build(k: int, remaining: RootVector, prefix: Tuple[int, ...]):
            if k == len(roots):
                if remaining.is_zero():
                    result.append(BinfElement(prefix))
                return
            c = 0
            current = remaining
            while current.is_nonnegative():
                build(k + 1, current, prefix + (c,))
                current = current - roots[k]
                c += 1

        if nu.is_nonnegative():
            build(0, nu, ())
        return sorted(result)

    def weight_multiplicity(self, lam: Weight, mu: Weight) -> int:
        """dim V(λ)_μ = #{b ∈ B(λ) : wt = μ}"""
        try:
            nu = self.cd.weight_to_root(lam - mu)
        except ValueError:
            return 0
        return sum(1 for b in self.elements_of_weight(nu) if self.in_b_lambda(b, lam))

    def tensor_multiplicity(self, lam: Weight, mu: Weight, nu: Weight) -> int:
        """c^ν_{λμ} = #{b : ν(b) = λ + μ − ν, ε(b) ≤ μ, ε*(b) ≤ λ}"""
        try:
            root = self.cd.weight_to_root(lam + mu - nu)
        except ValueError:
            return 0
        count = 0
        for b in self.elements_of_weight(root):
            if not self.in_b_lambda(b, lam):
                continue
            if all(e <= m for e, m in zip(self.epsilon_vector(b), mu.coords)):
                count += 1
        return count

    def tensor_table(self, lam: Weight, mu: Weight) -> Dict[Weight, int]:
        """V(λ)⊗V(μ) 的全部非零 c^ν_{λμ}"""
        table = {}
        top = lam + mu
        bound = self.cd.weight_to_root(top - self.cd.apply_word_to_weight(self.reference, top)).height
        for height in range(bound + 1):
            for root in roots_of_height(self.cd, height):
                nu = top - self.cd.root_to_weight(root)
                if nu.is_dominant():
                    count = self.tensor_multiplicity(lam, mu, nu)
                    if count:
                        table[nu] = count
        return dict(sorted(table.items()))
