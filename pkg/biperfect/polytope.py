"""
根格中的精确格多面体
凸包（极点消去）、相等、包含与支撑函数，全部使用有理数运算

极点消去：点 p 不是顶点当且仅当 p 落在其余点的凸包内。
凸包成员判定化为可行性问题 Σλ_j q_j = p, Σλ_j = 1, λ ≥ 0，
用第一阶段单纯形法求解；in_convex_hull_bruteforce 按 Carathéodory
定理枚举小子集求重心坐标，作为独立校验。
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .common import logger
from .linalg import rank, solve_affine, to_fraction
from .rootdata import RootVector

MAX_AMBIENT_DIM = 4

Tableau = List[List[Fraction]]


def _phase_one_tableau(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Tableau:
    """
    [A | I | b]，每行右端非负；人工变量 n..n+m-1 构成初始基
    """
    m = len(matrix)
    rows = []
    for i in range(m):
        row, value = list(matrix[i]), rhs[i]
        if value < 0:
            row, value = [-v for v in row], -value
        rows.append(row + [Fraction(int(j == i)) for j in range(m)] + [value])
    return rows


def _pivot(rows: Tableau, r: int, column: int):
    """以 rows[r][column] 为主元消去该列的其余元素"""
    pivot = rows[r][column]
    rows[r] = [v / pivot for v in rows[r]]
    for i, row in enumerate(rows):
        if i != r and row[column]:
            factor = row[column]
            rows[i] = [a - factor * b for a, b in zip(row, rows[r])]


def _is_feasible(matrix: List[List[Fraction]], rhs: List[Fraction]) -> bool:
    """
    A λ = b, λ ≥ 0 是否有解

    最小化人工变量之和；最优值为 0 当且仅当原问题可行。
    进基取最小下标的负检验数列，出基按最小比值、并列时取最小基变量（Bland规则，不会循环）。
    """
    m = len(matrix)
    n = len(matrix[0]) if matrix else 0
    rows = _phase_one_tableau(matrix, rhs)
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m

    def reduced_cost(j: int) -> Fraction:
        return cost[j] - sum(cost[basis[i]] * rows[i][j] for i in range(m))

    while True:
        entering = next((j for j in range(n + m) if reduced_cost(j) < 0), None)
        if entering is None:
            break
        candidates = [
            (rows[i][-1] / rows[i][entering], basis[i], i)
            for i in range(m) if rows[i][entering] > 0
        ]
        # 人工目标有下界 0，不会无界
        if not candidates:
            break
        _, _, r = min(candidates)
        _pivot(rows, r, entering)
        basis[r] = entering

    return sum(cost[basis[i]] * rows[i][-1] for i in range(m)) == 0


def _affine_system(points: Sequence[Sequence], target: Sequence) -> Tuple[List[List[Fraction]], List[Fraction]]:
    """Σλ_j q_j = target 与 Σλ_j = 1 的系数矩阵（每列一个点）"""
    dim = len(target)
    matrix = [[Fraction(p[k]) for p in points] for k in range(dim)]
    matrix.append([Fraction(1)] * len(points))
    return matrix, [Fraction(v) for v in target] + [Fraction(1)]


def in_convex_hull(points: Sequence[Sequence], target: Sequence) -> bool:
    """target 是否是 points 的凸组合"""
    if not points:
        return False
    return _is_feasible(*_affine_system(points, target))


def _barycentric(points: Sequence[Sequence], target: Sequence) -> Optional[List[Fraction]]:
    """仿射无关的点组上的重心坐标；点组仿射相关或 target 不在仿射包内时返回 None"""
    matrix, rhs = _affine_system(points, target)
    particular, kernel = solve_affine(matrix, rhs, len(points))
    if particular is None or kernel:
        return None
    return [to_fraction(v) for v in particular]


def in_convex_hull_bruteforce(points: Sequence[Sequence], target: Sequence) -> bool:
    """
    Carathéodory：target ∈ conv(points) 当且仅当它落在至多 dim+1 个仿射无关点的单纯形内
    """
    size = min(len(points), len(target) + 1)
    for k in range(1, size + 1):
        for subset in combinations(points, k):
            weights = _barycentric(subset, target)
            if weights is not None and all(w >= 0 for w in weights):
                return True
    return False


@dataclass(frozen=True)
class LatticePolytope:
    """规范顶点列表（字典序）表示的格多面体"""
    vertices: Tuple[RootVector, ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0].coords)

    @property
    def dimension(self) -> int:
        """仿射维数"""
        base = self.vertices[0].coords
        differences = [[a - b for a, b in zip(v.coords, base)] for v in self.vertices[1:]]
        return rank(differences, self.ambient_dim)

    def _check_dim(self, other_dim: int):
        if other_dim != self.ambient_dim:
            raise ValueError(f"维数不匹配: {self.ambient_dim} 与 {other_dim}")

    def equals(self, other: "LatticePolytope") -> bool:
        self._check_dim(other.ambient_dim)
        return self.vertices == other.vertices

    def contains(self, point) -> bool:
        coords = point.coords if isinstance(point, RootVector) else tuple(point)
        self._check_dim(len(coords))
        return in_convex_hull([v.coords for v in self.vertices], coords)

    def support(self, functional: Sequence) -> Fraction:
        """支撑函数 max_v φ(v)"""
        self._check_dim(len(functional))
        return max(
            sum((Fraction(c) * x for c, x in zip(functional, v.coords)), Fraction(0))
            for v in self.vertices
        )

    def to_json(self) -> Dict[str, object]:
        return {"vertices": [list(v.coords) for v in self.vertices]}

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "LatticePolytope":
        return hull([RootVector(tuple(v)) for v in data["vertices"]])

    def to_text(self) -> str:
        return "; ".join(f"({v})" for v in self.vertices)


def hull(points: Iterable) -> LatticePolytope:
    """
    精确凸包：逐点检查是否落在其余点的凸包内

    :param points: RootVector 或整数元组
    :return: LatticePolytope
    """
    unique = sorted({p if isinstance(p, RootVector) else RootVector(tuple(p)) for p in points})
    if not unique:
        raise ValueError("凸包的输入点集不能为空")
    dims = {len(p.coords) for p in unique}
    if len(dims) != 1:
        raise ValueError(f"点的维数不一致: {sorted(dims)}")
    if dims.pop() > MAX_AMBIENT_DIM:
        raise ValueError(f"环境维数超过 {MAX_AMBIENT_DIM}")

    vertices = []
    for k, point in enumerate(unique):
        others = [q.coords for j, q in enumerate(unique) if j != k]
        if not others or not in_convex_hull(others, point.coords):
            vertices.append(point)

    logger.debug(f"凸包: {len(unique)} 个点, {len(vertices)} 个顶点")
    return LatticePolytope(tuple(vertices))
