"""
SL_n（n ≤ 4）上三角幺幂群的坐标环 C[N]
左右Chevalley导子、配对、双完美基验证、晶体提取与匹配、唯一性搜索、星对合与 Ψ_λ 像
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .common import logger, DEFAULT_MAX_WORKERS, SCHEMA_VERSION
from .crystal import BInfinity, BinfElement
from .linalg import nullspace, rank, solve_affine
from .rootdata import CartanData, RootVector, Weight, longest_element_word, roots_of_height

SIDES = ("left", "right")


class CoordinateRing:
    """
    C[N] = QQ[x_ij : 1 ≤ i < j ≤ n]，x_ij 是上三角幺幂矩阵的 (i, j) 元

    :param n: 2 ≤ n ≤ 4
    """

    def __init__(self, n: int):
        if not 2 <= n <= 4:
            raise ValueError(f"只支持 2 ≤ n ≤ 4，收到 n = {n}")
        self.n = n
        self.cd = CartanData.from_string(f"A{n - 1}")
        self.pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        names = [f"x{i}{j}" for i, j in self.pairs]
        self.ring, *gens = ring(",".join(names), QQ)
        self.var = dict(zip(self.pairs, gens))
        self.zero_monom = self.ring.zero_monom

    # ---- 基本结构 ----

    def x(self, i: int, j: int):
        return self.var[(i, j)]

    def parse(self, text: str):
        """解析多项式文本，SL3 中允许 x、y、z 简写"""
        expression = sympy.sympify(text)
        if self.n == 3:
            aliases = {"x": "x12", "y": "x23", "z": "x13"}
            expression = expression.subs({sympy.Symbol(k): sympy.Symbol(v) for k, v in aliases.items()})
        return self.ring.from_expr(expression)

    def var_weight(self, i: int, j: int) -> RootVector:
        return RootVector(tuple(1 if i <= k + 1 < j else 0 for k in range(self.n - 1)))

    def monomial_weight(self, monom: Tuple[int, ...]) -> RootVector:
        total = self.cd.zero_root()
        for exponent, pair in zip(monom, self.pairs):
            if exponent:
                total = total + self.var_weight(*pair).scale(exponent)
        return total

    def weight_of(self, f) -> RootVector:
        """齐次元素的权，非齐次时报错"""
        weights = {self.monomial_weight(m) for m in f.monoms()}
        if not f:
            raise ValueError("零多项式没有权")
        if len(weights) != 1:
            raise ValueError(f"{f} 不是齐次元素")
        return weights.pop()

    def monomial_basis(self, nu: RootVector) -> List:
        """C[N]_ν 的单项式基"""
        return [self.ring({m: QQ.one}) for m in _monomials_of_weight(self, nu.coords)]

    def dimension(self, nu: RootVector) -> int:
        return len(_monomials_of_weight(self, nu.coords))

    def coordinates(self, f, nu: RootVector) -> List:
        terms = dict(f.terms())
        return [terms.get(m, QQ.zero) for m in _monomials_of_weight(self, nu.coords)]

    # ---- 导子 ----

    def e_left(self, i: int, f):
        """e_i = ∂/∂x_{i,i+1} + Σ_{j>i+1} x_{i+1,j} ∂/∂x_{ij}"""
        self.cd.check_index(i)
        result = f.diff(self.x(i, i + 1))
        for j in range(i + 2, self.n + 1):
            result += self.x(i + 1, j) * f.diff(self.x(i, j))
        return result

    def e_right(self, i: int, f):
        """e_i* = ∂/∂x_{i,i+1} + Σ_{k<i} x_{ki} ∂/∂x_{k,i+1}"""
        self.cd.check_index(i)
        result = f.diff(self.x(i, i + 1))
        for k in range(1, i):
            result += self.x(k, i) * f.diff(self.x(k, i + 1))
        return result

    def apply(self, side: str, i: int, f, times: int = 1):
        op = self.e_left if side == "left" else self.e_right
        for _ in range(times):
            if not f:
                break
            f = op(i, f)
        return f

    def epsilon(self, side: str, i: int, f) -> int:
        count = 0
        current = self.apply(side, i, f)
        while current:
            count += 1
            current = self.apply(side, i, current)
        return count

    # ---- 配对 ----

    def constant_term(self, f):
        return dict(f.terms()).get(self.zero_monom, QQ.zero)

    def pairing(self, seq: Sequence[int], f):
        """
        ⟨e_{i1}···e_{ip}, f⟩：先作用 e_left(i1)，最后在单位元处取值

        :return: QQ 元素
        """
        for i in seq:
            if not f:
                return QQ.zero
            f = self.e_left(i, f)
        return self.constant_term(f)

    def pairings(self, f) -> Dict[Tuple[int, ...], object]:
        """所有非零配对，深度优先"""
        result = {}

        def walk(prefix: Tuple[int, ...], g):
            if not g:
                return
            value = self.constant_term(g)
            if value:
                result[prefix] = value
            for i in range(1, self.n):
                walk(prefix + (i,), self.e_left(i, g))

        walk((), f)
        return dict(sorted(result.items()))

    # ---- 逆矩阵与星对合 ----

    def generic_matrix(self) -> List[List]:
        R = self.ring
        return [
            [R.one if i == j else (self.x(i, j) if i < j else R.zero) for j in range(1, self.n + 1)]
            for i in range(1, self.n + 1)
        ]

    def inverse_matrix(self) -> List[List]:
        """(I + X)^{-1} = Σ_k (−X)^k"""
        R = self.ring
        n = self.n
        nilpotent = [
            [-self.x(i, j) if i < j else R.zero for j in range(1, n + 1)] for i in range(1, n + 1)
        ]
        result = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
        power = [row[:] for row in result]
        for _ in range(n - 1):
            power = _matmul(power, nilpotent, R)
            result = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(result, power)]
        return result

    def star(self, f):
        """沿 g ↦ g^{-1} 的拉回"""
        inverse = self.inverse_matrix()
        substitutions = [(self.x(i, j), inverse[i - 1][j - 1]) for i, j in self.pairs]
        return f.compose(substitutions)


def _matmul(a, b, R):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), R.zero) for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def _monomial_cache(n: int, nu: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    weights = [tuple(1 if i <= k + 1 < j else 0 for k in range(n - 1)) for i, j in pairs]
    result = []

    def build(k: int, remaining: Tuple[int, ...], prefix: Tuple[int, ...]):
        if k == len(pairs):
            if not any(remaining):
                result.append(prefix)
            return
        exponent = 0
        current = remaining
        while all(c >= 0 for c in current):
            build(k + 1, current, prefix + (exponent,))
            current = tuple(c - w for c, w in zip(current, weights[k]))
            exponent += 1

    build(0, nu, ())
    return tuple(sorted(result, reverse=True))


def _monomials_of_weight(cr: CoordinateRing, nu: Tuple[int, ...]):
    if any(c < 0 for c in nu):
        return ()
    return _monomial_cache(cr.n, nu)


@lru_cache(maxsize=None)
def coordinate_ring(n: int) -> CoordinateRing:
    return CoordinateRing(n)


# ---- 双完美基族 ----

@dataclass
class BiperfectBasisFamily:
    """
    按 Q_+ 权分级的多项式族

    :param cr: 坐标环
    :param elements: 键到多项式的有序映射
    :param max_height: 族覆盖的最大高度（None 表示按需生成）
    """
    cr: CoordinateRing
    elements: Dict[str, object]
    generator: Optional[object] = None
    max_height: Optional[int] = None

    def ensure_height(self, height: int):
        if self.generator is not None and (self.max_height is None or self.max_height < height):
            self.elements = self.generator(height)
            self.max_height = height

    def keys_of_weight(self, nu: RootVector) -> List[str]:
        return [k for k, f in self.elements.items() if self.cr.weight_of(f) == nu]

    def keys_up_to(self, height: int) -> List[str]:
        self.ensure_height(height)
        return [k for k, f in self.elements.items() if self.cr.weight_of(f).height <= height]

    def __getitem__(self, key: str):
        return self.elements[key]

    def to_json(self, height: Optional[int] = None) -> Dict[str, object]:
        keys = self.keys_up_to(height) if height is not None else list(self.elements)
        cr = self.cr
        records = []
        for key in keys:
            f = self.elements[key]
            records.append({
                "key": key,
                "weight": list(cr.weight_of(f).coords),
                "polynomial": str(f),
                "epsilon": [cr.epsilon("left", i, f) for i in range(1, cr.n)],
                "epsilon_star": [cr.epsilon("right", i, f) for i in range(1, cr.n)],
            })
        return {"schema": SCHEMA_VERSION, "group": f"sl{cr.n}", "elements": records}

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "BiperfectBasisFamily":
        group = str(data.get("group", ""))
        if not group.startswith("sl"):
            raise ValueError(f"无效的基族文件: group = {group!r}")
        cr = coordinate_ring(int(group[2:]))
        elements = {}
        for record in data.get("elements", []):
            try:
                elements[record["key"]] = cr.parse(record["polynomial"])
            except KeyError as e:
                raise ValueError(f"基族记录缺少字段: {e}")
        return cls(cr, elements, max_height=None)


def sl2_basis(max_degree: int = 8) -> BiperfectBasisFamily:
    """SL2 的基 {x^n}"""
    cr = coordinate_ring(2)
    x = cr.x(1, 2)

    def generate(height: int) -> Dict[str, object]:
        return {f"x:{k}": x ** k for k in range(height + 1)}

    family = BiperfectBasisFamily(cr, {}, generate)
    family.ensure_height(max_degree)
    return family


def sl3_basis(max_height: int = 6) -> BiperfectBasisFamily:
    """
    SL3 的基 {x^a z^b (xy−z)^c} ∪ {y^a z^b (xy−z)^c : a ≥ 1}
    键的形式为 "x:a,b,c" 与 "y:a,b,c"
    """
    cr = coordinate_ring(3)
    x, y, z = cr.x(1, 2), cr.x(2, 3), cr.x(1, 3)
    w = x * y - z

    def generate(height: int) -> Dict[str, object]:
        elements = {}
        for total in range(height + 1):
            for a in range(total + 1):
                for b in range(total + 1):
                    c_height = total - a - 2 * b
                    if c_height < 0 or c_height % 2:
                        continue
                    c = c_height // 2
                    elements[f"x:{a},{b},{c}"] = x ** a * z ** b * w ** c
                    if a >= 1:
                        elements[f"y:{a},{b},{c}"] = y ** a * z ** b * w ** c
        return dict(sorted(elements.items(), key=lambda kv: (cr.weight_of(kv[1]).height, kv[0])))

    family = BiperfectBasisFamily(cr, {}, generate)
    family.ensure_height(max_height)
    return family


def mutated_sl3_basis(max_height: int = 6) -> BiperfectBasisFamily:
    """把 z 换成 z + xy 的族（应当不完美）"""
    original = sl3_basis(max_height)
    cr = original.cr
    x, y, z = cr.x(1, 2), cr.x(2, 3), cr.x(1, 3)
    elements = {key: f.compose([(z, z + x * y)]) for key, f in original.elements.items()}
    return BiperfectBasisFamily(cr, elements, max_height=max_height)


@dataclass
class BiperfectFailure:
    key: str
    side: str
    i: int
    reason: str


@dataclass
class BiperfectReport:
    """双完美性验证报告"""
    passed: bool
    failures: List[BiperfectFailure] = field(default_factory=list)
    epsilons: Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...]]] = field(default_factory=dict)
    partners: Dict[Tuple[str, str, int], str] = field(default_factory=dict)
    weights_checked: int = 0


def _check_side(family: BiperfectBasisFamily, nu: RootVector, side: str, i: int,
                eps: Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...]]]) -> Tuple[List[BiperfectFailure], Dict]:
    cr = family.cr
    failures = []
    partners = {}
    side_index = 0 if side == "left" else 1
    lower = nu - cr.cd.simple_root(i)
    lower_keys = family.keys_of_weight(lower) if lower.is_nonnegative() else []

    for key in family.keys_of_weight(nu):
        f = family[key]
        epsilon = eps[key][side_index][i - 1]
        if epsilon == 0:
            continue
        image = cr.apply(side, i, f)
        if not lower_keys:
            failures.append(BiperfectFailure(key, side, i, "像不在基的张成中"))
            continue
        columns = [cr.coordinates(family[k], lower) for k in lower_keys]
        rows = [[column[r] for column in columns] for r in range(cr.dimension(lower))]
        coefficients, _ = solve_affine(rows, cr.coordinates(image, lower), len(lower_keys))
        if coefficients is None:
            failures.append(BiperfectFailure(key, side, i, "像不在基的张成中"))
            continue

        found = None
        reason = f"没有 ε = {epsilon - 1} 的伙伴"
        for k, c in zip(lower_keys, coefficients):
            if not c or eps[k][side_index][i - 1] != epsilon - 1:
                continue
            residual = image - family[k] * epsilon
            tail = cr.apply(side, i, residual, epsilon - 1)
            if not tail:
                found = k
                break
            reason = f"残差 e^{epsilon - 1}(e b − {epsilon}·{k}) = {tail} ≠ 0"
        if found is None:
            failures.append(BiperfectFailure(key, side, i, reason))
        else:
            partners[(key, side, i)] = found
    return failures, partners


def verify_biperfect(family: BiperfectBasisFamily, maxdeg: int,
                     max_workers: int = DEFAULT_MAX_WORKERS) -> BiperfectReport:
    """
    验证：每个分次块是基、含 1、两侧都满足完美公理

    :param family: 基族
    :param maxdeg: 最大高度（≤ 8）
    :return: BiperfectReport
    """
    if maxdeg > 8:
        raise ValueError("maxdeg 不能超过 8")
    family.ensure_height(maxdeg)
    cr = family.cr
    report = BiperfectReport(True)

    if not any(f == cr.ring.one for f in family.elements.values()):
        report.failures.append(BiperfectFailure("", "both", 0, "族中不含 1"))

    keys = family.keys_up_to(maxdeg)
    for key in keys:
        f = family[key]
        report.epsilons[key] = (
            tuple(cr.epsilon("left", i, f) for i in range(1, cr.n)),
            tuple(cr.epsilon("right", i, f) for i in range(1, cr.n)),
        )

    weights = sorted({cr.weight_of(family[k]) for k in keys}, key=lambda v: (v.height, v.coords))
    for height in range(maxdeg + 1):
        for nu in roots_of_height(cr.cd, height):
            members = family.keys_of_weight(nu)
            dim = cr.dimension(nu)
            rows = [cr.coordinates(family[k], nu) for k in members]
            if len(members) != dim or rank(rows, dim) != dim:
                report.failures.append(BiperfectFailure(
                    ",".join(members), "both", 0, f"权 {nu} 上不是基: {len(members)} 个元素, 维数 {dim}"))

    tasks = [(nu, side, i) for nu in weights if nu.height > 0
             for side in SIDES for i in range(1, cr.n)]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(_check_side, family, nu, side, i, report.epsilons): (nu, side, i)
                   for nu, side, i in tasks}
        for future in as_completed(futures):
            failures, partners = future.result()
            report.failures.extend(failures)
            report.partners.update(partners)

    report.failures.sort(key=lambda item: (item.key, item.side, item.i))
    report.weights_checked = len(weights)
    report.passed = not report.failures
    if report.passed:
        logger.info(f"双完美性验证通过：{len(keys)} 个元素，{len(weights)} 个权")
    else:
        logger.warning(f"双完美性验证失败：{len(report.failures)} 处，首个为 {report.failures[0]}")
    return report


# ---- 晶体提取与匹配 ----

@dataclass
class FamilyCrystal:
    """从基族读出的双晶体"""
    cr: CoordinateRing
    nodes: List[str]
    weights: Dict[str, RootVector]
    epsilon: Dict[str, Tuple[int, ...]]
    epsilon_star: Dict[str, Tuple[int, ...]]
    e_links: Dict[Tuple[str, int], str]
    e_star_links: Dict[Tuple[str, int], str]

    def level_sizes(self) -> List[int]:
        sizes: Dict[int, int] = {}
        for key in self.nodes:
            height = self.weights[key].height
            sizes[height] = sizes.get(height, 0) + 1
        return [sizes[h] for h in sorted(sizes)]


def extract_crystal(family: BiperfectBasisFamily, height: int) -> FamilyCrystal:
    """
    通过首项提取 ẽ_i / ẽ_i* 链接

    :param family: 已验证的基族
    :param height: 最大高度
    :return: FamilyCrystal
    """
    report = verify_biperfect(family, height)
    if not report.passed:
        raise ValueError(f"基族未通过验证: {report.failures[0]}")
    cr = family.cr
    nodes = family.keys_up_to(height)
    e_links = {(k, i): p for (k, side, i), p in report.partners.items() if side == "left"}
    e_star_links = {(k, i): p for (k, side, i), p in report.partners.items() if side == "right"}
    return FamilyCrystal(
        cr, nodes,
        {k: cr.weight_of(family[k]) for k in nodes},
        {k: report.epsilons[k][0] for k in nodes},
        {k: report.epsilons[k][1] for k in nodes},
        e_links, e_star_links,
    )


def _candidates(crystal: FamilyCrystal, binf: BInfinity) -> Dict[str, List[BinfElement]]:
    result = {}
    cache: Dict[RootVector, List[BinfElement]] = {}
    for key in crystal.nodes:
        nu = crystal.weights[key]
        if nu not in cache:
            cache[nu] = binf.elements_of_weight(nu)
        result[key] = [
            b for b in cache[nu]
            if binf.epsilon_vector(b) == crystal.epsilon[key]
            and binf.epsilon_star_vector(b) == crystal.epsilon_star[key]
        ]
    return result


def _iter_isomorphisms(crystal: FamilyCrystal, binf: BInfinity) -> Iterator[Dict[str, BinfElement]]:
    candidates = _candidates(crystal, binf)
    order = sorted(crystal.nodes, key=lambda k: (crystal.weights[k].height, len(candidates[k]), k))
    rank_ = binf.cd.rank
    assignment: Dict[str, BinfElement] = {}
    used = set()

    def consistent(key: str, b: BinfElement) -> bool:
        for i in range(1, rank_ + 1):
            for links, move in ((crystal.e_links, binf.e_tilde), (crystal.e_star_links, binf.e_star)):
                partner = links.get((key, i))
                if partner is not None and partner in assignment:
                    if move(b, i) != assignment[partner]:
                        return False
        return True

    def search(position: int):
        if position == len(order):
            yield dict(assignment)
            return
        key = order[position]
        for b in candidates[key]:
            if b in used or not consistent(key, b):
                continue
            assignment[key] = b
            used.add(b)
            yield from search(position + 1)
            del assignment[key]
            used.discard(b)

    yield from search(0)


def count_bicrystal_isomorphisms(crystal: FamilyCrystal, binf: BInfinity, limit: int = 10) -> int:
    """回溯计数保持 wt、ε、ε*、ẽ、ẽ* 的双射（最多数到 limit）"""
    count = 0
    for _ in _iter_isomorphisms(crystal, binf):
        count += 1
        if count >= limit:
            break
    return count


def match_binf(crystal: FamilyCrystal, binf: Optional[BInfinity] = None) -> Dict[str, BinfElement]:
    """
    与 B(∞) 截断的唯一双晶体同构

    :return: 键到 B(∞) 元素的映射
    """
    binf = binf or BInfinity(crystal.cr.cd)
    found = []
    for isomorphism in _iter_isomorphisms(crystal, binf):
        found.append(isomorphism)
        if len(found) > 1:
            raise ValueError("双晶体同构不唯一")
    if not found:
        raise ValueError("找不到与 B(∞) 的双晶体同构")
    return found[0]


# ---- 唯一性搜索 ----

@dataclass
class UniquenessResult:
    """
    逐权求解的结果
    solutions[b] 为唯一解（若存在且唯一），free_dims[b] 为齐次解空间维数
    """
    solutions: Dict[BinfElement, object]
    free_dims: Dict[BinfElement, int]
    inconsistent: List[BinfElement]

    @property
    def unique(self) -> bool:
        return not self.inconsistent and all(d == 0 for d in self.free_dims.values())

    @property
    def family_count(self):
        """唯一时为 1，无解时为 0，否则为 "infinite" """
        if self.inconsistent:
            return 0
        return 1 if self.unique else "infinite"

    def families(self) -> List[Dict[BinfElement, object]]:
        return [dict(self.solutions)] if self.unique else []


def uniqueness_search(maxheight: int, use_right: bool = True, normalize: bool = True) -> UniquenessResult:
    """
    SL3 上逐权求解双完美性约束
    对晶体元素 b，未知 f ∈ C[N]_ν 满足
      e^{ε+1} f = 0（两侧）
      e^{ε} f = ε · e^{ε−1} f_{ẽ b}（归一化条件）

    :param maxheight: 最大高度（≤ 4）
    :param use_right: 是否施加右侧条件
    :param normalize: 是否施加归一化（仿射）条件
    :return: UniquenessResult
    """
    if maxheight > 4:
        raise ValueError("maxheight 不能超过 4")
    cr = coordinate_ring(3)
    binf = BInfinity(cr.cd)
    solutions: Dict[BinfElement, object] = {binf.highest(): cr.ring.one}
    free_dims: Dict[BinfElement, int] = {binf.highest(): 0}
    inconsistent: List[BinfElement] = []
    sides = SIDES if use_right else ("left",)

    for height in range(1, maxheight + 1):
        for nu in roots_of_height(cr.cd, height):
            basis = cr.monomial_basis(nu)
            for b in binf.elements_of_weight(nu):
                rows: List[List] = []
                rhs: List = []
                for side in sides:
                    for i in range(1, cr.n):
                        epsilon, partner = _crystal_side(binf, b, side, i)
                        _add_power_rows(cr, basis, side, i, epsilon + 1, None, rows, rhs)
                        if normalize and epsilon > 0:
                            target = cr.apply(side, i, solutions.get(partner, cr.ring.zero), epsilon - 1) * epsilon
                            _add_power_rows(cr, basis, side, i, epsilon, target, rows, rhs)
                particular, kernel = solve_affine(rows, rhs, len(basis))
                if particular is None:
                    inconsistent.append(b)
                    continue
                free_dims[b] = len(kernel)
                solutions[b] = sum((m * c for m, c in zip(basis, particular)), cr.ring.zero)

    result = UniquenessResult(solutions, free_dims, inconsistent)
    logger.info(f"唯一性搜索（高度 ≤ {maxheight}）: 族个数 = {result.family_count}")
    return result


def _add_power_rows(cr: CoordinateRing, basis: List, side: str, i: int, power: int,
                    target, rows: List[List], rhs: List):
    """把 e^{power} f = target（target 为 None 时为 0）按单项式坐标加入方程组"""
    images = [dict(cr.apply(side, i, m, power).terms()) for m in basis]
    goal = dict(target.terms()) if target else {}
    monomials = sorted({mono for g in images for mono in g} | set(goal))
    for mono in monomials:
        rows.append([g.get(mono, QQ.zero) for g in images])
        rhs.append(goal.get(mono, QQ.zero))


def _crystal_side(binf: BInfinity, b: BinfElement, side: str, i: int):
    """(ε, ẽ b) 或 (ε*, ẽ* b)，ε 为零时伙伴为 None"""
    if side == "left":
        epsilon = binf.epsilon(b, i)
        return epsilon, (binf.e_tilde(b, i) if epsilon else None)
    epsilon = binf.epsilon_star(b, i)
    return epsilon, (binf.e_star(b, i) if epsilon else None)


# ---- 星对合与 Ψ_λ ----

def star_index_map(family: BiperfectBasisFamily, height: int) -> Dict[str, Tuple[str, int]]:
    """
    star(b) = ±b' 时记录 b ↦ (b', 符号)

    :return: 映射；不是 ± 基元素的键不出现在结果中
    """
    cr = family.cr
    keys = family.keys_up_to(height)
    lookup = {family[k]: k for k in keys}
    result = {}
    for key in keys:
        image = cr.star(family[key])
        if image in lookup:
            result[key] = (lookup[image], 1)
        elif -image in lookup:
            result[key] = (lookup[-image], -1)
    return result


@dataclass
class PsiImage:
    """Ψ_λ 的像：按 ε* ≤ λ 过滤的子族以及逐权的核维数检查"""
    lam: Weight
    keys: List[str]
    kernel_dims: Dict[RootVector, int]
    counts: Dict[RootVector, int]
    passed: bool


def psi_image_basis(family: BiperfectBasisFamily, lam: Weight) -> PsiImage:
    """
    过滤 ε_i*(b) ≤ ⟨α_i^∨, λ⟩，并检查其为 ∩ ker (e_i*)^{λ_i+1} 的基

    :param family: 基族
    :param lam: 支配权
    :return: PsiImage
    """
    cr = family.cr
    if not lam.is_dominant():
        raise ValueError(f"{lam} 不是支配权")
    lowest = cr.cd.apply_word_to_weight(longest_element_word(cr.cd), lam)
    bound = cr.cd.weight_to_root(lam - lowest).height
    family.ensure_height(bound)

    keys, kernel_dims, counts = [], {}, {}
    passed = True
    for height in range(bound + 1):
        for nu in roots_of_height(cr.cd, height):
            basis = cr.monomial_basis(nu)
            rows: List[List] = []
            rhs: List = []
            for i in range(1, cr.n):
                _add_power_rows(cr, basis, "right", i, lam.coords[i - 1] + 1, None, rows, rhs)
            kernel = nullspace(rows, len(basis))
            members = [
                k for k in family.keys_of_weight(nu)
                if all(cr.epsilon("right", i, family[k]) <= lam.coords[i - 1] for i in range(1, cr.n))
            ]
            in_kernel = all(
                not cr.apply("right", i, family[k], lam.coords[i - 1] + 1)
                for k in members for i in range(1, cr.n)
            )
            independent = rank([cr.coordinates(family[k], nu) for k in members], len(basis)) == len(members)
            if len(kernel) or members:
                kernel_dims[nu] = len(kernel)
                counts[nu] = len(members)
            if not (in_kernel and independent and len(members) == len(kernel)):
                passed = False
            keys.extend(members)
    return PsiImage(lam, keys, kernel_dims, counts, passed)


def shuffle_splittings(seq: Sequence[int]) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """把序列分成两个子序列（保持次序）的全部方式"""
    positions = range(len(seq))
    for size in range(len(seq) + 1):
        for chosen in combinations(positions, size):
            chosen_set = set(chosen)
            yield (tuple(seq[p] for p in chosen),
                   tuple(seq[p] for p in positions if p not in chosen_set))
