"""
sl_n（n ≤ 4）的显式有限维表示
权空间分解、核滤过、完美基验证、多重度空间维数，以及独立的特征标预言机
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Matrix, eye, kronecker_product, zeros
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .common import logger, UnsupportedCartanTypeError
from .linalg import rank, solve_affine, to_fraction
from .rootdata import CartanData, Weight, kostant_partition, roots_of_height, weyl_group

MAX_IRREP_DIM = 64


@dataclass
class ExplicitRep:
    """
    显式表示：e_i, f_i, h_i 的有理矩阵，基向量均为权向量

    :param cd: A型Cartan数据
    :param e: e_i 的矩阵列表
    :param f: f_i 的矩阵列表
    :param h: h_i 的矩阵列表
    :param weights: 每个基向量的权
    :param labels: 基向量的文字描述
    """
    cd: CartanData
    e: List[Matrix]
    f: List[Matrix]
    h: List[Matrix]
    weights: List[Weight]
    labels: List[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def weight_space(self, mu: Weight) -> List[int]:
        return [k for k, w in enumerate(self.weights) if w == mu]

    def weight_multiplicities(self) -> Dict[Weight, int]:
        counts: Dict[Weight, int] = {}
        for w in self.weights:
            counts[w] = counts.get(w, 0) + 1
        return dict(sorted(counts.items()))

    def check_relations(self) -> List[str]:
        """
        精确检查Chevalley关系与Serre关系

        :return: 不成立的关系列表（为空表示全部成立）
        """
        failures = []
        r = self.cd.rank
        a = self.cd.matrix

        def bracket(x, y):
            return x * y - y * x

        for i in range(r):
            for j in range(r):
                if bracket(self.h[i], self.h[j]) != zeros(self.dim):
                    failures.append(f"[h{i + 1}, h{j + 1}]")
                if bracket(self.h[i], self.e[j]) != a[i][j] * self.e[j]:
                    failures.append(f"[h{i + 1}, e{j + 1}]")
                if bracket(self.h[i], self.f[j]) != -a[i][j] * self.f[j]:
                    failures.append(f"[h{i + 1}, f{j + 1}]")
                expected = self.h[i] if i == j else zeros(self.dim)
                if bracket(self.e[i], self.f[j]) != expected:
                    failures.append(f"[e{i + 1}, f{j + 1}]")
                if i != j:
                    for ops, name in ((self.e, "e"), (self.f, "f")):
                        result = ops[j]
                        for _ in range(1 - a[i][j]):
                            result = bracket(ops[i], result)
                        if result != zeros(self.dim):
                            failures.append(f"Serre {name}{i + 1},{name}{j + 1}")

        for k, w in enumerate(self.weights):
            for i in range(r):
                column = self.h[i][:, k]
                if column != w.coords[i] * eye(self.dim)[:, k]:
                    failures.append(f"权向量 {k} 在 h{i + 1} 下")
        return failures


def _require_type_a(cd: CartanData):
    if not cd.name.startswith("A") or "X" in cd.name.upper() or cd.rank > 3:
        raise UnsupportedCartanTypeError(f"显式表示只支持 A1、A2、A3，收到 {cd.name}")


class _PolynomialRealization:
    """
    sl_n 在 QQ[u_1..u_n, w_1..w_n] 上的作用
    E_ij = u_i ∂/∂u_j − w_j ∂/∂w_i
    """

    def __init__(self, n: int):
        self.n = n
        names = [f"u{i}" for i in range(1, n + 1)] + [f"w{i}" for i in range(1, n + 1)]
        self.ring, *gens = ring(",".join(names), QQ)
        self.u = gens[:n]
        self.w = gens[n:]

    def act(self, i: int, j: int, poly):
        return self.u[i - 1] * poly.diff(self.u[j - 1]) - self.w[j - 1] * poly.diff(self.w[i - 1])

    def e(self, i: int, poly):
        return self.act(i, i + 1, poly)

    def f(self, i: int, poly):
        return self.act(i + 1, i, poly)

    def weight(self, poly) -> Weight:
        monom = poly.monoms()[0]
        diag = [monom[k] - monom[self.n + k] for k in range(self.n)]
        return Weight(tuple(diag[k] - diag[k + 1] for k in range(self.n - 1)))


def _coordinates(basis: List, poly) -> List:
    """把 poly 表示为 basis（同一权空间的多项式）的线性组合"""
    monomials = sorted({m for b in basis for m in b.monoms()} | set(poly.monoms()))
    columns = [dict(b.terms()) for b in basis]
    rows = [[column.get(m, QQ.zero) for column in columns] for m in monomials]
    rhs = [dict(poly.terms()).get(m, QQ.zero) for m in monomials]
    solution, _ = solve_affine(rows, rhs, len(basis))
    if solution is None:
        raise RuntimeError("向量不在所给权空间的张成中")
    return solution


def irrep(cd: CartanData, lam: Weight) -> ExplicitRep:
    """
    不可约表示 V(λ)：从最高权向量 u_1^{λ_1}···w_n^{λ_{n-1}} 出发，用 f_i 生成

    :param cd: A1、A2 或 A3
    :param lam: 支配权
    :return: ExplicitRep
    """
    _require_type_a(cd)
    if not lam.is_dominant():
        raise ValueError(f"{lam} 不是支配权")
    n = cd.rank + 1
    real = _PolynomialRealization(n)

    # 基本权 ω_k 由 u_1∧…∧u_k 实现；这里只需要 ω_1 与 ω_{n-1}
    if n > 3 and any(lam.coords[1:-1]):
        raise UnsupportedCartanTypeError("A3 只支持 λ = a ω1 + b ω3")
    top = real.ring.one
    top *= real.u[0] ** lam.coords[0]
    if n > 2:
        top *= real.w[n - 1] ** lam.coords[-1]

    by_weight: Dict[Weight, List] = {}
    order: List = []
    frontier = [top]
    by_weight[real.weight(top)] = [top]
    order.append(top)
    while frontier:
        next_frontier = []
        for poly in frontier:
            for i in range(1, n):
                image = real.f(i, poly)
                if not image:
                    continue
                mu = real.weight(image)
                space = by_weight.setdefault(mu, [])
                monomials = sorted({m for b in space + [image] for m in b.monoms()})
                rows = [[dict(b.terms()).get(m, QQ.zero) for m in monomials] for b in space + [image]]
                if rank(rows, len(monomials)) > len(space):
                    image = image.quo_ground(image.LC)
                    space.append(image)
                    order.append(image)
                    next_frontier.append(image)
        frontier = next_frontier
        if len(order) > MAX_IRREP_DIM:
            raise ValueError(f"表示维数超过 {MAX_IRREP_DIM}")

    order.sort(key=lambda p: (cd.weight_to_root(lam - real.weight(p)).height, order.index(p)))
    index = {id(p): k for k, p in enumerate(order)}
    dim = len(order)

    def matrix_of(op) -> Matrix:
        result = zeros(dim)
        for k, poly in enumerate(order):
            image = op(poly)
            if not image:
                continue
            space = by_weight[real.weight(image)]
            for b, c in zip(space, _coordinates(space, image)):
                if c:
                    result[index[id(b)], k] = QQ.to_sympy(c)
        return result

    e = [matrix_of(lambda p, i=i: real.e(i, p)) for i in range(1, n)]
    f = [matrix_of(lambda p, i=i: real.f(i, p)) for i in range(1, n)]
    h = [e[i] * f[i] - f[i] * e[i] for i in range(n - 1)]
    weights = [real.weight(p) for p in order]
    labels = [str(p) for p in order]
    logger.debug(f"构造 V({lam})，维数 {dim}")
    return ExplicitRep(cd, e, f, h, weights, labels)


def tensor(first: ExplicitRep, second: ExplicitRep) -> ExplicitRep:
    """张量积，X ↦ X⊗1 + 1⊗X"""
    if first.cd != second.cd:
        raise ValueError("两个表示的Cartan类型不同")

    def kron(a: Matrix, b: Matrix) -> Matrix:
        return Matrix(kronecker_product(a, b))

    one_a, one_b = eye(first.dim), eye(second.dim)
    ops = {}
    for name in ("e", "f", "h"):
        ops[name] = [
            kron(x, one_b) + kron(one_a, y)
            for x, y in zip(getattr(first, name), getattr(second, name))
        ]
    weights = [a + b for a in first.weights for b in second.weights]
    labels = [f"{a}⊗{b}" for a in first.labels for b in second.labels]
    return ExplicitRep(first.cd, ops["e"], ops["f"], ops["h"], weights, labels)


def _elementary(n: int, i: int, j: int) -> Matrix:
    m = zeros(n)
    m[i - 1, j - 1] = 1
    return m


@dataclass
class AdjointRep:
    """sl_3 伴随表示，基为无迹 3×3 矩阵"""
    rep: ExplicitRep
    basis_matrices: List[Matrix]

    def coordinates(self, matrix: Matrix) -> Matrix:
        """无迹矩阵在 basis_matrices 下的坐标列"""
        rows = [[b[r, c] for b in self.basis_matrices] for r in range(3) for c in range(3)]
        rhs = [matrix[r, c] for r in range(3) for c in range(3)]
        solution, _ = solve_affine(rows, rhs, len(self.basis_matrices))
        if solution is None:
            raise ValueError("矩阵不在 sl3 中")
        return Matrix([QQ.to_sympy(c) for c in solution])

    def matrix_of(self, column: Matrix) -> Matrix:
        result = zeros(3)
        for c, b in zip(column, self.basis_matrices):
            result += c * b
        return result


def adjoint_rep() -> AdjointRep:
    """
    sl_3 的伴随表示，e_i 作用为 ad(E_{i,i+1})
    基：E13, E12, E23, diag(1,−1,0), diag(0,1,−1), E21, E32, E31
    """
    cd = CartanData.from_string("A2")
    basis = [
        _elementary(3, 1, 3), _elementary(3, 1, 2), _elementary(3, 2, 3),
        Matrix.diag(1, -1, 0), Matrix.diag(0, 1, -1),
        _elementary(3, 2, 1), _elementary(3, 3, 2), _elementary(3, 3, 1),
    ]
    labels = ["E13", "E12", "E23", "H1", "H2", "E21", "E32", "E31"]
    weights = [Weight((1, 1)), Weight((2, -1)), Weight((-1, 2)), Weight((0, 0)), Weight((0, 0)),
               Weight((-2, 1)), Weight((1, -2)), Weight((-1, -1))]
    holder = AdjointRep(None, basis)

    def ad(x: Matrix) -> Matrix:
        columns = [holder.coordinates(x * b - b * x) for b in basis]
        return Matrix.hstack(*columns)

    e = [ad(_elementary(3, 1, 2)), ad(_elementary(3, 2, 3))]
    f = [ad(_elementary(3, 2, 1)), ad(_elementary(3, 3, 2))]
    h = [ad(Matrix.diag(1, -1, 0)), ad(Matrix.diag(0, 1, -1))]
    holder.rep = ExplicitRep(cd, e, f, h, weights, labels)
    return holder


# ---- 完美基验证 ----

@dataclass
class PerfectCheck:
    """单个 (基向量, i) 的检查结果"""
    index: int
    i: int
    epsilon: int
    partner: Optional[int]
    passed: bool
    certificate: str = ""


@dataclass
class PerfectBasisReport:
    """完美基验证报告"""
    passed: bool
    epsilons: Dict[int, Tuple[int, ...]]
    checks: List[PerfectCheck]

    def failures(self) -> List[PerfectCheck]:
        return [c for c in self.checks if not c.passed]


def _epsilon(op: Matrix, vector: Matrix) -> int:
    count = 0
    current = op * vector
    while any(current):
        count += 1
        current = op * current
    return count


def verify_perfect(rep: ExplicitRep, basis: Optional[Sequence[Matrix]] = None) -> PerfectBasisReport:
    """
    检查 e_i b = ε_i(b) ẽ_i(b) + v，其中 e_i^{ε_i(b)−1} v = 0

    :param rep: 显式表示
    :param basis: 列向量组成的基（默认为标准基）
    :return: PerfectBasisReport
    """
    if basis is None:
        basis = [eye(rep.dim)[:, k] for k in range(rep.dim)]
    basis = [Matrix(b) for b in basis]
    if Matrix.hstack(*basis).rank() != rep.dim:
        raise ValueError("所给向量不构成基")

    for k, b in enumerate(basis):
        for i, h in enumerate(rep.h):
            image = h * b
            pivot = next(t for t in range(rep.dim) if b[t] != 0)
            if image != (image[pivot] / b[pivot]) * b:
                raise ValueError(f"第 {k} 个基向量不是权向量")

    r = rep.cd.rank
    eps = {k: tuple(_epsilon(rep.e[i], b) for i in range(r)) for k, b in enumerate(basis)}
    basis_matrix = Matrix.hstack(*basis)
    checks = []
    for k, b in enumerate(basis):
        for i in range(r):
            epsilon = eps[k][i]
            if epsilon == 0:
                checks.append(PerfectCheck(k, i + 1, 0, None, True))
                continue
            image = rep.e[i] * b
            coefficients = basis_matrix.solve(image)
            candidates = [
                t for t in range(len(basis))
                if coefficients[t] != 0 and eps[t][i] == epsilon - 1
            ]
            power = rep.e[i] ** (epsilon - 1)
            found = None
            certificate = f"e{i + 1} b{k} 中没有 ε = {epsilon - 1} 的伙伴"
            for t in candidates:
                residual = image - epsilon * basis[t]
                tail = power * residual
                if not any(tail):
                    found = t
                    break
                certificate = f"e{i + 1}^{epsilon - 1}(e{i + 1} b{k} − {epsilon}·b{t}) = {list(tail)}"
            checks.append(PerfectCheck(k, i + 1, epsilon, found, found is not None,
                                       "" if found is not None else certificate))

    passed = all(c.passed for c in checks)
    logger.info(f"完美基验证: {len(checks)} 项检查, {'通过' if passed else '失败'}")
    return PerfectBasisReport(passed, eps, checks)


def multiplicity_space_dim(cd: CartanData, lam: Weight, mu: Weight, nu: Weight) -> int:
    """
    dim(∩_i ker e_i^{⟨α_i^∨, μ⟩+1} ∩ V(λ)_{ν−μ})

    :return: 维数；ν−μ 不是 V(λ) 的权时为 0
    """
    rep = irrep(cd, lam)
    indices = rep.weight_space(nu - mu)
    if not indices:
        return 0
    blocks = []
    for i in range(cd.rank):
        power = rep.e[i] ** (mu.coords[i] + 1)
        blocks.extend(power[:, indices].tolist())
    rows = [[to_fraction(v) for v in row] for row in blocks]
    return len(indices) - rank(rows, len(indices))


@dataclass
class ForcedCartan:
    """伴随表示中被完美性逼出的两个Cartan基向量"""
    d_a: Tuple[Fraction, Fraction, Fraction]
    d_b: Tuple[Fraction, Fraction, Fraction]
    a: Fraction
    b: Fraction
    basis: List[Matrix]
    report: PerfectBasisReport


def force_sl3_adjoint() -> ForcedCartan:
    """
    在伴随表示中求解零权空间的基向量：
    D_a ∈ ker e1 且 e2 D_a = b_{α2}；D_b ∈ ker e2 且 e1 D_b = b_{α1}
    其中 b_θ = E13，b_{α2} = E23，b_{α1} = −E12 由顶端向下逐个确定
    """
    adjoint = adjoint_rep()
    rep = adjoint.rep
    coords = adjoint.coordinates
    b_alpha1 = coords(-_elementary(3, 1, 2))
    b_alpha2 = coords(_elementary(3, 2, 3))
    zero_space = rep.weight_space(Weight((0, 0)))

    def solve(kernel_op: Matrix, partner_op: Matrix, target: Matrix) -> Matrix:
        rows = (kernel_op[:, zero_space].tolist() + partner_op[:, zero_space].tolist())
        rhs = [0] * kernel_op.rows + list(target)
        solution, kernel = solve_affine(
            [[to_fraction(v) for v in row] for row in rows],
            [to_fraction(v) for v in rhs], len(zero_space))
        if solution is None or kernel:
            raise RuntimeError("零权空间的约束无解或不唯一")
        column = zeros(rep.dim, 1)
        for position, value in zip(zero_space, solution):
            column[position] = QQ.to_sympy(value)
        return column

    e1, e2 = rep.e
    d_a = solve(e1, e2, b_alpha2)
    d_b = solve(e2, e1, b_alpha1)
    diag_a = tuple(to_fraction(adjoint.matrix_of(d_a)[k, k]) for k in range(3))
    diag_b = tuple(to_fraction(adjoint.matrix_of(d_b)[k, k]) for k in range(3))

    basis = [
        coords(_elementary(3, 1, 3)), b_alpha1, b_alpha2, d_a, d_b,
        coords(_elementary(3, 2, 1)), coords(-_elementary(3, 3, 2)), coords(_elementary(3, 3, 1)),
    ]
    report = verify_perfect(rep, basis)
    logger.info(f"伴随表示的Cartan向量: D_a = {diag_a}, D_b = {diag_b}")
    return ForcedCartan(diag_a, diag_b, -diag_a[0], -diag_b[2], basis, report)


# ---- 特征标预言机 ----

def weyl_character(cd: CartanData, lam: Weight) -> Dict[Weight, int]:
    """
    Kostant重数公式 m_λ(μ) = Σ_w sgn(w) P(w(λ+ρ) − (μ+ρ))

    :param cd: Cartan数据（秩 ≤ 4）
    :param lam: 支配权
    :return: 权到重数的映射
    """
    if not lam.is_dominant():
        raise ValueError(f"{lam} 不是支配权")
    rho = cd.rho()
    shifted = lam + rho
    group = weyl_group(cd)
    lowest = cd.apply_word_to_weight(group[-1].word, lam)
    bound = cd.weight_to_root(lam - lowest).height

    character = {}
    for height in range(bound + 1):
        for root in roots_of_height(cd, height):
            mu = lam - cd.root_to_weight(root)
            total = 0
            for element in group:
                image = cd.apply_word_to_weight(element.word, shifted)
                try:
                    difference = cd.weight_to_root(image - (mu + rho))
                except ValueError:
                    continue
                if difference.is_nonnegative():
                    total += element.sign * kostant_partition(cd, difference)
            if total:
                character[mu] = total
    return dict(sorted(character.items()))


def _dominant_dot(cd: CartanData, weight: Weight) -> Tuple[Optional[Weight], int]:
    """把 weight + ρ 反射到支配区，返回 (dot作用的像, 符号)；落在墙上时返回 None"""
    shifted = weight + cd.rho()
    sign = 1
    while True:
        if any(c == 0 for c in shifted.coords):
            return None, 0
        negative = next((k for k, c in enumerate(shifted.coords) if c < 0), None)
        if negative is None:
            return shifted - cd.rho(), sign
        shifted = cd.reflect_weight(negative + 1, shifted)
        sign = -sign


def tensor_product_multiplicities(cd: CartanData, lam: Weight, mu: Weight) -> Dict[Weight, int]:
    """
    Brauer–Klimyk：c^ν_{λμ} 的完整表

    :return: ν 到重数的映射（只含非零项）
    """
    table: Dict[Weight, int] = {}
    for weight, multiplicity in weyl_character(cd, mu).items():
        target, sign = _dominant_dot(cd, lam + weight)
        if target is not None:
            table[target] = table.get(target, 0) + sign * multiplicity
    return dict(sorted((k, v) for k, v in table.items() if v))


def weyl_dimension(cd: CartanData, lam: Weight) -> int:
    return sum(weyl_character(cd, lam).values())
