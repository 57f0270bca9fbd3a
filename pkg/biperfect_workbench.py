"""
双完美基工作台命令行工具
B(∞) 截断、B(λ)、重数、MV多面体、C[N] 的双完美基验证、洗牌测度与预投射代数模

退出码：0 成功，1 验证未通过，2 用法或输入错误
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from biperfect import (
    BInfinity, CartanData, CrystalCache, FileManager, LusztigDatum, PPModule, Weight,
    all_reduced_words_w0, check_relation, chi_flag, d_bar, dump_json, epsilons, ft_d,
    hn_polytope, is_stably_generic, match_crystal_element, morphism_check, parse_int_list,
    sl2_basis, sl3_basis, submodule_dimvectors, tensor_product_multiplicities,
    uniqueness_search, verify_biperfect, weyl_character, xi
)
from biperfect.common import SCHEMA_VERSION, logger
from biperfect.coordring import BiperfectBasisFamily
from config import Config, get_config

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class Outcome:
    """一次子命令的输出：JSON对象或DOT文本，以及是否通过验证"""

    def __init__(self, data: Any, passed: bool = True):
        self.data = data
        self.passed = passed

    def render(self) -> str:
        return self.data if isinstance(self.data, str) else dump_json(self.data)


def _weights(items) -> List[Dict[str, object]]:
    return [{"weight": list(w.coords), "multiplicity": m} for w, m in items]


def _cartan(args: argparse.Namespace, config: Config) -> CartanData:
    if getattr(args, "cartan", None):
        return CartanData.from_string(args.cartan)
    letter = args.type or config.defaults["type"]
    rank = args.rank or config.defaults["rank"]
    return CartanData.from_string(f"{letter}{rank}")


def _weight(cd: CartanData, text: str, name: str) -> Weight:
    coords = parse_int_list(text)
    if len(coords) != cd.rank:
        raise ValueError(f"{name} 需要 {cd.rank} 个坐标，收到 {text!r}")
    return Weight(coords)


def _binf(cd: CartanData, config: Config) -> BInfinity:
    return BInfinity(cd, config.compute["max_workers"])


def _family(args: argparse.Namespace, height: int) -> BiperfectBasisFamily:
    if getattr(args, "family", None):
        return BiperfectBasisFamily.from_json(FileManager.load_model_file(args.family))
    if args.group == "sl2":
        return sl2_basis(height)
    if args.group == "sl3":
        return sl3_basis(height)
    raise ValueError(f"没有内置的 {args.group} 基族，请用 --family 指定文件")


# ---- 子命令 ----

def cmd_binf(args, config: Config, cache: CrystalCache) -> Outcome:
    cd = _cartan(args, config)
    fmt = args.format or config.defaults["format"]
    params = {"depth": args.depth, "format": fmt, "star_edges": args.star_edges}

    def compute():
        graph = _binf(cd, config).enumerate_binf(args.depth, star_edges=args.star_edges)
        return graph.to_dot() if fmt == "dot" else graph.to_json()

    return Outcome(cache.get_or_compute("binf", cd.name, params, compute))


def cmd_blambda(args, config: Config, cache: CrystalCache) -> Outcome:
    cd = _cartan(args, config)
    lam = _weight(cd, args.lam, "--lambda")
    fmt = args.format or config.defaults["format"]
    params = {"lambda": list(lam.coords), "format": fmt}

    def compute():
        graph = _binf(cd, config).b_lambda(lam)
        if fmt == "dot":
            return graph.to_dot()
        data = graph.to_json()
        data["lambda"] = list(lam.coords)
        return data

    return Outcome(cache.get_or_compute("blambda", cd.name, params, compute))


def cmd_mult(args, config: Config, cache: CrystalCache) -> Outcome:
    cd = _cartan(args, config)
    binf = _binf(cd, config)
    lam = _weight(cd, args.lam, "--lambda")
    mu = _weight(cd, args.mu, "--mu")
    data: Dict[str, object] = {
        "schema": SCHEMA_VERSION, "cartan": cd.name, "kind": args.kind,
        "lambda": list(lam.coords), "mu": list(mu.coords),
    }
    if args.kind == "weight":
        data["multiplicity"] = binf.weight_multiplicity(lam, mu)
    elif args.nu:
        nu = _weight(cd, args.nu, "--nu")
        data["nu"] = list(nu.coords)
        data["multiplicity"] = binf.tensor_multiplicity(lam, mu, nu)
    else:
        data["table"] = _weights(binf.tensor_table(lam, mu).items())
    return Outcome(data)


def cmd_mvpolytope(args, config: Config, cache: CrystalCache) -> Outcome:
    cd = _cartan(args, config)
    binf = _binf(cd, config)
    datum = LusztigDatum(parse_int_list(args.word), parse_int_list(args.data))
    b = binf.element(datum)
    polytope = binf.mv_polytope(b)
    data = {
        "schema": SCHEMA_VERSION,
        "cartan": cd.name,
        "word": list(datum.word),
        "data": list(datum.values),
        "nu": list(binf.nu(b).coords),
        "data_by_word": [
            {"word": list(word), "data": list(binf.datum(b, word).values)}
            for word in all_reduced_words_w0(cd)
        ],
    }
    data.update(polytope.to_json())
    return Outcome(data)


def cmd_cn(args, config: Config, cache: CrystalCache) -> Outcome:
    if args.action == "verify":
        family = _family(args, args.maxdeg)
        report = verify_biperfect(family, args.maxdeg, config.compute["max_workers"])
        data = {
            "schema": SCHEMA_VERSION,
            "group": f"sl{family.cr.n}",
            "maxdeg": args.maxdeg,
            "passed": report.passed,
            "weights_checked": report.weights_checked,
            "failures": [
                {"key": f.key, "side": f.side, "i": f.i, "reason": f.reason} for f in report.failures
            ],
        }
        return Outcome(data, report.passed)

    if args.group != "sl3":
        raise ValueError("唯一性搜索只支持 sl3")
    result = uniqueness_search(args.maxheight, use_right=not args.left_only)
    data = {
        "schema": SCHEMA_VERSION,
        "group": "sl3",
        "maxheight": args.maxheight,
        "use_right": not args.left_only,
        "unique": result.unique,
        "family_count": result.family_count,
        "solutions": [
            {"datum": list(b.values), "polynomial": str(f)}
            for b, f in sorted(result.solutions.items())
        ],
    }
    return Outcome(data, result.unique)


def cmd_measure(args, config: Config, cache: CrystalCache) -> Outcome:
    family = _family(args, 6)
    cr = family.cr
    try:
        f = family[args.element]
    except KeyError:
        f = cr.parse(args.element)

    data: Dict[str, object] = {
        "schema": SCHEMA_VERSION, "group": f"sl{cr.n}", "element": args.element, "polynomial": str(f),
    }
    passed = True
    if args.kind == "dbar":
        data["dbar"] = str(d_bar(cr, f))
    elif args.kind == "ft":
        data["ft"] = ft_d(cr, f).to_json()
    else:
        check = morphism_check(cr, f)
        passed = check.passed
        data.update({
            "passed": check.passed,
            "ft_passed": check.ft_passed,
            "dbar_passed": check.dbar_passed,
            "ft_lhs": check.ft_lhs,
            "ft_rhs": check.ft_rhs,
            "dbar_lhs": check.dbar_lhs,
            "dbar_rhs": check.dbar_rhs,
        })
    return Outcome(data, passed)


def cmd_ppa(args, config: Config, cache: CrystalCache) -> Outcome:
    module = PPModule.from_json(FileManager.load_model_file(args.module))
    if not check_relation(module):
        raise ValueError(f"模不满足预投射关系: {args.module}")
    options = {"extra_primes": config.compute["primes_extra"], "max_workers": config.compute["max_workers"]}
    data: Dict[str, object] = {
        "schema": SCHEMA_VERSION, "cartan": module.cd.name, "dims": list(module.dims),
    }

    if args.kind == "chi":
        if args.seq is None:
            raise ValueError("chi 需要 --seq")
        seq = parse_int_list(args.seq)
        data["seq"] = list(seq)
        data["chi"] = chi_flag(module, seq, **options)
    elif args.kind == "xi":
        result = xi(module, **options)
        if isinstance(result, dict):
            data["pairings"] = {",".join(map(str, seq)): chi for seq, chi in result.items()}
        else:
            data["xi"] = str(result.as_expr())
    elif args.kind == "hn":
        data["submodules"] = [list(v.coords) for v in sorted(submodule_dimvectors(module))]
        data.update(hn_polytope(module).to_json())
        try:
            binf = _binf(module.cd, config)
            b = match_crystal_element(module, binf)
            data["matched_datum"] = list(b.values)
            data["mv_equal"] = binf.mv_polytope(b).polytope.equals(hn_polytope(module))
        except ValueError as e:
            logger.info(f"没有匹配的晶体元素: {e}")
            data["matched_datum"] = None
    else:
        socle, top = epsilons(module)
        data["epsilon"] = list(socle)
        data["epsilon_star"] = list(top)
        data["stably_generic"] = is_stably_generic(module)
    return Outcome(data)


def cmd_oracle(args, config: Config, cache: CrystalCache) -> Outcome:
    cd = _cartan(args, config)
    lam = _weight(cd, args.lam, "--lambda")
    data: Dict[str, object] = {
        "schema": SCHEMA_VERSION, "cartan": cd.name, "kind": args.kind, "lambda": list(lam.coords),
    }
    if args.kind == "character":
        data["character"] = _weights(sorted(weyl_character(cd, lam).items()))
    else:
        if not args.mu:
            raise ValueError("tensor 需要 --mu")
        mu = _weight(cd, args.mu, "--mu")
        data["mu"] = list(mu.coords)
        data["table"] = _weights(tensor_product_multiplicities(cd, lam, mu).items())
    return Outcome(data)


COMMANDS = {
    "binf": cmd_binf,
    "blambda": cmd_blambda,
    "mult": cmd_mult,
    "mvpolytope": cmd_mvpolytope,
    "cn": cmd_cn,
    "measure": cmd_measure,
    "ppa": cmd_ppa,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="双完美基工作台")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出调试日志")
    parser.add_argument("--no-cache", action="store_true", help="不读写晶体缓存")
    parser.add_argument("--output", "-o", metavar="FILE", help="结果写入文件而不是标准输出")
    parser.add_argument("--config", metavar="FILE", help="key = value 配置文件")
    sub = parser.add_subparsers(dest="command", required=True)

    def cartan_options(p):
        p.add_argument("--type", help="Cartan类型字母 (A, D, E)")
        p.add_argument("--rank", type=int, help="秩")
        p.add_argument("--cartan", help="完整类型字符串，如 A1xA1")

    p = sub.add_parser("binf", help="B(∞) 截断")
    cartan_options(p)
    p.add_argument("--depth", type=int, required=True, help="最大高度")
    p.add_argument("--format", choices=("json", "dot"))
    p.add_argument("--star-edges", action="store_true", help="同时输出 ẽ_i* 边")

    p = sub.add_parser("blambda", help="最高权晶体 B(λ)")
    cartan_options(p)
    p.add_argument("--lambda", dest="lam", required=True, help="支配权，如 1,1")
    p.add_argument("--format", choices=("json", "dot"))

    p = sub.add_parser("mult", help="权重数与张量积重数")
    p.add_argument("kind", choices=("weight", "tensor"))
    cartan_options(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu")

    p = sub.add_parser("mvpolytope", help="Lusztig数据的MV多面体")
    cartan_options(p)
    p.add_argument("--word", required=True, help="w0 的约化词，如 1,2,1")
    p.add_argument("--data", required=True, help="Lusztig数据，如 3,2,1")

    p = sub.add_parser("cn", help="C[N] 的双完美基")
    p.add_argument("action", choices=("verify", "unique"))
    p.add_argument("--group", default="sl3", help="sl2 或 sl3")
    p.add_argument("--family", metavar="FILE", help="基族JSON文件")
    p.add_argument("--maxdeg", type=int, default=6)
    p.add_argument("--maxheight", type=int, default=4)
    p.add_argument("--left-only", action="store_true", help="唯一性搜索只用左作用")

    p = sub.add_parser("measure", help="洗牌测度")
    p.add_argument("kind", choices=("dbar", "ft", "check"))
    p.add_argument("--group", default="sl3")
    p.add_argument("--family", metavar="FILE")
    p.add_argument("--element", required=True, help="基元素的键（如 x:1,0,0）或多项式")

    p = sub.add_parser("ppa", help="预投射代数模")
    p.add_argument("kind", choices=("xi", "hn", "chi", "eps"))
    p.add_argument("--module", required=True, metavar="FILE")
    p.add_argument("--seq", help="顶点序列，如 1,2")

    p = sub.add_parser("oracle", help="Weyl特征标与张量积（校验用）")
    p.add_argument("kind", choices=("character", "tensor"))
    cartan_options(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    config = get_config()
    try:
        if args.config:
            if not config.load_conf_file(args.config):
                raise ValueError(f"配置文件不存在: {args.config}")
        else:
            config.load_conf_file()

        cache = CrystalCache(
            str(config.cache_path),
            enabled=config.cache["enabled"] and not args.no_cache,
            lock_timeout=config.cache["lock_timeout"],
            schema_version=config.cache["schema_version"],
        )
        outcome = COMMANDS[args.command](args, config, cache)
    except ValueError as e:
        logger.error(f"输入错误: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, TimeoutError, ZeroDivisionError) as e:
        logger.error(f"计算失败: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILED

    text = outcome.render()
    if args.output:
        if not FileManager.save_text_file(text, args.output):
            return EXIT_FAILED
        print(f"✅ 结果已写入: {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)

    if not outcome.passed:
        print("❌ 验证未通过", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
