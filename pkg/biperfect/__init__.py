"""
双完美基工作台
根系数据、B(∞) 晶体、MV多面体、C[N] 的双完美基、洗牌测度与预投射代数模的精确计算
"""

from .common import (setup_logging, DEFAULT_CACHE_DIR, DEFAULT_MAX_WORKERS, SCHEMA_VERSION,
                     UnsupportedCartanTypeError, PoleError, InterpolationError,
                     FieldStabilityError, CacheLockTimeout)
from .rootdata import (
    CartanData, Weight, RootVector, WeylElement,
    positive_roots, reduced_words_w0, all_reduced_words_w0, braid_neighbors,
    longest_element_word, opposition, weyl_group, word_roots,
    kostant_partition, kostant_partition_by_product, parse_int_list
)
from .symbolic import TorusFunctions, ExpSum, torus_for, ft_simplex, divided_difference, parse_point
from .polytope import LatticePolytope, hull, in_convex_hull
from .crystal import LusztigDatum, BinfElement, MVPolytope, CrystalGraph, BInfinity
from .repcheck import (
    ExplicitRep, AdjointRep, PerfectBasisReport, ForcedCartan,
    irrep, tensor, adjoint_rep, verify_perfect, multiplicity_space_dim, force_sl3_adjoint,
    weyl_character, tensor_product_multiplicities, weyl_dimension
)
from .coordring import (
    CoordinateRing, BiperfectBasisFamily, BiperfectReport, FamilyCrystal, UniquenessResult,
    coordinate_ring, sl2_basis, sl3_basis, mutated_sl3_basis, verify_biperfect,
    extract_crystal, count_bicrystal_isomorphisms, match_binf, uniqueness_search,
    psi_image_basis, star_index_map
)
from .measures import (
    UnipotentSymbolic, MorphismCheck,
    d_bar_seq, d_bar, ft_d_seq, ft_d, shuffle_identity_holds, solve_nx, morphism_check,
    support_hull, top_coefficient, origin_coefficient, first_moment, evaluate_at_nx
)
from .preproj import (
    QuiverData, PPModule, quiver_for, check_relation, count_flags, count_flags_bruteforce,
    finite_flag_count, chi_flag, xi, epsilons, submodule_dimvectors, hn_polytope,
    match_crystal_element, is_stably_generic, grassmannian_lattice_dist, lattice_first_moment,
    sl2_module, sl3_example, sl3_fixtures
)
from .file_manager import FileManager, dump_json
from .cache import CrystalCache


# 便捷函数
def create_binf(cartan: str = "A2", max_workers: int = DEFAULT_MAX_WORKERS) -> BInfinity:
    """创建 B(∞) 晶体实例"""
    return BInfinity(CartanData.from_string(cartan), max_workers)


def create_cache(root: str = None, enabled: bool = True, lock_timeout: float = 10.0) -> CrystalCache:
    """创建晶体缓存实例"""
    return CrystalCache(root or DEFAULT_CACHE_DIR, enabled, lock_timeout)


def create_module(data: dict) -> PPModule:
    """从JSON数据创建预投射代数模"""
    return PPModule.from_json(data)


__all__ = [
    # 公共
    'setup_logging',
    'DEFAULT_CACHE_DIR',
    'DEFAULT_MAX_WORKERS',
    'SCHEMA_VERSION',
    'UnsupportedCartanTypeError',
    'PoleError',
    'InterpolationError',
    'FieldStabilityError',
    'CacheLockTimeout',
    'FileManager',
    'dump_json',
    'CrystalCache',
    'create_binf',
    'create_cache',
    'create_module',

    # 根系
    'CartanData',
    'Weight',
    'RootVector',
    'WeylElement',
    'positive_roots',
    'reduced_words_w0',
    'all_reduced_words_w0',
    'braid_neighbors',
    'longest_element_word',
    'opposition',
    'weyl_group',
    'word_roots',
    'kostant_partition',
    'kostant_partition_by_product',
    'parse_int_list',

    # 符号计算与多面体
    'TorusFunctions',
    'ExpSum',
    'torus_for',
    'ft_simplex',
    'divided_difference',
    'parse_point',
    'LatticePolytope',
    'hull',
    'in_convex_hull',

    # 晶体
    'LusztigDatum',
    'BinfElement',
    'MVPolytope',
    'CrystalGraph',
    'BInfinity',

    # 表示
    'ExplicitRep',
    'AdjointRep',
    'PerfectBasisReport',
    'ForcedCartan',
    'irrep',
    'tensor',
    'adjoint_rep',
    'verify_perfect',
    'multiplicity_space_dim',
    'force_sl3_adjoint',
    'weyl_character',
    'tensor_product_multiplicities',
    'weyl_dimension',

    # 坐标环
    'CoordinateRing',
    'BiperfectBasisFamily',
    'BiperfectReport',
    'FamilyCrystal',
    'UniquenessResult',
    'coordinate_ring',
    'sl2_basis',
    'sl3_basis',
    'mutated_sl3_basis',
    'verify_biperfect',
    'extract_crystal',
    'count_bicrystal_isomorphisms',
    'match_binf',
    'uniqueness_search',
    'psi_image_basis',
    'star_index_map',

    # 测度
    'UnipotentSymbolic',
    'MorphismCheck',
    'd_bar_seq',
    'd_bar',
    'ft_d_seq',
    'ft_d',
    'shuffle_identity_holds',
    'solve_nx',
    'morphism_check',
    'support_hull',
    'top_coefficient',
    'origin_coefficient',
    'first_moment',
    'evaluate_at_nx',

    # 预投射代数
    'QuiverData',
    'PPModule',
    'quiver_for',
    'check_relation',
    'count_flags',
    'count_flags_bruteforce',
    'finite_flag_count',
    'chi_flag',
    'xi',
    'epsilons',
    'submodule_dimvectors',
    'hn_polytope',
    'match_crystal_element',
    'is_stably_generic',
    'grassmannian_lattice_dist',
    'lattice_first_moment',
    'sl2_module',
    'sl3_example',
    'sl3_fixtures',
]
