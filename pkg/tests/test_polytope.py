import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect.polytope import hull, in_convex_hull, in_convex_hull_bruteforce
from biperfect.rootdata import RootVector


def random_points(rng, dim, count, bound=3):
    return [tuple(rng.randint(-bound, bound) for _ in range(dim)) for _ in range(count)]


@pytest.mark.parametrize("dim, count", [(1, 5), (2, 7), (3, 7), (4, 7)])
def test_simplex_agrees_with_caratheodory(dim, count):
    rng = random.Random(dim * 100 + count)
    for _ in range(10):
        points = random_points(rng, dim, count)
        targets = random_points(rng, dim, 4) + points
        for target in targets:
            others = [p for p in points if p != target] or points
            assert in_convex_hull(others, target) == in_convex_hull_bruteforce(others, target), (others, target)


def test_bruteforce_membership_cases():
    square = [(0, 0), (2, 0), (0, 2), (2, 2)]
    assert in_convex_hull_bruteforce(square, (1, 1))
    assert in_convex_hull_bruteforce(square, (Fraction(1, 2), 2))
    assert not in_convex_hull_bruteforce(square, (3, 1))
    assert in_convex_hull_bruteforce([(0, 0, 0), (4, 2, 0)], (2, 1, 0))
    assert not in_convex_hull_bruteforce([(0, 0, 0), (4, 2, 0)], (2, 1, 1))


def test_a2_triangle_and_segment():
    triangle = hull([(0, 0), (1, 0), (1, 1)])
    assert triangle.vertices == (RootVector((0, 0)), RootVector((1, 0)), RootVector((1, 1)))
    assert triangle.contains(RootVector((1, 0)))
    assert hull([(0, 0), (1, 0), (2, 0)]).vertices == (RootVector((0, 0)), RootVector((2, 0)))
    assert hull([(0, 0)]).dimension == 0


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_hull_properties(dim):
    rng = random.Random(dim)
    for _ in range(5):
        points = random_points(rng, dim, 8)
        polytope = hull(points)
        assert hull(polytope.vertices).equals(polytope)
        assert all(polytope.contains(p) for p in points)
        # 顶点不在其余顶点的凸包内
        for v in polytope.vertices:
            others = [u.coords for u in polytope.vertices if u != v]
            assert not others or not in_convex_hull_bruteforce(others, v.coords)

        phi = tuple(rng.randint(-2, 2) for _ in range(dim))
        psi = tuple(rng.randint(-2, 2) for _ in range(dim))
        total = tuple(a + b for a, b in zip(phi, psi))
        assert polytope.support(total) <= polytope.support(phi) + polytope.support(psi)
        assert polytope.support(tuple(3 * a for a in phi)) == 3 * polytope.support(phi)
