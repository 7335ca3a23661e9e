"""E8 root data shared by the lattice and quadratic-form modules."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .linalg import inverse

# Dynkin diagram of E8: a chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
E8_EDGES = [(i, i + 1) for i in range(6)] + [(4, 7)]

_H = Fraction(1, 2)
# Simple roots in the even coordinate system of R^8 (standard dot product),
# listed in node order.
E8_SIMPLE_ROOTS = (
    (0, 0, 0, 0, 0, -1, 1, 0),
    (0, 0, 0, 0, -1, 1, 0, 0),
    (0, 0, 0, -1, 1, 0, 0, 0),
    (0, 0, -1, 1, 0, 0, 0, 0),
    (0, -1, 1, 0, 0, 0, 0, 0),
    (-1, 1, 0, 0, 0, 0, 0, 0),
    (_H, -_H, -_H, -_H, -_H, -_H, -_H, _H),
    (1, 1, 0, 0, 0, 0, 0, 0),
)


def e8_gram(sign: int = -1) -> list:
    """Gram matrix of E8 scaled by ``sign`` (-1 gives E8(-1))."""
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = 2 * sign
    for i, j in E8_EDGES:
        g[i][j] = g[j][i] = -sign
    return g


@lru_cache(maxsize=1)
def e8_orthonormal() -> tuple:
    """Rows c_k with sum_i c_k[i] r_i = e_k, the k-th unit vector of R^8.

    In the simple-root basis these rows are mutually orthogonal of norm 1
    (norm -1 in E8(-1)).
    """
    # C R = I, so C is the inverse of the root matrix
    return tuple(tuple(r) for r in inverse([[Fraction(x) for x in r] for r in E8_SIMPLE_ROOTS]))
