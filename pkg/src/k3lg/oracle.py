"""Brute-force p-adic solubility, independent of the symbol formulas.

A diagonal form f = sum a_i x_i^2 with integer a_i is isotropic over Q_p iff
it has a primitive zero modulo p^(2s+1) whose gradient has valuation s
(Hensel).  For a primitive zero some x_i is a unit, so s is at most
``v_p(2) + max v_p(a_i)``; searching modulo p^N with N = 2 s_max + 1 and
accepting gradients of valuation <= s_max is therefore complete.

The search runs over residues one coordinate at a time, keeping for every
combination of flags (primitive so far, small gradient so far) the set of
reachable partial sums as a bitmask.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .arith import valuation


def _v(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _strip(a: int, p: int) -> int:
    while a % (p * p) == 0:
        a //= p * p
    return a


def _shift(mask: int, by: int, M: int, full: int) -> int:
    by %= M
    if not by:
        return mask
    return ((mask << by) | (mask >> (M - by))) & full


@lru_cache(maxsize=None)
def isotropic(entries: tuple, p: int) -> bool:
    """Whether sum a_i x_i^2 (nonzero integers a_i) has a nontrivial zero over Q_p."""
    if len(entries) < 2:
        return False
    # x -> p x removes p^2 from a coefficient without changing solubility
    entries = tuple(_strip(a, p) for a in entries)
    smax = _v(2, p) + max(_v(abs(a), p) for a in entries)
    N = 2 * smax + 1
    M = p**N
    full = (1 << M) - 1
    # states[(prim, small)] = bitmask of reachable sums mod M
    states = {(False, False): 1}
    for a in entries:
        va = _v(abs(2 * a), p)
        options = {}
        for x in range(M):
            prim = x % p != 0
            small = x != 0 and va + _v(x, p) <= smax
            key = (prim, small)
            options[key] = options.get(key, 0) | (1 << (a * x * x % M))
        new = {}
        for (sp, ss), mask in states.items():
            for (op, os_), omask in options.items():
                key = (sp or op, ss or os_)
                acc = new.get(key, 0)
                bits = omask
                while bits:
                    low = bits & -bits
                    acc |= _shift(mask, low.bit_length() - 1, M, full)
                    bits ^= low
                new[key] = acc
        states = new
    return bool(states.get((True, True), 0) & 1)


def _int_class(r) -> int:
    r = Fraction(r)
    return r.numerator * r.denominator


def hilbert(a, b, p: int) -> int:
    """(a, b)_p from the solubility of z^2 = a x^2 + b y^2."""
    return 1 if isotropic((1, -_int_class(a), -_int_class(b)), p) else -1


def is_square(r, p: int) -> bool:
    return isotropic((1, -_int_class(r)), p)


def witt_index(entries, p: int) -> int:
    """Witt index over Q_p of a diagonal form of rank <= 4."""
    entries = tuple(_int_class(a) for a in entries)
    if len(entries) > 4:
        raise ValueError("the oracle handles rank <= 4 only")
    if not isotropic(tuple(sorted(entries)), p):
        return 0
    if len(entries) < 4:
        return 1
    # rank 4: q = H + q' and q' is hyperbolic iff det q is a square
    d = 1
    for a in entries:
        d *= a
    return 2 if is_square(d, p) else 1
