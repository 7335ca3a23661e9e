"""Rational points on diagonal conics.

A zero of a x^2 + b y^2 + c z^2 (squarefree, pairwise coprime coefficients)
is looked for first in the lattice of vectors satisfying the local
congruences at the primes of abc (Mordell's argument, as used by Cremona and
Rusin); that needs only square roots modulo those primes.  Legendre descent is
the fallback.  The descent for ``x^2 = A y^2 + B z^2`` repeatedly replaces ``B`` by the
squarefree part of ``(t^2 - A) / B`` where ``t^2 = A mod B``, then lifts the
smaller solution back through the norm form of ``Q(sqrt A)``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from .errors import FactorizationError
from .linalg import integer_kernel, lll_rows


#: Trial bound used by ``quick`` factoring before giving up.
QUICK_LIMIT = 10**5


@lru_cache(maxsize=8192)
def factor(n: int, quick: bool = False, hint: tuple = ()) -> tuple:
    """((p, e), ...) for |n| >= 1 (sympy's factorint).

    Primes in ``hint`` are divided out first.  With ``quick`` the search for
    further factors is capped and FactorizationError is raised when a
    composite cofactor survives.
    """
    n = abs(n)
    out = {}
    for p in hint:
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
    if n > 1:
        f = factorint(n, limit=QUICK_LIMIT) if quick else factorint(n)
        for p, e in f.items():
            p = int(p)
            if quick and p > QUICK_LIMIT and not isprime(p):
                raise FactorizationError(f"{n} does not factor quickly")
            out[p] = out.get(p, 0) + int(e)
    return tuple(sorted(out.items()))


def squarefree_decompose(n: int, quick: bool = False, hint: tuple = ()) -> tuple[int, int]:
    """(s, k) with n = s * k^2 and s squarefree (sign carried by s)."""
    s, k = 1, 1
    for p, e in factor(n, quick, hint):
        if e % 2:
            s *= p
        k *= p ** (e // 2)
    return (s if n > 0 else -s), k


def _crt(residues, moduli):
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        # x + m*u = r mod n
        u = ((r - x) * pow(m, -1, n)) % n
        x += m * u
        m *= n
    return x % m


def _sqrt_mod_squarefree(a: int, b: int, quick: bool = False):
    """Some t with t^2 = a mod b for squarefree b > 0, else None."""
    residues, moduli = [], []
    for p, _ in factor(b, quick):
        r = a % p
        if r == 0:
            residues.append(0)
        else:
            s = sqrt_mod(r, p)
            if s is None:
                return None
            residues.append(int(s))
        moduli.append(p)
    return _crt(residues, moduli) if moduli else 0


def legendre_solve(A: int, B: int, quick: bool = False):
    """Nontrivial integers (x, y, z) with x^2 = A y^2 + B z^2, or None.

    A and B must be nonzero squarefree integers.
    """
    if A == 1:
        return (1, 1, 0)
    if B == 1:
        return (1, 0, 1)
    if A < 0 and B < 0:
        return None
    if A == -B:
        # x^2 = A (y^2 - z^2): y = (A + 1)/2, z = (A - 1)/2 gives y^2 - z^2 = A
        return _scale((A, Fraction(A + 1, 2), Fraction(A - 1, 2)))
    if abs(A) > abs(B):
        sol = legendre_solve(B, A, quick)
        return None if sol is None else (sol[0], sol[2], sol[1])
    m = abs(B)
    t = _sqrt_mod_squarefree(A % m, m, quick)
    if t is None:
        return None
    if t > m // 2:
        t -= m
    b1 = (t * t - A) // B
    if b1 == 0:
        return None  # A would be a square, excluded above
    s, k = squarefree_decompose(b1, quick)
    sub = legendre_solve(A, s, quick)
    if sub is None:
        return None
    x1, y1, z1 = sub
    return _scale((x1 * t + A * y1, x1 + t * y1, s * k * z1))


def _scale(v):
    """Primitive integer multiple of a rational triple."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


def ternary_solve(a: int, b: int, c: int, quick: bool = False, hint: tuple = ()):
    """Nontrivial integer zero of a x^2 + b y^2 + c z^2, or None.

    ``quick`` caps the factoring effort and ``hint`` lists primes known to
    divide the coefficients (see ``factor``).
    """
    if 0 in (a, b, c):
        raise ValueError("coefficients must be nonzero")
    # strip square factors; remember the variable scalings
    hint = tuple(sorted(set(hint)))
    (a, ka), (b, kb), (c, kc) = (squarefree_decompose(x, quick, hint) for x in (a, b, c))
    g = gcd(gcd(a, b), c)
    a, b, c = a // g, b // g, c // g
    # make coefficients pairwise coprime: p | a, b  ->  (a/p) x^2 + (b/p) y^2 + p c (z/p)^2
    sx, sy, sz = Fraction(1, ka), Fraction(1, kb), Fraction(1, kc)
    changed = True
    while changed:
        changed = False
        for (u, su), (v, sv), (w, sw) in (
            ((a, "x"), (b, "y"), (c, "z")),
            ((a, "x"), (c, "z"), (b, "y")),
            ((b, "y"), (c, "z"), (a, "x")),
        ):
            p = gcd(u, v)
            if abs(p) > 1:
                p = abs(p)
                coef = {su: u // p, sv: v // p, sw: w * p}
                a, b, c = coef["x"], coef["y"], coef["z"]
                # the variable attached to w is divisible by p in any zero
                if sw == "x":
                    sx *= p
                elif sw == "y":
                    sy *= p
                else:
                    sz *= p
                changed = True
                break
    primes = tuple(p for p, _ in factor(a * b * c, quick, hint))
    sol = _lattice_zero(a, b, c, primes)
    if sol is False:
        return None
    if sol is None:
        # a x^2 + b y^2 + c z^2 = 0  <=>  (a x)^2 = (-a b) y^2 + (-a c) z^2
        sol = legendre_solve(-a * b, -a * c, quick)
        if sol is None:
            return None
        X, y, z = sol
        sol = _reduce((a, b, c), _scale((Fraction(X, a), y, z)))
    x, y, z = sol
    assert a * x * x + b * y * y + c * z * z == 0
    return _scale((x * sx, y * sy, z * sz))


def _root(u: int, p: int):
    """Some r with r^2 = u mod p, or None."""
    u %= p
    if u == 0 or p == 2:
        return u
    r = sqrt_mod(u, p)
    return None if r is None else int(r)


def _lattice_zero(a: int, b: int, c: int, primes):
    """Small zero of a x^2 + b y^2 + c z^2 from the congruence lattice.

    Coefficients are squarefree and pairwise coprime and ``primes`` are the
    primes of abc.  Returns False when some congruence has no solution (no
    zero exists) and None when the short vectors contain no zero.
    """
    m = abs(a * b * c)
    if m == 1:
        # coefficients are +-1: pair two of opposite sign
        if a == b == c:
            return False
        if a != b:
            return (1, 1, 0)
        return (1, 0, 1)
    res = [[], [], []]
    mods = []
    for p in primes:
        # p | c: x = r y with a r^2 + b = 0;  p | a: y = r z;  p | b: z = r x
        if c % p == 0:
            r, form = _root(-b * pow(a, -1, p), p), lambda r: (1, -r, 0)
        elif a % p == 0:
            r, form = _root(-c * pow(b, -1, p), p), lambda r: (0, 1, -r)
        else:
            r, form = _root(-a * pow(c, -1, p), p), lambda r: (-r, 0, 1)
        if r is None:
            return False
        for k, f in enumerate(form(r)):
            res[k].append(f % p)
        mods.append(p)
    ell = [_crt(r, mods) for r in res]
    basis = [row[:3] for row in integer_kernel([ell + [m]], 4)]
    weight = (abs(a), abs(b), abs(c))
    basis = lll_rows(basis, weight)
    best, size = None, None
    for u in product(range(-3, 4), repeat=3):
        v = [sum(k * r[i] for k, r in zip(u, basis)) for i in range(3)]
        if any(v) and a * v[0] ** 2 + b * v[1] ** 2 + c * v[2] ** 2 == 0:
            f = sum(w * t * t for w, t in zip(weight, v))
            if size is None or f < size:
                best, size = v, f
    return None if best is None else _scale(best)


def _reduce(coeffs, sol):
    """A small zero of a x^2 + b y^2 + c z^2 (squarefree, pairwise coprime
    coefficients) found from a possibly huge primitive zero ``sol``.

    Every zero lies in the lattice cut out by x y0 = y x0 (mod c),
    y z0 = z y0 (mod a) and z x0 = x z0 (mod b).  An LLL-reduced basis of it
    for the weight |a| x^2 + |b| y^2 + |c| z^2 has small zeros among its
    short combinations.
    """
    a, b, c = coeffs
    x0, y0, z0 = sol
    mods = (abs(c), abs(a), abs(b))
    forms = ((y0, -x0, 0), (0, z0, -y0), (-z0, 0, x0))
    m = mods[0] * mods[1] * mods[2]
    if m == 1:
        return sol
    ell = [_crt([f[k] % n for f, n in zip(forms, mods)], list(mods)) for k in range(3)]
    basis = [r[:3] for r in integer_kernel([ell + [m]], 4)]
    weight = (abs(a), abs(b), abs(c))
    basis = lll_rows(basis, weight)
    best = sol
    size = sum(w * t * t for w, t in zip(weight, sol))
    for u in product(range(-2, 3), repeat=len(basis)):
        v = [sum(k * r[i] for k, r in zip(u, basis)) for i in range(3)]
        if any(v) and a * v[0] ** 2 + b * v[1] ** 2 + c * v[2] ** 2 == 0:
            f = sum(w * t * t for w, t in zip(weight, v))
            if f < size:
                best, size = tuple(v), f
    return _scale(best)


def binary_solve(ci, cj, n, quick: bool = False, hint: tuple = ()):
    """Rationals (x, y) with ci x^2 + cj y^2 = n, or None if there are none."""
    ci, cj, n = Fraction(ci), Fraction(cj), Fraction(n)
    den = 1
    for r in (ci, cj, n):
        den = den * r.denominator // gcd(den, r.denominator)
    A, B, C = int(ci * den), int(cj * den), int(-n * den)
    sol = ternary_solve(A, B, C, quick, hint)
    if sol is None:
        return None
    x, y, z = sol
    if z == 0:
        # isotropic binary part: shift along the isotropic line
        # ci x^2 + cj y^2 = 0 with (x, y) != 0; use the closed form of a hyperbolic plane
        return _hyperbolic_binary(ci, cj, n, x, y)
    out = (Fraction(x, z), Fraction(y, z))
    assert ci * out[0] ** 2 + cj * out[1] ** 2 == n
    return out


def _hyperbolic_binary(ci, cj, n, x0, y0):
    # -cj/ci = (x0/y0)^2 = t^2; ci (x - t y)(x + t y) = n
    t = Fraction(x0, y0)
    r = n / ci
    x = (1 + r) / 2
    y = (1 - r) / (2 * t)
    assert ci * x * x + cj * y * y == n
    return x, y

