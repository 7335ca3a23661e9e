"""Exact integer and rational helpers: factoring, valuations, square classes."""
from __future__ import annotations

import bisect
import math
from fractions import Fraction
from functools import lru_cache

from sympy import isprime

from .errors import FactorizationError, InvalidInput

#: Trial-division bound used when factoring determinants.  Cofactors left
#: after dividing out all primes below the bound must be prime, otherwise
#: factoring fails loudly instead of guessing.
TRIAL_DIVISION_BOUND = 10**6

_sieve = {"limit": 1, "primes": []}


def small_primes(bound: int) -> list[int]:
    """All primes ``<= bound`` (the largest sieve computed so far is cached)."""
    if _sieve["limit"] < bound:
        flags = bytearray([1]) * (bound + 1)
        flags[0:2] = b"\x00\x00"
        for i in range(2, math.isqrt(bound) + 1):
            if flags[i]:
                flags[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
        _sieve["primes"] = [i for i, f in enumerate(flags) if f]
        _sieve["limit"] = bound
    primes = _sieve["primes"]
    return primes[: bisect.bisect_right(primes, bound)]


@lru_cache(maxsize=4096)
def factor_int(n: int, bound: int | None = None) -> tuple[tuple[int, int], ...]:
    """Factor ``|n|`` into ``((p, e), ...)`` by trial division.

    Primes up to ``bound`` are divided out; the remaining cofactor is
    accepted only if it is prime.  Anything else raises FactorizationError.
    """
    n = abs(int(n))
    if n == 0:
        raise InvalidInput("cannot factor 0")
    bound = TRIAL_DIVISION_BOUND if bound is None else bound
    out = []
    if n == 1:
        return ()
    for p in small_primes(min(bound, max(2, math.isqrt(n)))):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
            if n > 1 and isprime(n):
                break
    if n > 1:
        if n > bound * bound and not isprime(n):
            raise FactorizationError(
                f"cofactor {n} has no prime factor below {bound}; raise the bound"
            )
        out.append((n, 1))
    return tuple(sorted(out))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factor_int(n)]


def rational_prime_divisors(r) -> list[int]:
    r = Fraction(r)
    ps = set()
    if r.numerator != 0:
        ps.update(prime_divisors(r.numerator))
    ps.update(prime_divisors(r.denominator))
    return sorted(ps)


def valuation(r, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    r = Fraction(r)
    if r == 0:
        raise InvalidInput("valuation of 0")
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(r, p: int) -> Fraction:
    r = Fraction(r)
    return r / Fraction(p) ** valuation(r, p)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel of a nonzero integer."""
    if n == 0:
        raise InvalidInput("squarefree part of 0")
    s = 1
    for p, e in factor_int(n):
        if e % 2:
            s *= p
    return s if n > 0 else -s


def square_class(r) -> int:
    """The squarefree integer representing ``r`` in Q*/(Q*)^2."""
    r = Fraction(r)
    return squarefree_part(r.numerator * r.denominator)


def is_square(r) -> bool:
    """True iff ``r`` is the square of a rational (0 counts)."""
    r = Fraction(r)
    if r < 0:
        return False
    a, b = r.numerator, r.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b


def rational_sqrt(r) -> Fraction:
    r = Fraction(r)
    if not is_square(r):
        raise InvalidInput(f"{r} is not a rational square")
    return Fraction(math.isqrt(r.numerator), math.isqrt(r.denominator))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for odd prime p; 0 when p | a."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def is_local_square(r, p: int) -> bool:
    """Whether the nonzero rational ``r`` is a square in Q_p."""
    r = Fraction(r)
    if valuation(r, p) % 2:
        return False
    u = unit_part(r, p)
    if p == 2:
        return (u.numerator * u.denominator) % 8 == 1
    return legendre(u.numerator * u.denominator, p) == 1


def parse_rational(s) -> Fraction:
    """Parse ``"p/q"`` strings or ints; floats are refused."""
    if isinstance(s, bool):
        raise InvalidInput(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational: {s!r}") from exc
    raise InvalidInput(f"rationals must be strings or ints, got {type(s).__name__}")


def format_rational(r) -> str:
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
