"""Quadratic spaces over Q and their completions.

Everything is exact.  A quadratic space is a nondegenerate symmetric rational
Gram matrix; the quadratic form is ``q(v) = v G v^T`` (so a hyperbolic plane
``[[0, 1], [1, 0]]`` has ``q(x, y) = 2xy``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import arith
from .arith import is_local_square, is_square, valuation
from .errors import DegenerateForm, InvalidInput
from .linalg import bilinear, det_bareiss, is_symmetric


class _RealPlace:
    __slots__ = ()

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return "INF"


#: The real place of Q.  Finite places are plain prime integers.
INF = _RealPlace()


def check_place(v):
    if v is INF:
        return v
    if isinstance(v, int) and not isinstance(v, bool) and v >= 2 and arith.isprime(v):
        return v
    raise InvalidInput(f"not a place: {v!r}")


@dataclass(frozen=True)
class QuadSpace:
    gram: tuple

    def __init__(self, gram):
        g = tuple(tuple(Fraction(x) for x in row) for row in gram)
        if not g or not is_symmetric(g):
            raise InvalidInput("Gram matrix must be square, symmetric and nonempty")
        object.__setattr__(self, "gram", g)
        if det_bareiss(g) == 0:
            raise DegenerateForm("Gram matrix is singular")

    @property
    def n(self) -> int:
        return len(self.gram)

    def det(self) -> Fraction:
        return Fraction(det_bareiss(self.gram))

    def q(self, v) -> Fraction:
        return bilinear(v, self.gram, v)

    def b(self, u, v) -> Fraction:
        return bilinear(u, self.gram, v)

    def scaled(self, c) -> "QuadSpace":
        return QuadSpace([[c * x for x in row] for row in self.gram])

    def __neg__(self):
        return self.scaled(-1)

    def __add__(self, other: "QuadSpace") -> "QuadSpace":
        n, m = self.n, other.n
        g = [[Fraction(0)] * (n + m) for _ in range(n + m)]
        for i in range(n):
            g[i][:n] = self.gram[i]
        for i in range(m):
            g[n + i][n:] = other.gram[i]
        return QuadSpace(g)

    @classmethod
    def diagonal(cls, entries):
        entries = [Fraction(a) for a in entries]
        return cls([[a if i == j else 0 for j in range(len(entries))] for i, a in enumerate(entries)])


@dataclass
class DiagForm:
    """Diagonal entries plus the rows ``X`` with ``X G X^T = diag(entries)``.

    ``pairs`` lists index pairs that came from splitting an isotropic pair of
    basis vectors into ``e + f, e - f``; they span hyperbolic planes.
    """

    entries: list
    transform: list
    pairs: list = field(default_factory=list)


def diagonalize(V: QuadSpace) -> DiagForm:
    """Orthogonal basis by symmetric Gaussian elimination.

    A zero pivot is repaired by pairing with a partner of zero norm
    (``e, f -> e + f, e - f``) when one exists, otherwise by a swap.
    """
    n = V.n
    g = [list(row) for row in V.gram]
    x = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pairs = []
    paired = set()

    def swap(i, j):
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]
        x[i], x[j] = x[j], x[i]

    for i in range(n):
        if g[i][i] == 0:
            partners = [j for j in range(i + 1, n) if g[i][j] != 0]
            if not partners:
                raise DegenerateForm("Gram matrix is singular")
            iso = [j for j in partners if g[j][j] == 0]
            if iso:
                j = iso[0]
                if j != i + 1:
                    swap(j, i + 1)
                    j = i + 1
                # rows (e, f) -> (e + f, e - f); both new rows stay orthogonal
                gij = g[i][j]
                ri, rj = g[i], g[j]
                new_i = [a + b for a, b in zip(ri, rj)]
                new_j = [a - b for a, b in zip(ri, rj)]
                g[i], g[j] = new_i, new_j
                for row in g:
                    a, b = row[i], row[j]
                    row[i], row[j] = a + b, a - b
                x[i], x[j] = [a + b for a, b in zip(x[i], x[j])], [a - b for a, b in zip(x[i], x[j])]
                assert g[i][i] == 2 * gij and g[j][j] == -2 * gij and g[i][j] == 0
                pairs.append((i, j))
                paired.update((i, j))
            else:
                swap(i, partners[0])
        piv = g[i][i]
        for k in range(i + 1, n):
            f = g[k][i] / piv
            if f == 0:
                continue
            g[k] = [a - f * b for a, b in zip(g[k], g[i])]
            for row in g:
                row[k] -= f * row[i]
            x[k] = [a - f * b for a, b in zip(x[k], x[i])]
    entries = [g[i][i] for i in range(n)]
    return DiagForm(entries, x, pairs)


def diagonal_entries(V: QuadSpace) -> list:
    return diagonalize(V).entries


def signature(V: QuadSpace) -> tuple[int, int]:
    e = diagonal_entries(V)
    r = sum(1 for a in e if a > 0)
    return r, len(e) - r


def disc_class(V: QuadSpace) -> int:
    """Squarefree integer representing det(V) modulo squares."""
    return arith.square_class(V.det())


def hilbert_symbol(a, b, v) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol needs nonzero arguments")
    check_place(v)
    if v is INF:
        return -1 if (a < 0 and b < 0) else 1
    p = v
    # multiply by squares of denominators: same square class, integral
    a = a.numerator * a.denominator
    b = b.numerator * b.denominator
    alpha = valuation(a, p)
    beta = valuation(b, p)
    u = a // p**alpha
    w = b // p**beta
    if p == 2:
        def eps(t):
            return ((t - 1) // 2) % 2

        def omega(t):
            return ((t * t - 1) // 8) % 2

        e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
        return -1 if e % 2 else 1
    s = (-1) ** ((alpha * beta * ((p - 1) // 2)) % 2)
    return s * arith.legendre(u, p) ** (beta % 2) * arith.legendre(w, p) ** (alpha % 2)


def _hasse_of_entries(entries, v) -> int:
    # prod_{i<j} (a_i, a_j) = prod_j (a_j, a_1 ... a_{j-1}) by bimultiplicativity
    h = 1
    prefix = None
    for a in entries:
        a = Fraction(a)
        m = a.numerator * a.denominator  # same square class as a
        if prefix is None:
            prefix = m
            continue
        h *= hilbert_symbol(m, prefix, v)
        g = _gcd(abs(prefix), abs(m))
        prefix = (prefix // g) * (m // g)
    return h


def hasse_invariant(V: QuadSpace, v) -> int:
    """Product of (a_i, a_j)_v over i < j for any diagonalization of V."""
    return _hasse_of_entries(diagonal_entries(V), v)


def _isotropic(n: int, d: Fraction, c: int, p) -> bool:
    """Isotropy of a Q_p form of rank n, discriminant d, Hasse invariant c."""
    if n <= 1:
        return False
    if n == 2:
        return is_local_square(-d, p)
    if n == 3:
        return c == hilbert_symbol(-1, -d, p)
    if n == 4:
        return (not is_local_square(d, p)) or c == hilbert_symbol(-1, -1, p)
    return True


def _witt_index_entries(entries, v) -> int:
    if v is INF:
        r = sum(1 for a in entries if a > 0)
        return min(r, len(entries) - r)
    n = len(entries)
    d = Fraction(1)
    for a in entries:
        d *= a
    c = _hasse_of_entries(entries, v)
    index = 0
    # peel hyperbolic planes: q = H + q' gives d' = -d, c' = c * (-1, d')
    while _isotropic(n, d, c, v):
        index += 1
        n -= 2
        d = -d
        c = c * hilbert_symbol(-1, d, v)
    return index


def witt_index_local(V: QuadSpace, v) -> int:
    """Number of hyperbolic planes V splits off over the completion at v."""
    check_place(v)
    return _witt_index_entries(diagonal_entries(V), v)


def relevant_primes(*spaces: QuadSpace) -> list[int]:
    """2 and every prime dividing a determinant or a Gram denominator.

    Away from these primes each space is unimodular over Z_p, so its local
    invariants are trivial.
    """
    ps = {2}
    for V in spaces:
        ps.update(arith.rational_prime_divisors(V.det()))
        den = 1
        for row in V.gram:
            for x in row:
                den = den * x.denominator // _gcd(den, x.denominator)
        ps.update(arith.prime_divisors(den))
    return sorted(ps)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def isometric_over_Q(A: QuadSpace, B: QuadSpace) -> bool:
    if A.n != B.n:
        return False
    if signature(A) != signature(B):
        return False
    if not is_square(A.det() / B.det()):
        return False
    ea, eb = diagonal_entries(A), diagonal_entries(B)
    return all(
        _hasse_of_entries(ea, p) == _hasse_of_entries(eb, p) for p in relevant_primes(A, B)
    )


def local_obstructions(V: QuadSpace, W: QuadSpace) -> list[dict]:
    """Places where V fails to embed into W, with the local data at each."""
    if V.n > W.n:
        return [{"place": "dimension", "dim_V": V.n, "dim_W": W.n}]
    ev, ew = diagonal_entries(V), diagonal_entries(W)
    combined = list(ew) + [-a for a in ev]
    out = []
    for v in [INF] + relevant_primes(V, W):
        idx = _witt_index_entries(combined, v)
        if idx < V.n:
            d = Fraction(1)
            for a in combined:
                d *= a
            out.append(
                {
                    "place": v,
                    "witt_index": idx,
                    "needed": V.n,
                    "disc_class_V": disc_class(V),
                    "hasse_V": _hasse_of_entries(ev, v),
                    "hasse_W": _hasse_of_entries(ew, v),
                }
            )
    return out


def represents_over_Q(V: QuadSpace, W: QuadSpace) -> bool:
    """Whether V embeds isometrically into W over Q (Hasse-Minkowski)."""
    return not local_obstructions(V, W)


# constructive side lives in its own module; re-exported here
from .represent import ambient_basis, embed_space, represent_number  # noqa: E402,F401
