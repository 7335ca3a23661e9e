"""Integral lattices inside the K3 lattice E8(-1)^2 + U^3."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import arith
from .errors import DegenerateForm, InvalidInput, RankDeficient
from .linalg import (
    block_diag,
    clear_denominators,
    congruence,
    det_bareiss,
    hermite_rows,
    integer_kernel,
    lll_rows,
    is_symmetric,
    rank,
    rref,
    smith_invariants,
)
from .roots import e8_gram
from .quadform import INF, QuadSpace, _hasse_of_entries, diagonalize, relevant_primes, signature

U_GRAM = [[0, 1], [1, 0]]


@dataclass(frozen=True)
class IntegralLattice:
    gram: tuple
    even: bool

    def __init__(self, gram, even=None):
        g = tuple(tuple(int(x) for x in row) for row in gram)
        if any(Fraction(x).denominator != 1 for row in gram for x in row):
            raise InvalidInput("integral lattice needs an integer Gram matrix")
        if not g or not is_symmetric(g):
            raise InvalidInput("Gram matrix must be square, symmetric and nonempty")
        if det_bareiss(g) == 0:
            raise DegenerateForm("Gram matrix is singular")
        is_even = all(g[i][i] % 2 == 0 for i in range(len(g)))
        if even is not None and bool(even) != is_even:
            raise InvalidInput("evenness flag does not match the diagonal")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "even", is_even)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return int(det_bareiss(self.gram))

    def to_quadspace(self) -> QuadSpace:
        return QuadSpace(self.gram)


def k3_gram() -> IntegralLattice:
    """E8(-1) + E8(-1) + U + U + U, in that coordinate order."""
    e8 = e8_gram(-1)
    L = IntegralLattice(block_diag(e8, e8, U_GRAM, U_GRAM, U_GRAM))
    assert L.even and L.det() == -1
    assert signature(L.to_quadspace()) == (3, 19)
    return L


@dataclass(frozen=True)
class PrimitiveSublattice:
    basis: tuple
    gram: tuple
    elementary_divisors: tuple
    ambient_rank: int = 22

    @property
    def rank(self) -> int:
        return len(self.basis)

    def lattice(self) -> IntegralLattice:
        return IntegralLattice(self.gram)


def saturate(ambient: IntegralLattice, span) -> PrimitiveSublattice:
    """Z^N intersected with the rational row space of ``span``, in row Hermite form."""
    N = ambient.rank
    rows = [[Fraction(x) for x in r] for r in span]
    if not rows or any(len(r) != N for r in rows):
        raise InvalidInput(f"span rows must have length {N}")
    if rank(rows) < len(rows):
        raise RankDeficient("span rows are linearly dependent")
    # the reduced echelon form depends only on the subspace and keeps entries small
    ints = clear_denominators(rref(rows)[0])
    # Z^N cap span_Q = integer kernel of (integer kernel of span); the kernels
    # come out of unimodular column reduction with huge entries, so LLL them
    perp = integer_kernel(ints, N)
    if perp:
        basis = lll_rows(integer_kernel(lll_rows(perp), N))
    else:
        basis = [[int(i == j) for j in range(N)] for i in range(N)]
    basis = hermite_rows(basis)
    assert len(basis) == len(rows)
    gram = congruence(basis, ambient.gram)
    divisors = disc_group(IntegralLattice(gram))
    T = PrimitiveSublattice(
        tuple(tuple(r) for r in basis),
        tuple(tuple(int(x) for x in r) for r in gram),
        tuple(divisors),
        N,
    )
    assert is_primitive(T.basis)
    return T


def is_primitive(basis) -> bool:
    return all(d == 1 for d in smith_invariants(basis))


def disc_group(L: IntegralLattice) -> list:
    """Elementary divisors of the Gram matrix, d_1 | d_2 | ...; product |det|."""
    return smith_invariants(L.gram)


def jordan_symbol_odd_p(L: IntegralLattice, p: int) -> list:
    """Jordan blocks (k, m, eps) of L over Z_p for odd p.

    ``eps`` is the Legendre symbol of the unit part of the block determinant.
    """
    if p == 2 or not arith.isprime(p):
        raise InvalidInput("jordan_symbol_odd_p needs an odd prime")
    g = [[Fraction(x) for x in row] for row in L.gram]
    n = len(g)
    diag = []
    for t in range(n):
        # entry of least valuation in the trailing block
        best = None
        for i in range(t, n):
            for j in range(i, n):
                if g[i][j] != 0:
                    v = arith.valuation(g[i][j], p)
                    key = (v, i != j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        _, i, j = best
        if i != j:
            # e_i <- e_i + e_j; the new diagonal entry has the minimal valuation since p is odd
            g[i] = [a + b for a, b in zip(g[i], g[j])]
            for row in g:
                row[i] += row[j]
        g[t], g[i] = g[i], g[t]
        for row in g:
            row[t], row[i] = row[i], row[t]
        piv = g[t][t]
        for k in range(t + 1, n):
            f = g[k][t] / piv
            if f:
                g[k] = [x - f * y for x, y in zip(g[k], g[t])]
                for row in g:
                    row[k] -= f * row[t]
        diag.append(piv)
    blocks = {}
    for a in diag:
        k = arith.valuation(a, p)
        u = arith.unit_part(a, p)
        m, prod = blocks.get(k, (0, 1))
        blocks[k] = (m + 1, prod * u.numerator * u.denominator)
    return [(k, m, arith.legendre(prod, p)) for k, (m, prod) in sorted(blocks.items())]


@dataclass(frozen=True)
class GenusSummary:
    rank: int
    signature: tuple
    det: int
    det_class: int
    elementary_divisors: tuple
    even: bool
    hasse: tuple  # ((place, +-1), ...), place "inf" or a prime
    jordan_odd: tuple  # ((p, ((k, m, eps), ...)), ...)

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "signature": list(self.signature),
            "det": self.det,
            "det_class": self.det_class,
            "elementary_divisors": list(self.elementary_divisors),
            "even": self.even,
            "hasse": [[str(v), h] for v, h in self.hasse],
            "jordan_odd": {str(p): [list(b) for b in blocks] for p, blocks in self.jordan_odd},
        }


def _hasse_list(V: QuadSpace) -> tuple:
    e = diagonalize(V).entries
    places = [INF] + relevant_primes(V)
    return tuple(("inf" if v is INF else v, _hasse_of_entries(e, v)) for v in places)


def genus_summary(L: IntegralLattice) -> GenusSummary:
    V = L.to_quadspace()
    det = L.det()
    odd = [p for p in arith.prime_divisors(det) if p != 2]
    return GenusSummary(
        rank=L.rank,
        signature=signature(V),
        det=det,
        det_class=arith.square_class(det),
        elementary_divisors=tuple(disc_group(L)),
        even=L.even,
        hasse=_hasse_list(V),
        jordan_odd=tuple((p, tuple(jordan_symbol_odd_p(L, p))) for p in odd),
    )


def same_rational_class(L1: IntegralLattice, L2: IntegralLattice) -> bool:
    """Whether L1 and L2 become isometric after tensoring with Q."""
    A, B = L1.to_quadspace(), L2.to_quadspace()
    if A.n != B.n or signature(A) != signature(B):
        return False
    if arith.square_class(A.det()) != arith.square_class(B.det()):
        return False
    ea, eb = diagonalize(A).entries, diagonalize(B).entries
    return all(_hasse_of_entries(ea, p) == _hasse_of_entries(eb, p) for p in relevant_primes(A, B))
