import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3lg import oracle
from k3lg.arith import factor_int, square_class
from k3lg.errors import DegenerateForm, FactorizationError, InvalidInput, NotRepresentable
from k3lg.k3lattice import k3_gram
from k3lg.linalg import congruence, gram_of_rows
from k3lg.quadform import (
    INF,
    QuadSpace,
    _hasse_of_entries,
    diagonalize,
    disc_class,
    embed_space,
    hasse_invariant,
    hilbert_symbol,
    isometric_over_Q,
    relevant_primes,
    represent_number,
    represents_over_Q,
    signature,
    witt_index_local,
)

U = QuadSpace([[0, 1], [1, 0]])
LAMBDA = k3_gram().to_quadspace()


def test_diagonalize_hyperbolic_plane():
    d = diagonalize(U)
    assert d.entries == [2, -2]
    assert d.transform == [[1, 1], [1, -1]]
    assert congruence(d.transform, U.gram) == [[2, 0], [0, -2]]


def test_diagonalize_already_diagonal():
    d = diagonalize(QuadSpace.diagonal([3, 5]))
    assert d.entries == [3, 5]
    assert d.transform == [[1, 0], [0, 1]]


def test_degenerate_gram_rejected():
    with pytest.raises(DegenerateForm):
        QuadSpace([[1, 1], [1, 1]])


@pytest.mark.parametrize(
    "gram, sig",
    [([[2, 0], [0, -2]], (1, 1)), ([[2, 0, 0], [0, 2, 0], [0, 0, -2]], (2, 1))],
)
def test_signature_examples(gram, sig):
    assert signature(QuadSpace(gram)) == sig


def test_signature_of_k3_lattice():
    assert signature(LAMBDA) == (3, 19)


def test_disc_class_examples():
    assert disc_class(QuadSpace([[8]])) == 2
    assert disc_class(U) == -1
    assert disc_class(LAMBDA) == -1


def test_hilbert_symbol_examples():
    for v in (INF, 2, 3, 5, 7):
        assert hilbert_symbol(1, 7, v) == 1
    assert hilbert_symbol(-1, -1, INF) == -1
    assert hilbert_symbol(2, 3, 3) == -1
    assert oracle.hilbert(2, 3, 3) == -1
    with pytest.raises(InvalidInput):
        hilbert_symbol(0, 3, 5)


def test_hasse_examples():
    for v in (INF, 2, 3, 5):
        assert hasse_invariant(QuadSpace.diagonal([1, 1]), v) == 1
    assert hasse_invariant(QuadSpace.diagonal([-1, -1]), 2) == -1
    assert hasse_invariant(U, 5) == 1


def test_witt_index_examples():
    for v in (INF, 2, 3, 5, 7):
        assert witt_index_local(U, v) == 1
    assert witt_index_local(QuadSpace.diagonal([1, 1, 1, 1]), INF) == 0
    assert witt_index_local(LAMBDA, INF) == 3


def test_isometry_examples():
    assert not isometric_over_Q(QuadSpace.diagonal([1, 1]), QuadSpace.diagonal([1, -1]))
    assert isometric_over_Q(QuadSpace.diagonal([1, 1]), QuadSpace.diagonal([2, 2]))
    G = [[2, 1, 0], [1, -3, 2], [0, 2, 5]]
    X = [[1, 2, 0], [Fraction(1, 3), 1, 1], [0, -1, 4]]
    assert isometric_over_Q(QuadSpace(G), QuadSpace(congruence(X, G)))


def test_represents_examples():
    assert represents_over_Q(QuadSpace([[1]]), U)
    assert not represents_over_Q(QuadSpace.diagonal([1, 1, 1, 1]), QuadSpace.diagonal([1, 1, 1]))


def test_represent_number_examples():
    assert represent_number(U, 5) == [1, Fraction(5, 2)]
    w = represent_number(QuadSpace.diagonal([1, 1, 1, 1]), 7)
    assert sorted(w) == [1, 1, 1, 2]
    with pytest.raises(NotRepresentable):
        represent_number(QuadSpace([[1]]), -1)


@pytest.mark.parametrize("a", [Fraction(-15, 4), 3, -7, Fraction(2, 9), 11])
def test_represent_number_exact(a):
    W = QuadSpace.diagonal([1, 1, -3, 5])
    assert W.q(represent_number(W, a)) == a


def test_embed_examples():
    assert embed_space(QuadSpace([[2]]), U) == [[1, 1]]
    assert embed_space(QuadSpace.diagonal([2, -2]), U) == [[1, 1], [1, -1]]


def test_embed_five_dimensional_example_uses_hyperbolic_planes():
    V = QuadSpace.diagonal([2, 2, -2, -2, -2])
    B = embed_space(V, LAMBDA)
    assert gram_of_rows(B, LAMBDA.gram) == [list(r) for r in V.gram]
    # everything lives on the three U summands (coordinates 16..21)
    assert all(x == 0 for row in B for x in row[:16])
    supports = sorted(tuple(row[16:]) for row in B)
    expected = sorted([(1, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0), (0, 0, 0, 0, 1, -1),
                       (1, -1, 0, 0, 0, 0), (0, 0, 1, -1, 0, 0)])
    assert supports == expected


def test_embed_rejects_obstructed_space():
    with pytest.raises(NotRepresentable):
        embed_space(QuadSpace.diagonal([1, 1, 1, 1]), LAMBDA)


def _random_form(rng, n):
    while True:
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2, 3)))
        try:
            return QuadSpace(g)
        except DegenerateForm:
            continue


def test_invariants_independent_of_diagonalization():
    rng = random.Random(1)
    for _ in range(120):
        n = rng.randint(1, 8)
        V = _random_form(rng, n)
        # a random rational change of basis gives another diagonalization path
        # (unitriangular with rational entries, then permuted: det +-1)
        X = [[Fraction(rng.randint(-2, 2), rng.randint(1, 2)) if j > i else int(i == j) for j in range(n)]
             for i in range(n)]
        rng.shuffle(X)
        V2 = QuadSpace(congruence(X, V.gram))
        assert signature(V) == signature(V2)
        assert disc_class(V) == disc_class(V2)
        for p in relevant_primes(V, V2):
            assert hasse_invariant(V, p) == hasse_invariant(V2, p)
        # a permuted diagonal is yet another path
        e = diagonalize(V).entries
        e2 = list(reversed(e))
        for p in relevant_primes(V):
            assert _hasse_of_entries(e, p) == _hasse_of_entries(e2, p)


nonzero = st.integers(-300, 300).filter(bool)
places = st.sampled_from([INF, 2, 3, 5, 7, 11, 13])


@settings(max_examples=300, deadline=None)
@given(nonzero, nonzero, nonzero, places)
def test_hilbert_bimultiplicative_and_symmetric(a, a2, b, v):
    assert hilbert_symbol(a * a2, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a2, b, v)
    assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)


@settings(max_examples=500, deadline=None)
@given(nonzero, nonzero, st.integers(1, 50), st.integers(1, 50))
def test_product_formula(a, b, da, db):
    a, b = Fraction(a, da), Fraction(b, db)
    primes = {2}
    for m in (a.numerator, a.denominator, b.numerator, b.denominator):
        primes.update(p for p, _ in factor_int(m)) if abs(m) > 1 else None
    prod = hilbert_symbol(a, b, INF)
    for p in primes:
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_hilbert_and_witt_agree_with_oracle(p):
    values = sorted({1, -1, 2, -2, 3, -3, p, -p})
    for a, b in product(values, repeat=2):
        assert hilbert_symbol(a, b, p) == oracle.hilbert(a, b, p), (a, b, p)
    from k3lg.quadform import _witt_index_entries

    for r in range(1, 5):
        for e in product(values, repeat=r):
            assert _witt_index_entries(list(e), p) == oracle.witt_index(e, p), (e, p)


def test_local_conditions_trivial_at_extra_primes():
    rng = random.Random(4)
    for _ in range(30):
        V = _random_form(rng, rng.randint(2, 5))
        e = diagonalize(V).entries
        rel = set(relevant_primes(V))
        extra = [p for p in (101, 103, 107, 109, 113) if p not in rel][:3]
        for p in extra:
            assert _hasse_of_entries(e, p) == 1


def test_factoring_fails_loudly_beyond_the_bound():
    n = 999983 * 1000003
    assert factor_int(n) == ((999983, 1), (1000003, 1))
    with pytest.raises(FactorizationError):
        factor_int(n, bound=1000)
    assert square_class(Fraction(-50, 3)) == -6


def test_signature_sweep_is_represented():
    from k3lg.acceptance import random_k3_type

    rng = random.Random(9)
    for _ in range(25):
        rho = rng.randint(3, 19)
        V = random_k3_type(rng, rho)
        assert signature(V) == (2, 20 - rho)
        assert represents_over_Q(V, LAMBDA)
