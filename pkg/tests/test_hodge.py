from fractions import Fraction

import pytest

from k3lg.errors import DegenerateSplit, DimensionMismatch, InvalidInput, SignatureError
from k3lg.hodge import (
    PeriodVector,
    RealField,
    eval_sign,
    refine,
    transcendental_split,
    validate_k3_type,
)
from k3lg.quadform import QuadSpace, signature

V3 = QuadSpace.diagonal([2, 2, -2])
OMEGA = PeriodVector.exact([5, 0, 4], [0, 3, 0])
SQRT2 = RealField([1, 0, -2], (1, 2))


def test_eval_sign_examples():
    assert eval_sign(SQRT2, 0) == 0
    assert eval_sign(SQRT2, (-1, 1)) == 1
    assert eval_sign(SQRT2, (3, -2)) == 1


def test_eval_sign_close_to_zero():
    # 99/70 is a convergent of sqrt 2 from above, 140/99 from below
    assert eval_sign(SQRT2, (-99, 70)) == -1
    assert eval_sign(SQRT2, (Fraction(-140, 99), 1)) == 1
    # alpha^2 - 2 reduces to 0 exactly
    assert eval_sign(SQRT2, (-2, 0, 1)) == 0


def test_other_embedding_and_refinement():
    neg = RealField([1, 0, -2], (-2, -1))
    assert eval_sign(neg, (0, 1)) == -1
    for e in [(-1, 1), (3, -2), (-99, 70), (7, -5)]:
        assert eval_sign(refine(SQRT2, 12), e) == eval_sign(SQRT2, e)


def test_real_field_validation():
    with pytest.raises(InvalidInput):
        RealField([1, 0, -2], (-2, 2))  # two roots
    with pytest.raises(InvalidInput):
        RealField([1, 0, -4], (1, 3))  # reducible


def test_validate_worked_example():
    r = validate_k3_type(V3, OMEGA)
    assert r.signature_ok and r.isotropy_ok and r.positivity_ok
    assert r.algebraic_kernel == [[4, 0, 5]]
    assert not r.irreducible


def test_signature_error():
    with pytest.raises(SignatureError):
        validate_k3_type(QuadSpace.diagonal([2, -2]), PeriodVector.exact([1, 0], [0, 1]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_k3_type(V3, PeriodVector.exact([1, 0], [0, 1]))


def test_approx_mode_matches_exact():
    r = validate_k3_type(V3, PeriodVector.approx([5, 0, 4], [0, 3, 0], 0))
    e = validate_k3_type(V3, OMEGA)
    assert (r.isotropy_ok, r.positivity_ok, r.algebraic_kernel) == (e.isotropy_ok, e.positivity_ok,
                                                                    e.algebraic_kernel)


def test_approx_tolerance():
    w = PeriodVector.approx([5, 0, Fraction(4000001, 1000000)], [0, 3, 0], Fraction(1, 10**12))
    assert not validate_k3_type(V3, w).isotropy_ok
    w = PeriodVector.approx([5, 0, Fraction(4000001, 1000000)], [0, 3, 0], Fraction(1, 10**4))
    assert validate_k3_type(V3, w).isotropy_ok


def test_split_worked_example():
    s = transcendental_split(V3, OMEGA)
    assert s.algebraic_basis == [[4, 0, 5]]
    assert s.algebraic.gram == ((-18,),)
    assert s.transcendental_basis == [[5, 0, 4], [0, 1, 0]]
    assert s.transcendental.gram == ((18, 0), (0, 2))
    assert [v[0] for v in s.period.x] == [1, 0] and [v[0] for v in s.period.y] == [0, 3]
    # 18 * 1 + 2 * (3i)^2 = 0
    assert s.transcendental.q([1, 0]) - s.transcendental.q([0, 3]) == 0


def test_split_is_orthogonal_and_fills_the_space():
    V = QuadSpace.diagonal([1, 1, -1, -1, -3])
    w = PeriodVector.exact([2, 0, 1, 1, 0], [0, 2, 1, -1, 0])
    s = transcendental_split(V, w)
    assert len(s.algebraic_basis) + len(s.transcendental_basis) == V.n
    assert all(V.b(a, t) == 0 for a in s.algebraic_basis for t in s.transcendental_basis)
    r, _ = signature(s.transcendental)
    assert r == 2


def _quadratic_period():
    # V = <1, 1, -1, -1>, x = (sqrt2, 0, 1, 0), y = (0, sqrt2, 0, 1), d = 1:
    # psi(x,x) = 2 - 1 = 1 = psi(y,y) and psi(x,y) = 0
    V = QuadSpace.diagonal([1, 1, -1, -1])
    w = PeriodVector.exact([(0, 1), 0, 1, 0], [0, (0, 1), 0, 1], d=1, field=SQRT2)
    return V, w


def test_exact_mode_over_a_real_quadratic_field():
    V, w = _quadratic_period()
    r = validate_k3_type(V, w)
    assert r.isotropy_ok and r.positivity_ok
    # one linear condition per power of alpha kills every rational direction
    assert r.irreducible and r.algebraic_kernel == []


def test_irreducible_input_is_unchanged():
    V, w = _quadratic_period()
    s = transcendental_split(V, w)
    assert s.algebraic_basis == [] and s.algebraic is None
    assert sorted(s.transcendental_basis, reverse=True) == [[int(i == j) for j in range(4)] for i in range(4)]

    def back(coords):
        out = []
        for j in range(V.n):
            acc = (0, 0)
            for row, c in zip(s.transcendental_basis, coords):
                acc = tuple(a + row[j] * b for a, b in zip(acc, c))
            out.append(acc)
        return out

    assert back(s.period.x) == list(w.x) and back(s.period.y) == list(w.y)


def test_rational_plane_leaves_a_rational_line():
    # real and imaginary parts span a plane; its orthogonal complement is a line
    V = QuadSpace.diagonal([1, 1, -1])
    r = validate_k3_type(V, PeriodVector.exact([1, 0, 0], [0, 1, 0]))
    assert r.algebraic_kernel == [[0, 0, 1]]


def test_rational_period_is_flagged():
    # omega = (1, 0, 1) is rational and isotropic: psi(omega, omega-bar) = 0
    w = PeriodVector.exact([1, 0, 1], [0, 0, 0])
    r = validate_k3_type(V3, w)
    assert r.isotropy_ok and not r.positivity_ok
    with pytest.raises(DegenerateSplit):
        transcendental_split(V3, w)


def test_exact_verdicts_are_deterministic():
    a = validate_k3_type(V3, OMEGA)
    b = validate_k3_type(V3, OMEGA)
    assert a == b
