import json
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3lg.compat import (
    check_weak_compatibility,
    count_points_diagonal_quartic,
    cyclotomic_algebraic_bound,
    hodge_polygon,
    irreducibility_certificate,
    load_system,
    newton_polygon,
    newton_vs_hodge,
    power_sums,
    system_from_dict,
    system_to_dict,
    trace_consistency,
    weil_weight_check,
)
from k3lg.errors import BudgetExceeded, InvalidInput, InvariantViolation, ParseError


def poly_from_roots(roots):
    c = [Fraction(1)]
    for r in roots:
        c = [a - r * b for a, b in zip(c + [0], [0] + c)]
    return c


def manifest(records, sigma=(), ramified=None, dim=2):
    return {"dimension": dim, "sigma": list(sigma), "ramified": ramified or {},
            "records": [{"place": {"p": p, "f": 1, "label": lab}, "ell": ell, "coeffs": c}
                        for lab, p, ell, c in records]}


GOOD = ["1", "-4", "49"]


def test_load_valid_manifest(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest([("v7", 7, 3, GOOD), ("v7", 7, 5, GOOD)])))
    s = load_system(str(path))
    assert s.dimension == 2 and len(s.records) == 2
    assert s.records[0].coeffs == (1, -4, 49)
    assert system_from_dict(system_to_dict(s)) == s


def test_load_rejects_wrong_degree():
    with pytest.raises(InvariantViolation) as e:
        system_from_dict(manifest([("v7", 7, 3, ["1", "2"])]))
    assert "records[0].coeffs" in str(e.value)


def test_load_rejects_duplicates_and_bad_json():
    with pytest.raises(InvariantViolation):
        system_from_dict(manifest([("v7", 7, 3, GOOD), ("v7", 7, 3, GOOD)]))
    with pytest.raises(InvariantViolation):
        system_from_dict(manifest([("v7", 7, 3, ["2", "0", "1"])]))
    with pytest.raises(InvariantViolation):
        system_from_dict(manifest([("v7", 7, 3, GOOD), ("v7", 11, 5, GOOD)]))
    with pytest.raises(ParseError):
        load_system('{"dimension": ')


def test_weak_compat_examples():
    ok = check_weak_compatibility(system_from_dict(manifest([("v7", 7, 3, GOOD), ("v7", 7, 5, GOOD)])))
    assert ok["ok"] and ok["coverage"]["pairs_compared"] == 1
    bad = check_weak_compatibility(system_from_dict(manifest([("v7", 7, 3, GOOD), ("v7", 7, 5, ["1", "-3", "49"])])))
    assert bad["violations"] == [{"kind": "mismatch", "place": "v7", "ell": 3, "ell2": 5, "index": 1}]
    in_sigma = check_weak_compatibility(
        system_from_dict(manifest([("v7", 7, 3, GOOD), ("v7", 7, 5, ["1", "-3", "49"])], sigma=["v7"])))
    assert in_sigma["ok"]


def test_pairs_at_residue_characteristic_are_skipped():
    r = check_weak_compatibility(system_from_dict(manifest([("v7", 7, 7, GOOD), ("v7", 7, 5, ["1", "0", "49"])])))
    assert r["ok"] and r["coverage"]["pairs_compared"] == 0


def test_ramification_bookkeeping():
    s = system_from_dict(manifest([("v7", 7, 3, GOOD), ("v11", 11, 3, ["1", "0", "121"])],
                                  ramified={"7": ["v7"], "3": ["v11", "nowhere"]}))
    kinds = sorted((v["kind"], v["place"]) for v in check_weak_compatibility(s)["violations"])
    assert kinds == [("ramified_outside", "v11"), ("unknown_place", "nowhere")]


def test_weak_compat_symmetric_and_idempotent():
    rng = random.Random(5)
    for _ in range(30):
        recs = []
        for lab, p in (("a", 7), ("b", 11), ("c", 13)):
            base = [str(rng.randint(-5, 5)) for _ in range(2)]
            for ell in (3, 5, 17):
                c = ["1"] + list(base)
                if rng.random() < 0.2:
                    c[rng.randint(1, 2)] = "99"
                recs.append((lab, p, ell, c))
        s = system_from_dict(manifest(recs))
        rev = system_from_dict(manifest(list(reversed(recs))))
        a, b = check_weak_compatibility(s), check_weak_compatibility(rev)
        key = lambda r: sorted((v["place"], v["index"], frozenset((v["ell"], v["ell2"]))) for v in r["violations"])
        assert key(a) == key(b)
        assert check_weak_compatibility(s) == a
        more = system_from_dict(manifest(recs + [("z", 19, 3, ["1", "0", "0"])], sigma=["z"]))
        assert key(check_weak_compatibility(more)) == key(a)


def test_weil_examples():
    assert weil_weight_check(poly_from_roots([3, 3]), 3)["ok"]
    r = weil_weight_check([1, -1], 3)
    assert not r["ok"] and not r["root_modulus"]
    assert weil_weight_check([1, 0, 9], 3)["ok"]
    with pytest.raises(InvalidInput):
        weil_weight_check([2, 1], 3)
    with pytest.raises(InvalidInput):
        weil_weight_check([1, 0], 3)


def test_weil_reciprocity_is_exact():
    # roots 1 and 9: constant term 9 = 3^2 and the map a -> 9/a swaps them, but |root| != 3
    r = weil_weight_check(poly_from_roots([1, 9]), 3)
    assert r["constant_term"] and r["reciprocal"] and not r["root_modulus"]
    r = weil_weight_check(poly_from_roots([3, -3]), 3)
    assert r["ok"]


def test_hodge_polygon_rho_19():
    H = hodge_polygon(19)
    assert H.vertices == ((0, 0), (1, 0), (2, 1), (3, 3))
    assert H.slopes() == [0, 1, 2]


def test_newton_polygon_supersingular_quadratic():
    p = 5
    P = [1, -p, p * p * 2]
    assert newton_polygon(P, p).slopes() == [1, 1]
    H = hodge_polygon(20)
    assert H.slopes() == [0, 2]
    r = newton_vs_hodge(P, p, 1, 20)
    assert r["pass"] and r["endpoints_match"]


def test_newton_vs_hodge_failures():
    # endpoint 1 instead of 2
    r = newton_vs_hodge([1, 1, 5], 5, 1, 20)
    assert not r["endpoints_match"] and not r["pass"]
    with pytest.raises(InvalidInput):
        newton_vs_hodge([1, 1, 25], 5, 1, 19)


def test_newton_slopes_match_root_valuations():
    p = 3
    roots = [1, 2, 3, 6, 9, 27]
    P = poly_from_roots(roots)
    from k3lg.arith import valuation

    assert newton_polygon(P, p).slopes() == sorted(Fraction(valuation(r, p)) for r in roots)
    # residue degree 2 halves the slopes
    assert newton_polygon(P, p, 2).slopes() == sorted(Fraction(valuation(r, p), 2) for r in roots)


def test_cyclotomic_examples():
    q = 5
    # (x - q)(x^3 + 7)
    bound, ms = cyclotomic_algebraic_bound([1, -q, 0, 7, -7 * q], q)
    assert bound >= 1 and 1 in ms
    assert cyclotomic_algebraic_bound([1, 0, q * q], q) == (2, [4])
    assert cyclotomic_algebraic_bound([1, 0, 7], q) == (0, [])


def test_cyclotomic_repeated_factors():
    q = 3
    P = poly_from_roots([3, 3, -3])
    assert cyclotomic_algebraic_bound(P, q) == (3, [1, 1, 2])


def test_irreducibility_examples():
    assert irreducibility_certificate([1, 0, 1]) == {"verdict": "CERTIFIED", "prime": 3}
    assert irreducibility_certificate([1, 0, -1])["verdict"] == "UNKNOWN"
    assert irreducibility_certificate([1, 1, 1]) == {"verdict": "CERTIFIED", "prime": 2}
    with pytest.raises(InvalidInput):
        irreducibility_certificate([2, 1])


def _has_rational_root(c):
    # monic integer polynomial: rational roots are integer divisors of the constant term
    if c[-1] == 0:
        return True
    n = abs(c[-1])
    for d in range(1, n + 1):
        if n % d == 0:
            for r in (d, -d):
                if sum(a * r ** (len(c) - 1 - i) for i, a in enumerate(c)) == 0:
                    return True
    return False


def test_irreducibility_certificates_are_sound():
    # a cubic is reducible over Q iff it has a rational root
    certified = 0
    for a, b, c in product(range(-4, 5), repeat=3):
        P = [1, a, b, c]
        v = irreducibility_certificate(P)["verdict"]
        if _has_rational_root(P):
            assert v == "UNKNOWN", P
        elif v == "CERTIFIED":
            certified += 1
    assert certified > 500


def _f9():
    # F_9 = F_3[i], i^2 = -1, elements as pairs (a, b) = a + b i
    elems = [(a, b) for a in range(3) for b in range(3)]

    def mul(x, y):
        return ((x[0] * y[0] - x[1] * y[1]) % 3, (x[0] * y[1] + x[1] * y[0]) % 3)

    def add(x, y):
        return ((x[0] + y[0]) % 3, (x[1] + y[1]) % 3)

    return elems, mul, add, (0, 0), lambda n: (n % 3, 0)


def _fp(p):
    return list(range(p)), lambda x, y: x * y % p, lambda x, y: (x + y) % p, 0, lambda n: n % p


def naive_projective_count(a, field):
    elems, mul, add, zero, embed = field
    total = 0
    for v in product(elems, repeat=4):
        if all(x == zero for x in v):
            continue
        s = zero
        for c, x in zip(a, v):
            x2 = mul(x, x)
            s = add(s, mul(embed(c), mul(x2, x2)))
        total += s == zero
    q = len(elems)
    assert total % (q - 1) == 0
    return total // (q - 1)


def test_count_examples():
    assert count_points_diagonal_quartic([1, 1, 1, 1], 3)["count"] == 16
    r = count_points_diagonal_quartic([1, 1, 1, 1], 2)
    assert r["count"] == 7 and r["warnings"]
    assert count_points_diagonal_quartic([1, 1, 1, 2], 3)["count"] == 10


@pytest.mark.parametrize("p", [3, 5, 7])
def test_count_matches_naive_enumeration(p):
    rng = random.Random(p)
    for _ in range(4):
        a = [rng.randint(1, p - 1) for _ in range(4)]
        assert count_points_diagonal_quartic(a, p)["count"] == naive_projective_count(a, _fp(p))


def test_count_over_f9_matches_naive_enumeration():
    for a in ([1, 1, 1, 1], [1, 1, 1, 2], [1, 2, 2, 1]):
        assert count_points_diagonal_quartic(a, 3, 2)["count"] == naive_projective_count(a, _f9())


def test_count_is_partition_invariant():
    for p, k in ((13, 1), (5, 2)):
        base = count_points_diagonal_quartic([1, 2, 3, 4], p, k)["count"]
        for w in (2, 3, 7):
            assert count_points_diagonal_quartic([1, 2, 3, 4], p, k, workers=w)["count"] == base


def test_count_input_errors(monkeypatch):
    with pytest.raises(InvalidInput):
        count_points_diagonal_quartic([1, 1, 3, 1], 3)
    with pytest.raises(BudgetExceeded):
        count_points_diagonal_quartic([1, 1, 1, 1], 11, 3)
    monkeypatch.setenv("K3LG_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        count_points_diagonal_quartic([1, 1, 1, 1], 5)
    assert count_points_diagonal_quartic([1, 1, 1, 1], 3)["count"] == 16


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=8), st.integers(1, 10))
def test_power_sums_agree_with_direct_sums(roots, kmax):
    assert power_sums(poly_from_roots(roots), kmax) == [sum(r ** k for r in roots) for k in range(1, kmax + 1)]


FERMAT_F3 = poly_from_roots([3] * 12 + [-3] * 10)  # trace 36 - 30 = 6


def test_trace_consistency_examples():
    assert trace_consistency({1: 16}, FERMAT_F3, 3)["ok"]
    # over F_2 the count 7 forces trace 2; roots +-2 split 11/11 give trace 0
    r = trace_consistency({1: 7}, poly_from_roots([2] * 11 + [-2] * 11), 2)
    assert r["per_k"][0]["trace_from_count"] == 2 and not r["ok"]


def test_trace_consistency_detects_a_perturbed_count():
    counts = {1: 16, 2: count_points_diagonal_quartic([1, 1, 1, 1], 3, 2)["count"]}
    assert trace_consistency(counts, FERMAT_F3, 3)["ok"]
    counts[2] += 1
    r = trace_consistency(counts, FERMAT_F3, 3)
    assert not r["ok"] and [row["pass"] for row in r["per_k"]] == [True, False]
    with pytest.raises(InvalidInput):
        trace_consistency({1: 16}, [1, 0, 9], 3)
