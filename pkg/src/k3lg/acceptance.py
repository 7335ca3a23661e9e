"""The acceptance battery: eight numbered checks with runtime limits.

Each check returns a ``Result``; ``run_all`` runs them in order.  The same
functions back ``k3lg selftest`` and the test suite.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from sympy import Poly, Symbol

from . import oracle
from .compat import (
    check_weak_compatibility,
    count_points_diagonal_quartic,
    hodge_polygon,
    newton_vs_hodge,
    system_from_dict,
    trace_consistency,
)
from .hodge import PeriodVector, transcendental_split, validate_k3_type
from .jsonio import dumps, plain
from .k3lattice import is_primitive, k3_gram, same_rational_class, saturate
from .linalg import congruence, gram_of_rows
from .pipeline import prop32_run
from .quadform import INF, QuadSpace, _witt_index_entries, embed_space, hilbert_symbol, represents_over_Q, signature


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    seconds: float
    limit: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f}s, limit {self.limit:g}s)"


def _timed(number, name, limit, fn) -> Result:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure of the check, reported as such
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t
    if ok and dt > limit:
        ok, detail = False, detail + "; over the time limit"
    return Result(number, name, ok, dt, limit, detail)


# 1 ----------------------------------------------------------------------------


def check_k3_lattice():
    L = k3_gram()
    V = L.to_quadspace()
    ok = L.even and L.det() == -1 and signature(V) == (3, 19) and L.rank == 22
    return ok, f"rank {L.rank}, det {L.det()}, signature {signature(V)}, even {L.even}"


# 2 ----------------------------------------------------------------------------

_SMALL = (1, 2, 3, 5, 6, 7, 10, 11, 13)
_DENOMS = (1, 1, 1, 2, 3, 4, 6)


def random_k3_type(rng: random.Random, rho: int, bound: int = 50) -> QuadSpace:
    """Random Gram matrix of signature (2, 20 - rho) with entries of height <= bound.

    A diagonal form with small entries is conjugated by a few random
    elementary moves and a permutation, then possibly divided by a small
    denominator so that the Gram matrix is genuinely rational.
    """
    n = 22 - rho
    while True:
        d = [rng.choice(_SMALL) for _ in range(2)] + [-rng.choice(_SMALL) for _ in range(n - 2)]
        x = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(n):
            i, j = rng.sample(range(n), 2)
            c = rng.choice((-1, 1))
            x[i] = [a + c * b for a, b in zip(x[i], x[j])]
        perm = list(range(n))
        rng.shuffle(perm)
        x = [x[p] for p in perm]
        g = congruence(x, [[d[i] if i == j else 0 for j in range(n)] for i in range(n)])
        den = rng.choice(_DENOMS)
        g = [[Fraction(v, den) for v in row] for row in g]
        if max(max(abs(v.numerator), v.denominator) for row in g for v in row) <= bound:
            return QuadSpace(g)


def check_representability_sweep(cases: int = 200, seed: int = 20240611):
    rng = random.Random(seed)
    L = k3_gram()
    W = L.to_quadspace()
    represented = embedded = 0
    problems = []
    for case in range(cases):
        rho = rng.randint(3, 19)
        V = random_k3_type(rng, rho)
        if represents_over_Q(V, W):
            represented += 1
        else:
            problems.append(f"case {case}: not represented")
            continue
        try:
            B = embed_space(V, W, height_bound=64)
        except Exception as exc:
            problems.append(f"case {case} (rho {rho}): {type(exc).__name__}")
            continue
        if gram_of_rows(B, W.gram) != [list(r) for r in V.gram]:
            problems.append(f"case {case}: Gram mismatch")
            continue
        T = saturate(L, B)
        if not is_primitive(T.basis):
            problems.append(f"case {case}: saturation not primitive")
            continue
        embedded += 1
    ok = represented == cases and embedded >= cases - 5
    detail = f"represented {represented}/{cases}, embedded+saturated {embedded}/{cases}"
    if problems:
        detail += "; " + ", ".join(problems[:5])
    return ok, detail


# 3 ----------------------------------------------------------------------------

FIXED_V = QuadSpace([
    [2, 1, 0, 0, 0, 0],
    [1, 4, 1, 0, 0, 0],
    [0, 1, -6, 1, 0, 0],
    [0, 0, 1, -2, 3, 0],
    [0, 0, 0, 3, -10, 1],
    [0, 0, 0, 0, 1, -4],
])


def check_discriminant_invariance(runs: int = 50, seed: int = 7):
    rng = random.Random(seed)
    V = FIXED_V
    n = V.n
    heights = (16, 32, 64, 128)
    first = None
    exceptions = 0
    dets = set()
    for k in range(runs):
        order = list(range(n))
        rng.shuffle(order)
        res = prop32_run(V, height_bound=heights[k % len(heights)], seed=k, order=order)
        tag = res.rational_class_tag
        lat = res.T.lattice()
        dets.add(lat.det())
        if first is None:
            first = (tag, lat)
            continue
        if tag != first[0] or not same_rational_class(lat, first[1]):
            exceptions += 1
    # rational reflections of the ambient give genuinely different subspaces
    L = k3_gram()
    G = L.gram
    B = res.embedding
    for _ in range(runs):
        while True:
            r = [rng.randint(-2, 2) if rng.random() < 0.3 else 0 for _ in range(22)]
            qr = sum(r[i] * G[i][j] * r[j] for i in range(22) for j in range(22))
            if qr not in (0, 2, -2):
                break
        Gr = [sum(G[i][j] * r[j] for j in range(22)) for i in range(22)]
        S = [[int(i == j) - Fraction(2 * Gr[i] * r[j], qr) for j in range(22)] for i in range(22)]
        T = saturate(L, [[sum(row[i] * S[i][j] for i in range(22)) for j in range(22)] for row in B])
        lat = T.lattice()
        dets.add(lat.det())
        if not same_rational_class(lat, first[1]) or lat.rank != first[1].rank:
            exceptions += 1
    return exceptions == 0, (f"{2 * runs} runs ({runs} searches, {runs} reflected), {exceptions} exceptions, "
                             f"{len(dets)} distinct det(T); tag {plain(first[0])}")


# 4 ----------------------------------------------------------------------------


def _hasse(entries, p):
    h = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            h *= oracle.hilbert(entries[i], entries[j], p)
    return h


def check_local_global(pairs: int = 500, seed: int = 11):
    from .quadform import _hasse_of_entries

    cases = mismatches = 0
    for p in (2, 3, 5, 7):
        values = sorted({1, -1, 2, -2, 3, -3, p, -p})
        for a, b in product(values, repeat=2):
            cases += 1
            mismatches += hilbert_symbol(a, b, p) != oracle.hilbert(a, b, p)
        for r in range(1, 5):
            for e in product(values, repeat=r):
                cases += 1
                mismatches += _witt_index_entries(list(e), p) != oracle.witt_index(e, p)
                if r <= 3:
                    cases += 1
                    mismatches += _hasse_of_entries(list(e), p) != _hasse(e, p)
    rng = random.Random(seed)
    failures = 0
    for _ in range(pairs):
        a, b = (Fraction(rng.choice((-1, 1)) * rng.randint(1, 10**4), rng.randint(1, 10**3)) for _ in range(2))
        primes = set()
        for r in (a, b):
            for m in (r.numerator, r.denominator):
                from .arith import prime_divisors

                primes.update(prime_divisors(abs(m)) if abs(m) > 1 else [])
        primes.add(2)
        prod_ = hilbert_symbol(a, b, INF)
        for p in primes:
            prod_ *= hilbert_symbol(a, b, p)
        failures += prod_ != 1
    ok = mismatches == 0 and failures == 0
    return ok, f"{cases} oracle cases, {mismatches} disagreements; product formula {pairs - failures}/{pairs}"


# 5 ----------------------------------------------------------------------------


def _poly(expr):
    return Poly(expr, Symbol("x")).all_coeffs()


def check_point_counts():
    x = Symbol("x")
    f3 = count_points_diagonal_quartic([1, 1, 1, 1], 3, 1)["count"]
    f2 = count_points_diagonal_quartic([1, 1, 1, 1], 2, 1)["count"]
    w3 = count_points_diagonal_quartic([1, 1, 1, 2], 3, 1)["count"]
    # degree-22 polynomials with |roots| = q and the traces the counts require
    t3 = trace_consistency({1: f3}, _poly((x - 3) ** 12 * (x + 3) ** 10), 3)
    t2 = trace_consistency({1: f2}, _poly((x**2 - 2 * x + 4) * (x - 2) ** 10 * (x + 2) ** 10), 2)
    tr3, tr2 = t3["per_k"][0]["trace_from_count"], t2["per_k"][0]["trace_from_count"]
    ok = (f3, f2, w3, tr3, tr2) == (16, 7, 10, 6, 2) and t3["ok"] and t2["ok"]
    return ok, f"Fermat/F3 {f3}, Fermat/F2 {f2}, (1,1,1,2)/F3 {w3}, traces {tr3} and {tr2}"


# 6 ----------------------------------------------------------------------------


def _expected_verdict(slopes, rho):
    """Hand computation: cumulative sums of sorted slopes against Hodge."""
    n = len(slopes)
    hodge = [0] + [1] * (20 - rho) + [2]
    s = sorted(slopes)
    cn = ch = Fraction(0)
    above = True
    for i in range(n):
        cn += s[i]
        ch += hodge[i]
        above = above and cn >= ch
    return above and cn == ch


def synthetic_polynomials(count: int = 20, seed: int = 5):
    """(coeffs, p, f, rho, slopes) with prescribed root valuations."""
    rng = random.Random(seed)
    x = Symbol("x")
    out = []
    specials = [
        ((0, 1, 2), 3, 1),  # ordinary
        ((0, 0, 2, 2), 5, 1),  # dips below the Hodge polygon
        ((1, 1, 1), 2, 1),  # supersingular slopes, above
        ((1, 1), 7, 1),
    ]
    for slopes, p, f in specials:
        out.append((slopes, p, f))
    while len(out) < count:
        p = rng.choice((2, 3, 5))
        f = rng.choice((1, 2))
        n = rng.randint(2, 6)
        out.append((tuple(Fraction(rng.randint(0, 2 * f), f) for _ in range(n)), p, f))
    result = []
    for slopes, p, f in out:
        expr = 1
        for s in slopes:
            k = int(s * f)
            u = rng.choice([u for u in range(1, 12) if u % p])
            expr *= x - rng.choice((-1, 1)) * u * p**k
        coeffs = [Fraction(int(c)) for c in Poly(expr, x).all_coeffs()]
        result.append((coeffs, p, f, 22 - len(slopes), tuple(Fraction(s) for s in slopes)))
    return result


def check_polygons():
    agree = 0
    cases = synthetic_polynomials()
    for coeffs, p, f, rho, slopes in cases:
        v = newton_vs_hodge(coeffs, p, f, rho)
        agree += v["pass"] == _expected_verdict(slopes, rho) and v["newton_slopes"] == [
            str(s) for s in sorted(slopes)
        ]
    ends = all(hodge_polygon(r).end == (22 - r, 22 - r) for r in range(0, 21))
    ordinary = newton_vs_hodge(cases[0][0], cases[0][1], cases[0][2], cases[0][3])["pass"]
    below = not newton_vs_hodge(cases[1][0], cases[1][1], cases[1][2], cases[1][3])["pass"]
    ok = agree == len(cases) and ends and ordinary and below
    return ok, f"{agree}/{len(cases)} hulls agree, endpoints {ends}, ordinary pass {ordinary}, dip fails {below}"


# 7 ----------------------------------------------------------------------------


def random_manifest(rng: random.Random) -> dict:
    n = rng.randint(2, 5)
    primes = [2, 3, 5, 7, 11, 13]
    ells = [3, 5, 7, 11, 13, 17]
    places = []
    for i in range(rng.randint(2, 5)):
        p = rng.choice(primes)
        places.append({"p": p, "f": rng.randint(1, 2), "label": f"v{i}"})
    sigma = [pl["label"] for pl in places if rng.random() < 0.3]
    records = []
    for pl in places:
        base = [1] + [rng.randint(-20, 20) for _ in range(n)]
        for ell in rng.sample(ells, rng.randint(2, 4)):
            c = list(base)
            if pl["label"] in sigma:
                c = [1] + [rng.randint(-20, 20) for _ in range(n)]
            records.append({"place": dict(pl), "ell": ell, "coeffs": [str(v) for v in c]})
    ramified = {str(ell): [l for l in sigma if rng.random() < 0.5] for ell in ells[:2]}
    return {"dimension": n, "sigma": sigma, "ramified": ramified, "records": records}


def _violation_set(report):
    return {
        (v["kind"], v["place"], frozenset((v["ell"], v.get("ell2"))), v.get("index"))
        for v in report["violations"]
    }


def check_compatibility_checker(manifests: int = 100, seed: int = 3):
    rng = random.Random(seed)
    detected = good_mutations = sigma_flags = asym = base_fail = 0
    for _ in range(manifests):
        data = random_manifest(rng)
        if not check_weak_compatibility(system_from_dict(data))["ok"]:
            base_fail += 1
        sigma = set(data["sigma"])
        recs = data["records"]
        for idx, rec in enumerate(recs):
            label, p = rec["place"]["label"], rec["place"]["p"]
            mutated = [dict(r, coeffs=list(r["coeffs"])) for r in recs]
            k = rng.randint(1, data["dimension"])
            mutated[idx]["coeffs"][k] = str(int(mutated[idx]["coeffs"][k]) + rng.choice((-3, -1, 1, 2)))
            rep = check_weak_compatibility(system_from_dict(dict(data, records=mutated)))
            partners = [r for r in recs if r["place"]["label"] == label and r["ell"] not in (p, rec["ell"])]
            if label in sigma:
                sigma_flags += not rep["ok"]
            elif rec["ell"] != p and partners:
                good_mutations += 1
                detected += any(v["place"] == label and v["index"] == k for v in rep["violations"])
            # swapping the roles of the records must not change the verdicts
            rev = check_weak_compatibility(system_from_dict(dict(data, records=list(reversed(mutated)))))
            asym += _violation_set(rep) != _violation_set(rev)
    ok = detected == good_mutations and sigma_flags == 0 and asym == 0 and base_fail == 0
    return ok, (f"{detected}/{good_mutations} good-place mutations detected, {sigma_flags} flags in Sigma, "
                f"{asym} asymmetric reports, {base_fail} unmutated failures")


# 8 ----------------------------------------------------------------------------


def hodge_example_report() -> str:
    V = QuadSpace.diagonal([2, 2, -2])
    w = PeriodVector.exact([5, 0, 4], [0, 3, 0])
    r = validate_k3_type(V, w)
    s = transcendental_split(V, w)
    from .jsonio import period_to_dict

    return dumps({
        "isotropy_ok": r.isotropy_ok,
        "positivity_ok": r.positivity_ok,
        "algebraic_kernel": r.algebraic_kernel,
        "irreducible": r.irreducible,
        "algebraic_gram": s.algebraic.gram,
        "transcendental_basis": s.transcendental_basis,
        "transcendental_gram": s.transcendental.gram,
        "period": period_to_dict(s.period),
    })


def check_hodge_example():
    import json

    first, second = hodge_example_report(), hodge_example_report()
    data = json.loads(first)
    T = QuadSpace(data["transcendental_gram"])
    x = [Fraction(v) for v in data["period"]["x"]]
    y = [Fraction(v) for v in data["period"]["y"]]
    ok = (
        first == second
        and data["algebraic_kernel"] == [[4, 0, 5]]
        and data["transcendental_gram"] == [["18", "0"], ["0", "2"]]
        and (x, y) == ([1, 0], [0, 3])
        and T.q(x) - T.q(y) == 0
        and data["isotropy_ok"] and data["positivity_ok"]
    )
    return ok, "kernel (4,0,5), transcendental Gram diag(18,2), period (1, 3i), identical reports"


CHECKS = (
    (1, "K3 lattice self-test", 1.0, check_k3_lattice),
    (2, "representability sweep", 120.0, check_representability_sweep),
    (3, "discriminant invariance", 60.0, check_discriminant_invariance),
    (4, "local-global calibration", 60.0, check_local_global),
    (5, "point counts", 1.0, check_point_counts),
    (6, "polygon logic", 1.0, check_polygons),
    (7, "compatibility checker", 10.0, check_compatibility_checker),
    (8, "Hodge worked example", 1.0, check_hodge_example),
)


def run_check(number: int) -> Result:
    for num, name, limit, fn in CHECKS:
        if num == number:
            return _timed(num, name, limit, fn)
    raise KeyError(number)


def run_all(only=None) -> list:
    return [run_check(num) for num, *_ in CHECKS if only is None or num in only]
