"""Frobenius data of weakly compatible systems and finite-field point counts.

Polynomials are coefficient lists in descending degree with leading 1.
Newton slopes are normalized by the residue degree ``f``, so a weight-two
Frobenius at a place with ``q = p^f`` has slopes in ``[0, 2]``.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

import mpmath
from sympy import Poly, QQ, Symbol, cyclotomic_poly, totient
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_ddf_zassenhaus, gf_from_int_poly, gf_irreducible_p, gf_sqf_p

from . import arith
from .arith import parse_rational
from .errors import BudgetExceeded, InvalidInput, InvariantViolation, ParseError

_X = Symbol("x")

#: Default cap on p^(3k) for point counting; K3LG_BUDGET overrides it.
DEFAULT_BUDGET = 10**8
#: Relative tolerance of the numeric root-modulus check.
ROOT_TOLERANCE = mpmath.mpf("1e-8")
#: Primes tried by the irreducibility certificate.
CERT_PRIMES = tuple(arith.small_primes(50))


@dataclass(frozen=True)
class Place:
    p: int
    f: int
    label: str

    @property
    def q(self) -> int:
        return self.p**self.f


@dataclass(frozen=True)
class FrobeniusRecord:
    place: Place
    ell: int
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass
class CompatSystem:
    dimension: int
    sigma: list
    ramified: dict
    records: list
    rho: int | None = None

    def places(self) -> dict:
        return {r.place.label: r.place for r in self.records}


# -- loading -----------------------------------------------------------------


def _int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvariantViolation(path, "expected an integer")
    if minimum is not None and value < minimum:
        raise InvariantViolation(path, f"must be >= {minimum}")
    return value


def _prime(value, path):
    _int(value, path, 2)
    if not arith.isprime(value):
        raise InvariantViolation(path, f"{value} is not prime")
    return value


def system_from_dict(data) -> CompatSystem:
    if not isinstance(data, dict):
        raise InvariantViolation("$", "manifest must be a JSON object")
    dim = _int(data.get("dimension"), "dimension", 1)
    rho = data.get("rho")
    if rho is not None:
        _int(rho, "rho", 0)
        if dim != 22 - rho:
            raise InvariantViolation("rho", f"dimension {dim} is not 22 - rho = {22 - rho}")
    sigma = data.get("sigma", [])
    if not isinstance(sigma, list) or not all(isinstance(s, str) for s in sigma):
        raise InvariantViolation("sigma", "expected a list of place labels")
    ramified = {}
    for key, labels in (data.get("ramified") or {}).items():
        try:
            ell = int(key)
        except ValueError:
            raise InvariantViolation(f"ramified.{key}", "key must be a prime") from None
        _prime(ell, f"ramified.{key}")
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise InvariantViolation(f"ramified.{key}", "expected a list of place labels")
        ramified[ell] = list(labels)
    records, seen, places = [], set(), {}
    raw = data.get("records")
    if not isinstance(raw, list):
        raise InvariantViolation("records", "expected a list")
    for i, rec in enumerate(raw):
        path = f"records[{i}]"
        if not isinstance(rec, dict) or not isinstance(rec.get("place"), dict):
            raise InvariantViolation(path, "record needs a place object")
        pl = rec["place"]
        p = _prime(pl.get("p"), f"{path}.place.p")
        f = _int(pl.get("f", 1), f"{path}.place.f", 1)
        label = pl.get("label", f"{p}^{f}")
        if not isinstance(label, str):
            raise InvariantViolation(f"{path}.place.label", "expected a string")
        place = Place(p, f, label)
        if places.setdefault(label, place) != place:
            raise InvariantViolation(f"{path}.place", f"label {label!r} used with two residue fields")
        ell = _prime(rec.get("ell"), f"{path}.ell")
        coeffs = rec.get("coeffs")
        if not isinstance(coeffs, list):
            raise InvariantViolation(f"{path}.coeffs", "expected a list")
        try:
            coeffs = tuple(parse_rational(c) for c in coeffs)
        except InvalidInput as exc:
            raise InvariantViolation(f"{path}.coeffs", str(exc)) from None
        if len(coeffs) - 1 != dim:
            raise InvariantViolation(f"{path}.coeffs", f"degree {len(coeffs) - 1} != dimension {dim}")
        if coeffs[0] != 1:
            raise InvariantViolation(f"{path}.coeffs", "leading coefficient must be 1")
        if (label, ell) in seen:
            raise InvariantViolation(path, f"duplicate record for place {label!r} and ell = {ell}")
        seen.add((label, ell))
        records.append(FrobeniusRecord(place, ell, coeffs))
    return CompatSystem(dim, list(sigma), ramified, records, rho)


def load_system(source) -> CompatSystem:
    """Parse a manifest from a path, a file object or a JSON string."""
    try:
        if hasattr(source, "read"):
            data = json.load(source)
        elif isinstance(source, str) and source.lstrip().startswith("{"):
            data = json.loads(source)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc}") from None
    return system_from_dict(data)


def system_to_dict(s: CompatSystem) -> dict:
    out = {
        "dimension": s.dimension,
        "sigma": list(s.sigma),
        "ramified": {str(k): list(v) for k, v in sorted(s.ramified.items())},
        "records": [
            {
                "place": {"p": r.place.p, "f": r.place.f, "label": r.place.label},
                "ell": r.ell,
                "coeffs": [arith.format_rational(c) for c in r.coeffs],
            }
            for r in s.records
        ],
    }
    if s.rho is not None:
        out["rho"] = s.rho
    return out


# -- compatibility -------------------------------------------------------------


def check_weak_compatibility(s: CompatSystem) -> dict:
    """Violations of l-independence at good places and of the ramification bookkeeping."""
    violations = []
    sigma = set(s.sigma)
    by_place = {}
    for r in s.records:
        assert all(isinstance(c, Fraction) for c in r.coeffs)
        by_place.setdefault(r.place.label, []).append(r)
    compared = 0
    for label in sorted(by_place):
        if label in sigma:
            continue
        recs = sorted(by_place[label], key=lambda r: r.ell)
        for r1, r2 in combinations(recs, 2):
            p = r1.place.p
            if p in (r1.ell, r2.ell):
                continue
            compared += 1
            for idx, (a, b) in enumerate(zip(r1.coeffs, r2.coeffs)):
                if a != b:
                    violations.append(
                        {"kind": "mismatch", "place": label, "ell": r1.ell, "ell2": r2.ell, "index": idx}
                    )
    places = s.places()
    for ell in sorted(s.ramified):
        for label in s.ramified[ell]:
            if label in sigma:
                continue
            pl = places.get(label)
            if pl is None:
                violations.append({"kind": "unknown_place", "place": label, "ell": ell})
            elif pl.p != ell:
                violations.append({"kind": "ramified_outside", "place": label, "ell": ell})
    return {
        "ok": not violations,
        "violations": violations,
        "coverage": {
            "places": sorted(by_place),
            "good_places_checked": sorted(l for l in by_place if l not in sigma),
            "pairs_compared": compared,
            "ells": sorted({r.ell for r in s.records}),
        },
        "note": "only the listed places are witnessed; the condition for all places is not claimed",
    }


# -- weights and polygons -----------------------------------------------------


def _coeffs(P) -> list:
    c = [Fraction(x) for x in P]
    if not c or c[0] != 1:
        raise InvalidInput("polynomial must be monic (descending coefficients, leading 1)")
    return c


def weil_weight_check(P, q: int) -> dict:
    c = _coeffs(P)
    n = len(c) - 1
    if q < 2 or len(arith.factor_int(q)) != 1:
        raise InvalidInput(f"{q} is not a prime power")
    if n == 0 or c[-1] == 0:
        raise InvalidInput("P(0) must be nonzero")
    a = list(reversed(c))  # a[k] is the coefficient of x^k
    constant_ok = abs(a[0]) == Fraction(q) ** n
    # x^n P(q^2 / x) / a_0 lists a_k q^{2k} as the coefficient of x^{n-k}
    R = [a[k] * Fraction(q) ** (2 * k) / a[0] for k in range(n + 1)]
    reciprocal_ok = R == c
    with mpmath.workdps(60):
        roots, err = mpmath.polyroots([mpmath.mpf(x.numerator) / x.denominator for x in c],
                                      maxsteps=400, extraprec=200, error=True)
        moduli = [abs(r) for r in roots]
        worst = max(abs(m / q - 1) for m in moduli)
        modulus_ok = bool(worst + err <= ROOT_TOLERANCE)
    return {
        "ok": constant_ok and reciprocal_ok and modulus_ok,
        "constant_term": constant_ok,
        "reciprocal": reciprocal_ok,
        "root_modulus": modulus_ok,
        "max_relative_deviation": mpmath.nstr(worst, 5),
    }


@dataclass(frozen=True)
class Polygon:
    vertices: tuple  # ((x, y), ...) breakpoints from (0, 0)

    def slopes(self) -> list:
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out += [Fraction(y1 - y0, x1 - x0)] * (x1 - x0)
        return out

    def at(self, x) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + Fraction(y1 - y0) * (x - x0) / (x1 - x0)
        raise InvalidInput(f"{x} outside the polygon")

    @property
    def end(self):
        return self.vertices[-1]


def polygon_from_slopes(slopes) -> Polygon:
    slopes = sorted(Fraction(s) for s in slopes)
    verts = [(0, Fraction(0))]
    for s in slopes:
        x, y = verts[-1]
        if len(verts) > 1:
            px, py = verts[-2]
            if Fraction(y - py, x - px) == s:
                verts[-1] = (x + 1, y + s)
                continue
        verts.append((x + 1, y + s))
    return Polygon(tuple(verts))


def newton_polygon(P, p: int, f: int = 1) -> Polygon:
    """Lower hull of (i, v_p(a_{n-i}) / f), a_k the coefficient of x^k."""
    c = _coeffs(P)
    n = len(c) - 1
    if c[-1] == 0:
        raise InvalidInput("P(0) must be nonzero")
    pts = [(i, Fraction(arith.valuation(c[i], p), f)) for i in range(n + 1) if c[i] != 0]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return Polygon(tuple(hull))


def hodge_polygon(rho: int) -> Polygon:
    """Slopes 0, 1, 2 with multiplicities 1, 20 - rho, 1."""
    if not 0 <= rho <= 20:
        raise InvalidInput("rho must lie in [0, 20]")
    return polygon_from_slopes([0] + [1] * (20 - rho) + [2])


def newton_vs_hodge(P, p: int, f: int, rho: int) -> dict:
    c = _coeffs(P)
    n = len(c) - 1
    if n != 22 - rho:
        raise InvalidInput(f"degree {n} differs from 22 - rho = {22 - rho}")
    N, H = newton_polygon(c, p, f), hodge_polygon(rho)
    endpoints = N.end == H.end
    below = [x for x in range(n + 1) if N.at(x) < H.at(x)]
    return {
        "pass": endpoints and not below,
        "endpoints_match": endpoints,
        "below_at": below,
        "newton_slopes": [arith.format_rational(s) for s in N.slopes()],
        "hodge_slopes": [arith.format_rational(s) for s in H.slopes()],
    }


# -- algebraic factors and irreducibility -------------------------------------


def _qpoly(c) -> Poly:
    return Poly([QQ(x.numerator, x.denominator) for x in c], _X, domain=QQ)


def cyclotomic_algebraic_bound(P, q: int, m_max: int = 66) -> tuple:
    """Total degree of factors q^phi(m) Phi_m(x / q) of P, with the m found (repeats kept)."""
    c = _coeffs(P)
    n = len(c) - 1
    rest = _qpoly(c)
    found = []
    for m in range(1, m_max + 1):
        phi = int(totient(m))
        if phi > n:
            continue
        cyc = Poly(cyclotomic_poly(m, _X), _X, domain=QQ).all_coeffs()
        scaled = Poly([QQ(int(a) * q ** k) for k, a in enumerate(cyc)], _X, domain=QQ)
        while rest.degree() >= phi:
            quo, rem = rest.div(scaled)
            if not rem.is_zero:
                break
            rest = quo
            found.append(m)
    return sum(int(totient(m)) for m in found), found


def irreducibility_certificate(P) -> dict:
    """CERTIFIED when P is irreducible modulo some prime p <= 50."""
    c = [Fraction(x) for x in P]
    if len(c) < 2 or c[0] == 0:
        raise InvalidInput("need a polynomial of degree >= 1")
    if c[0] != 1:
        raise InvalidInput("polynomial must be monic")
    den = 1
    for x in c:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in c]
    n = len(ints) - 1
    for p in CERT_PRIMES:
        if ints[0] % p == 0:
            continue
        f = gf_from_int_poly(ints, p)
        if len(f) - 1 != n or not gf_sqf_p(f, p, ZZ):
            continue
        ddf = gf_ddf_zassenhaus(f, p, ZZ)
        if len(ddf) == 1 and ddf[0][1] == n:
            return {"verdict": "CERTIFIED", "prime": p}
    return {"verdict": "UNKNOWN", "prime": None}


# -- point counting -----------------------------------------------------------


class _GF:
    """F_{p^k} with elements encoded as integers (base-p digits of the coefficients)."""

    def __init__(self, p: int, k: int):
        self.p, self.k, self.q = p, k, p**k
        if k == 1:
            self.modulus = [1, 0]
        else:
            self.modulus = next(m for m in self._monics(k) if gf_irreducible_p(m, p, ZZ))

    def _monics(self, k):
        for code in range(self.p**k):
            tail = [(code // self.p**i) % self.p for i in reversed(range(k))]
            yield [1] + tail

    def digits(self, a: int) -> list:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def encode(self, ds) -> int:
        return sum(d * self.p**i for i, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return self.encode([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        return self.encode([(-x) % self.p for x in self.digits(a)])

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        p, k = self.p, self.k
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * k - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] = (prod[i + j] + xi * yj) % p
        mod = list(reversed(self.modulus))  # ascending, monic
        for d in range(2 * k - 2, k - 1, -1):
            t = prod[d]
            if t:
                for i in range(k + 1):
                    prod[d - k + i] = (prod[d - k + i] - t * mod[i]) % p
        return self.encode(prod[:k])


def counting_budget() -> int:
    raw = os.environ.get("K3LG_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"K3LG_BUDGET must be an integer, got {raw!r}") from None


def _histogram(F: _GF, a: int, fourth: list) -> dict:
    h = {}
    for x in range(F.q):
        v = F.mul(a, fourth[x])
        h[v] = h.get(v, 0) + 1
    return h


def _count_chunk(F: _GF, h0_items, h1, h2, h3) -> int:
    """Affine solutions with x_0 in the given value classes of a_0 x_0^4."""
    # pair sums of the last two coordinates
    tail = {}
    for s2, n2 in h2.items():
        for s3, n3 in h3.items():
            s = F.add(s2, s3)
            tail[s] = tail.get(s, 0) + n2 * n3
    total = 0
    for s0, n0 in h0_items:
        for s1, n1 in h1.items():
            total += n0 * n1 * tail.get(F.neg(F.add(s0, s1)), 0)
    return total


def count_points_diagonal_quartic(a, p: int, k: int = 1, workers: int = 1, budget: int | None = None) -> dict:
    """Points of a0 x0^4 + a1 x1^4 + a2 x2^4 + a3 x3^4 = 0 in P^3(F_{p^k}).

    Every affine vector is accounted for through the value classes of each
    monomial ``a_i x_i^4``; the projective count is (affine - 1) / (q - 1).
    ``workers`` splits the first coordinate's classes across threads; the
    integer sum is the same for any split.
    """
    if len(a) != 4:
        raise InvalidInput("need exactly four coefficients")
    if not arith.isprime(p):
        raise InvalidInput(f"{p} is not prime")
    if k < 1:
        raise InvalidInput("k must be positive")
    budget = counting_budget() if budget is None else budget
    if p ** (3 * k) > budget:
        raise BudgetExceeded(f"p^(3k) = {p ** (3 * k)} exceeds the budget {budget}")
    coeffs = [int(x) % p for x in a]
    if 0 in coeffs:
        raise InvalidInput("coefficients must be nonzero modulo p")
    warnings = []
    if p == 2:
        warnings.append("BadCharacteristic: p divides 4, the quartic is not smooth")
    F = _GF(p, k)
    fourth = [F.mul(F.mul(x, x), F.mul(x, x)) for x in range(F.q)]
    hs = [_histogram(F, c, fourth) for c in coeffs]
    items = sorted(hs[0].items())
    workers = max(1, min(workers, len(items)))
    chunks = [items[i::workers] for i in range(workers)]
    if workers == 1:
        affine = _count_chunk(F, chunks[0], hs[1], hs[2], hs[3])
    else:
        with ThreadPoolExecutor(workers) as pool:
            affine = sum(pool.map(lambda ch: _count_chunk(F, ch, hs[1], hs[2], hs[3]), chunks))
    count, r = divmod(affine - 1, F.q - 1)
    assert r == 0
    return {"p": p, "k": k, "coeffs": [int(x) for x in a], "count": count, "warnings": warnings}


def power_sums(P, kmax: int) -> list:
    """Newton's identities: s_1 .. s_kmax of the roots of monic P."""
    c = _coeffs(P)
    n = len(c) - 1
    e = [Fraction(0)] * (kmax + 1)
    for i in range(1, min(n, kmax) + 1):
        e[i] = c[i]
    s = [Fraction(0)] * (kmax + 1)
    for k in range(1, kmax + 1):
        total = k * e[k] if k <= n else Fraction(0)
        for i in range(1, k):
            if i <= n:
                total += e[i] * s[k - i]
        s[k] = -total
    return s[1:]


def trace_consistency(counts: dict, P_H2, p: int) -> dict:
    """Lefschetz check count(k) = 1 + p^(2k) + sum of k-th powers of the roots of P_H2."""
    c = _coeffs(P_H2)
    if len(c) - 1 != 22:
        raise InvalidInput("P_H2 must have degree 22")
    if not counts:
        raise InvalidInput("need at least one count")
    ks = sorted(int(k) for k in counts)
    sums = power_sums(c, ks[-1])
    rows = []
    for k in ks:
        trace = counts[k] - 1 - p ** (2 * k)
        rows.append({"k": k, "count": counts[k], "trace_from_count": trace,
                     "trace_from_polynomial": arith.format_rational(sums[k - 1]),
                     "pass": sums[k - 1] == trace})
    return {"ok": all(r["pass"] for r in rows), "per_k": rows}
