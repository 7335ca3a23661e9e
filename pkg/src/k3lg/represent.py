"""Explicit vectors and embeddings for quadratic spaces over Q.

The ambient space is kept as a list of mutually orthogonal *slots*.  Each
slot remembers its norm together with the square class of that norm (a sign
and the set of primes of odd exponent), so later conic steps never have to
factor large numbers blindly.  Taking a vector out of the ambient replaces
the slots it touches by an explicit orthogonal basis of the complement whose
norms are products of already known square classes.
"""
from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product

from . import arith, conic
from .arith import is_square, rational_sqrt
from .errors import FactorizationError, InvalidInput, NotRepresentable, SearchExhausted
from .linalg import clear_denominators, gram_of_rows, integer_kernel, inverse, lll_rows, matmul, rref
from .quadform import (
    INF,
    DiagForm,
    QuadSpace,
    diagonalize,
    hilbert_symbol,
    _witt_index_entries,
    local_obstructions,
    signature,
)
from .roots import e8_gram, e8_orthonormal

#: Random draws per (pair, free slots) choice in the bounded search.
SEARCH_TRIES = 60
#: Largest coordinate tried in the small-integer shortcut.
SMALL_INT = 3
#: Progression terms tried when looking for an auxiliary prime.
SPLIT_TRIES = 5000
#: Trial division bound used for "cheap" factorizations.
QUICK_BOUND = 2000
#: Coefficients up to this size may be factored completely when needed.
FULL_FACTOR_LIMIT = 10**30


# --------------------------------------------------------------------------
# square classes as (sign, odd primes)


def _trial(n: int):
    """{p: e} for |n| if it is QUICK_BOUND-smooth times at most one prime, else None."""
    n = abs(n)
    out = {}
    for p in arith.small_primes(QUICK_BOUND):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n > QUICK_BOUND**2 and not arith.isprime(n):
            return None
        out[n] = out.get(n, 0) + 1
    return out


def sq_class(r, full: bool = False):
    """(sign, frozenset of primes with odd exponent) for a nonzero rational,
    or None when no cheap factorization exists."""
    r = Fraction(r)
    n = r.numerator * r.denominator
    f = _trial(n)
    if f is None and full and abs(n) <= FULL_FACTOR_LIMIT:
        f = dict(conic.factor(n))
    if f is None:
        return None
    return (1 if n > 0 else -1, frozenset(p for p, e in f.items() if e % 2))


def _cls_mul(*classes):
    if any(c is None for c in classes):
        return None
    sign, odd = 1, frozenset()
    for s, ps in classes:
        sign *= s
        odd = odd ^ ps
    return sign, odd


def _cls_value(cls) -> int:
    v = cls[0]
    for p in cls[1]:
        v *= p
    return v


# --------------------------------------------------------------------------
# the ambient


@dataclass
class _Slot:
    c: Fraction  # q(vec); equals the squarefree value of cls when cls is known
    vec: list  # coordinates in W
    group: int | None = None  # hyperbolic-pair id from the initial basis
    cls: tuple | None = None


def _make_slot(c, vec, group=None, cls=None) -> _Slot:
    c = Fraction(c)
    if cls is None:
        cls = sq_class(c)
    if cls is None:
        return _Slot(c, vec, group, None)
    ratio = c / _cls_value(cls)
    assert is_square(ratio), "square class bookkeeping is off"
    r = rational_sqrt(ratio)
    if r != 1:
        vec = [x / r for x in vec]
    return _Slot(Fraction(_cls_value(cls)), vec, group, cls)


def _components(g) -> list:
    """Index sets of the connected blocks of a symmetric matrix."""
    n = len(g)
    seen, out = set(), []
    for start in range(n):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if g[i][j] != 0 and j not in seen:
                    seen.add(j)
                    stack.append(j)
        out.append(sorted(comp))
    return out


def ambient_basis(W: QuadSpace) -> DiagForm:
    """Orthogonal basis of W adapted to its block structure.

    Hyperbolic blocks ``[[0, k], [k, 0]]`` give the pair ``e + f, e - f`` and
    blocks equal to an E8(+-1) Gram matrix give an orthonormal basis (norms
    +-1); anything else is diagonalized by elimination.
    """
    n = W.n
    g = W.gram
    entries, rows, pairs = [], [], []
    e8 = {s: [[Fraction(x) for x in r] for r in e8_gram(s)] for s in (1, -1)}

    def embed(comp, local):
        full = [Fraction(0)] * n
        for idx, x in zip(comp, local):
            full[idx] = Fraction(x)
        return full

    for comp in _components(g):
        sub = [[g[i][j] for j in comp] for i in comp]
        sign = next((s for s in (1, -1) if len(comp) == 8 and sub == e8[s]), None)
        if sign is not None:
            for r in e8_orthonormal():
                entries.append(Fraction(sign))
                rows.append(embed(comp, r))
            continue
        d = diagonalize(QuadSpace(sub))
        base = len(entries)
        pairs.extend((base + i, base + j) for i, j in d.pairs)
        entries.extend(d.entries)
        rows.extend(embed(comp, r) for r in d.transform)
    return DiagForm(entries, rows, pairs)


class _Ambient:
    """The not-yet-used part of W, kept as mutually orthogonal slots."""

    def __init__(self, W: QuadSpace, basis: DiagForm | None = None):
        self.W = W
        self.pair_members = set()
        dg = basis or ambient_basis(W)
        group_of = {}
        for gid, (i, j) in enumerate(dg.pairs):
            group_of[i] = group_of[j] = gid
        self.slots = [
            _make_slot(c, list(vec), group_of.get(i), sq_class(c, full=True))
            for i, (c, vec) in enumerate(zip(dg.entries, dg.transform))
        ]

    def refresh(self):
        """Rebuild the slots from a short integral basis of the current span.

        Repeated complements can leave slots with huge norms; an LLL-reduced
        basis of the span intersected with Z^N has a small Gram matrix, and
        diagonalizing it (shortest vectors first) gives modest norms again.
        The new slots are kept only if they are simpler; returns whether they were.
        """
        n = self.W.n
        span = clear_denominators(rref([s.vec for s in self.slots])[0])
        perp = integer_kernel(span, n)
        if perp:
            basis = lll_rows(integer_kernel(lll_rows(perp), n))
        else:
            basis = [[int(i == j) for j in range(n)] for i in range(n)]
        gram = gram_of_rows(basis, self.W.gram)
        order = sorted(range(len(basis)), key=lambda i: (gram[i][i] == 0, abs(gram[i][i])))
        basis = [basis[i] for i in order]
        d = diagonalize(QuadSpace([[gram[i][j] for j in order] for i in order]))
        classes = [sq_class(c, full=True) for c in d.entries]
        if max(_complexity(_Slot(c, [], None, k)) for c, k in zip(d.entries, classes)) >= max(
            map(_complexity, self.slots)
        ):
            return False
        rows = matmul(d.transform, basis)
        self.slots = [_make_slot(c, r, None, k) for c, r, k in zip(d.entries, rows, classes)]
        return True

    def unconsumed_pairs(self):
        seen = {}
        for k, s in enumerate(self.slots):
            if s.group is not None:
                seen.setdefault(s.group, []).append(k)
        return [tuple(ks) for g, ks in sorted(seen.items()) if len(ks) == 2]

    def combine(self, move) -> list:
        w = [Fraction(0)] * self.W.n
        for k, t in move.coeffs:
            for i, x in enumerate(self.slots[k].vec):
                if x:
                    w[i] += t * x
        return w

    def consume(self, move, a: Fraction, a_cls):
        """Replace the slots of ``move`` by a basis of the orthogonal complement
        of the chosen vector (of norm ``a``) inside their span."""
        ks = [k for k, _ in move.coeffs]
        vecs = [self.slots[k].vec for k in ks]
        cs = [self.slots[k].c for k in ks]
        ts = [t for _, t in move.coeffs]
        if move.kind == "quaternion":
            comp = [(a, a_cls, row) for row in _quaternion_complement(ts)]
        else:
            comp = _nested_complement(cs, ts, [self.slots[k].cls for k in ks], a, a_cls, move.prefix)
        new = []
        for c, cls, comb in comp:
            vec = [sum(x * v[i] for x, v in zip(comb, vecs)) for i in range(self.W.n)]
            new.append(_make_slot(c, vec, None, cls))
        drop = set(ks)
        self.slots = [s for k, s in enumerate(self.slots) if k not in drop] + new


@dataclass
class _Move:
    coeffs: list  # [(slot index, coefficient)], nonzero coefficients, in order
    kind: str = "nested"
    prefix: dict | None = None  # known square classes of partial sums s_m


def _nested_complement(cs, ts, classes, a, a_cls, prefix=None):
    """Orthogonal basis of w^perp in <c_1, ..., c_k>, w = sum t_m e_m, q(w) = a.

    With partial sums s_m = c_1 t_1^2 + ... + c_m t_m^2 the vectors
    u_m = s_{m-1} e_m - c_m t_m (t_1 e_1 + ... + t_{m-1} e_{m-1}), m >= 2,
    are orthogonal to w and to each other, and q(u_m) = c_m s_{m-1} s_m.
    Returns (norm, square class or None, coefficient vector) triples.
    """
    k = len(cs)
    if k == 1:
        return []
    order = list(range(k))
    for perm in permutations(range(k)):
        s = Fraction(0)
        ok = True
        for m in perm[:-1]:
            s += cs[m] * ts[m] ** 2
            if s == 0:
                ok = False
                break
        if ok:
            order = list(perm)
            break
    prefix = prefix if order == list(range(k)) and prefix else {}
    out = []
    s_prev = cs[order[0]] * ts[order[0]] ** 2
    cls_prev = classes[order[0]]
    for pos in range(1, k):
        m = order[pos]
        s_cur = s_prev + cs[m] * ts[m] ** 2
        if pos == k - 1:
            cls_cur = a_cls
        elif pos in prefix:
            cls_cur = prefix[pos]
        else:
            cls_cur = sq_class(s_cur)
        comb = [Fraction(0)] * k
        comb[m] = s_prev
        for l in order[:pos]:
            comb[l] = -cs[m] * ts[m] * ts[l]
        out.append((cs[m] * s_prev * s_cur, _cls_mul(classes[m], cls_prev, cls_cur), comb))
        s_prev, cls_prev = s_cur, cls_cur
    return out


def _quaternion_complement(q):
    """Right multiples q*i, q*j, q*k of the quaternion q = (x0, x1, x2, x3).

    For the norm form x0^2 + x1^2 + x2^2 + x3^2 they are orthogonal to q and
    to each other, each of norm |q|^2.
    """
    x0, x1, x2, x3 = q
    return [[-x1, x0, x3, -x2], [-x2, -x3, x0, x1], [-x3, x2, -x1, x0]]


# --------------------------------------------------------------------------
# search helpers


def _height(r: Fraction) -> int:
    return max(abs(r.numerator), r.denominator)


def _complexity(slot: _Slot):
    if slot.cls is None:
        return (10**9, 0)
    return (len(slot.cls[1]), abs(slot.c))


def _binary_soluble(ci: _Slot, cj: _Slot, b: Fraction, b_cls) -> bool:
    """ci x^2 + cj y^2 = b over Q  <=>  (b ci, -ci cj)_v = 1 at every place."""
    s, t = b * ci.c, -ci.c * cj.c
    if hilbert_symbol(s, t, INF) != 1:
        return False
    ps = {2} | b_cls[1] | ci.cls[1] | cj.cls[1]
    return all(hilbert_symbol(s, t, p) == 1 for p in ps)


def _pair_viable(ci: _Slot, cj: _Slot) -> bool:
    """False when an odd prime dividing both coefficients forbids every target
    prime to it: there ci x^2 + cj y^2 = b needs -ci cj / p^2 to be a square mod p."""
    for p in ci.cls[1] & cj.cls[1]:
        if p != 2 and arith.legendre(int(-(ci.c / p) * (cj.c / p)), p) != 1:
            return False
    return True


def _sign_ok(ci, cj, b) -> bool:
    return not ((ci < 0 and cj < 0 and b > 0) or (ci > 0 and cj > 0 and b < 0))


@lru_cache(maxsize=8)
def _rationals_up_to(height_bound: int) -> tuple:
    """Positive rationals num/den in lowest terms with num, den <= height_bound."""
    out = []
    for den in range(1, height_bound + 1):
        for num in range(1, height_bound + 1):
            if math.gcd(num, den) == 1:
                out.append(Fraction(num, den))
    out.sort(key=lambda r: (_height(r), r))
    return tuple(out)


@lru_cache(maxsize=8)
def _rationals_by_value(height_bound: int) -> tuple:
    vals = sorted(_rationals_up_to(height_bound))
    return tuple(vals), [float(v) for v in vals]


def _free_values(cf, b, ci, cj, height_bound):
    """Pool values t for which b - cf t^2 can still have the sign <ci, cj> needs."""
    vals, floats = _rationals_by_value(height_bound)
    if (ci > 0) != (cj > 0) or (cf > 0) != (b > 0):
        return vals
    if (ci > 0) != (b > 0):
        return ()
    return vals[: bisect.bisect_left(floats, math.sqrt(float(b / cf)))]


def _four_squares(n: int, rng):
    """Integers with squares summing to n > 0 (Rabin-Shallit style), or None."""
    root = math.isqrt(n)
    one = _Slot(Fraction(1), [], None, (1, frozenset()))
    for _ in range(8 * SEARCH_TRIES):
        x0 = rng.randint(0, root)
        x1 = rng.randint(0, math.isqrt(n - x0 * x0))
        b = n - x0 * x0 - x1 * x1
        if b == 0:
            return (Fraction(x0), Fraction(x1), Fraction(0), Fraction(0))
        b_cls = sq_class(b)
        if b_cls is None or not _binary_soluble(one, one, Fraction(b), b_cls):
            continue
        sol = _conic(1, 1, b)
        if sol is None:
            continue
        x2, x3 = sol
        return (Fraction(x0), Fraction(x1), x2, x3)
    return None


def _conic(ci, cj, b, hint=()):
    """conic.binary_solve with capped factoring; None when that is not enough."""
    b = Fraction(b)
    f = _trial(b.numerator * b.denominator)
    hint = tuple(hint) + (tuple(f) if f else ())
    try:
        return conic.binary_solve(ci, cj, b, quick=True, hint=hint)
    except FactorizationError:
        return None


def _hyperbolic_solution(ci, cj, a):
    """x, y with ci x^2 + cj y^2 = a when -cj / ci = t^2."""
    t = rational_sqrt(-cj / ci)
    r = a / ci
    # ci (x - t y)(x + t y) = a with x + t y = 1, x - t y = a / ci
    return (1 + r) / 2, (1 - r) / (2 * t)


def _nonzero(pairs) -> list:
    return [(k, t) for k, t in pairs if t]


# --------------------------------------------------------------------------
# the search


def _find(amb: _Ambient, a: Fraction, a_cls, height_bound: int, rng) -> _Move | None:
    """A vector of norm a in the ambient, trying the cheap constructions first."""
    slots = amb.slots
    # (a) an untouched hyperbolic plane from the initial basis
    for i, j in amb.unconsumed_pairs():
        for k in (i, j):
            r = a / slots[k].c
            if is_square(r):
                return _Move([(k, rational_sqrt(r))])
        x, y = _hyperbolic_solution(slots[i].c, slots[j].c, a)
        return _Move(_nonzero([(i, x), (j, y)]))
    # (b) square-class match, remnants of hyperbolic planes first
    for k in sorted(range(len(slots)), key=lambda k: (slots[k].group is None, k)):
        r = a / slots[k].c
        if is_square(r):
            return _Move([(k, rational_sqrt(r))])
    # (c) any hyperbolic pair among the current slots
    for i, j in combinations(range(len(slots)), 2):
        if is_square(-slots[j].c / slots[i].c):
            x, y = _hyperbolic_solution(slots[i].c, slots[j].c, a)
            return _Move(_nonzero([(i, x), (j, y)]))
    simple = _simplest(slots)
    # (d) small integer vectors on the four simplest slots, largest entries first
    few = simple[:4]
    for xs in product(range(SMALL_INT, -1, -1), repeat=len(few)):
        if any(xs) and sum(slots[k].c * x * x for k, x in zip(few, xs)) == a:
            return _Move([(k, Fraction(x)) for k, x in zip(few, xs) if x])
    # the remaining steps work with the integer a * den^2 and rescale at the end
    den = a.denominator
    move = _find_hard(slots, simple, a * den * den, a_cls, height_bound, rng)
    if move is not None and den != 1:
        move.coeffs = [(k, t / den) for k, t in move.coeffs]
    return move


def _simplest(slots, per_sign: int = 4) -> list:
    """The simplest few slots of each sign, simplest first."""
    key = lambda k: (_complexity(slots[k]), k)  # noqa: E731
    order = sorted(range(len(slots)), key=key)
    pos = [k for k in order if slots[k].c > 0][:per_sign]
    neg = [k for k in order if slots[k].c < 0][:per_sign]
    return sorted(pos + neg, key=key)


def _find_hard(slots, simple, a, a_cls, height_bound, rng) -> _Move | None:
    known = [k for k in simple if slots[k].cls is not None]
    # indefinite pairs first: they represent both signs
    pairs = [p for p in combinations(known, 2) if _pair_viable(slots[p[0]], slots[p[1]])]
    pairs.sort(key=lambda p: (slots[p[0]].c > 0) == (slots[p[1]].c > 0))
    # (e) a binary subform solved as a conic
    if a_cls is not None:
        for i, j in pairs:
            si, sj = slots[i], slots[j]
            if _sign_ok(si.c, sj.c, a) and _binary_soluble(si, sj, a, a_cls):
                sol = _conic(si.c, sj.c, a, si.cls[1] | sj.cls[1] | a_cls[1])
                if sol is None:
                    continue
                x, y = sol
                return _Move(_nonzero([(i, x), (j, y)]))
    # (f) four slots sharing one coefficient: a / c is a sum of four squares
    by_c = {}
    for k in known:
        by_c.setdefault(slots[k].c, []).append(k)
    for c, ks in by_c.items():
        r = a / c
        if len(ks) >= 4 and r > 0:
            m = r.denominator  # r = n / m^2 with n = num * den
            q = _four_squares(r.numerator * m, rng)
            if q is not None:
                return _Move([(k, x / m) for k, x in zip(ks[:4], q)], kind="quaternion")
    # (g) split off an auxiliary value chosen by congruences (no random search)
    if a_cls is not None:
        move = _split_search(slots, known, a, a_cls)
        if move is not None:
            return move
    # (h) one or two free coordinates of height <= height_bound, drawn so that
    # the remaining binary target factors cheaply
    for extra in (1, 2):
        if len(slots) < 2 + extra:
            break
        for i, j in pairs[:12]:
            others = [f for f in known if f not in (i, j)]
            for free in combinations(others[:5], extra):
                move = _search_free(slots, a, i, j, list(free), height_bound, rng)
                if move is not None:
                    return move
    return None


def _local_classes(p: int) -> list:
    """Integers representing Q_p^* / (Q_p^*)^2, unit classes first."""
    if p == 2:
        return [1, 3, 5, 7, 2, 6, 10, 14]
    n = next(x for x in range(2, p) if arith.legendre(x, p) == -1)
    return [1, n, p, n * p]


def _loc_rep(entries, a, v) -> bool:
    """Whether the diagonal form ``entries`` represents a over Q_v."""
    return _witt_index_entries(list(entries) + [-a], v) >= 1


def _split_value(c1, c2, rest, a, places):
    """An auxiliary s with <c1, c2> representing s and <s, *rest> representing a.

    The local class of s is fixed at each place in ``places`` (the real place,
    2 and every prime of c1, c2, rest and a); then s = sign * (primes of S) * q
    with q = 1 or a prime found by a progression search.  At q both conditions
    hold by the product formula.  Returns (s, its primes) or None.
    """
    def ok(t, v):
        return hilbert_symbol(t * c1, -c1 * c2, v) == 1 and _loc_rep([t] + rest, a, v)

    sign = next((g for g in (1, -1) if ok(g, INF)), None)
    if sign is None:
        return None
    base, want = sign, {}
    for p in places:
        if p is INF:
            continue
        u = next((u for u in _local_classes(p) if ok(u, p)), None)
        if u is None:
            return None
        if u % p == 0:
            base *= p
            u //= p
        want[p] = u
    # residues for the cofactor q, coprime to S
    residues, moduli = [], []
    for p, u in want.items():
        rest_unit = base // p if base % p == 0 else base
        if p == 2:
            residues.append(u * pow(rest_unit, -1, 8) % 8)
            moduli.append(8)
        else:
            chi = arith.legendre(u, p) * arith.legendre(rest_unit, p)
            residues.append(1 if chi == 1 else _local_classes(p)[1])
            moduli.append(p)
    r = conic._crt(residues, moduli)
    m = math.prod(moduli)
    r = r or m
    for j in range(SPLIT_TRIES):
        q = r + j * m
        if q == 1 or arith.isprime(q):
            primes = {p for p in want if base % p == 0} | ({q} if q > 1 else set())
            return base * q, frozenset(primes)
    return None


def _split_solve(cs, prime_sets, a, a_primes):
    """Rationals x with sum cs[i] x_i^2 = a, plus known classes of the partial
    sums (for the complement), or None.  ``cs`` are squarefree integers."""
    if len(cs) == 2:
        sol = _conic(cs[0], cs[1], a, prime_sets[0] | prime_sets[1] | a_primes)
        return None if sol is None else (list(sol), {})
    places = [INF] + sorted({2}.union(*prime_sets, a_primes))
    found = _split_value(cs[0], cs[1], list(cs[2:]), a, places)
    if found is None:
        return None
    s, s_primes = found
    pair = _conic(cs[0], cs[1], s, prime_sets[0] | prime_sets[1] | s_primes)
    inner = _split_solve([s] + list(cs[2:]), [s_primes] + list(prime_sets[2:]), a, a_primes)
    if pair is None or inner is None:
        return None
    xs, prefix = inner
    y = xs[0]
    out = [y * pair[0], y * pair[1]] + xs[1:]
    cls = ((1 if s > 0 else -1), s_primes)
    return out, {1: cls, **{k + 1: v for k, v in prefix.items()}}


def _split_search(slots, known, a, a_cls) -> _Move | None:
    """Represent a on three to five known slots through auxiliary values."""
    for size in (3, 4, 5):
        tried = 0
        for sub in combinations(known, size):
            cs = [slots[k].c for k in sub]
            ps = [slots[k].cls[1] for k in sub]
            places = [INF] + sorted({2}.union(*ps, a_cls[1]))
            if not all(_loc_rep(cs, a, v) for v in places):
                continue
            tried += 1
            res = _split_solve([int(c) for c in cs], ps, a, a_cls[1])
            if res is not None:
                xs, prefix = res
                coeffs = list(zip(sub, xs))
                if not all(xs):
                    return _Move(_nonzero(coeffs))
                return _Move(coeffs, prefix=prefix)
            if tried >= 3:
                break
    return None


def _search_free(slots, a, i, j, free, height_bound, rng) -> _Move | None:
    """Random free coordinates on ``free``, the last one drawn so that the
    binary target keeps a usable sign.  The target is first scaled by a random
    square m^2 (and the answer by 1/m) so that small targets stay reachable
    from slots with large coefficients."""
    si, sj = slots[i], slots[j]
    cmax = max(abs(slots[f].c) for f in free)
    m0 = math.isqrt(int(cmax / abs(a))) + 1
    pool = _rationals_up_to(height_bound)
    for _ in range(SEARCH_TRIES):
        m = m0 * rng.randint(1, 4)
        b = a * m * m
        ts = []
        for f in free[:-1]:
            t = rng.choice(pool)
            ts.append(t)
            b -= slots[f].c * t * t
        cands = _free_values(slots[free[-1]].c, b, si.c, sj.c, height_bound)
        if not cands:
            continue
        t = rng.choice(cands)
        ts.append(t)
        b -= slots[free[-1]].c * t * t
        if b == 0 or not _sign_ok(si.c, sj.c, b):
            continue
        b_cls = sq_class(b)
        if b_cls is None or not _binary_soluble(si, sj, b, b_cls):
            continue
        sol = _conic(si.c, sj.c, b, si.cls[1] | sj.cls[1] | b_cls[1])
        if sol is None:
            continue
        x, y = sol
        coeffs = [(i, x / m), (j, y / m)] + [(f, t / m) for f, t in zip(free, ts)]
        if not (x and y):
            return _Move(_nonzero(coeffs))
        return _Move(coeffs, prefix={1: b_cls})
    return None


# --------------------------------------------------------------------------
# public operations


def represent_number(W: QuadSpace, a, height_bound: int = 64, seed: int = 0) -> list:
    """Vector w of W with q(w) = a exactly.

    Raises NotRepresentable when a local test rules ``a`` out and
    SearchExhausted when ``a`` is locally represented but no witness turned
    up within ``height_bound``.
    """
    a = Fraction(a)
    if a == 0:
        raise InvalidInput("target must be nonzero")
    obstruction = local_obstructions(QuadSpace([[a]]), W)
    if obstruction:
        raise NotRepresentable(f"{a} is not represented by W", place=obstruction[0]["place"],
                               invariants=obstruction[0])
    amb = _Ambient(W)
    move = _find(amb, a, sq_class(a, full=True), height_bound, random.Random(seed))
    if move is None:
        raise SearchExhausted(f"no vector of norm {a} found with height <= {height_bound}",
                              height_bound=height_bound, entry=a)
    w = amb.combine(move)
    assert W.q(w) == a
    return w


class _Remainder:
    """The part of V not yet mapped: a basis (rows in V-coordinates) and its Gram matrix."""

    def __init__(self, V: QuadSpace):
        n = V.n
        self.rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        self.gram = [list(r) for r in V.gram]

    def __len__(self):
        return len(self.rows)

    def candidates(self):
        """Short integer combinations of the basis with their norms, sparsest first."""
        g = self.gram
        r = len(self.rows)
        for i in range(r):
            if g[i][i]:
                yield {i: 1}, g[i][i]
        for i, j in combinations(range(r), 2):
            for s in (1, -1):
                a = g[i][i] + g[j][j] + 2 * s * g[i][j]
                if a:
                    yield {i: 1, j: s}, a

    def vector(self, x) -> list:
        n = len(self.rows[0])
        return [sum(c * self.rows[i][k] for i, c in x.items()) for k in range(n)]

    def split_off(self, x, a):
        """Replace the basis by one of the orthogonal complement of sum x_i r_i (norm a)."""
        v = self.vector(x)
        g = self.gram
        r = len(self.rows)
        bv = [sum(c * g[j][i] for i, c in x.items()) for j in range(r)]  # b(r_j, v)
        drop = next(i for i, c in x.items() if c)
        keep = [j for j in range(r) if j != drop]
        self.rows = [[y - bv[j] / a * z for y, z in zip(self.rows[j], v)] for j in keep]
        self.gram = [[g[j][l] - bv[j] * bv[l] / a for l in keep] for j in keep]
        return v


def _cheap_move(amb: _Ambient, a, a_cls, by_cls):
    """(priority, move) when a matches a slot class or an unconsumed plane, else None."""
    slots = amb.slots
    best = None
    for k in by_cls.get(a_cls, ()):
        r = a / slots[k].c
        if not is_square(r):
            continue
        # untouched hyperbolic planes first, then their remnants, then the rest
        pri = 0 if k in amb.pair_members else (1 if slots[k].group is not None else 2)
        if best is None or pri < best[0]:
            best = (pri, _Move([(k, rational_sqrt(r))]))
    if best is None:
        pairs = amb.unconsumed_pairs()
        if pairs:
            i, j = pairs[0]
            x, y = _hyperbolic_solution(slots[i].c, slots[j].c, a)
            best = (3, _Move(_nonzero([(i, x), (j, y)])))
    return best


def embed_space(V: QuadSpace, W: QuadSpace, height_bound: int = 64, seed: int = 0) -> list:
    """Rational matrix B with B G_W B^T = G_V.

    Vectors of V are mapped one at a time.  Each step looks for a short vector
    v in the unmapped part of V whose norm already lies in the square class of
    some ambient slot, so it can be sent to a multiple of that slot; failing
    that, the bounded search is run for the simplest norm on offer.  The image
    of v is then removed from the ambient and v from V.  By Witt's theorem
    such greedy choices never lead into a dead end, so only the search itself
    can fail.  ``seed`` drives the random part of the search.
    """
    obstruction = local_obstructions(V, W)
    if obstruction:
        o = obstruction[0]
        raise NotRepresentable(f"V does not embed into W over Q (place {o['place']})",
                               place=o["place"], invariants=o)
    rng = random.Random(seed)
    amb = _Ambient(W)
    rem = _Remainder(V)
    xs, ys = [], []
    positives = signature(V)[0]
    refreshed = False
    while len(rem):
        by_cls = {}
        for k, s in enumerate(amb.slots):
            if s.cls is not None:
                by_cls.setdefault(s.cls, []).append(k)
        amb.pair_members = {k for p in amb.unconsumed_pairs() for k in p}
        best, pool = None, []
        hard = []
        for x, a in rem.candidates():
            a_cls = sq_class(a)
            if a_cls is None:
                hard.append((x, a))
                continue
            found = _cheap_move(amb, a, a_cls, by_cls)
            if found is not None:
                # positive directions are scarce in the ambient, place them first
                key = (positives > 0 and a < 0, found[0], len(x), abs(a))
                if best is None or key < best[0]:
                    best = (key, x, a, a_cls, found[1])
                if key[:2] == (False, 0) and len(x) == 1:
                    break
            else:
                pool.append(((positives > 0 and a < 0, len(a_cls[1]), abs(a), len(x)), x, a, a_cls))
        if best is None and not refreshed:
            refreshed = True
            if amb.refresh():
                continue
        if best is None:
            if not pool:
                # nothing factors cheaply; pay for full factorizations
                for x, a in hard:
                    a_cls = sq_class(a, full=True)
                    if a_cls is not None:
                        pool.append(((positives > 0 and a < 0, len(a_cls[1]), abs(a), len(x)), x, a, a_cls))
            pool.sort(key=lambda t: t[0])
            for _, x, a, a_cls in pool[:8]:
                move = _find(amb, a, a_cls, height_bound, rng)
                if move is not None:
                    best = (None, x, a, a_cls, move)
                    break
        if best is None:
            entry = pool[0][2] if pool else None
            raise SearchExhausted(
                f"entry {entry} (vector {len(xs) + 1} of {V.n}) not found in the orthogonal "
                f"complement of rank {len(amb.slots)} with height <= {height_bound}",
                height_bound=height_bound, entry=entry)
        refreshed = False
        _, x, a, a_cls, move = best
        ys.append(amb.combine(move))
        amb.consume(move, a, a_cls)
        xs.append(rem.split_off(x, a))
        positives -= a > 0
    # rows xs are an orthogonal basis X of V and ys their images; B = X^{-1} Y
    b = matmul(inverse(xs), ys)
    assert gram_of_rows(b, W.gram) == [list(r) for r in V.gram], "embedding failed the exact Gram check"
    return b
