"""Weight-two Hodge structures of K3 type given by a period vector.

A period is ``omega = x + sqrt(-d) * y`` with ``x, y`` vectors over a totally
real field ``K0 = Q(alpha)`` and ``d`` totally positive in ``K0`` (exact mode),
or ``omega = x + i y`` with rational ``x, y`` and a tolerance (approximate
mode).  Elements of ``K0`` are tuples of rationals ``(c0, c1, ...)`` meaning
``c0 + c1 alpha + ...``, always reduced modulo the minimal polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sympy import Poly, QQ, Symbol

from .errors import DegenerateSplit, DimensionMismatch, InvalidInput, SignatureError
from .linalg import nullspace, primitive_row, rank, solve_left
from .quadform import QuadSpace, signature

_T = Symbol("t")

DEFAULT_TAU = Fraction(1, 10**12)


@dataclass(frozen=True)
class RealField:
    """Q(alpha) for the unique root alpha of ``min_poly`` inside ``interval``.

    ``min_poly`` lists rational coefficients from the leading one down.
    """

    min_poly: tuple
    interval: tuple

    def __init__(self, min_poly, interval):
        coeffs = tuple(Fraction(c) for c in min_poly)
        if len(coeffs) < 2 or coeffs[0] == 0:
            raise InvalidInput("minimal polynomial must have degree >= 1")
        coeffs = tuple(c / coeffs[0] for c in coeffs)
        lo, hi = (Fraction(t) for t in interval)
        if lo > hi:
            raise InvalidInput("isolating interval must satisfy lo <= hi")
        poly = Poly(list(coeffs), _T, domain=QQ)
        if not poly.is_irreducible:
            raise InvalidInput("minimal polynomial must be irreducible over Q")
        if poly.count_roots(lo, hi) != 1:
            raise InvalidInput("interval must isolate exactly one real root")
        object.__setattr__(self, "min_poly", coeffs)
        object.__setattr__(self, "interval", (lo, hi))

    @classmethod
    def rationals(cls) -> "RealField":
        return cls((1, 0), (0, 0))

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    def poly(self) -> Poly:
        return Poly(list(self.min_poly), _T, domain=QQ)

    # -- element arithmetic ------------------------------------------------
    def reduce(self, coeffs) -> tuple:
        c = [Fraction(x) for x in coeffs]
        n = self.degree
        # x^n = -(m_1 x^{n-1} + ... + m_n) with min_poly monic
        tail = self.min_poly[1:]
        for k in range(len(c) - 1, n - 1, -1):
            top = c[k]
            if top:
                for j, m in enumerate(tail, start=1):
                    c[k - j] -= top * m
            c[k] = Fraction(0)
        c = c[:n] + [Fraction(0)] * max(0, n - len(c))
        return tuple(c)

    def element(self, value) -> tuple:
        if isinstance(value, (list, tuple)):
            return self.reduce(value)
        return self.reduce([value])

    def add(self, a, b) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, r, a) -> tuple:
        return tuple(Fraction(r) * x for x in a)

    def mul(self, a, b) -> tuple:
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self.reduce(out)

    def zero(self) -> tuple:
        return (Fraction(0),) * self.degree

    def is_zero(self, a) -> bool:
        return not any(a)


def _eval(coeffs, t: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * t + c
    return total


def eval_sign(K: RealField, e) -> int:
    """Sign of ``e`` at the designated real embedding of ``K``.

    Zero is detected exactly.  Otherwise the isolating interval is bisected,
    keeping the half with one Sturm root of the minimal polynomial, until
    ``e`` (as a polynomial in ``alpha``) has no root on it; its sign is then
    constant there.
    """
    e = K.element(e)
    if K.is_zero(e):
        return 0
    if K.degree == 1:
        return 1 if e[0] > 0 else -1
    m = K.poly()
    f = Poly(list(reversed(e)), _T, domain=QQ)
    lo, hi = K.interval
    while True:
        if f.count_roots(lo, hi) == 0:
            v = _eval(e, lo)
            return 1 if v > 0 else -1
        mid = (lo + hi) / 2
        if _eval(list(reversed(K.min_poly)), mid) == 0:
            # alpha is rational after all; cannot happen for irreducible degree > 1
            v = _eval(e, mid)
            return (v > 0) - (v < 0)
        if m.count_roots(lo, mid) == 1:
            hi = mid
        else:
            lo = mid


def refine(K: RealField, steps: int = 1) -> RealField:
    """Same field with the isolating interval halved ``steps`` times."""
    lo, hi = K.interval
    m = K.poly()
    for _ in range(steps):
        mid = (lo + hi) / 2
        if m.count_roots(lo, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return RealField(K.min_poly, (lo, hi))


@dataclass(frozen=True)
class PeriodVector:
    mode: str
    x: tuple
    y: tuple
    field: RealField | None = None
    d: tuple | None = None
    tau: Fraction | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "approx"):
            raise InvalidInput("mode must be 'exact' or 'approx'")
        if len(self.x) != len(self.y):
            raise DimensionMismatch("x and y must have the same length")
        if self.mode == "exact":
            K = self.field
            if K is None or self.d is None:
                raise InvalidInput("exact mode needs a field and d")
            if K.is_zero(self.d):
                raise InvalidInput("d must be nonzero")
        elif self.tau is None or self.tau < 0:
            raise InvalidInput("approximate mode needs a tolerance tau >= 0")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def exact(cls, x, y, d=1, field: RealField | None = None) -> "PeriodVector":
        K = field or RealField.rationals()
        return cls("exact", tuple(K.element(v) for v in x), tuple(K.element(v) for v in y), K, K.element(d))

    @classmethod
    def approx(cls, x, y, tau=DEFAULT_TAU) -> "PeriodVector":
        return cls("approx", tuple(Fraction(v) for v in x), tuple(Fraction(v) for v in y), tau=Fraction(tau))

    def components(self) -> list:
        """Rational vectors whose Q-span is the smallest rational subspace containing Re and Im."""
        if self.mode == "approx":
            return [list(self.x), list(self.y)]
        deg = self.field.degree
        return [[v[k] for v in vec] for vec in (self.x, self.y) for k in range(deg)]

    def transform(self, m) -> "PeriodVector":
        """Coordinates after the linear change ``v -> v m`` (m rational, n x n')."""

        def apply(vec):
            if self.mode == "approx":
                return tuple(sum(vec[i] * m[i][j] for i in range(len(vec))) for j in range(len(m[0])))
            deg = self.field.degree
            return tuple(
                tuple(sum(vec[i][k] * m[i][j] for i in range(len(vec))) for k in range(deg))
                for j in range(len(m[0]))
            )

        return PeriodVector(self.mode, apply(self.x), apply(self.y), self.field, self.d, self.tau)


@dataclass
class K3TypeReport:
    signature_ok: bool
    isotropy_ok: bool
    positivity_ok: bool
    algebraic_kernel: list
    irreducible: bool
    rho_implied: int
    details: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.signature_ok and self.isotropy_ok and self.positivity_ok


def _pairings(V: QuadSpace, w: PeriodVector):
    """psi(x,x), psi(y,y), psi(x,y) as field elements (or rationals)."""
    if w.mode == "approx":
        return V.q(w.x), V.q(w.y), V.b(w.x, w.y)
    K = w.field
    g = V.gram

    def pair(u, v):
        total = K.zero()
        for i, ui in enumerate(u):
            if K.is_zero(ui):
                continue
            for j, vj in enumerate(v):
                if g[i][j] and not K.is_zero(vj):
                    total = K.add(total, K.scale(g[i][j], K.mul(ui, vj)))
        return total

    return pair(w.x, w.x), pair(w.y, w.y), pair(w.x, w.y)


def algebraic_kernel(V: QuadSpace, w: PeriodVector) -> list:
    """Primitive integral basis of the rational vectors orthogonal to omega."""
    conds = [[sum(V.gram[i][j] * c[j] for j in range(V.n)) for i in range(V.n)] for c in w.components()]
    conds = [c for c in conds if any(c)]
    return [primitive_row(v) for v in nullspace(conds, V.n)]


def _check_dims(V: QuadSpace, w: PeriodVector):
    if w.n != V.n:
        raise DimensionMismatch(f"period has {w.n} coordinates, space has dimension {V.n}")


def validate_k3_type(V: QuadSpace, w: PeriodVector) -> K3TypeReport:
    _check_dims(V, w)
    r, s = signature(V)
    if r != 2:
        raise SignatureError(f"signature ({r}, {s}) is not of the form (2, n - 2)")
    xx, yy, xy = _pairings(V, w)
    if w.mode == "exact":
        K = w.field
        dyy = K.mul(w.d, yy)
        isotropy = K.is_zero(K.add(xx, K.scale(-1, dyy))) and K.is_zero(xy)
        positivity = eval_sign(K, K.add(xx, dyy)) > 0
        d_positive = eval_sign(K, w.d) > 0
        details = {"d_positive": d_positive}
        positivity = positivity and d_positive
    else:
        isotropy = abs(xx - yy) <= w.tau and abs(xy) <= w.tau
        positivity = xx + yy > 0
        details = {}
    kernel = algebraic_kernel(V, w)
    trans = V.n - len(kernel)
    return K3TypeReport(
        signature_ok=True,
        isotropy_ok=isotropy,
        positivity_ok=positivity,
        algebraic_kernel=kernel,
        irreducible=not kernel,
        rho_implied=22 - trans if V.n == 22 else len(kernel),
        details=details,
    )


@dataclass
class Split:
    algebraic: QuadSpace | None
    algebraic_basis: list
    transcendental: QuadSpace
    transcendental_basis: list
    period: PeriodVector


def _independent(rows) -> list:
    out = []
    for row in rows:
        if any(row) and rank(out + [row]) > len(out):
            out.append(row)
    return out


def transcendental_split(V: QuadSpace, w: PeriodVector) -> Split:
    """Orthogonal decomposition V = algebraic + transcendental over Q.

    The transcendental part is the rational span of the coordinates of Re and
    Im of omega; its orthogonal complement is the algebraic kernel.
    """
    report = validate_k3_type(V, w)
    if not (report.isotropy_ok and report.positivity_ok):
        raise DegenerateSplit("period is not of K3 type (isotropy or positivity fails)")
    alg = report.algebraic_kernel
    trans = _independent([primitive_row(c) for c in w.components()])
    if len(alg) + len(trans) != V.n:
        raise DegenerateSplit("algebraic and transcendental parts do not fill the space")
    g_alg = [[V.b(u, v) for v in alg] for u in alg]
    g_tr = [[V.b(u, v) for v in trans] for u in trans]
    assert all(V.b(u, v) == 0 for u in alg for v in trans)
    # positivity puts Re and Im in a positive plane, so the kernel is negative definite
    alg_space = QuadSpace(g_alg) if alg else None
    trans_space = QuadSpace(g_tr)
    period = _rewrite(w, trans)
    xx, yy, xy = _pairings(trans_space, period)
    if period.mode == "exact":
        K = period.field
        assert K.is_zero(K.add(xx, K.scale(-1, K.mul(period.d, yy)))) and K.is_zero(xy)
    return Split(alg_space, alg, trans_space, trans, period)


def _rewrite(w: PeriodVector, basis) -> PeriodVector:
    """omega expressed in coordinates of ``basis`` (rows spanning a subspace containing it)."""
    comps = w.components()
    coeffs = solve_left(basis, comps)
    k = len(basis)
    if w.mode == "approx":
        return PeriodVector("approx", tuple(coeffs[0]), tuple(coeffs[1]), tau=w.tau)
    deg = w.field.degree
    x = tuple(tuple(coeffs[c][j] for c in range(deg)) for j in range(k))
    y = tuple(tuple(coeffs[deg + c][j] for c in range(deg)) for j in range(k))
    return PeriodVector("exact", x, y, w.field, w.d)
