"""Exact matrix routines over Z and Q.

Matrices are plain lists of rows holding ``int`` or ``Fraction`` entries.
Nothing here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .errors import InvalidInput


def to_fractions(m):
    return [[Fraction(x) for x in row] for row in m]


def identity(n, one=1):
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v, m):
    return [sum(v[i] * m[i][j] for i in range(len(v))) for j in range(len(m[0]))]


def bilinear(u, g, v):
    """u^T G v for row vectors u, v."""
    total = 0
    for i, ui in enumerate(u):
        if ui:
            row = g[i]
            total += ui * sum(row[j] * v[j] for j in range(len(v)) if v[j])
    return total


def congruence(x, g):
    """X G X^T."""
    return matmul(matmul(x, g), transpose(x))


def gram_of_rows(rows, g):
    """B G B^T for rational rows B, computed over Z after clearing denominators."""
    dens = []
    ints = []
    for row in rows:
        d = 1
        for x in row:
            d = lcm(d, Fraction(x).denominator)
        dens.append(d)
        ints.append([int(Fraction(x) * d) for x in row])
    gi = [[int(x) for x in r] for r in g] if all(Fraction(x).denominator == 1 for r in g for x in r) else None
    if gi is None:
        return congruence([list(map(Fraction, r)) for r in rows], g)
    n = len(gi)
    sparse = [[(j, x) for j, x in enumerate(r) if x] for r in gi]
    bg = []
    for r in ints:
        acc = [0] * n
        for k, rk in enumerate(r):
            if rk:
                for j, x in sparse[k]:
                    acc[j] += rk * x
        bg.append(acc)
    return [
        [Fraction(sum(a * b for a, b in zip(bg[i], ints[j])), dens[i] * dens[j]) for j in range(len(rows))]
        for i in range(len(rows))
    ]


def is_symmetric(m):
    n = len(m)
    return all(len(r) == n for r in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i)
    )


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            out[k + i][k : k + len(row)] = row
        k += len(b)
    return out


def clear_denominators(rows):
    """Scale each row by the lcm of its denominators; returns integer rows."""
    out = []
    for row in rows:
        d = 1
        for x in row:
            d = lcm(d, Fraction(x).denominator)
        out.append([int(Fraction(x) * d) for x in row])
    return out


def primitive_row(row):
    """Integer multiple of ``row`` with content 1 (sign of first nonzero kept)."""
    (ints,) = clear_denominators([row])
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


def det_bareiss(m) -> int | Fraction:
    """Determinant by fraction-free elimination.

    Integer input stays integral throughout; rational input is scaled to
    integers first.
    """
    n = len(m)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) and x.denominator != 1 for row in m for x in row):
        scale = 1
        rows = []
        for row in m:
            d = 1
            for x in row:
                d = lcm(d, Fraction(x).denominator)
            scale *= d
            rows.append([int(Fraction(x) * d) for x in row])
        return Fraction(det_bareiss(rows), scale)
    a = [[int(x) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rref(m):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = to_fractions(m)
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a[:r], pivots


def rank(m) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m, ncols=None):
    """Basis (as rows) of {v : M v = 0} over Q."""
    ncols = ncols if ncols is not None else (len(m[0]) if m else 0)
    if not m:
        return identity(ncols, Fraction(1))
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_left(rows, targets):
    """Coefficients c with c · rows = t for each target row t (rows independent)."""
    # Solve rows^T c^T = t^T.
    rt = transpose(to_fractions(rows))
    k = len(rows)
    out = []
    for t in targets:
        aug = [r + [Fraction(x)] for r, x in zip(rt, t)]
        red, pivots = rref(aug)
        if k in pivots:
            raise InvalidInput("target not in the row space")
        c = [Fraction(0)] * k
        for row, pc in zip(red, pivots):
            c[pc] = row[k]
        out.append(c)
    return out


def inverse(m):
    n = len(m)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(to_fractions(m))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise InvalidInput("singular matrix")
    return [row[n:] for row in red]


def _xgcd(a, b):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def column_echelon(a):
    """Unimodular column reduction A U = [H | 0].

    Returns (H, U, r) where r is the rank; the last ``ncols - r`` columns of
    U form a basis of the integer kernel of A.
    """
    a = [[int(x) for x in row] for row in a]
    m = len(a)
    n = len(a[0]) if a else 0
    u = identity(n)
    r = 0
    for i in range(m):
        if r == n:
            break
        for j in range(r + 1, n):
            if a[i][j] == 0:
                continue
            x, y = a[i][r], a[i][j]
            g, s, t = _xgcd(x, y)
            p, q = x // g, y // g
            # columns (r, j) <- (s c_r + t c_j, -q c_r + p c_j); det = s p + t q = 1
            for mat in (a, u):
                for row in mat:
                    cr, cj = row[r], row[j]
                    row[r] = s * cr + t * cj
                    row[j] = -q * cr + p * cj
        if a[i][r] != 0:
            if a[i][r] < 0:
                for mat in (a, u):
                    for row in mat:
                        row[r] = -row[r]
            r += 1
    return a, u, r


def integer_kernel(a, ncols=None):
    """Basis (as rows) of the saturated lattice {x in Z^n : A x = 0}."""
    n = ncols if ncols is not None else len(a[0])
    if not a:
        return identity(n)
    _, u, r = column_echelon(a)
    return [[u[i][j] for i in range(n)] for j in range(r, n)]


def lll_rows(rows, weights=None):
    """LLL-reduced basis (delta = 3/4) of the lattice spanned by independent
    integer rows, for the dot product weighted by positive integer ``weights``.

    Integral version of the algorithm (Cohen, Alg. 2.6.7): all Gram-Schmidt
    data are kept as integers d_i and lambda_ij, so no rationals appear.
    """
    b = [[int(x) for x in r] for r in rows]
    n = len(b)
    if n <= 1:
        return b
    w = [1] * len(b[0]) if weights is None else [int(x) for x in weights]

    def dot(u, v):
        return sum(x * y * c for x, y, c in zip(u, v, w) if x and y)

    d = [1] + [0] * n  # d[i] for the first i vectors
    lam = [[0] * n for _ in range(n)]
    d[1] = dot(b[0], b[0])

    def red(k, l):  # 0-based k, l
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (B * t + mu * lam[i][k]) // d[k + 1]
        d[k] = B

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise InvalidInput("rows are linearly dependent")
                    d[k + 1] = u
        red(k, k - 1)
        if 4 * d[k + 1] * d[k - 1] < 3 * d[k] * d[k] - 4 * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


def hermite_rows(rows):
    """Row Hermite normal form of an integer matrix with independent rows.

    Pivots positive, entries above each pivot reduced into [0, pivot).
    """
    return _reduce_echelon([[int(x) for x in row] for row in rows])


def _reduce_echelon(basis):
    basis = [row[:] for row in basis]
    n = len(basis[0]) if basis else 0
    out = []
    col = 0
    remaining = basis
    while remaining and col < n:
        # gcd-combine all rows on column col
        nz = [r for r in remaining if r[col] != 0]
        z = [r for r in remaining if r[col] == 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                (new if r2[col] != 0 else z).append(r2)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, prev in enumerate(out):
            q = prev[col] // piv[col]
            if q:
                out[k] = [x - q * y for x, y in zip(prev, piv)]
        out.append(piv)
        remaining = [r for r in z if any(r)]
        col += 1
    return out


def smith_invariants(a):
    """Invariant factors d_1 | d_2 | ... of a square integer matrix (zeros last)."""
    m = [[int(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        m[t], m[i] = m[i], m[t]
        for row in m:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = m[t][t]
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // p
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                    if m[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // p
                    for row in m:
                        row[j] -= q * row[t]
                    if m[t][j]:
                        done = False
            if done:
                # divisibility condition on the rest of the block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
                continue
            # move the smallest entry of row/col t to the pivot
            best = (t, t)
            for i in range(t, rows):
                if m[i][t] and abs(m[i][t]) < abs(m[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, cols):
                if m[t][j] and abs(m[t][j]) < abs(m[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            m[t], m[i] = m[i], m[t]
            for row in m:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(m[t][t]))
        t += 1
    return diag + [0] * (min(rows, cols) - len(diag))
