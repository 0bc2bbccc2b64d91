"""Exact linear algebra over rationals.

Matrices are immutable tuples of row tuples of ``fractions.Fraction``.
Everything here is small (d <= 4 in practice), so plain Gaussian
elimination over exact rationals is both fast enough and certified.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import InvalidInput

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]

_FRAC_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def to_frac(x) -> Fraction:
    """Convert int/str/Fraction to Fraction; floats are rejected to keep
    the exactness contract visible at the boundary."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not _FRAC_RE.match(s):
            raise InvalidInput(f"not a rational literal: {x!r}")
        return Fraction(s)
    raise InvalidInput(f"expected exact rational, got {type(x).__name__}: {x!r}")


def frac_str(x: Fraction) -> str:
    return str(x)


def vec(entries) -> Vec:
    return tuple(to_frac(e) for e in entries)


def mat(rows) -> Mat:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise InvalidInput("ragged matrix")
    return m


def identity(d: int) -> Mat:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d)
    )


def zeros_vec(d: int) -> Vec:
    return tuple(Fraction(0) for _ in range(d))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Mat, v: Vec) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(x - y for x, y in zip(u, v))


def vec_neg(u: Vec) -> Vec:
    return tuple(-x for x in u)


def vec_scale(c, u: Vec) -> Vec:
    c = to_frac(c)
    return tuple(c * x for x in u)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum(x * y for x, y in zip(u, v))


def mat_scale(c, m: Mat) -> Mat:
    c = to_frac(c)
    return tuple(tuple(c * x for x in row) for row in m)


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def det(m: Mat) -> Fraction:
    d = len(m)
    rows = [list(r) for r in m]
    result = Fraction(1)
    for col in range(d):
        pivot = next((r for r in range(col, d) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        result *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, d):
            f = rows[r][col] * inv
            if f:
                for c in range(col, d):
                    rows[r][c] -= f * rows[col][c]
    return result


def inverse(m: Mat) -> Mat:
    d = len(m)
    aug = [list(r) + [Fraction(1 if i == j else 0) for j in range(d)]
           for i, r in enumerate(m)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[d:]) for row in aug)


def rref(m: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form; returns (R, pivot_columns)."""
    if not m:
        return (), ()
    rows = [list(r) for r in m]
    nr, nc = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pivot = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots)


def kernel_basis(m: Mat) -> list[Vec]:
    """Basis of the rational null space, deterministic ordering."""
    if not m:
        return []
    nc = len(m[0])
    red, pivots = rref(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve(a: Mat, b: Vec) -> Vec | None:
    """One particular rational solution of a x = b, or None if inconsistent."""
    if not a:
        return () if all(x == 0 for x in b) else None
    nc = len(a[0])
    aug = mat(tuple(tuple(row) + (bi,) for row, bi in zip(a, b)))
    red, pivots = rref(aug)
    if nc in pivots:
        return None
    x = [Fraction(0)] * nc
    for r, p in enumerate(pivots):
        x[p] = red[r][nc]
    return tuple(x)


def is_integer_vec(v: Vec) -> bool:
    return all(x.denominator == 1 for x in v)


def is_integer_mat(m: Mat) -> bool:
    return all(x.denominator == 1 for row in m for x in row)


def gram(basis_cols: Mat) -> Mat:
    """Gram matrix B^T B where the columns of the argument generate."""
    bt = transpose(basis_cols)
    return mat_mul(bt, basis_cols)


def charpoly(m: Mat) -> list[Fraction]:
    """Characteristic polynomial det(xI - m) via Faddeev-LeVerrier.

    Returns coefficients [c_0, ..., c_d] with c_d = 1, ascending powers.
    """
    d = len(m)
    coeffs = [Fraction(0)] * (d + 1)
    coeffs[d] = Fraction(1)
    mk = identity(d)
    for k in range(1, d + 1):
        mk = mat_mul(m, mk)
        trace = sum(mk[i][i] for i in range(d))
        c = -trace / k
        coeffs[d - k] = c
        if k < d:
            mk = mat_add(mk, mat_scale(c, identity(d)))
    return coeffs


def rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of a rational-coefficient polynomial, ascending."""
    scale = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    ints = [int(c * scale) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    if not ints:
        return []
    zero_root = []
    while ints[0] == 0:
        zero_root = [Fraction(0)]
        ints.pop(0)
    a0, an = abs(ints[0]) if ints else 0, abs(ints[-1])

    def divisors(n):
        out = set()
        for i in range(1, int(math.isqrt(n)) + 1):
            if n % i == 0:
                out.add(i)
                out.add(n // i)
        return sorted(out)

    roots = set(zero_root)
    if ints and a0:
        for p in divisors(a0):
            for q in divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if sum(c * cand ** k for k, c in enumerate(ints)) == 0:
                        roots.add(cand)
    return sorted(roots)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def hnf_columns(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite reduction of an integer matrix.

    Returns (H, U) with A U = H, U unimodular, and H in column echelon form
    (pivots positive, zero columns last).  The nonzero columns of H are a
    basis of the column Z-span of A.
    """
    nr = len(a)
    nc = len(a[0]) if nr else 0
    h = [row[:] for row in a]
    u = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def colop(j, k, x, y, z, w):
        # (col_j, col_k) <- (x col_j + y col_k, z col_j + w col_k)
        for i in range(nr):
            h[i][j], h[i][k] = x * h[i][j] + y * h[i][k], z * h[i][j] + w * h[i][k]
        for i in range(nc):
            u[i][j], u[i][k] = x * u[i][j] + y * u[i][k], z * u[i][j] + w * u[i][k]

    piv = 0
    for row in range(nr):
        if piv == nc:
            break
        nz = [j for j in range(piv, nc) if h[row][j] != 0]
        if not nz:
            continue
        j0 = nz[0]
        for j in nz[1:]:
            g, x, y = _xgcd(h[row][j0], h[row][j])
            # unimodular combine: det of [[x, -b/g], [y, a/g]] is 1
            colop(j0, j, x, y, -(h[row][j] // g), h[row][j0] // g)
        if j0 != piv:
            colop(piv, j0, 0, 1, 1, 0)
        if h[row][piv] < 0:
            for i in range(nr):
                h[i][piv] = -h[i][piv]
            for i in range(nc):
                u[i][piv] = -u[i][piv]
        piv += 1
    return h, u


def integer_combination_in_span(m: Mat, target: Vec) -> Vec | None:
    """Integer coefficients z with m z = target (m rational), or None.

    Decides membership of ``target`` in the group generated over the
    integers by the columns of ``m``.
    """
    nr = len(m)
    nc = len(m[0]) if nr else 0
    if nr == 0 or nc == 0:
        return zeros_vec(nc) if all(x == 0 for x in target) else None
    denoms = [x.denominator for row in m for x in row] + [x.denominator for x in target]
    scale = math.lcm(*denoms) if denoms else 1
    a = [[int(x * scale) for x in row] for row in m]
    w = [int(x * scale) for x in target]
    h, u = hnf_columns(a)
    pivot_row = []
    for j in range(nc):
        rows_nz = [i for i in range(nr) if h[i][j] != 0]
        pivot_row.append(rows_nz[0] if rows_nz else None)
    z = [0] * nc
    residue = w[:]
    for j in range(nc):
        r = pivot_row[j]
        if r is None:
            continue
        if residue[r] % h[r][j] != 0:
            return None
        q = residue[r] // h[r][j]
        z[j] = q
        for i in range(nr):
            residue[i] -= q * h[i][j]
    if any(residue):
        return None
    coeffs = [sum(u[i][j] * z[j] for j in range(nc)) for i in range(nc)]
    return tuple(Fraction(c) for c in coeffs)


def projection_onto_columns(cols: Mat) -> Mat:
    """Orthogonal projection onto the column span, exact rational."""
    if not cols or not cols[0]:
        raise InvalidInput("empty projection basis")
    g = mat_mul(transpose(cols), cols)
    try:
        ginv = inverse(g)
    except ZeroDivisionError:
        raise InvalidInput("projection basis is not linearly independent")
    return mat_mul(mat_mul(cols, ginv), transpose(cols))


def columns(m: Mat) -> list[Vec]:
    return [tuple(row[j] for row in m) for j in range(len(m[0]))] if m else []


def from_columns(cols: list[Vec]) -> Mat:
    return tuple(tuple(col[i] for col in cols) for i in range(len(cols[0])))


def mat_to_strs(m: Mat) -> list[list[str]]:
    return [[frac_str(x) for x in row] for row in m]


def mat_from_strs(rows) -> Mat:
    return mat(rows)


def vec_to_strs(v: Vec) -> list[str]:
    return [frac_str(x) for x in v]


def floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0, exact."""
    if x < 0:
        raise InvalidInput("negative radicand")
    p, q = x.numerator, x.denominator
    return math.isqrt(p * q) // q
