"""Lattice primitives: duals, certified short-vector enumeration,
covering radii, and sublattice chains.

Bases are exact rational matrices whose *columns* generate the lattice.
Norm comparisons and enumeration bounds are exact; floating point enters
only in the covering-radius search.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import ratmat as rm
from .errors import (EnumerationOverflow, InvalidInput, InvalidLattice,
                     Unsupported)

DEFAULT_VECTOR_LIMIT = 200_000
DEFAULT_SUBLATTICE_LIMIT = 100_000


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice in R^d; ``basis`` columns are the generators."""

    basis: rm.Mat

    def __post_init__(self):
        d = len(self.basis)
        if d == 0 or any(len(row) != d for row in self.basis):
            raise InvalidLattice("basis must be a nonempty square matrix")
        if rm.det(self.basis) == 0:
            raise InvalidLattice("basis matrix is singular")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def covolume(self) -> Fraction:
        return abs(rm.det(self.basis))

    def gram(self) -> rm.Mat:
        return rm.gram(self.basis)

    def basis_inverse(self) -> rm.Mat:
        return _basis_inverse(self)

    def contains(self, v: rm.Vec) -> bool:
        return rm.is_integer_vec(rm.mat_vec(self.basis_inverse(), v))

    def to_ambient(self, coords) -> rm.Vec:
        return rm.mat_vec(self.basis, rm.vec(coords))

    def scaled(self, c) -> "Lattice":
        return Lattice(rm.mat_scale(c, self.basis))

    def transformed(self, a: rm.Mat) -> "Lattice":
        return Lattice(rm.mat_mul(a, self.basis))

    def to_json(self) -> dict:
        return {"dim": self.dim, "basis": rm.mat_to_strs(self.basis)}

    @classmethod
    def from_json(cls, obj: dict) -> "Lattice":
        basis = rm.mat(obj["basis"])
        if "dim" in obj and int(obj["dim"]) != len(basis):
            raise InvalidLattice("dim field disagrees with basis shape")
        return cls(basis)

    @classmethod
    def standard(cls, d: int) -> "Lattice":
        return cls(rm.identity(d))


@lru_cache(maxsize=256)
def _basis_inverse(lat: Lattice) -> rm.Mat:
    return rm.inverse(lat.basis)


def dual(lat: Lattice) -> Lattice:
    """Dual lattice, basis (B^T)^{-1}; covolumes multiply to 1."""
    try:
        return Lattice(rm.inverse(rm.transpose(lat.basis)))
    except ZeroDivisionError as exc:  # pragma: no cover - caught at init
        raise InvalidLattice("singular basis") from exc


def same_point_set(a: Lattice, b: Lattice) -> bool:
    """True iff the two bases generate the same set of points."""
    if a.dim != b.dim:
        return False
    m1 = rm.mat_mul(a.basis_inverse(), b.basis)
    m2 = rm.mat_mul(b.basis_inverse(), a.basis)
    return rm.is_integer_mat(m1) and rm.is_integer_mat(m2)


# ---------------------------------------------------------------------------
# short vectors


@dataclass(frozen=True)
class ShortVectorList:
    """Certified-complete list of nonzero lattice vectors with
    squared norm <= radius_sq, as integer coordinates w.r.t. the basis."""

    radius_sq: Fraction
    vectors: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __len__(self):
        return len(self.vectors)

    def coordinates(self):
        return [v for v, _ in self.vectors]

    def norms(self):
        return [n for _, n in self.vectors]


def _ldl(gram: rm.Mat) -> tuple[list[Fraction], list[list[Fraction]]]:
    """G = L^T D L with L unit upper triangular; requires G positive
    definite, which holds for any invertible real basis."""
    d = len(gram)
    dd = [Fraction(0)] * d
    ll = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        acc = gram[i][i] - sum(dd[m] * ll[m][i] ** 2 for m in range(i))
        if acc <= 0:
            raise InvalidLattice("Gram matrix not positive definite")
        dd[i] = acc
        ll[i][i] = Fraction(1)
        for j in range(i + 1, d):
            num = gram[i][j] - sum(dd[m] * ll[m][i] * ll[m][j] for m in range(i))
            ll[i][j] = num / acc
    return dd, ll


def enumerate_short_vectors(lat: Lattice, radius_sq,
                            max_count: int = DEFAULT_VECTOR_LIMIT) -> ShortVectorList:
    """All nonzero lattice vectors with squared norm <= radius_sq.

    Fincke-Pohst style coordinate bounding on the exact Gram matrix, so the
    returned list is complete by construction.  Sorted by (norm, coords).
    """
    radius_sq = rm.to_frac(radius_sq)
    if radius_sq < 0:
        raise InvalidInput("radius_sq must be >= 0")
    d = lat.dim
    dd, ll = _ldl(lat.gram())
    out = []

    def descend(level: int, remaining: Fraction, partial: list[int]):
        # quadratic form: sum_i dd[i] * (z_i + sum_{j>i} ll[i][j] z_j)^2
        center = -sum(ll[level][j] * partial[j] for j in range(level + 1, d))
        z0 = math.floor(center)
        for z in _integers_outward(z0, center, dd[level], remaining):
            used = dd[level] * (Fraction(z) - center) ** 2
            rem = remaining - used
            partial[level] = z
            if level == 0:
                coords = tuple(partial)
                if any(coords):
                    out.append((coords, radius_sq - rem))
                    if len(out) > max_count:
                        raise EnumerationOverflow(
                            f"more than {max_count} vectors below radius")
            else:
                descend(level - 1, rem, partial)
        partial[level] = 0

    def _integers_outward(z0, center, weight, budget):
        # contiguous range of z with weight*(z-center)^2 <= budget
        zs = []
        z = z0
        while weight * (Fraction(z) - center) ** 2 <= budget:
            zs.append(z)
            z -= 1
        z = z0 + 1
        while weight * (Fraction(z) - center) ** 2 <= budget:
            zs.append(z)
            z += 1
        return zs

    descend(d - 1, radius_sq, [0] * d)
    out.sort(key=lambda t: (t[1], t[0]))
    return ShortVectorList(radius_sq, tuple(out))


# ---------------------------------------------------------------------------
# covering radius


def _gram_is_diagonal(g: rm.Mat) -> bool:
    return all(g[i][j] == 0 for i in range(len(g)) for j in range(len(g)) if i != j)


def covering_radius(lat: Lattice, tolerance: float = 1e-6,
                    cell_budget: int = 500_000) -> float:
    """Maximal distance from a point of R^d to the lattice, within tolerance.

    Exact closed form for orthogonal bases (half the box diagonal);
    otherwise adaptive refinement over the fundamental parallelepiped
    with a Lipschitz bound on the distance function.
    """
    if lat.dim > 4:
        raise Unsupported("covering_radius supports d <= 4")
    if tolerance <= 0:
        raise InvalidInput("tolerance must be positive")
    g = lat.gram()
    if _gram_is_diagonal(g):
        return math.sqrt(sum(float(g[i][i]) for i in range(lat.dim))) / 2

    d = lat.dim
    bf = [[float(x) for x in row] for row in lat.basis]
    dd, ll = _ldl(g)
    ddf = [float(x) for x in dd]
    llf = [[float(x) for x in row] for row in ll]

    def _qform(z, y):
        total = 0.0
        for i in range(d):
            inner = (z[i] - y[i]) + sum(
                llf[i][j] * (z[j] - y[j]) for j in range(i + 1, d))
            total += ddf[i] * inner * inner
        return total

    def dist_sq(y: list[float]) -> float:
        # closest-vector enumeration on the quadratic form, centered at y,
        # with an initial bound from Babai rounding
        zb = [0] * d
        for i in range(d - 1, -1, -1):
            c = y[i] - sum(llf[i][j] * (zb[j] - y[j]) for j in range(i + 1, d))
            zb[i] = round(c)
        best = [_qform(zb, y) + 1e-12]

        def rec(level: int, acc: float, partial: list[int]):
            center = y[level] - sum(
                llf[level][j] * (partial[j] - y[j]) for j in range(level + 1, d))
            z0 = math.floor(center)
            for direction in (0, 1):
                z = z0 + direction
                step = 1 if direction else -1
                while True:
                    used = ddf[level] * (z - center) ** 2
                    if acc + used > best[0]:
                        break
                    partial[level] = z
                    if level == 0:
                        best[0] = min(best[0], acc + used)
                    else:
                        rec(level - 1, acc + used, partial)
                    z += step

        rec(d - 1, 0.0, [0] * d)
        return max(best[0], 0.0)

    # half-diameter of a coordinate cell of half-width h (ambient metric)
    corner_norms = []
    for signs in itertools.product((-1.0, 1.0), repeat=d):
        v = [sum(bf[i][j] * signs[j] for j in range(d)) for i in range(d)]
        corner_norms.append(math.sqrt(sum(x * x for x in v)))
    rho = max(corner_norms)  # cell radius = h * rho for half-width h

    # max-heap of (upper bound, center coords, half width)
    start = [0.5] * d
    f0 = math.sqrt(dist_sq(start))
    heap = [(-(f0 + 0.5 * rho), tuple(start), 0.5)]
    lower = f0
    evals = 1
    while heap:
        neg_ub, center, h = heapq.heappop(heap)
        ub = -neg_ub
        if ub <= lower + tolerance * 0.9:
            return (lower + ub) / 2
        h2 = h / 2
        for offs in itertools.product((-h2, h2), repeat=d):
            c = tuple(center[i] + offs[i] for i in range(d))
            f = math.sqrt(dist_sq(list(c)))
            evals += 1
            if evals > cell_budget:
                raise EnumerationOverflow(
                    "covering-radius refinement budget exceeded; "
                    "loosen the tolerance")
            if f > lower:
                lower = f
            child_ub = f + h2 * rho
            if child_ub > lower + tolerance * 0.5:
                heapq.heappush(heap, (-child_ub, c, h2))
    return lower


def covering_radius_sq_exact(lat: Lattice) -> Fraction | None:
    """Exact squared covering radius when the basis is orthogonal."""
    g = lat.gram()
    if _gram_is_diagonal(g):
        return sum((g[i][i] for i in range(lat.dim)), Fraction(0)) / 4
    return None


# ---------------------------------------------------------------------------
# sublattices


def _diagonal_tuples(k: int, d: int):
    """All (d1..dd) of positive integers with product k, lexicographic."""
    if d == 1:
        yield (k,)
        return
    for first in sorted(_divisors(k)):
        for rest in _diagonal_tuples(k // first, d - 1):
            yield (first,) + rest


def _divisors(n: int) -> list[int]:
    out = set()
    for i in range(1, int(math.isqrt(n)) + 1):
        if n % i == 0:
            out.add(i)
            out.add(n // i)
    return sorted(out)


def _hnf_matrices(k: int, d: int):
    """Upper-triangular Hermite forms of determinant k, lexicographic.

    Convention: H[i][i] = d_i, off-diagonal entries H[i][j] for j > i run
    over 0 <= H[i][j] < d_i.  Each matrix selects a distinct sublattice.
    """
    positions = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for diag in _diagonal_tuples(k, d):
        ranges = [range(diag[i]) for i, _ in positions]
        for offs in itertools.product(*ranges):
            h = [[0] * d for _ in range(d)]
            for i in range(d):
                h[i][i] = diag[i]
            for (i, j), v in zip(positions, offs):
                h[i][j] = v
            yield rm.mat(h)


def sublattices_of_index(lat: Lattice, k: int,
                         max_count: int = DEFAULT_SUBLATTICE_LIMIT) -> list[Lattice]:
    """All sublattices of index k via Hermite-normal-form enumeration."""
    if k < 1:
        raise InvalidInput("index must be >= 1")
    out = []
    for h in _hnf_matrices(k, lat.dim):
        out.append(Lattice(rm.mat_mul(lat.basis, h)))
        if len(out) > max_count:
            raise EnumerationOverflow(
                f"more than {max_count} sublattices of index {k}")
    return out


def first_sublattice_of_index(lat: Lattice, k: int) -> Lattice:
    """Deterministic choice: the lexicographically first Hermite form,
    which is diag(1, .., 1, k) with zero off-diagonal entries."""
    h = next(_hnf_matrices(k, lat.dim))
    return Lattice(rm.mat_mul(lat.basis, h))


def nested_chain(lat: Lattice, degrees: list[int]) -> list[Lattice]:
    """Strictly nested chain starting at ``lat``; step j has index degrees[j]."""
    if not degrees:
        raise InvalidInput("degrees must be nonempty")
    if any(int(x) < 2 for x in degrees):
        raise InvalidInput("every chain degree must be >= 2")
    chain = [lat]
    for k in degrees:
        chain.append(first_sublattice_of_index(chain[-1], int(k)))
    return chain
