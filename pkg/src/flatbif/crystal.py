"""Exact algebra of crystallographic groups.

A group of rigid motions is stored as its translation lattice plus a
finite list of affine coset representatives (B_i, v_i), B_0 = I, v_0 = 0.
Translations are normalized into the half-open fundamental cell so that
equality checks are canonical.  All checks are exact rational linear
algebra; nothing here touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import ratmat as rm
from .errors import (InvalidGroup, InvalidInput, IrreducibleUnexpected,
                     NotIsometricAction)
from .lattices import Lattice


@dataclass(frozen=True)
class AffineMap:
    """Rigid motion (A, v): x -> A x + v."""

    linear: rm.Mat
    translation: rm.Vec

    def __post_init__(self):
        d = len(self.linear)
        if any(len(row) != d for row in self.linear) or len(self.translation) != d:
            raise InvalidInput("affine map shape mismatch")

    @property
    def dim(self) -> int:
        return len(self.linear)

    def compose(self, other: "AffineMap") -> "AffineMap":
        # (A, v)(B, w) = (AB, Aw + v)
        return AffineMap(
            rm.mat_mul(self.linear, other.linear),
            rm.vec_add(rm.mat_vec(self.linear, other.translation), self.translation),
        )

    def inverse(self) -> "AffineMap":
        ainv = rm.inverse(self.linear)
        return AffineMap(ainv, rm.vec_neg(rm.mat_vec(ainv, self.translation)))

    def apply(self, x: rm.Vec) -> rm.Vec:
        return rm.vec_add(rm.mat_vec(self.linear, x), self.translation)

    def is_orthogonal(self) -> bool:
        return rm.gram(self.linear) == rm.identity(self.dim)

    def is_identity_linear(self) -> bool:
        return self.linear == rm.identity(self.dim)

    def to_json(self) -> dict:
        return {
            "linear": rm.mat_to_strs(self.linear),
            "translation": rm.vec_to_strs(self.translation),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AffineMap":
        return cls(rm.mat(obj["linear"]), rm.vec(obj["translation"]))


def _reduce_mod_lattice(lat: Lattice, v: rm.Vec) -> rm.Vec:
    coords = rm.mat_vec(lat.basis_inverse(), v)
    frac = tuple(c - math.floor(c) for c in coords)
    return rm.mat_vec(lat.basis, frac)


@dataclass(frozen=True)
class CrystalGroup:
    """Translation lattice plus holonomy coset representatives."""

    lattice: Lattice
    holonomy: tuple[AffineMap, ...]

    def __post_init__(self):
        d = self.lattice.dim
        reps = list(self.holonomy)
        if not reps:
            reps = [AffineMap(rm.identity(d), rm.zeros_vec(d))]
        if any(r.dim != d for r in reps):
            raise InvalidInput("holonomy dimension mismatch")
        ident = rm.identity(d)
        normalized = []
        for r in reps:
            red = AffineMap(r.linear, _reduce_mod_lattice(self.lattice, r.translation))
            if red.linear == ident and not any(red.translation):
                continue
            normalized.append(red)
        normalized.sort(key=lambda r: (r.linear, r.translation))
        identity_rep = AffineMap(ident, rm.zeros_vec(d))
        object.__setattr__(self, "holonomy", (identity_rep, *normalized))

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @property
    def order(self) -> int:
        """Order of the holonomy point group."""
        return len(self.holonomy)

    def linear_parts(self) -> list[rm.Mat]:
        return [r.linear for r in self.holonomy]

    def is_translation_group(self) -> bool:
        return len(self.holonomy) == 1

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "holonomy": [r.to_json() for r in self.holonomy],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CrystalGroup":
        lat = Lattice.from_json(obj["lattice"])
        reps = tuple(AffineMap.from_json(r) for r in obj.get("holonomy", []))
        return cls(lat, reps)

    @classmethod
    def torus(cls, lat: Lattice) -> "CrystalGroup":
        return cls(lat, ())


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationFailure:
    kind: str
    witness: tuple
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[ValidationFailure, ...]

    def __bool__(self):
        return self.ok


def validate_group(group: CrystalGroup) -> ValidationReport:
    """Check all CrystalGroup invariants, reporting each failure with the
    witnessing coset pair."""
    failures = []
    d = group.dim
    reps = group.holonomy
    linears = [r.linear for r in reps]

    for i, r in enumerate(reps):
        if not r.is_orthogonal():
            failures.append(ValidationFailure(
                "not_orthogonal", (i,), f"linear part of coset {i} is not orthogonal"))

    for i, r in enumerate(reps):
        m = rm.mat_mul(group.lattice.basis_inverse(),
                       rm.mat_mul(r.linear, group.lattice.basis))
        if not (rm.is_integer_mat(m) and abs(rm.det(m)) == 1):
            failures.append(ValidationFailure(
                "lattice_not_preserved", (i,),
                f"coset {i} linear part does not map the lattice onto itself"))

    seen = set()
    for i, b in enumerate(linears):
        if b in seen:
            failures.append(ValidationFailure(
                "duplicate_linear", (i,), f"linear part of coset {i} repeats"))
        seen.add(b)

    def find_linear(b: rm.Mat) -> int | None:
        for k, bk in enumerate(linears):
            if bk == b:
                return k
        return None

    for i, ri in enumerate(reps):
        inv = rm.transpose(ri.linear)  # orthogonal inverse
        if find_linear(inv) is None:
            failures.append(ValidationFailure(
                "missing_inverse", (i,), f"inverse of coset {i} linear part missing"))
        for j, rj in enumerate(reps):
            prod = rm.mat_mul(ri.linear, rj.linear)
            k = find_linear(prod)
            if k is None:
                failures.append(ValidationFailure(
                    "not_closed", (i, j),
                    f"product of linear parts {i},{j} leaves the holonomy set"))
                continue
            # v_i + B_i v_j - v_k must be a lattice vector
            diff = rm.vec_sub(
                rm.vec_add(ri.translation, rm.mat_vec(ri.linear, rj.translation)),
                reps[k].translation)
            if not group.lattice.contains(diff):
                failures.append(ValidationFailure(
                    "coset_not_closed", (i, j),
                    f"coset product ({i},{j}) -> {k} off the lattice by {rm.vec_to_strs(diff)}"))

    return ValidationReport(not failures, tuple(failures))


def require_valid(group: CrystalGroup) -> None:
    report = validate_group(group)
    if not report.ok:
        first = report.failures[0]
        raise InvalidGroup(
            f"group invalid: {first.kind} at {first.witness}: {first.detail}")


# ---------------------------------------------------------------------------
# torsion


@dataclass(frozen=True)
class TorsionWitness:
    coset_index: int
    lattice_shift: rm.Vec
    fixed_point: rm.Vec


@dataclass(frozen=True)
class TorsionResult:
    torsion_free: bool
    witness: TorsionWitness | None

    def __bool__(self):
        return self.torsion_free


def _fix_projector(b: rm.Mat) -> rm.Mat:
    """Orthogonal projection onto the +1 eigenspace of an orthogonal B."""
    d = len(b)
    ker = rm.kernel_basis(rm.mat_sub(b, rm.identity(d)))
    if not ker:
        return tuple(tuple(Fraction(0) for _ in range(d)) for _ in range(d))
    return rm.projection_onto_columns(rm.from_columns(ker))


def is_torsion_free(group: CrystalGroup) -> TorsionResult:
    """Exact torsion test.

    A coset (B, v + L) with B != I contains a finite-order element iff the
    projection of v onto Fix(B) lies in the projection of the lattice; the
    offending element and one of its fixed points are returned as witness.
    """
    require_valid(group)
    d = group.dim
    for i, rep in enumerate(group.holonomy):
        if i == 0:
            continue
        p = _fix_projector(rep.linear)
        pv = rm.mat_vec(p, rep.translation)
        plat = rm.mat_mul(p, group.lattice.basis)
        combo = rm.integer_combination_in_span(plat, rm.vec_neg(pv))
        if combo is None:
            continue
        lam = rm.mat_vec(group.lattice.basis, combo)
        # fixed point of (B, v + lam): (I - B) x = v + lam
        rhs = rm.vec_add(rep.translation, lam)
        x = rm.solve(rm.mat_sub(rm.identity(d), rep.linear), rhs)
        if x is None:
            raise InvalidGroup(
                "internal inconsistency in torsion projection criterion")
        return TorsionResult(False, TorsionWitness(i, lam, x))
    return TorsionResult(True, None)


# ---------------------------------------------------------------------------
# flat deformation cone


def cone_membership(group: CrystalGroup, a: rm.Mat) -> bool:
    """True iff A^T A commutes with every holonomy linear part, i.e. the
    conjugated group still acts by rigid motions."""
    if len(a) != group.dim or rm.det(a) == 0:
        raise InvalidInput("matrix must be invertible and of matching dimension")
    ata = rm.gram(a)
    for b in group.linear_parts():
        if rm.mat_mul(ata, b) != rm.mat_mul(b, ata):
            return False
    return True


_SEED_CACHE: dict[int, list[rm.Mat]] = {}


def _symmetric_seeds(d: int) -> list[rm.Mat]:
    if d in _SEED_CACHE:
        return _SEED_CACHE[d]
    seeds = []
    seeds.append(tuple(tuple(Fraction(i + 1 if i == j else 0) for j in range(d))
                       for i in range(d)))
    seeds.append(tuple(tuple(Fraction(3 ** i if i == j else 0) for j in range(d))
                       for i in range(d)))
    seeds.append(tuple(tuple(Fraction(1, i + j + 1) for j in range(d))
                       for i in range(d)))
    base = seeds[0]
    bump = tuple(tuple(Fraction(1, 7) if i != j else base[i][j] for j in range(d))
                 for i in range(d))
    seeds.append(bump)
    seeds.append(tuple(tuple(Fraction((i * d + j) % (d + 2) + 1)
                             if i <= j else Fraction((j * d + i) % (d + 2) + 1)
                             for j in range(d)) for i in range(d)))
    _SEED_CACHE[d] = seeds
    return seeds


def find_invariant_subspace(group: CrystalGroup) -> rm.Mat:
    """Rational orthogonal projection onto a proper nonzero subspace
    invariant under the holonomy representation.

    Works by averaging a symmetric seed over the group and splitting along
    a rational eigenvalue of the result.  Trivial holonomy gets the first
    coordinate axis.  Raises IrreducibleUnexpected if no rational
    splitting shows up within the seed budget.
    """
    require_valid(group)
    d = group.dim
    if d < 2:
        raise InvalidInput("invariant subspace needs d >= 2")
    linears = group.linear_parts()
    if all(b == rm.identity(d) for b in linears):
        basis = rm.from_columns([tuple(Fraction(1 if i == 0 else 0)
                                       for i in range(d))])
        return rm.projection_onto_columns(basis)
    for seed in _symmetric_seeds(d):
        avg = None
        for b in linears:
            term = rm.mat_mul(rm.transpose(b), rm.mat_mul(seed, b))
            avg = term if avg is None else rm.mat_add(avg, term)
        eigs = rm.rational_roots(rm.charpoly(avg))
        for mu in eigs:
            shifted = rm.mat_sub(avg, rm.mat_scale(mu, rm.identity(d)))
            ker = rm.kernel_basis(shifted)
            if 0 < len(ker) < d:
                p = rm.projection_onto_columns(rm.from_columns(ker))
                for b in linears:
                    if rm.mat_mul(b, p) != rm.mat_mul(p, b):
                        raise InvalidGroup(
                            "averaged operator does not commute with holonomy; "
                            "group closure is broken")
                return p
    raise IrreducibleUnexpected(
        "no rational invariant splitting found within the seed budget")


@dataclass(frozen=True)
class CollapseFamily:
    """Volume-preserving deformation data: squeeze an invariant subspace E
    and stretch its complement, keeping det = 1."""

    group: CrystalGroup
    projection: rm.Mat

    def __post_init__(self):
        p = self.projection
        d = self.group.dim
        if len(p) != d:
            raise InvalidInput("projection has wrong dimension")
        if rm.mat_mul(p, p) != p:
            raise InvalidInput("projection is not idempotent")
        if rm.transpose(p) != p:
            raise InvalidInput("projection is not symmetric")
        tr = sum(p[i][i] for i in range(d))
        if tr.denominator != 1:
            raise InvalidInput("projection trace is not an integer")
        k = int(tr)
        if not 1 <= k <= d - 1:
            raise InvalidInput("invariant subspace must be proper and nonzero")
        for b in self.group.linear_parts():
            if rm.mat_mul(b, p) != rm.mat_mul(p, b):
                raise InvalidInput("subspace is not holonomy invariant")
        object.__setattr__(self, "_dim_e", k)

    @property
    def dim_e(self) -> int:
        return self._dim_e

    @property
    def dim(self) -> int:
        return self.group.dim

    @classmethod
    def auto(cls, group: CrystalGroup) -> "CollapseFamily":
        return cls(group, find_invariant_subspace(group))

    @classmethod
    def from_subspace_basis(cls, group: CrystalGroup, columns: list) -> "CollapseFamily":
        cols = [rm.vec(c) for c in columns]
        return cls(group, rm.projection_onto_columns(rm.from_columns(cols)))


def collapse_map(family: CollapseFamily, t) -> rm.Mat:
    """The deformation matrix t^(k-d) P + t^k (I - P); unit determinant."""
    t = rm.to_frac(t)
    if t <= 0:
        raise InvalidInput("collapse parameter t must be positive")
    d = family.dim
    k = family.dim_e
    p = family.projection
    pperp = rm.mat_sub(rm.identity(d), p)
    a = rm.mat_add(rm.mat_scale(t ** (k - d), p), rm.mat_scale(t ** k, pperp))
    if rm.det(a) != 1:
        raise InvalidInput("internal error: collapse map determinant is not 1")
    return a


def conjugate_group(group: CrystalGroup, a: rm.Mat, v=None) -> CrystalGroup:
    """Conjugate the group by the affine map (A, v).

    Requires cone membership so that the result again consists of rigid
    motions.  Lattice maps to A(lattice); coset (B_i, v_i) maps to
    (A B_i A^{-1}, A v_i + (I - A B_i A^{-1}) v).
    """
    d = group.dim
    v = rm.zeros_vec(d) if v is None else rm.vec(v)
    if not cone_membership(group, a):
        raise NotIsometricAction(
            "matrix is outside the compatibility cone of the group")
    ainv = rm.inverse(a)
    new_lattice = group.lattice.transformed(a)
    reps = []
    ident = rm.identity(d)
    for rep in group.holonomy:
        b_new = rm.mat_mul(a, rm.mat_mul(rep.linear, ainv))
        shift = rm.vec_add(
            rm.mat_vec(a, rep.translation),
            rm.mat_vec(rm.mat_sub(ident, b_new), v))
        reps.append(AffineMap(b_new, shift))
    out = CrystalGroup(new_lattice, tuple(reps))
    report = validate_group(out)
    if not report.ok:
        raise InvalidGroup(
            f"conjugation produced an invalid group: {report.failures[0].detail}")
    return out
