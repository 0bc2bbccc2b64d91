"""Certified finite slices of Laplace spectra.

Flat-torus eigenvalues are 4*pi^2*|x|^2 over the dual lattice, stored as
exact pi-polynomials.  Quotient spectra weight each torus eigenvalue by
the dimension of the holonomy-invariant subspace, computed as an exact
character sum.  Sphere spectra use the classical closed form.  Slices
carry a completeness certificate: every eigenvalue strictly below the
cutoff is present with its full multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

import sympy

from . import ratmat as rm
from .crystal import CrystalGroup, is_torsion_free, require_valid
from .errors import (IncompleteInput, InvalidInput, NonIntegerMultiplicity,
                     Unsupported)
from .exactpi import (Exact, PiRat, SymReal, as_exact, certified_integer,
                      ex_add, ex_cmp, ex_float, ex_key, ex_mul, ex_sign,
                      ex_str, exact_from_float_or_str)
from .lattices import (Lattice, covering_radius, covering_radius_sq_exact,
                       dual, enumerate_short_vectors)

FOUR_PI_SQ = PiRat.pi_power(4, 2)


@dataclass(frozen=True)
class SpectrumSlice:
    """Sorted (eigenvalue, multiplicity) pairs, complete below ``cutoff``."""

    entries: tuple[tuple[Exact, int], ...]
    cutoff: Exact
    source: str
    certificate: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for _, m in self.entries:
            if m < 1:
                raise InvalidInput("multiplicities must be positive")
        for (a, _), (b, _) in zip(self.entries, self.entries[1:]):
            if ex_cmp(a, b) >= 0:
                raise InvalidInput("entries must be strictly increasing")

    def __len__(self):
        return len(self.entries)

    def eigenvalues(self) -> list[Exact]:
        return [v for v, _ in self.entries]

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def expanded(self, count: int | None = None) -> list[Exact]:
        """Multiplicity-expanded eigenvalue list lambda_0 <= lambda_1 <= ..."""
        out = []
        for v, m in self.entries:
            out.extend([v] * m)
            if count is not None and len(out) >= count:
                return out[:count]
        return out

    def multiplicity_below(self, x) -> int:
        x = as_exact(x)
        return sum(m for v, m in self.entries if ex_sign(_sub(v, x)) < 0)

    def multiplicity_of(self, x) -> int:
        x = as_exact(x)
        for v, m in self.entries:
            if ex_cmp(v, x) == 0:
                return m
        return 0

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "cutoff": ex_float(self.cutoff),
            "cutoff_exact": ex_str(self.cutoff),
            "complete_below_cutoff": True,
            "certificate": {k: v for k, v in self.certificate},
            "entries": [
                {
                    "eigenvalue": ex_float(v),
                    "eigenvalue_exact": ex_str(v),
                    "multiplicity": m,
                }
                for v, m in self.entries
            ],
        }

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["eigenvalue", "eigenvalue_exact", "multiplicity"]]
        for v, m in self.entries:
            rows.append([repr(ex_float(v)), ex_str(v), str(m)])
        return rows


# documentation-only convention marker; all internal math uses 4 pi^2 |x|^2
EIGENVALUE_CONVENTION = "4*pi^2*|x|^2"


def _sub(a, b) -> Exact:
    a, b = as_exact(a), as_exact(b)
    if isinstance(a, PiRat) and isinstance(b, PiRat):
        return a - b
    return SymReal(a) - SymReal(b)


def _sorted_entries(pairs: list[tuple[Exact, int]]) -> tuple[tuple[Exact, int], ...]:
    """Merge equal eigenvalues and sort, all with certified comparisons.

    Structural keys group the bulk in O(n); the final adjacent pass merges
    values that are equal but syntactically different (symbolic forms),
    which certified sorting is guaranteed to place next to each other.
    """
    grouped: dict = {}
    for v, m in pairs:
        if m == 0:
            continue
        k = ex_key(v)
        if k in grouped:
            w, mm = grouped[k]
            grouped[k] = (w, mm + m)
        else:
            grouped[k] = (v, m)
    values = list(grouped.values())
    values.sort(key=cmp_to_key(lambda p, q: ex_cmp(p[0], q[0])))
    out: list[tuple[Exact, int]] = []
    for v, m in values:
        if out and ex_cmp(out[-1][0], v) == 0:
            out[-1] = (out[-1][0], out[-1][1] + m)
        else:
            out.append((v, m))
    return tuple(out)


# ---------------------------------------------------------------------------
# spheres


def sphere_volume(m: int) -> PiRat:
    """Volume of the unit round m-sphere, exact.

    Half-integer Gamma values reduce to rational multiples of sqrt(pi),
    so the volume is always a rational multiple of an integer power of pi.
    """
    if m < 1:
        raise InvalidInput("sphere dimension must be >= 1")
    if m % 2 == 1:
        q = (m + 1) // 2
        return PiRat.pi_power(Fraction(2, math.factorial(q - 1)), q)
    s = m // 2
    coef = Fraction(2 * 4 ** s * math.factorial(s), math.factorial(2 * s))
    return PiRat.pi_power(coef, s)


def sphere_multiplicity(m: int, j: int) -> int:
    if j < 2:
        return 1 if j == 0 else m + 1
    return math.comb(m + j, j) - math.comb(m + j - 2, j - 2)


def unit_volume_inv_radius_sq(m: int) -> Exact:
    """1/R^2 for the m-sphere scaled to unit volume."""
    vol = sphere_volume(m).to_sympy()
    return as_exact(sympy.powsimp(vol ** sympy.Rational(2, m)))


def sphere_spectrum(m: int, radius=1, cutoff=100.0, *,
                    unit_volume: bool = False) -> SpectrumSlice:
    """Laplace spectrum of the round m-sphere below ``cutoff``.

    Eigenvalues j(j+m-1)/R^2 with the harmonic-polynomial multiplicity.
    ``radius`` must be exact (rational or symbolic); with ``unit_volume``
    the radius argument is ignored and the sphere is scaled to volume 1.
    """
    if m < 2:
        raise InvalidInput("sphere dimension must be >= 2")
    cutoff_e = exact_from_float_or_str(cutoff)
    if unit_volume:
        inv_r2 = unit_volume_inv_radius_sq(m)
    else:
        r = as_exact(radius)
        if ex_sign(r) <= 0:
            raise InvalidInput("radius must be positive")
        if isinstance(r, PiRat) and r.is_rational():
            inv_r2 = PiRat.rational(1 / (r.as_rational() ** 2))
        else:
            inv_r2 = SymReal(1 / (SymReal(r).expr ** 2))
    entries = []
    j = 0
    while True:
        lam = ex_mul(j * (j + m - 1), inv_r2)
        if ex_sign(_sub(lam, cutoff_e)) >= 0:
            break
        entries.append((lam, sphere_multiplicity(m, j)))
        j += 1
    return SpectrumSlice(
        entries=_sorted_entries(entries),
        cutoff=cutoff_e,
        source=f"sphere(m={m},{'unit volume' if unit_volume else 'R=' + ex_str(as_exact(radius))})",
        certificate=(("kind", "closed-form"), ("levels", str(j))),
    )


@dataclass(frozen=True)
class ClosedFactor:
    """Closed constant-scalar-curvature factor of a product."""

    kind: str
    dim: int
    scal: Exact
    volume: Exact
    spectrum: SpectrumSlice


def sphere_closed_factor(m: int, cutoff, *, radius=1,
                         unit_volume: bool = False) -> ClosedFactor:
    if unit_volume:
        inv_r2 = unit_volume_inv_radius_sq(m)
        volume: Exact = PiRat.rational(1)
    else:
        r = as_exact(radius)
        if isinstance(r, PiRat) and r.is_rational():
            rq = r.as_rational()
            inv_r2 = PiRat.rational(1 / rq ** 2)
            volume = sphere_volume(m) * (rq ** m)
        else:
            rs = SymReal(r).expr
            inv_r2 = SymReal(1 / rs ** 2)
            volume = SymReal(sphere_volume(m).to_sympy() * rs ** m)
    scal = ex_mul(m * (m - 1), inv_r2)
    spec = sphere_spectrum(m, radius=radius, cutoff=cutoff, unit_volume=unit_volume)
    return ClosedFactor("sphere", m, scal, volume, spec)


def custom_closed_factor(dim: int, scal, volume, entries, cutoff) -> ClosedFactor:
    """Closed factor from explicit exact spectrum entries [(value, mult), ...]."""
    cutoff_e = exact_from_float_or_str(cutoff)
    pairs = [(as_exact(v), int(m)) for v, m in entries]
    slice_ = SpectrumSlice(
        entries=_sorted_entries(pairs),
        cutoff=cutoff_e,
        source=f"custom(dim={dim})",
        certificate=(("kind", "user-supplied"),),
    )
    if not slice_.entries or ex_sign(slice_.entries[0][0]) != 0 \
            or slice_.entries[0][1] != 1:
        raise InvalidInput(
            "a connected closed manifold must have first entry (0, 1)")
    return ClosedFactor("custom", dim, as_exact(scal), as_exact(volume), slice_)


# ---------------------------------------------------------------------------
# flat tori and their quotients


def _rational_upper_bound(x: Exact, prec: int = 128) -> Fraction:
    """A certified upper rational bound with a small denominator; feeding
    compact fractions into the enumeration keeps its arithmetic cheap."""
    if isinstance(x, PiRat):
        hi = x.interval(prec)[1]
    else:
        from .exactpi import sympy_interval
        hi = sympy_interval(x.expr, prec)[1]
    return Fraction(math.ceil(hi * (1 << 16)), 1 << 16)


def _dual_norm_classes(lat: Lattice, cutoff_e: Exact,
                       max_count: int) -> tuple[dict, Fraction, Lattice]:
    dl = dual(lat)
    radius = _rational_upper_bound(cutoff_e * PiRat.pi_power(Fraction(1, 4), -2))
    svs = enumerate_short_vectors(dl, radius, max_count=max_count)
    classes: dict[Fraction, list] = {}
    for coords, nsq in svs.vectors:
        lam = FOUR_PI_SQ * nsq
        if ex_sign(_sub(lam, cutoff_e)) < 0:
            classes.setdefault(nsq, []).append(coords)
    return classes, radius, dl


def torus_spectrum(lat: Lattice, cutoff, *,
                   max_count: int = 200_000) -> SpectrumSlice:
    """Spectrum of the flat torus R^d / L: eigenvalues 4 pi^2 |x|^2 over
    the dual lattice, multiplicity the number of dual vectors of that norm."""
    cutoff_e = exact_from_float_or_str(cutoff)
    entries: list[tuple[Exact, int]] = []
    if ex_sign(cutoff_e) > 0:
        entries.append((PiRat.rational(0), 1))
    classes, radius, _ = _dual_norm_classes(lat, cutoff_e, max_count)
    for nsq, vecs in sorted(classes.items()):
        entries.append((FOUR_PI_SQ * nsq, len(vecs)))
    return SpectrumSlice(
        entries=_sorted_entries(entries),
        cutoff=cutoff_e,
        source=f"torus(d={lat.dim})",
        certificate=(("kind", "dual-lattice-enumeration"),
                     ("radius_sq", str(radius)),
                     ("eigenvalue_convention", EIGENVALUE_CONVENTION)),
    )


_COS_TABLE = {
    Fraction(0): Fraction(1),
    Fraction(1, 2): Fraction(-1),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(1, 4): Fraction(0),
    Fraction(3, 4): Fraction(0),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(5, 6): Fraction(1, 2),
}


def _invariant_multiplicity(group: CrystalGroup, vectors: list[rm.Vec],
                            dual_basis: rm.Mat) -> int:
    """Dimension of the holonomy-invariant subspace of the torus eigenspace
    spanned by the exponentials of the given dual vectors.

    Character sum (1/|H|) sum over cosets of sum over fixed dual vectors of
    cos(2 pi <x, v>).  The rational cosine table covers denominators
    1,2,3,4,6 exactly; anything else goes through a certified symbolic or
    interval evaluation.  A non-integer result aborts.
    """
    order = group.order
    rational_sum = Fraction(0)
    residuals: list[Fraction] = []
    ambient = [rm.mat_vec(dual_basis, rm.vec(c)) for c in vectors]
    for rep in group.holonomy:
        for x in ambient:
            if rm.mat_vec(rep.linear, x) != x:
                continue
            r = rm.dot(x, rep.translation)
            r = r - math.floor(r)
            c = _COS_TABLE.get(r)
            if c is not None:
                rational_sum += c
            else:
                residuals.append(r)
    if not residuals:
        total = rational_sum / order
        if total.denominator != 1:
            raise NonIntegerMultiplicity(
                f"character sum {rational_sum}/{order} is not an integer")
        value = int(total)
    else:
        residual_expr = sympy.Add(*[
            sympy.cos(2 * sympy.pi * sympy.Rational(r.numerator, r.denominator))
            for r in residuals]) / order
        value = certified_integer(rational_sum / order, residual_expr)
    if value < 0:
        raise NonIntegerMultiplicity(f"negative multiplicity {value}")
    return value


def bieberbach_spectrum(group: CrystalGroup, cutoff, *,
                        max_count: int = 200_000) -> SpectrumSlice:
    """Spectrum of the closed flat manifold R^d / group below ``cutoff``.

    The quotient spectrum sits inside the covering-torus spectrum; each
    torus eigenvalue keeps the dimension of the invariant subspace of its
    eigenspace as multiplicity.  Requires a valid, torsion-free group.
    """
    torsion = is_torsion_free(group)
    if not torsion.torsion_free:
        raise InvalidInput(
            "group has torsion (witness coset "
            f"{torsion.witness.coset_index}); quotient is an orbifold")
    cutoff_e = exact_from_float_or_str(cutoff)
    if group.is_translation_group():
        slice_ = torus_spectrum(group.lattice, cutoff, max_count=max_count)
        return SpectrumSlice(slice_.entries, slice_.cutoff,
                             f"flat-quotient(d={group.dim},|H|=1)",
                             slice_.certificate)
    entries: list[tuple[Exact, int]] = []
    if ex_sign(cutoff_e) > 0:
        entries.append((PiRat.rational(0), 1))  # constants survive quotients
    classes, radius, dl = _dual_norm_classes(group.lattice, cutoff_e, max_count)
    for nsq, vecs in sorted(classes.items()):
        mult = _invariant_multiplicity(group, vecs, dl.basis)
        if mult:
            entries.append((FOUR_PI_SQ * nsq, mult))
    return SpectrumSlice(
        entries=_sorted_entries(entries),
        cutoff=cutoff_e,
        source=f"flat-quotient(d={group.dim},|H|={group.order})",
        certificate=(("kind", "dual-lattice-enumeration+character-sum"),
                     ("radius_sq", str(radius)),
                     ("eigenvalue_convention", EIGENVALUE_CONVENTION)),
    )


# ---------------------------------------------------------------------------
# products


def product_spectrum(a: SpectrumSlice, b: SpectrumSlice, cutoff) -> SpectrumSlice:
    """Spectrum of a Riemannian product from its factors: all sums of
    eigenvalue pairs below ``cutoff`` with convolved multiplicities."""
    cutoff_e = exact_from_float_or_str(cutoff)
    for s, name in ((a, "first"), (b, "second")):
        if ex_sign(_sub(s.cutoff, cutoff_e)) < 0:
            raise IncompleteInput(
                f"{name} factor slice is complete only below {ex_str(s.cutoff)}, "
                f"need {ex_str(cutoff_e)}")
    sums: list[tuple[Exact, int]] = []
    for va, ma in a.entries:
        # eigenvalues are >= 0, so any sum below the cutoff uses parts below it
        if ex_sign(_sub(va, cutoff_e)) >= 0:
            continue
        for vb, mb in b.entries:
            s = ex_add(va, vb)
            if ex_sign(_sub(s, cutoff_e)) < 0:
                sums.append((s, ma * mb))
    return SpectrumSlice(
        entries=_sorted_entries(sums),
        cutoff=cutoff_e,
        source=f"product({a.source}, {b.source})",
        certificate=(("kind", "factor-convolution"),),
    )


# ---------------------------------------------------------------------------
# diameters and the quadratic eigenvalue bound


@dataclass(frozen=True)
class DiameterBound:
    """Diameter value with its certification status.

    ``diam_sq`` is the exact squared diameter when available (orthogonal
    lattice bases).  ``upper_bound_only`` marks quotient manifolds where
    only the covering-torus diameter is certified.
    """

    value: float
    diam_sq: Fraction | None
    upper_bound_only: bool
    tolerance: float


def flat_diameter(group: CrystalGroup, tolerance: float = 1e-6) -> DiameterBound:
    """Diameter of the flat manifold R^d / group.

    For trivial holonomy this is the covering radius of the lattice; for a
    proper quotient the covering-torus diameter is returned as a certified
    upper bound and flagged as such.
    """
    require_valid(group)
    if group.dim > 4:
        raise Unsupported("flat_diameter supports d <= 4")
    lat = group.lattice
    upper_only = not group.is_translation_group()
    exact_sq = covering_radius_sq_exact(lat)
    if exact_sq is not None:
        return DiameterBound(math.sqrt(float(exact_sq)), exact_sq,
                             upper_only, 0.0)
    value = covering_radius(lat, tolerance)
    return DiameterBound(value, None, upper_only, tolerance)


@dataclass(frozen=True)
class ChengRow:
    j: int
    eigenvalue: float
    eigenvalue_exact: str
    bound: float
    status: str  # "ok" | "violated" | "inconclusive"
    margin: float


@dataclass(frozen=True)
class ChengReport:
    rows: tuple[ChengRow, ...]
    all_ok: bool
    violations: int
    inconclusive: int

    def to_json(self) -> dict:
        return {
            "all_ok": self.all_ok,
            "violations": self.violations,
            "inconclusive": self.inconclusive,
            "rows": [
                {
                    "j": r.j,
                    "eigenvalue": r.eigenvalue,
                    "eigenvalue_exact": r.eigenvalue_exact,
                    "bound": r.bound,
                    "status": r.status,
                    "margin": r.margin,
                }
                for r in self.rows
            ],
        }


def cheng_bound_check(spec: SpectrumSlice, d: int, diam: DiameterBound,
                      j_max: int) -> ChengReport:
    """Verify lambda_j <= 2 j^2 d(d+4) / diam^2 for j = 1..j_max.

    Eigenvalues are indexed with multiplicity (lambda_0 = 0 first).  With
    an exact squared diameter every verdict is certified; an upper-bound
    diameter can certify "ok" but never "violated", so failures there are
    reported as inconclusive.
    """
    if j_max < 1:
        raise InvalidInput("j_max must be >= 1")
    expanded = spec.expanded(j_max + 1)
    if len(expanded) < j_max + 1:
        raise IncompleteInput(
            f"slice holds {len(expanded)} eigenvalues (with multiplicity), "
            f"need {j_max + 1}; raise the cutoff")
    c_dim = 2 * d * (d + 4)
    rows = []
    violations = inconclusive = 0
    for j in range(1, j_max + 1):
        lam = expanded[j]
        lam_f = ex_float(lam)
        if diam.diam_sq is not None:
            bound_exact = Fraction(c_dim * j * j) / diam.diam_sq
            cmp = ex_sign(_sub(lam, PiRat.rational(bound_exact)))
            if cmp <= 0:
                status = "ok"
            elif diam.upper_bound_only:
                status = "inconclusive"
            else:
                status = "violated"
            bound_f = float(bound_exact)
        else:
            lo = max(diam.value - diam.tolerance, 0.0)
            hi = diam.value + diam.tolerance
            bound_hi = c_dim * j * j / (hi * hi)
            bound_lo = c_dim * j * j / (lo * lo) if lo > 0 else math.inf
            if lam_f <= bound_hi:
                status = "ok"
            elif lam_f > bound_lo and not diam.upper_bound_only:
                status = "violated"
            else:
                status = "inconclusive"
            bound_f = c_dim * j * j / (diam.value ** 2)
        if status == "violated":
            violations += 1
        elif status == "inconclusive":
            inconclusive += 1
        rows.append(ChengRow(j, lam_f, ex_str(lam), bound_f, status,
                             bound_f - lam_f))
    return ChengReport(tuple(rows), violations == 0 and inconclusive == 0,
                       violations, inconclusive)
