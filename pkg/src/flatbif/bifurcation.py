"""Morse-index curves and certified bifurcation instants.

For a product of a closed factor with a collapsing flat factor, the index
at parameter t counts eigenvalue pairs (with multiplicity) whose sum lies
strictly below the threshold scal/(n-1).  Along the collapse the flat
eigenvalues are Laurent monomials in u = t^2 with rational coefficients,

    mu(u) = 4 pi^2 (alpha u^(d-k) + beta u^(-k)),

where alpha, beta are the squared components of a dual-lattice vector
along the squeezed subspace and its complement.  Everything an index
comparison needs therefore stays inside exact pi-polynomial arithmetic at
rational t, and jumps of the index are isolated by bisection with exact
integer evaluations at every probe.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import sympy

from . import ratmat as rm
from .crystal import CollapseFamily, CrystalGroup, require_valid
from .errors import (GridTooCoarse, IncompleteInput, InvalidInput)
from .exactpi import (Exact, PiRat, SymReal, as_exact, ex_cmp, ex_sign,
                      ex_str, exact_from_float_or_str, sympy_interval)
from .lattices import dual, enumerate_short_vectors
from .spectra import FOUR_PI_SQ, ClosedFactor, _invariant_multiplicity

BISECTION_DENOM = 1 << 40  # instant interval width: range / 2^40


# ---------------------------------------------------------------------------
# exact collapse parameters


@dataclass(frozen=True)
class ExactT:
    """Exact collapse parameter, kept as u = t^2.

    ``u`` is a pi-monomial (or rational) when the crossing equation has a
    closed-form solution in that class; otherwise only the sympy form of t
    is exact and comparisons go through the symbolic layer.
    """

    t_sym: sympy.Expr
    u: PiRat | None = None

    def u_exact(self):
        return self.u if self.u is not None else SymReal(self.t_sym ** 2)

    def to_float(self) -> float:
        return float(self.t_sym.evalf(30))

    def exact_str(self) -> str:
        return sympy.sstr(self.t_sym)

    def rational_bounds(self, prec: int = 128) -> tuple[Fraction, Fraction]:
        lo, hi = sympy_interval(self.t_sym, prec)
        return lo, hi

    @classmethod
    def from_u(cls, u: PiRat | Fraction) -> "ExactT":
        u = PiRat.rational(u) if isinstance(u, (int, Fraction)) else u
        return cls(sympy.sqrt(u.to_sympy()), u)


def _as_param(t) -> tuple[PiRat | Fraction, float]:
    """Normalize a parameter to (u = t^2 exact, float approximation)."""
    if isinstance(t, ExactT):
        u = t.u if t.u is not None else SymReal(t.t_sym ** 2)
        return u, t.to_float()
    tq = rm.to_frac(t)
    if tq <= 0:
        raise InvalidInput("collapse parameter t must be positive")
    return tq * tq, float(tq)


def _u_pow(u, e: int):
    if isinstance(u, Fraction):
        return u ** e
    if isinstance(u, PiRat):
        return u.monomial_pow(e)
    return SymReal(u.expr ** e)


# ---------------------------------------------------------------------------
# the flat factor along the collapse


@dataclass(frozen=True)
class FlatOrbit:
    """Holonomy orbit of dual vectors: squared norm components along the
    squeezed subspace (alpha) and its complement (beta), with the
    invariant multiplicity of the orbit."""

    alpha: Fraction
    beta: Fraction
    mult: int
    rep: tuple[int, ...]


@dataclass(frozen=True)
class FlatModel:
    """Complete eigenvalue model of the flat factor over a u-range."""

    orbits: tuple[FlatOrbit, ...]
    exp_alpha: int
    exp_beta: int
    u_lo: Fraction
    u_hi: Fraction
    c_max: Exact

    def mu(self, orbit: FlatOrbit, u) -> Exact:
        val_a = orbit.alpha * _u_pow(u, self.exp_alpha) if orbit.alpha else 0
        val_b = orbit.beta * _u_pow(u, self.exp_beta) if orbit.beta else 0
        if isinstance(u, (Fraction, PiRat)) or (not orbit.alpha and not orbit.beta):
            return FOUR_PI_SQ * (val_a + val_b)
        expr = 4 * sympy.pi ** 2 * (
            sympy.Rational(orbit.alpha.numerator, orbit.alpha.denominator)
            * u.expr ** self.exp_alpha
            + sympy.Rational(orbit.beta.numerator, orbit.beta.denominator)
            * u.expr ** self.exp_beta)
        return SymReal(expr)

    def count_below(self, u, c: Exact) -> tuple[int, list[FlatOrbit]]:
        """(sum of multiplicities with mu < c, orbits with mu == c)."""
        count = 0
        hits = []
        for orbit in self.orbits:
            s = ex_cmp(self.mu(orbit, u), c)
            if s < 0:
                count += orbit.mult
            elif s == 0:
                hits.append(orbit)
        return count, hits


def _rational_hi(x: Exact, prec: int = 128) -> Fraction:
    if isinstance(x, PiRat):
        hi = x.interval(prec)[1]
    else:
        hi = sympy_interval(x.expr, prec)[1]
    # round up to a compact dyadic: still an upper bound, cheaper downstream
    return Fraction(math.ceil(hi * (1 << 16)), 1 << 16)


def build_flat_model(group: CrystalGroup, collapse: CollapseFamily | None,
                     u_lo: Fraction, u_hi: Fraction, c_max: Exact,
                     max_count: int = 200_000) -> FlatModel:
    """Orbits of the dual lattice whose eigenvalue curve can dip below
    ``c_max`` somewhere on [u_lo, u_hi]; certified complete."""
    if not (0 < u_lo <= u_hi):
        raise InvalidInput("need 0 < u_lo <= u_hi")
    d = group.dim
    if collapse is not None:
        ea, eb = d - collapse.dim_e, -collapse.dim_e
        proj = collapse.projection
    else:
        ea, eb = 0, 0
        proj = None
    w = _rational_hi(c_max * PiRat.pi_power(Fraction(1, 4), -2))
    orbits: list[FlatOrbit] = [FlatOrbit(Fraction(0), Fraction(0), 1, (0,) * d)]
    if w > 0:
        def min_pow(e: int) -> Fraction:
            return min(u_lo ** e, u_hi ** e)

        amax = w / min_pow(ea)
        bmax = w / min_pow(eb)
        dl = dual(group.lattice)
        svs = enumerate_short_vectors(dl, amax + bmax, max_count=max_count)
        trivial = group.is_translation_group()
        consumed: set = set()
        ident_maps = None
        if not trivial:
            dib = rm.inverse(dl.basis)
            ident_maps = [
                rm.mat_mul(dib, rm.mat_mul(rep.linear, dl.basis))
                for rep in group.holonomy
            ]
        for coords, nsq in svs.vectors:
            if coords in consumed:
                continue
            if trivial:
                orbit_coords = [coords]
                mult = 1
            else:
                orbit_set = set()
                for m in ident_maps:
                    img = rm.mat_vec(m, rm.vec(coords))
                    orbit_set.add(tuple(int(x) for x in img))
                orbit_coords = sorted(orbit_set)
                consumed.update(orbit_coords)
                mult = _invariant_multiplicity(group, orbit_coords, dl.basis)
            if proj is not None:
                x = rm.mat_vec(dl.basis, rm.vec(orbit_coords[0]))
                px = rm.mat_vec(proj, x)
                alpha = rm.dot(px, px)
                beta = nsq - alpha
            else:
                alpha, beta = nsq, Fraction(0)
            if mult:
                orbits.append(FlatOrbit(alpha, beta, mult, orbit_coords[0]))
    return FlatModel(tuple(orbits), ea, eb, u_lo, u_hi, c_max)


# ---------------------------------------------------------------------------
# scenarios


class Scenario:
    """Closed factor times flat factor with an optional collapse family."""

    def __init__(self, closed: ClosedFactor, group: CrystalGroup,
                 collapse: CollapseFamily | None, precision_bits: int = 128):
        require_valid(group)
        if collapse is not None and collapse.group != group:
            raise InvalidInput("collapse family belongs to a different group")
        if precision_bits < 64:
            raise InvalidInput("precision_bits must be >= 64")
        n = closed.dim + group.dim
        if n < 3:
            raise InvalidInput("total dimension must be >= 3")
        if ex_sign(closed.scal) <= 0:
            raise InvalidInput("closed factor must have positive scalar curvature")
        if ex_cmp(closed.volume, PiRat.rational(1)) != 0:
            raise InvalidInput("closed factor must have unit volume")
        if group.lattice.covolume() != 1:
            raise InvalidInput("flat lattice must have unit covolume")
        threshold = _div_int(closed.scal, n - 1)
        if ex_cmp(closed.spectrum.cutoff, threshold) < 0:
            raise IncompleteInput(
                "closed factor spectrum must be complete below the threshold "
                f"{ex_str(threshold)}")
        self.closed = closed
        self.group = group
        self.collapse = collapse
        self.precision_bits = precision_bits
        self.n = n
        self.threshold = threshold

    def model(self, u_lo: Fraction, u_hi: Fraction,
              c_max: Exact | None = None) -> FlatModel:
        return build_flat_model(self.group, self.collapse, u_lo, u_hi,
                                c_max if c_max is not None else self.threshold)

    def closed_entries_below_threshold(self) -> list[tuple[Exact, int]]:
        out = []
        for lam, mult in self.closed.spectrum.entries:
            if ex_cmp(lam, self.threshold) < 0:
                out.append((lam, mult))
        return out


def _div_int(x: Exact, n: int) -> Exact:
    x = as_exact(x)
    if isinstance(x, PiRat):
        return x / n
    return SymReal(x.expr / n)


# ---------------------------------------------------------------------------
# the index


@dataclass(frozen=True)
class EqualityHit:
    """A pair landing exactly on the threshold; excluded from the count."""

    closed_eigenvalue: str
    orbit_rep: tuple[int, ...]
    flat_eigenvalue: str


@dataclass(frozen=True)
class IndexResult:
    count: int
    equalities: tuple[EqualityHit, ...]

    def __int__(self):
        return self.count


def _index_core(scenario: Scenario, model: FlatModel, u) -> IndexResult:
    count = 0
    eqs: list[EqualityHit] = []
    for lam, mult in scenario.closed.spectrum.entries:
        c = _sub_exact(scenario.threshold, lam)
        if ex_sign(c) <= 0:
            continue
        below, hits = model.count_below(u, c)
        count += mult * below
        for orbit in hits:
            eqs.append(EqualityHit(ex_str(lam), orbit.rep,
                                   ex_str(model.mu(orbit, u))))
    return IndexResult(count, tuple(eqs))


def _sub_exact(a: Exact, b: Exact) -> Exact:
    if isinstance(a, PiRat) and isinstance(b, PiRat):
        return a - b
    return SymReal(a) - SymReal(b)


def index_at(scenario: Scenario, t) -> IndexResult:
    """Exact count, with multiplicity, of eigenvalue pairs strictly below
    the threshold; exact threshold hits are reported separately."""
    u, t_f = _as_param(t)
    if isinstance(u, Fraction):
        u_lo = u_hi = u
    else:
        lo, hi = (u.interval(128) if isinstance(u, PiRat)
                  else sympy_interval(u.expr, 128))
        u_lo, u_hi = lo, hi
    model = scenario.model(u_lo, u_hi)
    return _index_core(scenario, model, u)


@dataclass(frozen=True)
class ConditionAResult:
    ok: bool
    witnesses: tuple[EqualityHit, ...]

    def __bool__(self):
        return self.ok


def condition_a_check(scenario: Scenario, t) -> ConditionAResult:
    """True iff no value threshold - lambda_j(closed factor) lies exactly
    in the flat spectrum at parameter t; exact hits become witnesses."""
    result = index_at(scenario, t)
    return ConditionAResult(not result.equalities, result.equalities)


def index_lower_bound(scenario: Scenario, t) -> int:
    """Count of flat eigenvalues below threshold minus the largest closed
    eigenvalue under the threshold; a certified lower bound for the index."""
    entries = scenario.closed_entries_below_threshold()
    if not entries:
        return 0
    lam_top = entries[-1][0]  # entries are sorted ascending
    c = _sub_exact(scenario.threshold, lam_top)
    u, _ = _as_param(t)
    if isinstance(u, Fraction):
        u_lo = u_hi = u
    else:
        u_lo, u_hi = (u.interval(128) if isinstance(u, PiRat)
                      else sympy_interval(u.expr, 128))
    model = scenario.model(u_lo, u_hi)
    below, _hits = model.count_below(u, c)
    return below


# ---------------------------------------------------------------------------
# crossing roots


@dataclass(frozen=True)
class CrossingRoot:
    """One solution of mu_orbit(t^2) = threshold - lambda_closed."""

    t_lo: Fraction
    t_hi: Fraction
    exact: ExactT | None
    closed_eigenvalue: str
    orbit_rep: tuple[int, ...]
    tangent: bool = False

    def midpoint(self) -> float:
        return (float(self.t_lo) + float(self.t_hi)) / 2


def _pirat_root_monomial(w: PiRat, n: int) -> PiRat | None:
    """w^(1/n) inside the pi-monomial class, or None."""
    if n < 0:
        try:
            w = PiRat.rational(1) / w
        except (InvalidInput, ZeroDivisionError):
            return None
        n = -n
    try:
        coef, e = w.monomial()
    except InvalidInput:
        return None
    if coef <= 0 or e % n:
        return None

    def iroot(a: int) -> int | None:
        r = round(a ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == a:
                return cand
        return None

    p = iroot(coef.numerator)
    q = iroot(coef.denominator)
    if p is None or q is None:
        return None
    return PiRat.pi_power(Fraction(p, q), e // n)


def _g_sign(orbit: FlatOrbit, ea: int, eb: int, c: Exact, t: Fraction) -> int:
    """sign of mu(t^2) - c at rational t, exact."""
    u = t * t
    val = orbit.alpha * u ** ea + orbit.beta * u ** eb
    mu = FOUR_PI_SQ * val
    return ex_sign(_sub_exact(mu, c))


def _bisect_root(orbit, ea, eb, c, lo: Fraction, hi: Fraction,
                 width: Fraction) -> tuple[Fraction, Fraction, Fraction | None]:
    """Shrink a sign-change bracket; returns (lo, hi, exact_rational_or_None)."""
    s_lo = _g_sign(orbit, ea, eb, c, lo)
    if s_lo == 0:
        return lo, lo, lo
    s_hi = _g_sign(orbit, ea, eb, c, hi)
    if s_hi == 0:
        return hi, hi, hi
    if s_lo == s_hi:
        raise InvalidInput("bisection bracket has equal signs")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _g_sign(orbit, ea, eb, c, mid)
        if s_mid == 0:
            return mid, mid, mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi, None


def _monomial_roots(orbit, ea, eb, c, t_lo, t_hi, width, lam_str,
                    whole_interval_error):
    """Roots when only one exponent is active: mu strictly monotone."""
    alpha, beta = orbit.alpha, orbit.beta
    if alpha and not beta:
        coeff, e = alpha, ea
    elif beta and not alpha:
        coeff, e = beta, eb
    else:
        raise InvalidInput("not a monomial orbit")
    if e == 0:
        # constant branch: equality holds everywhere or nowhere, so there
        # is no isolated crossing to report
        mu = FOUR_PI_SQ * coeff
        if ex_sign(_sub_exact(mu, c)) == 0 and whole_interval_error:
            raise InvalidInput(
                "constant eigenvalue branch sits exactly at the level; "
                "the crossing set is the whole interval")
        return []
    w = _div_pirat(c, FOUR_PI_SQ * coeff)  # u^e = w at the root
    if ex_sign(w) <= 0:
        return []
    # in-range test: t_lo^(2e) <= w <= t_hi^(2e) (orientation by sign of e)
    lo_p = PiRat.rational((t_lo * t_lo) ** e)
    hi_p = PiRat.rational((t_hi * t_hi) ** e)
    lo_b, hi_b = (lo_p, hi_p) if e > 0 else (hi_p, lo_p)
    if ex_sign(_sub_exact(w, lo_b)) < 0 or ex_sign(_sub_exact(w, hi_b)) > 0:
        return []
    u_exact = _pirat_root_monomial(w, e) if isinstance(w, PiRat) else None
    if u_exact is not None:
        exact = ExactT.from_u(u_exact)
    elif isinstance(w, PiRat):
        cw, ew = (w.monomial() if w.is_monomial() else (None, None))
        if cw is not None:
            t_sym = (sympy.Rational(cw.numerator, cw.denominator)
                     * sympy.pi ** ew) ** sympy.Rational(1, 2 * e)
            exact = ExactT(t_sym, None)
        else:
            exact = None
    else:
        exact = None
    lo, hi, exact_rat = _bisect_root(orbit, ea, eb, c, t_lo, t_hi, width)
    if exact_rat is not None:
        exact = ExactT.from_u(exact_rat * exact_rat)
    return [CrossingRoot(lo, hi, exact, lam_str, orbit.rep)]


def _div_pirat(c: Exact, denom: PiRat) -> Exact:
    if isinstance(c, PiRat):
        return c / denom
    return SymReal(c.expr / denom.to_sympy())


def _two_term_roots(orbit, ea, eb, c, t_lo, t_hi, width, lam_str):
    """Roots of a two-term Laurent branch.

    mu(t^2) - c is strictly convex in log t, so its negativity set is one
    interval and there are at most two roots.  With a verified rational
    point m where the branch is negative, splitting [t_lo, t_hi] at m
    leaves monotone sign behavior on each piece, and exact endpoint signs
    decide everything.
    """
    alpha, beta = orbit.alpha, orbit.beta
    a_s = sympy.Rational(alpha.numerator, alpha.denominator)
    b_s = sympy.Rational(beta.numerator, beta.denominator)
    u_c = ((-eb) * b_s / (ea * a_s)) ** sympy.Rational(1, ea - eb)
    mu_min = SymReal(4 * sympy.pi ** 2 * (a_s * u_c ** ea + b_s * u_c ** eb))
    s_min = ex_sign(_sub_exact(mu_min, c))
    if s_min > 0:
        return []
    t_c_sym = sympy.sqrt(u_c)
    if s_min == 0:
        # tangency: single root, no index jump
        lo, hi = sympy_interval(t_c_sym, 192)
        if hi < t_lo or lo > t_hi:
            return []
        return [CrossingRoot(max(lo, t_lo), min(hi, t_hi),
                             ExactT(t_c_sym, None), lam_str, orbit.rep,
                             tangent=True)]
    # find a rational point with negative sign near the minimum
    prec = 128
    while True:
        lo_b, hi_b = sympy_interval(t_c_sym, prec)
        mid = (lo_b + hi_b) / 2
        if mid > 0 and _g_sign(orbit, ea, eb, c, mid) < 0:
            m = mid
            break
        prec *= 2
        if prec > 1 << 16:
            raise InvalidInput("could not rationalize the branch minimum")
    points = [t_lo]
    if t_lo < m < t_hi:
        points.append(m)
    points.append(t_hi)
    signs = [_g_sign(orbit, ea, eb, c, p) for p in points]
    roots = []
    for p, s in zip(points, signs):
        if s == 0:
            roots.append(CrossingRoot(p, p, ExactT.from_u(p * p),
                                      lam_str, orbit.rep))
    for (p, sp), (q, sq) in zip(zip(points, signs), zip(points[1:], signs[1:])):
        if sp != 0 and sq != 0 and sp != sq:
            lo, hi, exact_rat = _bisect_root(orbit, ea, eb, c, p, q, width)
            exact = (ExactT.from_u(exact_rat * exact_rat)
                     if exact_rat is not None else None)
            roots.append(CrossingRoot(lo, hi, exact, lam_str, orbit.rep))
    return roots


def crossing_roots(scenario: Scenario, model: FlatModel, level: Exact,
                   t_lo: Fraction, t_hi: Fraction,
                   width: Fraction | None = None, *,
                   whole_interval_error: bool = False) -> list[CrossingRoot]:
    """All t in [t_lo, t_hi] where some eigenvalue sum equals ``level``.

    Branches sitting at the level identically (the zero orbit when the
    level is a closed eigenvalue, or a constant flat branch) have no
    isolated crossing; with ``whole_interval_error`` they raise instead,
    which is what a finite crossing-set query needs.
    """
    if width is None:
        width = (t_hi - t_lo) / BISECTION_DENOM if t_hi > t_lo \
            else Fraction(1, BISECTION_DENOM)
    ea, eb = model.exp_alpha, model.exp_beta
    out: list[CrossingRoot] = []
    for lam, _mult in scenario.closed.spectrum.entries:
        c = _sub_exact(level, lam)
        s_c = ex_sign(c)
        if s_c < 0:
            continue
        lam_str = ex_str(lam)
        for orbit in model.orbits:
            if not orbit.alpha and not orbit.beta:
                if s_c == 0 and whole_interval_error:
                    raise InvalidInput(
                        "level equals a closed-factor eigenvalue exactly; "
                        "it lies in the product spectrum for every t")
                continue
            if s_c == 0:
                continue
            if orbit.alpha and orbit.beta and ea != eb:
                out.extend(_two_term_roots(orbit, ea, eb, c, t_lo, t_hi,
                                           width, lam_str))
            else:
                merged = orbit
                if orbit.alpha and orbit.beta and ea == eb:
                    merged = FlatOrbit(orbit.alpha + orbit.beta, Fraction(0),
                                       orbit.mult, orbit.rep)
                out.extend(_monomial_roots(merged, ea, eb, c, t_lo, t_hi,
                                           width, lam_str,
                                           whole_interval_error))
    return out


def d_rho_crossings(scenario: Scenario, rho, t_min, t_max) -> tuple[CrossingRoot, ...]:
    """The finite set of t in [t_min, t_max] with rho in the product
    spectrum, via the Laurent-monomial crossing equations.  Endpoint hits
    count (closed interval)."""
    t_lo, t_hi = rm.to_frac(t_min), rm.to_frac(t_max)
    if not 0 < t_lo <= t_hi:
        raise InvalidInput("need 0 < t_min <= t_max")
    level = exact_from_float_or_str(rho)
    if ex_cmp(scenario.closed.spectrum.cutoff, level) < 0:
        raise IncompleteInput("closed spectrum not complete up to rho")
    model = scenario.model(t_lo * t_lo, t_hi * t_hi, c_max=level)
    roots = crossing_roots(scenario, model, level, t_lo, t_hi,
                           whole_interval_error=True)
    return tuple(_dedupe_roots(roots))


def _dedupe_roots(roots: list[CrossingRoot]) -> list[CrossingRoot]:
    """Merge roots whose certified intervals overlap (same t value reached
    from different eigenvalue pairs)."""
    roots = sorted(roots, key=lambda r: (r.t_lo, r.t_hi))
    out: list[CrossingRoot] = []
    for r in roots:
        if out and r.t_lo <= out[-1].t_hi:
            prev = out[-1]
            keep_exact = prev.exact or r.exact
            out[-1] = CrossingRoot(prev.t_lo, max(prev.t_hi, r.t_hi),
                                   keep_exact, prev.closed_eigenvalue,
                                   prev.orbit_rep,
                                   prev.tangent and r.tangent)
        else:
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# scanning


@dataclass(frozen=True)
class Instant:
    t_lo: Fraction
    t_hi: Fraction
    exact: ExactT | None
    jump: int
    condition_a_ok: bool
    index_below: int
    index_above: int

    def to_json(self) -> dict:
        return {
            "t_lo": float(self.t_lo),
            "t_hi": float(self.t_hi),
            "t_exact": self.exact.exact_str() if self.exact else None,
            "jump": self.jump,
            "condition_a": self.condition_a_ok,
            "index_below": self.index_below,
            "index_above": self.index_above,
        }


@dataclass(frozen=True)
class ScanReport:
    grid: tuple[tuple[Fraction, int], ...]
    instants: tuple[Instant, ...]
    warnings: tuple[str, ...]
    accumulation: dict

    def to_json(self) -> dict:
        return {
            "grid": [[float(t), i] for t, i in self.grid],
            "instants": [inst.to_json() for inst in self.instants],
            "warnings": list(self.warnings),
            "accumulation": self.accumulation,
        }

    def grid_csv_rows(self) -> list[list[str]]:
        rows = [["t", "index"]]
        for t, i in self.grid:
            rows.append([repr(float(t)), str(i)])
        return rows


def scan(scenario: Scenario, t_min, t_max, steps: int, *,
         jobs: int = 1, refine_budget: int = 64) -> ScanReport:
    """Index curve on a grid plus isolated, certified jump instants.

    Each jump is bisected (exact integer index at every rational probe) to
    width (t_max - t_min)/2^40, labeled with the crossing equation's exact
    root when available, and checked for condition (a) on deleted
    neighborhoods one interval-width to each side.
    """
    t_lo, t_hi = rm.to_frac(t_min), rm.to_frac(t_max)
    if not 0 < t_lo < t_hi:
        raise InvalidInput("need 0 < t_min < t_max")
    if steps < 2:
        raise InvalidInput("steps must be >= 2")
    model = scenario.model(t_lo * t_lo, t_hi * t_hi)
    ts = [t_lo + (t_hi - t_lo) * j / steps for j in range(steps + 1)]

    def eval_index(t: Fraction) -> IndexResult:
        return _index_core(scenario, model, t * t)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(eval_index, ts))
    else:
        results = [eval_index(t) for t in ts]
    grid = tuple((t, r.count) for t, r in zip(ts, results))
    warnings = []
    for t, r in zip(ts, results):
        for eq in r.equalities:
            warnings.append(
                f"threshold equality at grid point t={t}: closed "
                f"{eq.closed_eigenvalue} + flat {eq.flat_eigenvalue}")

    width = (t_hi - t_lo) / BISECTION_DENOM
    brackets: list[tuple[Fraction, int, Fraction, int]] = []
    for (ta, ia), (tb, ib) in zip(grid, grid[1:]):
        if ia == ib:
            continue
        cell: list[tuple[Fraction, int, Fraction, int]] = []
        stack = [(ta, ia, tb, ib)]
        while stack:
            a, ja, b, jb = stack.pop()
            if b - a <= width:
                cell.append((a, ja, b, jb))
                if len(cell) > refine_budget:
                    raise GridTooCoarse(
                        f"more than {refine_budget} index jumps inside grid "
                        f"cell [{float(ta)}, {float(tb)}]; increase steps or "
                        "the refinement budget")
                continue
            m = (a + b) / 2
            jm = eval_index(m).count
            if jm != ja:
                stack.append((a, ja, m, jm))
            if jm != jb:
                stack.append((m, jm, b, jb))
        brackets.extend(cell)

    instants = []
    for a, ja, b, jb in brackets:
        exact = None
        roots = crossing_roots(scenario, model, scenario.threshold, a, b,
                               width=width)
        strict_roots = [r for r in _dedupe_roots(roots) if not r.tangent]
        if len(strict_roots) == 1:
            exact = strict_roots[0].exact
        cond_lo = condition_a_check_with_model(scenario, model, a)
        cond_hi = condition_a_check_with_model(scenario, model, b)
        instants.append(Instant(
            t_lo=a, t_hi=b, exact=exact, jump=ja - jb,
            condition_a_ok=cond_lo.ok and cond_hi.ok,
            index_below=ja, index_above=jb))
    instants.sort(key=lambda inst: inst.t_lo, reverse=True)

    nondecreasing = all(grid[i][1] >= grid[i + 1][1]
                        for i in range(len(grid) - 1))
    accumulation = {
        "index_at_t_min": grid[0][1],
        "index_at_t_max": grid[-1][1],
        "instant_count": len(instants),
        "nondecreasing_toward_zero": nondecreasing,
    }
    return ScanReport(grid, tuple(instants), tuple(warnings), accumulation)


def condition_a_check_with_model(scenario: Scenario, model: FlatModel,
                                 t: Fraction) -> ConditionAResult:
    result = _index_core(scenario, model, t * t)
    return ConditionAResult(not result.equalities, result.equalities)


# ---------------------------------------------------------------------------
# accumulation diagnostics


@dataclass(frozen=True)
class AccumulationInstant:
    root: CrossingRoot
    index_above: int
    index_below: int
    jump: int
    lower_bound_below: int


@dataclass(frozen=True)
class AccumulationEvidence:
    instants: tuple[AccumulationInstant, ...]
    strictly_increasing: bool
    lower_bound_ok: bool
    budget_exhausted: bool

    def to_json(self) -> dict:
        return {
            "instants": [
                {
                    "t_lo": float(a.root.t_lo),
                    "t_hi": float(a.root.t_hi),
                    "t_exact": a.root.exact.exact_str() if a.root.exact else None,
                    "index_above": a.index_above,
                    "index_below": a.index_below,
                    "jump": a.jump,
                    "lower_bound_below": a.lower_bound_below,
                }
                for a in self.instants
            ],
            "strictly_increasing": self.strictly_increasing,
            "lower_bound_ok": self.lower_bound_ok,
            "budget_exhausted": self.budget_exhausted,
        }


def accumulation_diagnostic(scenario: Scenario, k_max: int, *,
                            t_start=Fraction(1),
                            max_halvings: int = 24) -> AccumulationEvidence:
    """Locate the first ``k_max`` instants below ``t_start`` and check that
    the index increases without bound through them, together with the flat
    eigenvalue-count lower bound at each sample point."""
    if k_max < 1:
        raise InvalidInput("k_max must be >= 1")
    t_hi = rm.to_frac(t_start)
    t_lo = t_hi / 4
    budget_exhausted = False
    halvings = 0
    while True:
        model = scenario.model(t_lo * t_lo, t_hi * t_hi)
        roots = _dedupe_roots(crossing_roots(
            scenario, model, scenario.threshold, t_lo, t_hi))
        strict = [r for r in roots if not r.tangent]
        strict.sort(key=lambda r: r.t_lo, reverse=True)
        samples: list[Fraction] = []
        prev_lo = t_hi
        for r in strict:
            samples.append((r.t_hi + prev_lo) / 2)
            prev_lo = r.t_lo
        samples.append((t_lo + prev_lo) / 2)
        counts = [_index_core(scenario, model, s * s).count for s in samples]
        instants = []
        for k, r in enumerate(strict):
            above, below = counts[k], counts[k + 1]
            if above == below:
                continue
            instants.append(AccumulationInstant(
                root=r, index_above=above, index_below=below,
                jump=below - above,
                lower_bound_below=index_lower_bound(scenario, samples[k + 1])))
        if len(instants) >= k_max:
            instants = instants[:k_max]
            break
        halvings += 1
        if halvings > max_halvings:
            budget_exhausted = True
            break
        t_lo = t_lo / 2
    below_seq = [a.index_below for a in instants]
    strictly_increasing = all(y > x for x, y in zip(below_seq, below_seq[1:]))
    lower_bound_ok = all(
        a.lower_bound_below <= a.index_below for a in instants)
    return AccumulationEvidence(tuple(instants), strictly_increasing,
                                lower_bound_ok, budget_exhausted)
