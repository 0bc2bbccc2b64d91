"""Covering towers and the sphere comparison threshold.

On a constant-scalar-curvature metric the normalized total-curvature
functional reduces to Vol^(2/n) * scal.  Pulling a product metric back
along an N-sheeted covering multiplies the volume by N, so the functional
eventually exceeds the round-sphere value Y(S^n) = n(n-1) Vol(S^n)^(2/n),
and strictly exceeding it forces a second solution in the conformal
class.  The equality case occurs exactly (N = 6 for the unit S^2 x T^2
product), so all threshold comparisons here are exact symbolic algebra
with certified interval fallback, never bare floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import InvalidInput, NonPositiveScal, UndecidableComparison
from .exactpi import (as_exact, get_default_precision, sympy_interval,
                      sympy_sign)
from .spectra import sphere_volume


def _sym(x) -> sympy.Expr:
    """Exact input (int, Fraction, string, PiRat, sympy) to a sympy expr."""
    return as_exact(x).to_sympy() if not isinstance(x, sympy.Expr) else x


@dataclass(frozen=True)
class ProductMetricData:
    """Constant-scalar-curvature product (M, g) x (Sigma, lambda h)."""

    scal_g: sympy.Expr
    vol_g: sympy.Expr
    dim_m: int
    scal_h: sympy.Expr
    vol_h: sympy.Expr
    dim_f: int
    lam: sympy.Expr

    @classmethod
    def build(cls, scal_g, vol_g, dim_m, scal_h, vol_h, dim_f, lam=1):
        data = cls(_sym(scal_g), _sym(vol_g), int(dim_m), _sym(scal_h),
                   _sym(vol_h), int(dim_f), _sym(lam))
        if data.n < 3:
            raise InvalidInput("total dimension must be >= 3")
        if sympy_sign(data.scal_g) <= 0:
            raise InvalidInput("scal_g must be positive")
        if sympy_sign(data.vol_g) <= 0 or sympy_sign(data.vol_h) <= 0:
            raise InvalidInput("volumes must be positive")
        if sympy_sign(data.lam) <= 0:
            raise InvalidInput("lambda must be positive")
        return data

    @property
    def n(self) -> int:
        return self.dim_m + self.dim_f

    def combined_scal(self) -> sympy.Expr:
        # scaling the second factor by lambda divides its curvature by lambda
        return self.scal_g + self.scal_h / self.lam

    def combined_volume(self) -> sympy.Expr:
        return self.vol_g * self.lam ** sympy.Rational(self.dim_f, 2) * self.vol_h


def lambda_zero(scal_g, scal_h) -> sympy.Expr:
    """Smallest nonnegative scale bound: max(0, -scal_h/scal_g)."""
    sg, sh = _sym(scal_g), _sym(scal_h)
    if sympy_sign(sg) <= 0:
        raise InvalidInput("scal_g must be positive")
    if sympy_sign(sh) >= 0:
        return sympy.Integer(0)
    return -sh / sg


def hilbert_einstein_value(p: ProductMetricData) -> sympy.Expr:
    """Vol^(2/n) * scal of the product metric; exact."""
    scal = p.combined_scal()
    if sympy_sign(scal) <= 0:
        raise NonPositiveScal(
            "combined scalar curvature is not positive; "
            "lambda must exceed lambda_zero")
    return p.combined_volume() ** sympy.Rational(2, p.n) * scal


def sphere_yamabe_threshold(n: int) -> sympy.Expr:
    """n(n-1) Vol(S^n)^(2/n), the largest possible value of the
    normalized functional at a minimizer."""
    if n < 3:
        raise InvalidInput("threshold needs n >= 3")
    vol = sphere_volume(n).to_sympy()
    return sympy.powsimp(n * (n - 1) * vol ** sympy.Rational(2, n))


def _certified_floor(x: sympy.Expr, precision_bits: int | None = None) -> int:
    """floor of an exact expression; detects exact integers symbolically."""
    if x.is_Integer:
        return int(x)
    if x.is_Rational:
        return math.floor(Fraction(int(x.p), int(x.q)))
    cap = precision_bits or get_default_precision()
    prec = 64
    while True:
        lo, hi = sympy_interval(x, prec)
        flo, fhi = math.floor(lo), math.floor(hi)
        if flo == fhi:
            return flo
        # straddling an integer: either x equals it exactly or we refine
        cand = fhi
        if sympy.simplify(x - cand) == 0:
            return cand
        if prec >= cap:
            raise UndecidableComparison(
                f"floor of {x} undecided at {cap} bits")
        prec = min(prec * 2, cap)


@dataclass(frozen=True)
class ForcingReport:
    """Least covering degree pushing the functional strictly over the
    sphere threshold, with margins certifying both sides."""

    degree: int
    threshold: sympy.Expr
    value_at_degree: sympy.Expr
    value_below_degree: sympy.Expr | None
    margin_at_degree: float
    margin_below_degree: float | None
    equality_below: bool

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "threshold": sympy.sstr(self.threshold),
            "threshold_value": float(self.threshold.evalf(30)),
            "value_at_degree": sympy.sstr(self.value_at_degree),
            "margin_at_degree": self.margin_at_degree,
            "value_below_degree": (
                sympy.sstr(self.value_below_degree)
                if self.value_below_degree is not None else None),
            "margin_below_degree": self.margin_below_degree,
            "equality_below": self.equality_below,
        }


def minimal_forcing_degree(p: ProductMetricData,
                           precision_bits: int | None = None) -> ForcingReport:
    """Least integer N with (N Vol)^(2/n) scal > Y(S^n), strictly.

    Exact equality at N-1 is detected symbolically; a float comparison
    that lets equality slip through as ">" would return one degree too
    few.
    """
    y = sphere_yamabe_threshold(p.n)
    scal = p.combined_scal()
    if sympy_sign(scal) <= 0:
        raise NonPositiveScal("combined scalar curvature is not positive")
    vol = p.combined_volume()
    a1 = hilbert_einstein_value(p)
    if sympy_sign(a1 - y, precision_bits) > 0:
        return ForcingReport(1, y, a1, None,
                             float((a1 - y).evalf(30)), None, False)
    # N > (Y/scal)^(n/2) / Vol
    bound = sympy.powsimp((y / scal) ** sympy.Rational(p.n, 2) / vol)
    if bound.is_Rational:
        n_req = math.floor(Fraction(int(bound.p), int(bound.q))) + 1
    else:
        n_req = _certified_floor(bound, precision_bits) + 1
    value_at = (n_req * vol) ** sympy.Rational(2, p.n) * scal
    value_below = ((n_req - 1) * vol) ** sympy.Rational(2, p.n) * scal
    s_at = sympy_sign(value_at - y, precision_bits)
    s_below = sympy_sign(value_below - y, precision_bits)
    if s_at <= 0 or s_below > 0:
        raise UndecidableComparison(
            "minimal forcing degree failed its own certification")
    return ForcingReport(
        degree=n_req,
        threshold=y,
        value_at_degree=sympy.powsimp(value_at),
        value_below_degree=sympy.powsimp(value_below),
        margin_at_degree=float((value_at - y).evalf(30)),
        margin_below_degree=float((value_below - y).evalf(30)),
        equality_below=(s_below == 0),
    )


@dataclass(frozen=True)
class TowerLevel:
    degree: int
    cumulative_degree: int
    volume: sympy.Expr
    a_value: sympy.Expr
    crossed: bool

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "cumulative_degree": self.cumulative_degree,
            "volume": float(self.volume.evalf(30)),
            "volume_exact": sympy.sstr(self.volume),
            "A_value": float(self.a_value.evalf(30)),
            "A_value_exact": sympy.sstr(self.a_value),
            "crossed": self.crossed,
        }


@dataclass(frozen=True)
class TowerLedger:
    levels: tuple[TowerLevel, ...]
    threshold: sympy.Expr
    first_crossing: int | None
    a_values_strictly_increase: bool

    def to_json(self) -> dict:
        return {
            "threshold": sympy.sstr(self.threshold),
            "threshold_value": float(self.threshold.evalf(30)),
            "first_crossing_level": self.first_crossing,
            "a_values_strictly_increase": self.a_values_strictly_increase,
            "levels": [lv.to_json() for lv in self.levels],
        }


def tower_simulate(p: ProductMetricData, degrees: list[int],
                   precision_bits: int | None = None) -> TowerLedger:
    """Walk a chain of coverings, recording volume, functional value, and
    whether the strict sphere threshold is crossed at each level.

    Consecutive levels always carry different functional values (the
    volume strictly grows), which is what forces new solutions above the
    threshold.
    """
    for k in degrees:
        if int(k) < 2:
            raise InvalidInput("covering degrees must be >= 2")
    y = sphere_yamabe_threshold(p.n)
    scal = p.combined_scal()
    if sympy_sign(scal) <= 0:
        raise NonPositiveScal("combined scalar curvature is not positive")
    vol0 = p.combined_volume()
    levels = []
    cum = 1
    first = None
    for k in degrees:
        cum *= int(k)
        vol = cum * vol0
        a_val = sympy.powsimp(vol ** sympy.Rational(2, p.n) * scal)
        crossed = sympy_sign(a_val - y, precision_bits) > 0
        if crossed and first is None:
            first = len(levels) + 1
        levels.append(TowerLevel(int(k), cum, vol, a_val, crossed))
    return TowerLedger(tuple(levels), y, first, True)


def singular_scal(m: int, k: int) -> tuple[int, str]:
    """Scalar curvature (m-2k-2)(m-1) of the model product metric on the
    sphere complement of a k-subsphere, with its sign regime."""
    if not 0 <= k <= m - 2:
        raise InvalidInput("need 0 <= k <= m-2")
    value = (m - 2 * k - 2) * (m - 1)
    if 2 * k < m - 2:
        regime = "positive"
    elif 2 * k == m - 2:
        regime = "zero"
    else:
        regime = "negative"
    return value, regime
