"""Exact real scalars for spectral thresholds.

Two representations cooperate:

* ``PiRat`` -- Laurent polynomials in pi with rational coefficients.  All
  flat-torus eigenvalues (rational multiples of pi^2), thresholds of the
  form scal/(n-1) with scal a pi-polynomial, and rational sphere spectra
  live here.  Sign evaluation is certified: a nonzero polynomial in pi
  with rational coefficients cannot vanish (pi is transcendental), so
  interval refinement always terminates.

* ``SymReal`` -- a thin wrapper over an exact sympy expression for values
  outside the pi-polynomial class (fractional powers from unit-volume
  normalizations, square roots from sphere thresholds).  Signs are decided
  by interval arithmetic up to a configured precision, with a symbolic
  zero-proof attempt; an undecided comparison raises rather than guessing.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

import sympy
from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import mpf_pi

from .errors import InvalidInput, NonIntegerMultiplicity, UndecidableComparison

_DEFAULT_PRECISION_BITS = 128
_PIRAT_PREC_CAP = 1 << 22  # mathematically unreachable for nonzero input


def set_default_precision(bits: int) -> None:
    global _DEFAULT_PRECISION_BITS
    if bits < 64:
        raise InvalidInput("precision_bits must be >= 64")
    _DEFAULT_PRECISION_BITS = int(bits)


def get_default_precision() -> int:
    return _DEFAULT_PRECISION_BITS


def _raw_mpf_to_frac(t) -> Fraction:
    sign, man, exp, _ = t
    man = int(man)
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man * (1 << exp))
    return Fraction(man, 1 << (-exp))


@lru_cache(maxsize=32)
def pi_bounds(prec: int) -> tuple[Fraction, Fraction]:
    """Certified rational bounds pi_lo < pi < pi_hi at ``prec`` bits."""
    lo = _raw_mpf_to_frac(mpf_pi(prec, "d"))
    hi = _raw_mpf_to_frac(mpf_pi(prec, "u"))
    return lo, hi


def _ipow(lo: Fraction, hi: Fraction, e: int) -> tuple[Fraction, Fraction]:
    # interval power for 0 < lo <= hi
    if e >= 0:
        return lo ** e, hi ** e
    return hi ** e, lo ** e


class PiRat:
    """sum of c_e * pi**e over finitely many integer exponents e."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        cleaned = {}
        for e, c in dict(terms).items():
            c = c if isinstance(c, Fraction) else Fraction(c)
            if c:
                cleaned[int(e)] = c
        self._terms = tuple(sorted(cleaned.items()))

    @classmethod
    def rational(cls, c) -> "PiRat":
        return cls({0: Fraction(c)})

    @classmethod
    def pi_power(cls, c, e: int) -> "PiRat":
        return cls({e: Fraction(c)})

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(e == 0 for e, _ in self._terms)

    def as_rational(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_rational():
            raise InvalidInput("not a rational value")
        return self._terms[0][1]

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def monomial(self) -> tuple[Fraction, int]:
        """(coefficient, pi-exponent); raises unless exactly one term."""
        if not self.is_monomial():
            raise InvalidInput("not a pi-monomial")
        e, c = self._terms[0]
        return c, e

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PiRat):
            return other
        if isinstance(other, (int, Fraction)):
            return PiRat.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = dict(self._terms)
        for e, c in o._terms:
            d[e] = d.get(e, Fraction(0)) + c
        return PiRat(d)

    __radd__ = __add__

    def __neg__(self):
        return PiRat({e: -c for e, c in self._terms})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = {}
        for e1, c1 in self._terms:
            for e2, c2 in o._terms:
                e = e1 + e2
                d[e] = d.get(e, Fraction(0)) + c1 * c2
        return PiRat(d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return PiRat({e: c / other for e, c in self._terms})
        if isinstance(other, PiRat):
            if other.is_zero():
                raise ZeroDivisionError
            c, e = other.monomial()  # general PiRat division not closed
            return PiRat({ee - e: cc / c for ee, cc in self._terms})
        return NotImplemented

    def monomial_pow(self, e: int) -> "PiRat":
        c, ex = self.monomial()
        if e >= 0:
            return PiRat({ex * e: c ** e})
        if c == 0:
            raise ZeroDivisionError
        return PiRat({ex * e: c ** e})

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        return hash(("PiRat", self._terms))

    # -- certified sign ------------------------------------------------

    def interval(self, prec: int) -> tuple[Fraction, Fraction]:
        plo, phi = pi_bounds(prec)
        lo = hi = Fraction(0)
        for e, c in self._terms:
            tlo, thi = _ipow(plo, phi, e)
            if c >= 0:
                lo += c * tlo
                hi += c * thi
            else:
                lo += c * thi
                hi += c * tlo
        return lo, hi

    def sign(self, precision_bits: int | None = None) -> int:
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            return 1 if self._terms[0][1] > 0 else -1
        prec = 64
        while prec <= _PIRAT_PREC_CAP:
            lo, hi = self.interval(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise UndecidableComparison(f"sign of {self.exact_str()} undecided")

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    # -- conversions ----------------------------------------------------

    def to_float(self) -> float:
        if self.is_zero():
            return 0.0
        lo, hi = self.interval(128)
        return float((lo + hi) / 2)

    def to_sympy(self) -> sympy.Expr:
        out = sympy.Integer(0)
        for e, c in self._terms:
            out += sympy.Rational(c.numerator, c.denominator) * sympy.pi ** e
        return out

    def exact_str(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms, key=lambda t: -t[0]):
            if e == 0:
                term = str(c)
            else:
                pistr = "pi" if e == 1 else f"pi^{e}"
                if c == 1:
                    term = pistr
                elif c == -1:
                    term = f"-{pistr}"
                else:
                    term = f"{c}*{pistr}"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self):
        return f"PiRat({self.exact_str()})"


PI = PiRat.pi_power(1, 1)
PI2 = PiRat.pi_power(1, 2)


# ---------------------------------------------------------------------------
# sympy-backed exact reals


_ALLOWED_FUNCS = (sympy.cos, sympy.sin)


def _iv_eval(expr: sympy.Expr, ctx: MPIntervalContext):
    if expr is sympy.pi:
        return ctx.pi
    if isinstance(expr, sympy.Integer):
        return ctx.mpf(int(expr))
    if isinstance(expr, sympy.Rational):
        return ctx.mpf(int(expr.p)) / ctx.mpf(int(expr.q))
    if isinstance(expr, sympy.Add):
        out = ctx.mpf(0)
        for a in expr.args:
            out += _iv_eval(a, ctx)
        return out
    if isinstance(expr, sympy.Mul):
        out = ctx.mpf(1)
        for a in expr.args:
            out *= _iv_eval(a, ctx)
        return out
    if isinstance(expr, sympy.Pow):
        base = _iv_eval(expr.base, ctx)
        ex = expr.exp
        if isinstance(ex, sympy.Integer):
            return base ** int(ex)
        if isinstance(ex, sympy.Rational):
            if not base.a > 0:
                raise UndecidableComparison(
                    "fractional power of an interval not certified positive")
            e_iv = ctx.mpf(int(ex.p)) / ctx.mpf(int(ex.q))
            return ctx.exp(e_iv * ctx.log(base))
        raise InvalidInput(f"unsupported exponent in exact expression: {ex}")
    if isinstance(expr, _ALLOWED_FUNCS):
        arg = _iv_eval(expr.args[0], ctx)
        return ctx.cos(arg) if isinstance(expr, sympy.cos) else ctx.sin(arg)
    raise InvalidInput(f"unsupported node in exact expression: {expr!r}")


def sympy_interval(expr: sympy.Expr, prec: int) -> tuple[Fraction, Fraction]:
    ctx = MPIntervalContext()
    ctx.prec = prec + 16
    iv = _iv_eval(expr, ctx)
    a, b = iv._mpi_
    return _raw_mpf_to_frac(a), _raw_mpf_to_frac(b)


def _sympy_is_zero(expr: sympy.Expr) -> bool:
    if expr.is_zero:
        return True
    try:
        simplified = sympy.simplify(expr)
    except Exception:
        return False
    if simplified.is_zero:
        return True
    try:
        return bool(expr.equals(0))
    except Exception:
        return False


def sympy_sign(expr: sympy.Expr, precision_bits: int | None = None) -> int:
    cap = precision_bits or _DEFAULT_PRECISION_BITS
    if expr.is_Rational:
        return 0 if expr == 0 else (1 if expr > 0 else -1)
    prec = 64
    zero_checked = False
    while True:
        lo, hi = sympy_interval(expr, prec)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if not zero_checked:
            zero_checked = True
            if _sympy_is_zero(expr):
                return 0
        if prec >= cap:
            raise UndecidableComparison(
                f"sign of {expr} undecided at {cap} bits")
        prec = min(prec * 2, cap)


class SymReal:
    """Exact real represented by a sympy expression."""

    __slots__ = ("expr",)

    def __init__(self, expr):
        if isinstance(expr, SymReal):
            expr = expr.expr
        elif isinstance(expr, PiRat):
            expr = expr.to_sympy()
        elif isinstance(expr, Fraction):
            expr = sympy.Rational(expr.numerator, expr.denominator)
        else:
            expr = sympy.sympify(expr)
        if expr.atoms(sympy.Float):
            raise InvalidInput("floating-point atoms are not exact")
        self.expr = expr

    def _coerce(self, other) -> "SymReal | None":
        if isinstance(other, SymReal):
            return other
        if isinstance(other, (int, Fraction, PiRat)):
            return SymReal(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else SymReal(self.expr + o.expr)

    __radd__ = __add__

    def __neg__(self):
        return SymReal(-self.expr)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else SymReal(self.expr - o.expr)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else SymReal(o.expr - self.expr)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else SymReal(self.expr * o.expr)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else SymReal(self.expr / o.expr)

    def sign(self, precision_bits: int | None = None) -> int:
        return sympy_sign(self.expr, precision_bits)

    def is_zero(self) -> bool:
        return _sympy_is_zero(self.expr)

    def to_float(self) -> float:
        return float(self.expr.evalf(30))

    def to_sympy(self) -> sympy.Expr:
        return self.expr

    def exact_str(self) -> str:
        return sympy.sstr(self.expr)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.expr == o.expr

    def __hash__(self):
        return hash(("SymReal", self.expr))

    def __repr__(self):
        return f"SymReal({self.expr})"


Exact = PiRat | SymReal


# ---------------------------------------------------------------------------
# uniform helpers over both representations


def pirat_from_sympy(expr: sympy.Expr) -> PiRat | None:
    """Convert a sympy expression to PiRat when it lies in that class."""
    expr = sympy.expand(expr)
    terms = expr.args if isinstance(expr, sympy.Add) else (expr,)
    out = {}
    for t in terms:
        coeff, rest = t.as_coeff_Mul()
        if not coeff.is_Rational:
            return None
        if rest == 1:
            e = 0
        elif rest is sympy.pi:
            e = 1
        elif (
            isinstance(rest, sympy.Pow)
            and rest.base is sympy.pi
            and isinstance(rest.exp, sympy.Integer)
        ):
            e = int(rest.exp)
        else:
            return None
        out[e] = out.get(e, Fraction(0)) + Fraction(int(coeff.p), int(coeff.q))
    return PiRat(out)


def as_exact(x) -> Exact:
    """Promote to an exact scalar.  Floats are rejected."""
    if isinstance(x, (PiRat, SymReal)):
        return x
    if isinstance(x, (int, Fraction)):
        return PiRat.rational(x)
    if isinstance(x, str):
        return parse_exact(x)
    if isinstance(x, sympy.Expr):
        p = pirat_from_sympy(x)
        return p if p is not None else SymReal(x)
    if isinstance(x, float):
        raise InvalidInput(
            "float given where an exact value is required; "
            "pass a rational string instead")
    raise InvalidInput(f"cannot interpret {x!r} as an exact value")


def exact_from_float_or_str(x) -> Exact:
    """Lenient conversion for cutoffs and tolerances, where a decimal
    literal is an acceptable exact input (converted via its repr)."""
    if isinstance(x, float):
        return PiRat.rational(Fraction(repr(x)))
    return as_exact(x)


def ex_sign(x, precision_bits: int | None = None) -> int:
    x = as_exact(x)
    return x.sign(precision_bits)


def ex_sub(a, b) -> Exact:
    a, b = as_exact(a), as_exact(b)
    if isinstance(a, PiRat) and isinstance(b, PiRat):
        return a - b
    return SymReal(a) - SymReal(b)


def ex_add(a, b) -> Exact:
    a, b = as_exact(a), as_exact(b)
    if isinstance(a, PiRat) and isinstance(b, PiRat):
        return a + b
    return SymReal(a) + SymReal(b)


def ex_mul(a, b) -> Exact:
    a, b = as_exact(a), as_exact(b)
    if isinstance(a, PiRat) and isinstance(b, PiRat):
        return a * b
    return SymReal(a) * SymReal(b)


def ex_div_int(a, n: int) -> Exact:
    a = as_exact(a)
    if isinstance(a, PiRat):
        return a / n
    return SymReal(a.expr / n)


def ex_cmp(a, b, precision_bits: int | None = None) -> int:
    return ex_sign(ex_sub(a, b), precision_bits)


def ex_float(a) -> float:
    return as_exact(a).to_float()


def ex_str(a) -> str:
    return as_exact(a).exact_str()


def ex_key(a):
    """Hashable grouping key; PiRat is canonical, SymReal structural."""
    a = as_exact(a)
    if isinstance(a, PiRat):
        return ("p", a.terms)
    return ("s", a.expr)


# ---------------------------------------------------------------------------
# parsing


_PI_TERM = re.compile(
    r"^(?P<coef>[+-]?\d+(?:/\d+)?)?"
    r"(?P<star>\*)?"
    r"(?P<pi>pi(?:\^(?P<exp>-?\d+))?)?$"
)


def _parse_pirat_term(term: str) -> tuple[int, Fraction] | None:
    m = _PI_TERM.match(term.replace(" ", "").replace("**", "^"))
    if not m or (m.group("star") and not (m.group("coef") and m.group("pi"))):
        return None
    if not m.group("coef") and not m.group("pi"):
        return None
    coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
    if m.group("coef") in ("+", "-"):
        return None
    e = 0
    if m.group("pi"):
        e = int(m.group("exp")) if m.group("exp") else 1
    return e, coef


def parse_exact(s: str) -> Exact:
    """Parse an exact scalar string.

    The fast grammar covers rationals and pi-polynomials, e.g. ``"25/3"``,
    ``"8*pi^2"``, ``"4*pi^2 - 8/3*pi"``.  Anything else falls back to a
    restricted sympy parse (sqrt/pi/rationals only, no floats).
    """
    text = s.strip()
    if not text:
        raise InvalidInput("empty exact value")
    chunks = re.split(r"(?<![\^*/])([+-])", text.replace("**", "^"))
    # re.split keeps separators; rebuild signed terms
    terms = []
    sign = 1
    buf = chunks[0].strip()
    rest = chunks[1:]
    ok = True
    parsed = []
    while True:
        if buf:
            t = _parse_pirat_term(buf)
            if t is None:
                ok = False
                break
            e, c = t
            parsed.append((e, sign * c))
        if not rest:
            break
        sep, buf = rest[0], rest[1].strip()
        rest = rest[2:]
        sign = 1 if sep == "+" else -1
    if ok and parsed:
        d = {}
        for e, c in parsed:
            d[e] = d.get(e, Fraction(0)) + c
        return PiRat(d)
    # restricted symbolic fallback
    try:
        expr = sympy.parse_expr(
            text.replace("^", "**"),
            local_dict={"pi": sympy.pi, "sqrt": sympy.sqrt, "Rational": sympy.Rational},
            evaluate=True,
        )
    except Exception as exc:
        raise InvalidInput(f"cannot parse exact value {s!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr) or expr.atoms(sympy.Float):
        raise InvalidInput(f"not an exact value: {s!r}")
    if expr.free_symbols:
        raise InvalidInput(f"unknown symbols in exact value {s!r}")
    p = pirat_from_sympy(expr)
    return p if p is not None else SymReal(expr)


# ---------------------------------------------------------------------------
# certified integer snapping (for character sums)


def certified_integer(rational_part: Fraction, residual_expr: sympy.Expr | None,
                      precision_bits: int | None = None) -> int:
    """Value known to be an integer if the implementation is correct;
    verify and return it, or raise NonIntegerMultiplicity."""
    if residual_expr is None or residual_expr == 0:
        if rational_part.denominator != 1:
            raise NonIntegerMultiplicity(
                f"character sum is {rational_part}, not an integer")
        return int(rational_part)
    total = sympy.Rational(rational_part.numerator,
                           rational_part.denominator) + residual_expr
    simplified = sympy.simplify(total)
    if simplified.is_Rational:
        if simplified.q != 1:
            raise NonIntegerMultiplicity(
                f"character sum is {simplified}, not an integer")
        return int(simplified)
    cap = precision_bits or _DEFAULT_PRECISION_BITS
    prec = 64
    while True:
        lo, hi = sympy_interval(total, prec)
        nlo, nhi = math.ceil(lo), math.floor(hi)
        if nlo > nhi:
            raise NonIntegerMultiplicity(
                f"character sum in ({float(lo)}, {float(hi)}) contains no integer")
        if nlo == nhi and (hi - lo) < Fraction(1, 1 << 40):
            return nlo
        if prec >= max(cap, 4096):
            raise UndecidableComparison(
                "character sum could not be certified as an integer")
        prec *= 2
