"""Exact scalar arithmetic underlying the whole workbench.

A :class:`ScalarExpr` is a finite sum of monomials ``c * x1^e1 * ... * xN^eN``
with rational coefficients and *rational* exponents (so ``x2^(1/2)`` and
``x2^(-3/2)`` are ordinary monomials).  The point-mover uses the same term
structure with Gaussian-rational coefficients.  A :class:`RationalExpr` is a
quotient ``num/den`` whose denominator is kept monic under the
graded-lexicographic term order; equality of quotients is decided by
cross-multiplication and no gcd cancellation is attempted beyond that
normalization.

Variables are positional (``x1 .. xN``); whether a variable may carry a
fractional exponent is a property of the owning chart and is validated where
charts are known (see :mod:`plectic.exterior`).
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Optional, Sequence, Union

from .errors import (
    DivisionByZero,
    DomainViolation,
    IrrationalValue,
    ParseError,
    ShapeError,
)

Q = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, Rational):
        return Fraction(v)
    raise ShapeError(f"not an exact rational: {v!r}")


class GaussianRational:
    """Element of Q(i): a complex number with rational real/imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    @classmethod
    def ensure(cls, v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        return cls(_as_fraction(v))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    def __add__(self, other):
        o = GaussianRational.ensure(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.ensure(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.ensure(other) - self

    def __mul__(self, other):
        o = GaussianRational.ensure(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.ensure(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise DivisionByZero("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        return GaussianRational.ensure(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        imp = "i" if abs(self.im) == 1 else f"{abs(self.im)}i"
        sign = "-" if self.im < 0 else "+"
        if self.re == 0:
            return f"{'-' if self.im < 0 else ''}{imp}"
        return f"{self.re}{sign}{imp}"

    __repr__ = __str__

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


I = GaussianRational(0, 1)

Coeff = Union[Fraction, GaussianRational]


def _coeff(v) -> Coeff:
    if isinstance(v, GaussianRational):
        return v
    return _as_fraction(v)


def _integer_root(n: int, q: int) -> Optional[int]:
    """Exact q-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    if q == 1:
        return n
    if q == 2:
        r = math.isqrt(n)
        return r if r * r == n else None
    r = round(n ** (1.0 / q))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**q == n:
            return c
    return None


def fraction_root(fr: Fraction, q: int) -> Optional[Fraction]:
    """Exact q-th root of a nonnegative rational, or None."""
    if fr < 0:
        return None
    a = _integer_root(fr.numerator, q)
    b = _integer_root(fr.denominator, q)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def fraction_pow(base: Fraction, e: Fraction) -> Fraction:
    """Exact base**e; raises when the result leaves Q."""
    if e.denominator == 1:
        k = e.numerator
        if k >= 0:
            return base**k
        if base == 0:
            raise DivisionByZero("0 raised to a negative power")
        return ONE / base**(-k)
    if base < 0:
        raise DomainViolation(
            f"fractional power of negative value {base}"
        )
    if base == 0:
        if e > 0:
            return ZERO
        raise DivisionByZero("0 raised to a negative power")
    root = fraction_root(base, e.denominator)
    if root is None:
        raise IrrationalValue(f"{base}^(1/{e.denominator}) is irrational")
    return fraction_pow(root, Fraction(e.numerator))


def float_pow(base: float, e: Fraction) -> float:
    if base < 0 and e.denominator != 1:
        raise DomainViolation(f"fractional power of negative value {base}")
    if base == 0 and e < 0:
        raise DivisionByZero("0 raised to a negative power")
    return float(base) ** float(e)


def _norm_exp(e):
    """Exponent entry: plain int when integral (cheap hashing), else Fraction.

    hash(Fraction(k)) == hash(k), so mixed tuples stay consistent dict keys;
    ints implement the Rational protocol, so .numerator/.denominator work
    uniformly downstream.
    """
    if type(e) is int:
        return e
    if isinstance(e, Fraction):
        return e.numerator if e.denominator == 1 else e
    f = _as_fraction(e)
    return f.numerator if f.denominator == 1 else f


def grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class ScalarExpr:
    """Normalized sum of monomials over ``dim`` positional variables."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, Coeff] | None = None):
        if dim < 1:
            raise ShapeError("chart dimension must be positive")
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != dim:
                    raise ShapeError(
                        f"exponent vector {exps} has length {len(exps)}, expected {dim}"
                    )
                key = tuple(_norm_exp(e) for e in exps)
                c = _coeff(c)
                if key in clean:
                    c = clean[key] + c
                if c:
                    clean[key] = c
                elif key in clean:
                    del clean[key]
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("ScalarExpr is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "ScalarExpr":
        return cls(dim, {})

    @classmethod
    def const(cls, dim: int, c) -> "ScalarExpr":
        c = _coeff(c)
        return cls(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def variable(cls, dim: int, index: int, exponent=1) -> "ScalarExpr":
        """Monomial x_index^exponent (index is 1-based)."""
        if not 1 <= index <= dim:
            raise ShapeError(f"variable index {index} out of range 1..{dim}")
        exps = [ZERO] * dim
        exps[index - 1] = _as_fraction(exponent)
        return cls(dim, {tuple(exps): ONE})

    @classmethod
    def monomial(cls, dim: int, coeff, exps: Sequence) -> "ScalarExpr":
        return cls(dim, {tuple(_as_fraction(e) for e in exps): _coeff(coeff)})

    # -- predicates ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_value(self) -> Coeff:
        if self.is_zero:
            return ZERO
        if not self.is_constant:
            raise ShapeError("expression is not constant")
        return next(iter(self.terms.values()))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def fractional_vars(self) -> set:
        """1-based indices of variables carrying a non-integer exponent."""
        out = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e.denominator != 1:
                    out.add(i + 1)
        return out

    def used_vars(self) -> set:
        out = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    out.add(i + 1)
        return out

    def has_negative_exponent(self) -> bool:
        return any(e < 0 for exps in self.terms for e in exps)

    def is_polynomial(self) -> bool:
        return all(
            e.denominator == 1 and e >= 0 for exps in self.terms for e in exps
        )

    # -- term order ---------------------------------------------------

    def leading_key(self) -> tuple:
        if self.is_zero:
            raise ShapeError("zero expression has no leading term")
        return max(self.terms, key=grlex_key)

    def leading_coeff(self) -> Coeff:
        return self.terms[self.leading_key()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "ScalarExpr"):
        if self.dim != other.dim:
            raise ShapeError(
                f"mixing expressions over {self.dim} and {other.dim} variables"
            )

    def __add__(self, other: "ScalarExpr") -> "ScalarExpr":
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, ZERO) + c
            if s:
                terms[k] = s
            elif k in terms:
                del terms[k]
        return ScalarExpr(self.dim, terms)

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "ScalarExpr") -> "ScalarExpr":
        return self + (-other)

    def __mul__(self, other: "ScalarExpr") -> "ScalarExpr":
        self._check(other)
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                s = out.get(k, ZERO) + ca * cb
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return ScalarExpr(self.dim, out)

    def scale(self, c) -> "ScalarExpr":
        c = _coeff(c)
        if not c:
            return ScalarExpr.zero(self.dim)
        return ScalarExpr(self.dim, {k: v * c for k, v in self.terms.items()})

    def pow_int(self, k: int) -> "ScalarExpr":
        if k < 0:
            raise ShapeError("use RationalExpr for negative powers")
        result = ScalarExpr.const(self.dim, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def monomial_root(self, q: int) -> "ScalarExpr":
        """Exact q-th root of a single-term expression."""
        if len(self.terms) != 1:
            raise IrrationalValue("root of a non-monomial expression")
        (exps, c), = self.terms.items()
        if isinstance(c, GaussianRational):
            raise IrrationalValue("root of a Gaussian coefficient")
        root = fraction_root(c, q)
        if root is None:
            raise IrrationalValue(f"{c}^(1/{q}) is irrational")
        return ScalarExpr(self.dim, {tuple(Fraction(e) / q for e in exps): root})

    # -- calculus -----------------------------------------------------

    def partial(self, index: int) -> "ScalarExpr":
        """d/dx_index (1-based), term-wise power rule."""
        if not 1 <= index <= self.dim:
            raise ShapeError(f"variable index {index} out of range 1..{self.dim}")
        i = index - 1
        out: dict = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if not e:
                continue
            k = exps[:i] + (e - 1,) + exps[i + 1:]
            s = out.get(k, ZERO) + c * e
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return ScalarExpr(self.dim, out)

    def eval(self, point: Sequence, mode: str = "exact"):
        """Evaluate at a rational (or Gaussian-rational) point.

        Exact mode demands every fractional power to stay rational and
        raises :class:`IrrationalValue` otherwise.
        """
        if len(point) != self.dim:
            raise ShapeError(f"point of length {len(point)}, expected {self.dim}")
        if mode == "float":
            fpoint = [float(v) for v in point]
            total = 0.0
            for exps, c in self.terms.items():
                acc = float(c) if not isinstance(c, GaussianRational) else c.to_complex()
                for v, e in zip(fpoint, exps):
                    if e:
                        acc *= float_pow(v, e)
                total += acc
            return total
        pt = [v if isinstance(v, GaussianRational) else _as_fraction(v) for v in point]
        total = None
        for exps, c in self.terms.items():
            acc = c
            for v, e in zip(pt, exps):
                if not e:
                    continue
                if isinstance(v, GaussianRational):
                    if e.denominator != 1:
                        raise IrrationalValue(
                            "fractional power of a Gaussian rational"
                        )
                    k = e.numerator
                    if k >= 0:
                        p = GaussianRational(1)
                        for _ in range(k):
                            p = p * v
                    else:
                        p = GaussianRational(1)
                        for _ in range(-k):
                            p = p * v
                        p = GaussianRational(1) / p
                    acc = acc * p
                else:
                    acc = acc * fraction_pow(v, e)
            total = acc if total is None else total + acc
        return ZERO if total is None else total

    def substitute(self, components: Sequence["RationalExpr"]) -> "RationalExpr":
        """Compose: replace x_j by components[j-1] (RationalExprs)."""
        if len(components) != self.dim:
            raise ShapeError("component count does not match variable count")
        if not components:
            raise ShapeError("empty substitution")
        tdim = components[0].dim
        total = RationalExpr.const(tdim, 0)
        for exps, c in self.terms.items():
            acc = RationalExpr.const(tdim, c)
            for comp, e in zip(components, exps):
                if not e:
                    continue
                acc = acc * comp.pow_fraction(e)
            total = total + acc
        return total

    # -- comparison / io ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, ScalarExpr):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == ScalarExpr.const(self.dim, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"ScalarExpr({self!s})"


def _format_exponent(e: Fraction) -> str:
    if e == 1:
        return ""
    if e.denominator == 1 and e >= 0:
        return f"^{e.numerator}"
    return f"^({e})"


def _format_coeff(c: Coeff) -> str:
    if isinstance(c, GaussianRational):
        if c.is_real:
            return str(c.re)
        return f"({c})"
    return str(c)


def format_scalar(expr: ScalarExpr, var_names: Optional[Sequence[str]] = None) -> str:
    """Canonical printing: graded-lex descending, exponents as p/q."""
    if expr.is_zero:
        return "0"
    names = var_names or [f"x{i}" for i in range(1, expr.dim + 1)]
    parts = []
    for exps, c in expr.sorted_terms():
        factors = [
            f"{names[i]}{_format_exponent(e)}" for i, e in enumerate(exps) if e
        ]
        if not factors:
            body = _format_coeff(c)
            negative = not isinstance(c, GaussianRational) and c < 0
            if negative:
                body = _format_coeff(-c)
        else:
            negative = not isinstance(c, GaussianRational) and c < 0
            mag = -c if negative else c
            if mag == 1 and not isinstance(mag, GaussianRational):
                body = "*".join(factors)
            else:
                body = "*".join([_format_coeff(mag)] + factors)
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append(("- " if negative else "+ ") + body)
    return " ".join(parts)


class RationalExpr:
    """Quotient of two ScalarExprs with a monic, nonzero denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: ScalarExpr, den: ScalarExpr | None = None):
        if den is None:
            den = ScalarExpr.const(num.dim, 1)
        if num.dim != den.dim:
            raise ShapeError("numerator and denominator dimensions differ")
        if den.is_zero:
            raise DivisionByZero("zero denominator")
        if num.is_zero:
            den = ScalarExpr.const(num.dim, 1)
        else:
            lc = den.leading_coeff()
            if lc != 1:
                inv = (
                    GaussianRational(1) / lc
                    if isinstance(lc, GaussianRational)
                    else ONE / lc
                )
                num = num.scale(inv)
                den = den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalExpr is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def const(cls, dim: int, c) -> "RationalExpr":
        return cls(ScalarExpr.const(dim, c))

    @classmethod
    def variable(cls, dim: int, index: int, exponent=1) -> "RationalExpr":
        return cls(ScalarExpr.variable(dim, index, exponent))

    @classmethod
    def from_scalar(cls, s: ScalarExpr) -> "RationalExpr":
        return cls(s)

    # -- predicates ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.num.dim

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self):
        return not self.is_zero

    @property
    def den_is_one(self) -> bool:
        return self.den.is_constant and self.den.constant_value() == 1

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Coeff:
        if not self.is_constant:
            raise ShapeError("expression is not constant")
        if self.is_zero:
            return ZERO
        return self.num.constant_value() / self.den.constant_value()

    def fractional_vars(self) -> set:
        return self.num.fractional_vars() | self.den.fractional_vars()

    def is_polynomial(self) -> bool:
        return self.den_is_one and self.num.is_polynomial()

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "RationalExpr"):
        if self.dim != other.dim:
            raise ShapeError("mixing expressions over different charts")

    @staticmethod
    def _coerce(other, dim) -> "RationalExpr":
        if isinstance(other, RationalExpr):
            return other
        if isinstance(other, ScalarExpr):
            return RationalExpr(other)
        return RationalExpr.const(dim, other)

    def __add__(self, other):
        other = self._coerce(other, self.dim)
        self._check(other)
        if self.den.terms == other.den.terms:
            return RationalExpr(self.num + other.num, self.den)
        return RationalExpr(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other, self.dim))

    def __rsub__(self, other):
        return self._coerce(other, self.dim) - self

    def __mul__(self, other):
        other = self._coerce(other, self.dim)
        self._check(other)
        return RationalExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other, self.dim)
        self._check(other)
        if other.is_zero:
            raise DivisionByZero("division by zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other, self.dim) / self

    def pow_int(self, k: int) -> "RationalExpr":
        if k >= 0:
            return RationalExpr(self.num.pow_int(k), self.den.pow_int(k))
        if self.is_zero:
            raise DivisionByZero("negative power of zero")
        return RationalExpr(self.den.pow_int(-k), self.num.pow_int(-k))

    def pow_fraction(self, e: Fraction) -> "RationalExpr":
        e = _as_fraction(e)
        monomial = self.num.is_monomial() and self.den.is_monomial()
        if e.denominator == 1 and (e >= 0 or not monomial):
            return self.pow_int(e.numerator)
        if not monomial:
            raise IrrationalValue(
                "fractional power of a non-monomial expression"
            )
        # keep rational exponents inside the term rather than the quotient
        ((exps, c),) = self.as_scalar().terms.items()
        if isinstance(c, GaussianRational):
            if e.denominator != 1:
                raise IrrationalValue("fractional power of a Gaussian coefficient")
            acc = GaussianRational(1)
            for _ in range(-e.numerator):
                acc = acc * c
            newc: Coeff = GaussianRational(1) / acc
        else:
            newc = fraction_pow(c, e)
        return RationalExpr(
            ScalarExpr(self.dim, {tuple(x * e for x in exps): newc})
        )

    # -- calculus -----------------------------------------------------

    def partial(self, index: int) -> "RationalExpr":
        if self.den_is_one:
            return RationalExpr(self.num.partial(index))
        dn = self.num.partial(index) * self.den - self.num * self.den.partial(index)
        return RationalExpr(dn, self.den * self.den)

    def eval(self, point: Sequence, mode: str = "exact"):
        nv = self.num.eval(point, mode)
        dv = self.den.eval(point, mode)
        if mode == "float":
            if dv == 0.0:
                raise DivisionByZero("denominator vanishes at evaluation point")
            return nv / dv
        if not dv:
            raise DivisionByZero("denominator vanishes at evaluation point")
        return nv / dv

    def substitute(self, components: Sequence["RationalExpr"]) -> "RationalExpr":
        n = self.num.substitute(components)
        d = self.den.substitute(components)
        if d.is_zero:
            raise DivisionByZero("denominator vanishes under substitution")
        return n / d

    def as_scalar(self) -> ScalarExpr:
        """Fold into a plain monomial sum; needs a monomial denominator."""
        if self.den_is_one:
            return self.num
        if not self.den.is_monomial():
            raise IrrationalValue("denominator is not a monomial")
        (dexps, dc), = self.den.terms.items()
        inv = ONE / dc if not isinstance(dc, GaussianRational) else GaussianRational(1) / dc
        return ScalarExpr(
            self.dim,
            {
                tuple(a - b for a, b in zip(exps, dexps)): c * inv
                for exps, c in self.num.terms.items()
            },
        )

    # -- comparison / io ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ScalarExpr)):
            other = self._coerce(other, self.dim)
        if not isinstance(other, RationalExpr):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return (self.num * other.den - other.num * self.den).is_zero

    def __hash__(self):
        # Canonical enough for caching: hash the folded scalar when cheap.
        if self.den_is_one:
            return hash(self.num)
        return hash((self.num, self.den))

    def __str__(self):
        return format_rational(self)

    def __repr__(self):
        return f"RationalExpr({self!s})"


def format_rational(expr: RationalExpr, var_names: Optional[Sequence[str]] = None) -> str:
    if expr.den_is_one:
        return format_scalar(expr.num, var_names)
    return f"({format_scalar(expr.num, var_names)})/({format_scalar(expr.den, var_names)})"


# ---------------------------------------------------------------------------
# Expression grammar
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := ('-'|'+') factor | atom ['^' exponent]
#   atom   := integer | name | 'i' | '(' expr ')'
#   exponent := integer | '(' ['-'] integer ['/' integer] ')'
#
# Rational literals are spelled with the division operator (e.g. 1/2), which
# evaluates identically.  'i' is accepted only when gaussian=True.
# ---------------------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str):
        self.toks = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[i:j]))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.toks.append(("name", text[i:j]))
                i = j
            elif ch in "+-*/^()":
                self.toks.append((ch, ch))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r} at offset {i}")
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def next(self):
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}")
        return t


def parse_expression(
    text: str,
    dim: int,
    var_names: Optional[Sequence[str]] = None,
    gaussian: bool = False,
) -> RationalExpr:
    """Parse the CLI expression grammar into a RationalExpr."""
    toks = _Tokens(text)
    names = {}
    for k in range(1, dim + 1):
        names[f"x{k}"] = k
    if var_names:
        for k, nm in enumerate(var_names, start=1):
            names.setdefault(nm, k)

    def parse_expr():
        node = parse_term()
        while toks.peek()[0] in ("+", "-"):
            op = toks.next()[0]
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term():
        node = parse_factor()
        while toks.peek()[0] in ("*", "/"):
            op = toks.next()[0]
            rhs = parse_factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def parse_exponent() -> Fraction:
        kind, val = toks.peek()
        if kind == "int":
            toks.next()
            return Fraction(int(val))
        if kind == "-":
            toks.next()
            return -parse_exponent()
        if kind == "(":
            toks.next()
            e = parse_exponent_body()
            toks.expect(")")
            return e
        raise ParseError(f"malformed exponent near {val!r}")

    def parse_exponent_body() -> Fraction:
        sign = 1
        while toks.peek()[0] in ("-", "+"):
            if toks.next()[0] == "-":
                sign = -sign
        p = int(toks.expect("int")[1])
        if toks.peek()[0] == "/":
            toks.next()
            q = int(toks.expect("int")[1])
            if q == 0:
                raise ParseError("zero denominator in exponent")
            return Fraction(sign * p, q)
        return Fraction(sign * p)

    def parse_factor():
        kind, val = toks.peek()
        if kind in ("-", "+"):
            toks.next()
            f = parse_factor()
            return -f if kind == "-" else f
        node = parse_atom()
        if toks.peek()[0] == "^":
            toks.next()
            e = parse_exponent()
            node = node.pow_fraction(e)
        return node

    def parse_atom():
        kind, val = toks.next()
        if kind == "int":
            return RationalExpr.const(dim, int(val))
        if kind == "name":
            if val == "i":
                if not gaussian:
                    raise ParseError("'i' is only valid in Gaussian-rational input")
                return RationalExpr.const(dim, I)
            if val in names:
                return RationalExpr.variable(dim, names[val])
            raise ParseError(f"unknown variable or unsupported function {val!r}")
        if kind == "(":
            node = parse_expr()
            toks.expect(")")
            return node
        raise ParseError(f"unexpected token {val!r}")

    result = parse_expr()
    if toks.peek()[0] is not None:
        raise ParseError(f"trailing input near {toks.peek()[1]!r}")
    return result


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}: {exc}") from None


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the point format 'a/b+c/d i' (either part optional)."""
    s = text.strip()
    if not s:
        raise ParseError("empty Gaussian rational")
    body = s.replace(" ", "")
    # split into real and imaginary pieces at a top-level +/- (not leading)
    split = None
    for idx in range(1, len(body)):
        if body[idx] in "+-" and body[idx - 1] not in "+-/":
            split = idx
    if split is not None and "i" in body[split:]:
        re_part, im_part = body[:split], body[split:]
    elif "i" in body:
        re_part, im_part = "", body
    else:
        re_part, im_part = body, ""
    re_v = parse_fraction(re_part) if re_part else ZERO
    if im_part:
        im_body = im_part[:-1] if im_part.endswith("i") else None
        if im_body is None or "i" in im_body:
            raise ParseError(f"bad Gaussian rational {text!r}")
        if im_body in ("", "+"):
            im_v = ONE
        elif im_body == "-":
            im_v = -ONE
        else:
            im_v = parse_fraction(im_body)
    else:
        im_v = ZERO
    return GaussianRational(re_v, im_v)


def format_gaussian_point(g: GaussianRational) -> str:
    """Inverse of parse_gaussian, point format 'a/b+c/d i'."""
    if g.im == 0:
        return str(g.re)
    im_mag = abs(g.im)
    im_str = "i" if im_mag == 1 else f"{im_mag} i"
    if g.re == 0:
        return f"-{im_str}" if g.im < 0 else im_str
    return f"{g.re}{'-' if g.im < 0 else '+'}{im_str}"
