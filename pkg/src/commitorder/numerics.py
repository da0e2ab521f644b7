"""Exact rationals and first-order infinitesimals.

Rationals are plain :class:`fractions.Fraction`.  :class:`Eps` carries a
rational value plus the coefficient of an infinitesimal ``e``; products drop
the ``e**2`` term, and ordering is lexicographic on ``(value, tilt)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "Eps",
    "EpsError",
    "ZERO",
    "ONE",
    "eps_compare",
    "eps_limit",
    "as_eps",
    "parse_rational",
    "parse_eps",
    "format_rational",
    "format_eps",
    "decimal_string",
]


class EpsError(ValueError):
    """Malformed rational / infinitesimal string, or a forbidden tilt."""


Number = Union[int, Fraction, "Eps"]


class Eps:
    """``value + tilt * e`` with ``e`` a positive infinitesimal."""

    __slots__ = ("value", "tilt")

    def __init__(self, value=0, tilt=0):
        object.__setattr__(self, "value", Fraction(value))
        object.__setattr__(self, "tilt", Fraction(tilt))

    def __setattr__(self, name, val):
        raise AttributeError("Eps is immutable")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Eps):
            return Eps(self.value + other.value, self.tilt + other.tilt)
        if isinstance(other, Rational):
            return Eps(self.value + other, self.tilt)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Eps(-self.value, -self.tilt)

    def __sub__(self, other):
        if isinstance(other, Eps):
            return Eps(self.value - other.value, self.tilt - other.tilt)
        if isinstance(other, Rational):
            return Eps(self.value - other, self.tilt)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Rational):
            return Eps(other - self.value, -self.tilt)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Eps):
            return Eps(
                self.value * other.value,
                self.value * other.tilt + self.tilt * other.value,
            )
        if isinstance(other, Rational):
            return Eps(self.value * other, self.tilt * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            other = Eps(other)
        if not isinstance(other, Eps):
            return NotImplemented
        c, d = other.value, other.tilt
        if c == 0:
            if d == 0:
                raise ZeroDivisionError("division by zero")
            if self.value != 0:
                raise ZeroDivisionError("finite value divided by an infinitesimal")
            # (b e) / (d e): keep the leading-order ratio only
            return Eps(self.tilt / d)
        return Eps(self.value / c, (self.tilt * c - self.value * d) / (c * c))

    def __rtruediv__(self, other):
        if isinstance(other, Rational):
            return Eps(other) / self
        return NotImplemented

    # -- ordering ---------------------------------------------------------
    def _key(self):
        return (self.value, self.tilt)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Eps):
            return other
        if isinstance(other, Rational):
            return Eps(other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.value == o.value and self.tilt == o.tilt

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._key() < o._key()

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._key() <= o._key()

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._key() > o._key()

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._key() >= o._key()

    def __hash__(self):
        if self.tilt == 0:
            return hash(self.value)
        return hash((self.value, self.tilt))

    def __bool__(self):
        return bool(self.value) or bool(self.tilt)

    def __repr__(self):
        return f"Eps({format_eps(self)!r})"

    def __str__(self):
        return format_eps(self)

    def __reduce__(self):
        return (Eps, (self.value, self.tilt))

    @property
    def is_exact(self) -> bool:
        return self.tilt == 0


ZERO = Eps(0)
ONE = Eps(1)


def as_eps(x) -> Eps:
    if isinstance(x, Eps):
        return x
    if isinstance(x, str):
        return parse_eps(x)
    return Eps(x)


def eps_compare(a, b) -> int:
    """-1, 0 or 1 according to the lexicographic order on (value, tilt)."""
    a, b = as_eps(a), as_eps(b)
    ka, kb = a._key(), b._key()
    return (ka > kb) - (ka < kb)


def eps_limit(a) -> Fraction:
    """Value of ``a`` as ``e -> 0``."""
    if isinstance(a, Eps):
        return a.value
    return Fraction(a)


# -- string forms ----------------------------------------------------------

_RATIONAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")
_EPS_TERM_RE = re.compile(
    r"^(?P<sign>[+-]?)\s*(?P<coef>(\d+(\.\d*)?|\.\d+)(/\d+)?)?\s*\*?\s*e$"
)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"n"`` or a terminating decimal such as ``"0.35"``."""
    if isinstance(text, bool):
        raise EpsError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise EpsError(f"not a rational: {text!r}")
    s = text.strip().replace(" ", "")
    if not _RATIONAL_RE.match(s):
        raise EpsError(f"malformed rational: {text!r}")
    try:
        if "/" in s and "." in s:
            num, den = s.split("/")
            return Fraction(num) / Fraction(den)
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise EpsError(f"malformed rational: {text!r}") from exc


def parse_eps(text) -> Eps:
    """Parse ``"3/4 - e"``, ``"1/4 + e"``, ``"2e"``, ``"1/2 - 1/3*e"`` or a plain rational."""
    if isinstance(text, Eps):
        return text
    if not isinstance(text, str):
        return Eps(parse_rational(text))
    s = text.strip()
    if "e" not in s:
        return Eps(parse_rational(s))
    # split "value (+|-) coef e", value optional
    m = re.match(r"^(?P<val>.*?)(?P<term>[+-]?\s*[\d./]*\s*\*?\s*e)$", s)
    if not m:
        raise EpsError(f"malformed infinitesimal value: {text!r}")
    val_s = m.group("val").strip()
    term = m.group("term").replace(" ", "")
    tm = _EPS_TERM_RE.match(term)
    if not tm:
        raise EpsError(f"malformed infinitesimal value: {text!r}")
    coef = parse_rational(tm.group("coef")) if tm.group("coef") else Fraction(1)
    if tm.group("sign") == "-":
        coef = -coef
    if val_s == "":
        value = Fraction(0)
    else:
        if not term.startswith(("+", "-")):
            raise EpsError(f"malformed infinitesimal value: {text!r}")
        value = parse_rational(val_s)
    return Eps(value, coef)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_eps(x) -> str:
    x = as_eps(x)
    if x.tilt == 0:
        return format_rational(x.value)
    mag = abs(x.tilt)
    term = "e" if mag == 1 else f"{format_rational(mag)}*e"
    sign = "-" if x.tilt < 0 else "+"
    if x.value == 0:
        return ("-" if x.tilt < 0 else "") + term
    return f"{format_rational(x.value)} {sign} {term}"


def decimal_string(x, digits: int = 10) -> str:
    """Exact decimal when it terminates, else ``digits`` significant digits and ``...``."""
    x = Fraction(eps_limit(x))
    den = x.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        sign = "-" if x < 0 else ""
        x = abs(x)
        whole, rem = divmod(x.numerator, x.denominator)
        if rem == 0:
            return f"{sign}{whole}"
        frac_digits = []
        while rem:
            rem *= 10
            d, rem = divmod(rem, x.denominator)
            frac_digits.append(str(d))
        return f"{sign}{whole}." + "".join(frac_digits)
    return f"{float(x):.{digits}g}..."
