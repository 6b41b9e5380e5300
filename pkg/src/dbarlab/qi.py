"""Exact complex rationals, i.e. elements of Q(i)."""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

__all__ = ["QI", "as_qi", "parse_qi", "parse_rational", "format_rational"]


class QI:
    """Complex number ``re + im*i`` with ``Fraction`` parts.

    Instances are immutable and hashable; equality with ints and Fractions
    works for purely real values.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        # treated as immutable; no setters are exposed
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if type(other) is not QI:
            if not isinstance(other, Rational):
                return NotImplemented
            return QI(self.re + other, self.im)
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        if type(other) is not QI:
            if not isinstance(other, Rational):
                return NotImplemented
            return QI(self.re - other, self.im)
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if type(other) is not QI:
            if not isinstance(other, Rational):
                return NotImplemented
            return QI(self.re * other, self.im * other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return QI(a * c, 0)
        return QI(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not QI:
            if not isinstance(other, Rational):
                return NotImplemented
            return QI(self.re / other, self.im / other)
        den = other.re * other.re + other.im * other.im
        if not den:
            raise ZeroDivisionError("QI division by zero")
        return self * other.conjugate() / den

    def __rtruediv__(self, other):
        return as_qi(other) / self

    def conjugate(self) -> QI:
        return QI(self.re, -self.im)

    def abs2(self) -> Fraction:
        """``|x|**2`` as an exact rational."""
        return self.re * self.re + self.im * self.im

    # comparisons ----------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if type(other) is QI:
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        return format_qi(self)


ZERO = QI(0)
ONE = QI(1)
I_UNIT = QI(0, 1)


def as_qi(x) -> QI:
    if type(x) is QI:
        return x
    if isinstance(x, complex):
        return QI(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, float):
        return QI(Fraction(x))
    if isinstance(x, str):
        return parse_qi(x)
    return QI(x)


def format_rational(x: Fraction) -> str:
    """``num/den`` (or plain ``num`` when the denominator is 1)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_qi(x: QI) -> str:
    re_, im = x.re, x.im
    if not im:
        return format_rational(re_)
    mag = abs(im)
    im_txt = "i" if mag == 1 else f"{format_rational(mag)}i"
    if not re_:
        return ("-" if im < 0 else "") + im_txt
    return f"{format_rational(re_)}{'-' if im < 0 else '+'}{im_txt}"


_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")
_QI_PART = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(i?)")


def parse_qi(text: str) -> QI:
    """Parse literals such as ``3/4+1/2i``, ``-i``, ``2``, ``1-i``."""
    s = re.sub(r"\s*([+-])\s*", r"\1", text.strip())
    if any(ch.isspace() for ch in s):
        raise ValueError(f"bad complex literal: {text!r}")
    if not s:
        raise ValueError("empty complex literal")
    re_, im = Fraction(0), Fraction(0)
    pos = 0
    seen = False
    while pos < len(s):
        m = _QI_PART.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"bad complex literal: {text!r}")
        sign, num, unit = m.groups()
        if seen and not sign:
            raise ValueError(f"bad complex literal: {text!r}")
        if not num and not unit:
            raise ValueError(f"bad complex literal: {text!r}")
        val = Fraction(num) if num else Fraction(1)
        if sign == "-":
            val = -val
        if unit:
            im += val
        else:
            re_ += val
        seen = True
        pos = m.end()
    return QI(re_, im)
