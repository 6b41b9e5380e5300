"""Exact polynomials in ``z_1..z_n`` and ``conj(z_1)..conj(z_n)`` over Q(i).

A monomial is stored as a sorted tuple of ``(j, p, q)`` triples meaning
``prod_j z_j**p * conj(z_j)**q``; only coordinates with ``(p, q) != (0, 0)``
appear, so ``()`` is the constant monomial.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import DimensionMismatch
from .qi import QI, as_qi, format_qi, parse_qi

Mono = Tuple[Tuple[int, int, int], ...]

__all__ = [
    "Mono",
    "PolyFn",
    "mono_mul",
    "d_z",
    "d_zbar",
    "delta",
    "inner",
    "evaluate",
    "parse_poly",
    "format_poly",
]


def mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = k = 0
    while i < len(m1) and k < len(m2):
        a, b = m1[i], m2[k]
        if a[0] == b[0]:
            out.append((a[0], a[1] + b[1], a[2] + b[2]))
            i += 1
            k += 1
        elif a[0] < b[0]:
            out.append(a)
            i += 1
        else:
            out.append(b)
            k += 1
    out.extend(m1[i:])
    out.extend(m2[k:])
    return tuple(out)


def mono_degree(m: Mono) -> int:
    return sum(p + q for _, p, q in m)


class PolyFn:
    """Finite sum of ``coef * monomial`` with canonical (zero-free) storage."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Mono, QI] | None = None):
        # callers passing raw dicts give up ownership
        self.terms: Dict[Mono, QI] = {}
        if terms:
            for m, c in terms.items():
                c = as_qi(c)
                if c:
                    self.terms[m] = c

    # constructors ----------------------------------------------------------
    @classmethod
    def const(cls, c) -> PolyFn:
        return cls({(): as_qi(c)})

    @classmethod
    def z(cls, j: int, power: int = 1) -> PolyFn:
        return cls({((j, power, 0),): QI(1)}) if power else cls.const(1)

    @classmethod
    def zb(cls, j: int, power: int = 1) -> PolyFn:
        return cls({((j, 0, power),): QI(1)}) if power else cls.const(1)

    @classmethod
    def monomial(cls, exps: Iterable[Tuple[int, int, int]], coef=1) -> PolyFn:
        m: Mono = ()
        for j, p, q in exps:
            if p or q:
                m = mono_mul(m, ((j, p, q),))
        return cls({m: as_qi(coef)})

    @classmethod
    def _raw(cls, terms: Dict[Mono, QI]) -> PolyFn:
        out = cls.__new__(cls)
        out.terms = terms
        return out

    # ring operations -------------------------------------------------------
    def __add__(self, other) -> PolyFn:
        if not isinstance(other, PolyFn):
            other = PolyFn.const(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m)
            if v is None:
                terms[m] = c
            else:
                v = v + c
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return PolyFn._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> PolyFn:
        return PolyFn._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> PolyFn:
        if not isinstance(other, PolyFn):
            other = PolyFn.const(other)
        return self + (-other)

    def __rsub__(self, other) -> PolyFn:
        return (-self) + other

    def scale(self, c) -> PolyFn:
        c = as_qi(c)
        if not c:
            return PolyFn()
        return PolyFn._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> PolyFn:
        if not isinstance(other, PolyFn):
            return self.scale(other)
        terms: Dict[Mono, QI] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = terms.get(m)
                terms[m] = c1 * c2 if v is None else v + c1 * c2
        return PolyFn._raw({m: c for m, c in terms.items() if c})

    def __rmul__(self, other) -> PolyFn:
        return self.scale(other)

    def __pow__(self, k: int) -> PolyFn:
        out = PolyFn.const(1)
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> PolyFn:
        """Complex conjugate: swaps the z and conj(z) exponents."""
        return PolyFn._raw({tuple((j, q, p) for j, p, q in m): c.conjugate()
                            for m, c in self.terms.items()})

    # inspection ------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, PolyFn):
            return self.terms == other.terms
        try:
            other = PolyFn.const(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coords(self) -> set:
        return {j for m in self.terms for j, _, _ in m}

    def max_coord(self) -> int:
        return max(self.coords(), default=0)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def bidegrees(self) -> Dict[int, Tuple[int, int]]:
        """Per coordinate, the maximal z- and conj(z)-exponent."""
        out: Dict[int, Tuple[int, int]] = {}
        for m in self.terms:
            for j, p, q in m:
                P, Q = out.get(j, (0, 0))
                out[j] = (max(P, p), max(Q, q))
        return out

    def is_holomorphic(self) -> bool:
        return all(q == 0 for m in self.terms for _, _, q in m)

    def __repr__(self):
        return f"PolyFn({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# -- derivatives ------------------------------------------------------------

def d_z(j: int, f: PolyFn) -> PolyFn:
    """Wirtinger derivative ``d/dz_j``."""
    terms: Dict[Mono, QI] = {}
    for m, c in f.terms.items():
        for pos, (k, p, q) in enumerate(m):
            if k == j:
                if p:
                    rest = m[:pos] + (((k, p - 1, q),) if p > 1 or q else ()) + m[pos + 1:]
                    v = terms.get(rest)
                    terms[rest] = c * p if v is None else v + c * p
                break
    return PolyFn._raw({m: c for m, c in terms.items() if c})


def d_zbar(j: int, f: PolyFn) -> PolyFn:
    """Wirtinger derivative ``d/d conj(z_j)``."""
    terms: Dict[Mono, QI] = {}
    for m, c in f.terms.items():
        for pos, (k, p, q) in enumerate(m):
            if k == j:
                if q:
                    rest = m[:pos] + (((k, p, q - 1),) if p or q > 1 else ()) + m[pos + 1:]
                    v = terms.get(rest)
                    terms[rest] = c * q if v is None else v + c * q
                break
    return PolyFn._raw({m: c for m, c in terms.items() if c})


def delta(j: int, f: PolyFn, w) -> PolyFn:
    """``d f/dz_j - conj(z_j) f / (2 a_j**2)``; minus the Gaussian adjoint of d/dconj(z_j)."""
    inv = Fraction(1) / w.sigma(j)
    return d_z(j, f) - (PolyFn.zb(j) * f).scale(inv)


# -- Gaussian inner product -------------------------------------------------

class _MomentTable:
    """Caches ``k! * sigma_j**k`` for one weight sequence."""

    def __init__(self, w):
        self.w = w
        self.cache: Dict[Tuple[int, int], Fraction] = {}

    def __call__(self, j: int, k: int) -> Fraction:
        key = (j, k)
        v = self.cache.get(key)
        if v is None:
            v = math.factorial(k) * self.w.sigma(j) ** k
            self.cache[key] = v
        return v


_tables: Dict[int, _MomentTable] = {}


def _table(w) -> _MomentTable:
    t = _tables.get(id(w))
    if t is None or t.w is not w:
        t = _tables[id(w)] = _MomentTable(w)
        if len(_tables) > 64:
            _tables.clear()
            _tables[id(w)] = t
    return t


def _pair_moment(m1: Mono, m2: Mono, tab) -> Fraction:
    """``E[m1 * conj(m2)]`` for monomials ``m1``, ``m2``."""
    out = Fraction(1)
    i = k = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 or k < n2:
        if k >= n2 or (i < n1 and m1[i][0] < m2[k][0]):
            j, p, q = m1[i]
            zp, zq = p, q
            i += 1
        elif i >= n1 or m2[k][0] < m1[i][0]:
            j, p, q = m2[k]
            zp, zq = q, p
            k += 1
        else:
            j, p, q = m1[i]
            _, r, s = m2[k]
            zp, zq = p + s, q + r
            i += 1
            k += 1
        if zp != zq:
            return Fraction(0)
        out *= tab(j, zp)
    return out


def inner(f: PolyFn, g: PolyFn, w) -> QI:
    """``E[f * conj(g)]`` under the product Gaussian; conjugate-linear in ``g``."""
    tab = _table(w)
    re_ = Fraction(0)
    im = Fraction(0)
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            mom = _pair_moment(m1, m2, tab)
            if mom:
                # c1 * conj(c2)
                re_ += (c1.re * c2.re + c1.im * c2.im) * mom
                im += (c1.im * c2.re - c1.re * c2.im) * mom
    return QI(re_, im)


def norm_sq(f: PolyFn, w) -> Fraction:
    return inner(f, f, w).re


# -- evaluation -------------------------------------------------------------

def evaluate(f: PolyFn, point):
    """Floating evaluation at ``point``.

    ``point`` may be a length-``n`` sequence of complex numbers or an array of
    shape ``(..., n)``, in which case evaluation is vectorized over the
    leading axes.
    """
    pt = np.asarray(point, dtype=complex)
    if pt.ndim == 0:
        raise DimensionMismatch("point must be a vector")
    need = f.max_coord()
    if pt.shape[-1] < need:
        raise DimensionMismatch(f"polynomial uses z_{need}, point has {pt.shape[-1]} coords")
    out = np.zeros(pt.shape[:-1], dtype=complex)
    conj = np.conj(pt)
    for m, c in f.terms.items():
        term = np.full(pt.shape[:-1], complex(c))
        for j, p, q in m:
            if p:
                term = term * pt[..., j - 1] ** p
            if q:
                term = term * conj[..., j - 1] ** q
        out = out + term
    if out.ndim == 0:
        return complex(out)
    return out


# -- text syntax ------------------------------------------------------------

def _format_mono(m: Mono) -> str:
    parts = []
    for j, p, q in m:
        if p:
            parts.append(f"z{j}" if p == 1 else f"z{j}^{p}")
        if q:
            parts.append(f"zb{j}" if q == 1 else f"zb{j}^{q}")
    return " ".join(parts)


def _mono_order(m: Mono):
    return (mono_degree(m), m)


def format_poly(f: PolyFn) -> str:
    """Canonical text, e.g. ``(3/4+1/2i) z1^2 zb2 + 2``."""
    if not f.terms:
        return "0"
    out = []
    for m in sorted(f.terms, key=_mono_order):
        c = f.terms[m]
        mono = _format_mono(m)
        if not mono:
            out.append(f"({format_qi(c)})" if c.im or c.re < 0 else format_qi(c))
        elif c == 1:
            out.append(mono)
        else:
            out.append(f"({format_qi(c)}) {mono}")
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([+-])|(zb|z)(\d+)(?:\^(\d+))?|(\d+(?:/\d+)?i?|i))")


def parse_poly(text: str) -> PolyFn:
    """Parse the syntax produced by :func:`format_poly`.

    Terms are joined by ``+`` or ``-``; a term is an optional coefficient
    (a rational, or a parenthesised complex literal such as ``(1-2/3i)``)
    followed by factors ``z<j>[^k]`` / ``zb<j>[^k]``.
    """
    s = text.strip()
    if s == "0" or not s:
        if not s:
            raise ValueError("empty polynomial")
        return PolyFn()
    pos = 0
    result: Dict[Mono, QI] = {}
    sign = 1
    coef: QI | None = None
    mono: Mono = ()
    have_term = False

    def flush():
        nonlocal coef, mono, have_term
        if not have_term:
            raise ValueError(f"dangling operator in {text!r}")
        c = (coef if coef is not None else QI(1)) * sign
        v = result.get(mono)
        result[mono] = c if v is None else v + c
        coef, mono, have_term = None, (), False

    first = True
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {s[pos:]!r}")
        lpar, _rpar, op, var, idx, power, num = m.groups()
        pos = m.end()
        if op:
            if have_term:
                flush()
            elif not first:
                raise ValueError(f"dangling operator in {text!r}")
            sign = -1 if op == "-" else 1
        elif lpar:
            close = s.find(")", pos)
            if close < 0:
                raise ValueError(f"unbalanced parenthesis in {text!r}")
            if have_term:
                raise ValueError(f"coefficient must precede factors in {text!r}")
            coef = parse_qi(s[pos:close])
            pos = close + 1
            have_term = True
        elif var:
            j = int(idx)
            k = int(power) if power else 1
            if j < 1:
                raise ValueError("coordinates are numbered from 1")
            if k:
                mono = mono_mul(mono, ((j, k, 0) if var == "z" else (j, 0, k),))
            have_term = True
        elif num:
            if have_term:
                raise ValueError(f"coefficient must precede factors in {text!r}")
            coef = parse_qi(num)
            have_term = True
        else:
            raise ValueError(f"unexpected ')' in {text!r}")
        first = False
    flush()
    return PolyFn(result)
