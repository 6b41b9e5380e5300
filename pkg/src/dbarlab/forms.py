"""(s,t)-forms with polynomial coefficients at truncation ``n``.

A form is ``sum' f_{I,J} dz^I ^ dconj(z)^J`` over strictly increasing
``I`` (``|I| = s``) and ``J`` (``|J| = t``) inside ``1..n``; its squared norm
is ``sum' 2**(s+t) a^{I,J} E|f_{I,J}|**2``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import DegreeOverflow, InvalidArg, InvalidDegree, ShapeMismatch
from .multiindex import MultiIndex, insert, is_multi_index, weight_aIJ
from .polyalg import PolyFn, d_zbar, delta, evaluate, format_poly, inner, parse_poly
from .qi import QI, format_rational, parse_rational

__all__ = [
    "Form",
    "norm_sq",
    "inner_forms",
    "dbar",
    "dbar_adjoint",
    "eval_wedge",
    "ambient_eval",
    "truncate",
    "format_form",
    "parse_form",
    "form_to_json",
    "form_from_json",
    "poly_to_json",
    "poly_from_json",
]

Key = Tuple[MultiIndex, MultiIndex]


class Form:
    """An ``(s, t)``-form on ``C^n``; coefficients live in ``coeffs[(I, J)]``."""

    __slots__ = ("s", "t", "n", "coeffs")

    def __init__(self, s: int, t: int, n: int, coeffs: Dict[Key, PolyFn] | None = None,
                 *, check: bool = True):
        if s < 0 or t < 0 or n < 0:
            raise InvalidArg("s, t, n must be nonnegative")
        self.s, self.t, self.n = s, t, n
        self.coeffs: Dict[Key, PolyFn] = {}
        for (I, J), g in (coeffs or {}).items():
            I, J = tuple(I), tuple(J)
            if check:
                self._check_key(I, J)
                if g.max_coord() > n:
                    raise ShapeMismatch(
                        f"coefficient of {I}|{J} uses z_{g.max_coord()} beyond n={n}")
            if g:
                self.coeffs[(I, J)] = g

    def _check_key(self, I, J):
        if len(I) != self.s or len(J) != self.t:
            raise ShapeMismatch(f"index {I}|{J} does not match degree ({self.s},{self.t})")
        if not (is_multi_index(I) and is_multi_index(J)):
            raise InvalidArg(f"indices must be strictly increasing: {I}|{J}")
        if (I and I[-1] > self.n) or (J and J[-1] > self.n):
            raise ShapeMismatch(f"index {I}|{J} exceeds truncation n={self.n}")

    @classmethod
    def zero(cls, s: int, t: int, n: int) -> Form:
        return cls(s, t, n)

    @classmethod
    def scalar(cls, g: PolyFn, n: int | None = None) -> Form:
        """``g`` viewed as a (0,0)-form."""
        return cls(0, 0, g.max_coord() if n is None else n, {((), ()): g})

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.s, self.t, self.n)

    def _same_shape(self, other: Form):
        if self.shape != other.shape:
            raise ShapeMismatch(f"form shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: Form) -> Form:
        self._same_shape(other)
        out = dict(self.coeffs)
        for k, g in other.coeffs.items():
            out[k] = out[k] + g if k in out else g
        return Form(self.s, self.t, self.n, out, check=False)

    def __neg__(self) -> Form:
        return Form(self.s, self.t, self.n, {k: -g for k, g in self.coeffs.items()},
                    check=False)

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def scale(self, c) -> Form:
        return Form(self.s, self.t, self.n, {k: g.scale(c) for k, g in self.coeffs.items()},
                    check=False)

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.shape == other.shape and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.shape, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"Form({self.s}, {self.t}, {self.n}, {len(self.coeffs)} terms)"

    def __str__(self):
        return format_form(self)


def _block_weight(I, J, w) -> Fraction:
    return 2 ** (len(I) + len(J)) * weight_aIJ(I, J, w)


def inner_forms(f: Form, g: Form, w) -> QI:
    """``sum' 2**(s+t) a^{I,J} <f_{I,J}, g_{I,J}>``."""
    f._same_shape(g)
    re_, im = Fraction(0), Fraction(0)
    for key, fc in f.coeffs.items():
        gc = g.coeffs.get(key)
        if gc is None:
            continue
        v = inner(fc, gc, w)
        wt = _block_weight(key[0], key[1], w)
        re_ += wt * v.re
        im += wt * v.im
    return QI(re_, im)


def norm_sq(f: Form, w) -> Fraction:
    return sum((_block_weight(I, J, w) * inner(g, g, w).re
                for (I, J), g in f.coeffs.items()), Fraction(0))


def dbar(f: Form, w=None) -> Form:
    """``(-1)**s sum eps_{j,J}^M d f_{I,J}/dconj(z_j) dz^I ^ dconj(z)^M``.

    ``w`` is accepted for symmetry with the other operators; the formula
    does not depend on the weights.
    """
    if f.t + 1 > f.n:
        raise DegreeOverflow(f"dbar of a ({f.s},{f.t})-form needs n >= {f.t + 1}, have {f.n}")
    sgn = -1 if f.s & 1 else 1
    out: Dict[Key, PolyFn] = {}
    for (I, J), g in f.coeffs.items():
        for j in sorted(g.coords()):
            ins = insert(j, J)
            if ins is None:
                continue
            h = d_zbar(j, g)
            if not h:
                continue
            eps, M = ins
            if eps * sgn < 0:
                h = -h
            key = (I, M)
            out[key] = out[key] + h if key in out else h
    return Form(f.s, f.t + 1, f.n, out, check=False)


def dbar_adjoint(f: Form, w) -> Form:
    """Hilbert adjoint of dbar, from ``(s, t+1)``- to ``(s, t)``-forms.

    ``(-1)**(s-1) sum' sum_j 2 a_j**2 delta_j(f_{I,jK}) dz^I ^ dconj(z)^K`` with
    ``f_{I,jK} = eps_{j,K}^J f_{I,J}`` for ``J = {j} | K``.
    """
    if f.t == 0:
        raise InvalidDegree("dbar_adjoint needs an (s, t+1)-form with t+1 >= 1")
    sgn = 1 if f.s & 1 else -1  # (-1)**(s-1)
    out: Dict[Key, PolyFn] = {}
    for (I, J), g in f.coeffs.items():
        for pos, j in enumerate(J):
            K = J[:pos] + J[pos + 1:]
            eps = -1 if pos & 1 else 1
            h = delta(j, g, w).scale(w.sigma(j) * eps * sgn)
            key = (I, K)
            out[key] = out[key] + h if key in out else h
    return Form(f.s, f.t - 1, f.n, out, check=False)


def truncate(f: Form, n: int, w) -> Form:
    """``M_n f``: drop index blocks reaching past ``n`` and project each
    coefficient onto functions of ``z_1..z_n`` (conditional expectation)."""
    out: Dict[Key, PolyFn] = {}
    for (I, J), g in f.coeffs.items():
        if (I and I[-1] > n) or (J and J[-1] > n):
            continue
        terms: Dict = {}
        for m, c in g.terms.items():
            keep = []
            factor = Fraction(1)
            for j, p, q in m:
                if j <= n:
                    keep.append((j, p, q))
                elif p != q:
                    factor = Fraction(0)
                    break
                else:
                    factor *= math.factorial(p) * w.sigma(j) ** p
            if factor:
                k = tuple(keep)
                terms[k] = terms.get(k, QI(0)) + c * factor
        h = PolyFn(terms)
        if h:
            out[(I, J)] = h
    return Form(f.s, f.t, n, out, check=False)


# -- evaluation on (l^p)^(s+t+1) --------------------------------------------

def _perm_sign(perm) -> int:
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def eval_wedge(I: MultiIndex, J: MultiIndex, args):
    """``(dz^I ^ dconj(z)^J)(z^1, ..., z^{s+t})`` by the explicit permutation sum.

    Each argument is a complex vector (or an array ``(..., n)`` of them, in
    which case the result is vectorized over the leading axes).
    """
    s, t = len(I), len(J)
    if len(args) != s + t:
        raise ShapeMismatch(f"need {s + t} arguments, got {len(args)}")
    vecs = [np.asarray(a, dtype=complex) for a in args]
    for v in vecs:
        if v.ndim == 0 or v.shape[-1] < max(I + J, default=0):
            raise ShapeMismatch("argument vector too short for the index set")
    if not vecs:
        return complex(1.0)
    total = 0
    for perm in permutations(range(s + t)):
        term = _perm_sign(perm)
        for k, i in enumerate(I):
            term = term * vecs[perm[k]][..., i - 1]
        for l, j in enumerate(J):
            term = term * np.conj(vecs[perm[s + l]][..., j - 1])
        total = total + term
    return total / math.sqrt(math.factorial(s + t))


def ambient_eval(f: Form, z, args):
    """``f(z, z^1, ..., z^{s+t})`` as a function on ``(C^n)^(s+t+1)``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape[:-1], dtype=complex)
    for (I, J), g in f.coeffs.items():
        out = out + evaluate(g, z) * eval_wedge(I, J, args)
    return out


# -- text and JSON ------------------------------------------------------------

def _fmt_idx(I) -> str:
    return ",".join(str(i) for i in I)


def format_form(f: Form) -> str:
    """Header lines ``s``, ``t``, ``n`` followed by ``[I|J] polynomial`` lines."""
    lines = [f"s = {f.s}", f"t = {f.t}", f"n = {f.n}"]
    for I, J in sorted(f.coeffs):
        lines.append(f"[{_fmt_idx(I)}|{_fmt_idx(J)}] {format_poly(f.coeffs[(I, J)])}")
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"\[\s*([\d,\s]*)\|\s*([\d,\s]*)\]\s*(.*)")
_HEADER = re.compile(r"([stn])\s*=\s*(\d+)")


def _parse_idx(text: str) -> MultiIndex:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


def parse_form(text: str) -> Form:
    """Parse :func:`format_form` output; header lines are optional.

    Missing ``s``/``t`` are taken from the index lengths, a missing ``n``
    from the largest index or coordinate in use.
    """
    header: Dict[str, int] = {}
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.fullmatch(line)
        if m:
            header[m.group(1)] = int(m.group(2))
            continue
        m = _LINE.fullmatch(line)
        if not m:
            raise ValueError(f"line {lineno}: expected '[I|J] polynomial', got {raw!r}")
        try:
            I, J = _parse_idx(m.group(1)), _parse_idx(m.group(2))
            g = parse_poly(m.group(3))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        entries.append((I, J, g))
    s = header.get("s", len(entries[0][0]) if entries else None)
    t = header.get("t", len(entries[0][1]) if entries else None)
    if s is None or t is None:
        raise ValueError("empty form needs explicit 's' and 't' header lines")
    n = header.get("n")
    if n is None:
        n = max([max(I + J, default=0) for I, J, _ in entries]
                + [g.max_coord() for _, _, g in entries] + [0])
    coeffs: Dict[Key, PolyFn] = {}
    for I, J, g in entries:
        key = (I, J)
        coeffs[key] = coeffs[key] + g if key in coeffs else g
    return Form(s, t, n, coeffs)


def poly_to_json(g: PolyFn) -> list:
    return [{"mono": [list(e) for e in m],
             "re": format_rational(c.re), "im": format_rational(c.im)}
            for m, c in sorted(g.terms.items())]


def poly_from_json(data: Iterable[dict]) -> PolyFn:
    return PolyFn({tuple(tuple(e) for e in item["mono"]):
                   QI(parse_rational(item["re"]), parse_rational(item["im"]))
                   for item in data})


def form_to_json(f: Form) -> dict:
    return {
        "s": f.s, "t": f.t, "n": f.n,
        "coeffs": [{"I": list(I), "J": list(J), "text": format_poly(g),
                    "terms": poly_to_json(g)}
                   for (I, J), g in sorted(f.coeffs.items())],
    }


def form_from_json(data: dict) -> Form:
    return Form(data["s"], data["t"], data["n"],
                {(tuple(c["I"]), tuple(c["J"])): poly_from_json(c["terms"])
                 for c in data["coeffs"]})
