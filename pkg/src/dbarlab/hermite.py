"""Complex Hermite (Ito) polynomials for the product Gaussian.

Per coordinate, with ``sigma = 2 a_j**2``::

    H_{0,0} = 1
    H_{p+1,q} = z H_{p,q} - sigma q H_{p,q-1}
    H_{p,q+1} = conj(z) H_{p,q} - sigma p H_{p-1,q}

In this basis ``d/dconj(z)`` lowers ``q`` and ``delta`` raises it, and the
Gaussian inner product is diagonal with ``||H_{p,q}||**2 = p! q! sigma**(p+q)``.
Multivariate basis elements are tensor products keyed exactly like monomials,
by sorted ``(j, p, q)`` tuples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict

import numpy as np

from .polyalg import Mono, PolyFn, mono_degree
from .qi import QI

__all__ = [
    "hermite_poly",
    "hermite_poly_qfirst",
    "tensor_hermite",
    "hermite_norm_sq",
    "HermiteExpansion",
    "expand",
    "reconstruct",
    "hermite_eval",
    "hermite_table",
]


@lru_cache(maxsize=None)
def _hermite_1d(p: int, q: int, sigma: Fraction) -> tuple:
    """``H_{p,q}`` as a tuple of ``((zp, zq), coef)`` pairs, built z-first."""
    if p == 0:
        return (((0, q), Fraction(1)),)
    acc: Dict[tuple, Fraction] = {}
    for (a, b), c in _hermite_1d(p - 1, q, sigma):
        acc[(a + 1, b)] = acc.get((a + 1, b), 0) + c
    if q:
        for (a, b), c in _hermite_1d(p - 1, q - 1, sigma):
            acc[(a, b)] = acc.get((a, b), 0) - sigma * q * c
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def _as_poly(j: int, pairs) -> PolyFn:
    terms = {}
    for (a, b), c in pairs:
        terms[((j, a, b),) if a or b else ()] = QI(c)
    return PolyFn._raw(terms)


def hermite_poly(p: int, q: int, j: int, w) -> PolyFn:
    """``H_{p,q}`` in the single coordinate ``z_j``."""
    return _as_poly(j, _hermite_1d(p, q, w.sigma(j)))


def hermite_poly_qfirst(p: int, q: int, j: int, w) -> PolyFn:
    """Same polynomial, built with the conj(z)-raising recurrence."""
    sigma = w.sigma(j)
    if q == 0:
        return PolyFn.z(j, p)
    out = PolyFn.zb(j) * hermite_poly_qfirst(p, q - 1, j, w)
    if p:
        out = out - hermite_poly_qfirst(p - 1, q - 1, j, w).scale(sigma * p)
    return out


def tensor_hermite(key: Mono, w) -> PolyFn:
    out = PolyFn.const(1)
    for j, p, q in key:
        out = out * hermite_poly(p, q, j, w)
    return out


def hermite_norm_sq(key: Mono, w) -> Fraction:
    out = Fraction(1)
    for j, p, q in key:
        out *= math.factorial(p) * math.factorial(q) * w.sigma(j) ** (p + q)
    return out


@dataclass
class HermiteExpansion:
    """Coefficients of a polynomial in the tensor Hermite basis."""

    coeffs: Dict[Mono, QI] = field(default_factory=dict)
    w: object = None

    def norm_sq(self) -> Fraction:
        """Parseval: ``sum |c|**2 ||H||**2``."""
        return sum((c.abs2() * hermite_norm_sq(k, self.w) for k, c in self.coeffs.items()),
                   Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, HermiteExpansion):
            return NotImplemented
        return self.coeffs == other.coeffs


def expand(f: PolyFn, w) -> HermiteExpansion:
    """Hermite coefficients of ``f`` by triangular elimination.

    ``H_key`` equals the monomial ``key`` plus terms of strictly lower total
    degree, so peeling off top-degree monomials one at a time terminates.
    """
    residual = dict(f.terms)
    coeffs: Dict[Mono, QI] = {}
    while residual:
        top = max(residual, key=lambda m: (mono_degree(m), m))
        c = residual.pop(top)
        coeffs[top] = coeffs.get(top, QI(0)) + c
        for m, v in tensor_hermite(top, w).terms.items():
            if m == top:
                continue
            new = residual.get(m, QI(0)) - c * v
            if new:
                residual[m] = new
            else:
                residual.pop(m, None)
    return HermiteExpansion({k: v for k, v in coeffs.items() if v}, w)


def reconstruct(e: HermiteExpansion) -> PolyFn:
    out = PolyFn()
    for key, c in e.coeffs.items():
        out = out + tensor_hermite(key, e.w).scale(c)
    return out


def hermite_eval(p: int, q: int, sigma: float, z):
    """Floating evaluation of ``H_{p,q}`` at complex ``z`` (array-friendly)."""
    z = np.asarray(z, dtype=complex)
    zb = np.conj(z)
    # rows[b] holds H_{a,b} for the current a
    rows = [zb**b for b in range(q + 1)]
    for a in range(p):
        rows = [z * rows[b] - sigma * b * rows[b - 1] if b else z * rows[0]
                for b in range(q + 1)]
    return rows[q]


def hermite_table(pmax: int, qmax: int, sigma: float, z) -> np.ndarray:
    """All ``H_{a,b}(z)`` for ``a <= pmax``, ``b <= qmax``; shape ``(pmax+1, qmax+1, *z.shape)``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((pmax + 1, qmax + 1) + z.shape, dtype=complex)
    zb = np.conj(z)
    out[0, 0] = 1.0
    for b in range(1, qmax + 1):
        out[0, b] = zb * out[0, b - 1]
    for a in range(pmax):
        out[a + 1, 0] = z * out[a, 0]
        for b in range(1, qmax + 1):
            out[a + 1, b] = z * out[a, b] - sigma * b * out[a, b - 1]
    return out
