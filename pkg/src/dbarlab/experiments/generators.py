"""Seeded random polynomials and forms with small exact coefficients."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from ..forms import Form
from ..polyalg import PolyFn
from ..qi import QI


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.randint(1, 3))


def random_qi(rng: random.Random) -> QI:
    while True:
        c = QI(random_rational(rng), random_rational(rng) if rng.random() < 0.5 else 0)
        if c:
            return c


def random_poly(rng: random.Random, n: int, degree: int, max_terms: int = 4,
                holomorphic: bool = False) -> PolyFn:
    """Sum of up to ``max_terms`` monomials in ``z_1..z_n`` of total degree <= ``degree``."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = {}
        for _ in range(rng.randint(0, degree)):
            j = rng.randint(1, n)
            p, q = exps.get(j, (0, 0))
            if holomorphic or rng.random() < 0.5:
                p += 1
            else:
                q += 1
            exps[j] = (p, q)
        mono = tuple(sorted((j, p, q) for j, (p, q) in exps.items()))
        terms[mono] = terms.get(mono, QI(0)) + random_qi(rng)
    return PolyFn(terms)


def random_form(rng: random.Random, s: int, t: int, n: int, degree: int,
                max_blocks: int = 3, holomorphic: bool = False) -> Form:
    """Random ``(s, t)``-form at truncation ``n``; zero when ``s`` or ``t`` exceeds ``n``."""
    if s > n or t > n:
        return Form(s, t, n)
    Is = list(combinations(range(1, n + 1), s))
    Js = list(combinations(range(1, n + 1), t))
    coeffs = {}
    for _ in range(rng.randint(1, max_blocks)):
        key = (rng.choice(Is), rng.choice(Js))
        g = random_poly(rng, n, degree, holomorphic=holomorphic)
        coeffs[key] = coeffs[key] + g if key in coeffs else g
    return Form(s, t, n, coeffs)
