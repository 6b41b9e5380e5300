"""Product Gaussian measure on truncations of l^p.

Coordinate ``j`` is a centered complex Gaussian whose real and imaginary
parts are independent with standard deviation ``a_j``; the weights satisfy
``sum a_j < 1``. ``sigma_j = 2 a_j**2`` is the variance ``E|z_j|**2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .errors import IndexOutOfRange, InvalidArg, ValidationError
from .qi import QI

__all__ = [
    "WeightSequence",
    "monomial_moment",
    "sample",
    "MomentReport",
    "moment_sum_check",
    "FerniqueReport",
    "fernique_check",
    "abs_moment_constant",
]

DEFAULT_N = 64
CHUNK = 1 << 15


@dataclass(frozen=True)
class WeightSequence:
    """Materialized prefix ``a_1..a_N`` of the weight sequence.

    ``kind`` is ``"geometric"`` (``a_k = c * r**(k-1)``) or ``"explicit"``.
    """

    kind: str
    prefix: Tuple[Fraction, ...]
    c: Fraction | None = None
    r: Fraction | None = None

    def __post_init__(self):
        if any(a <= 0 for a in self.prefix):
            raise ValidationError([("weights", 0, "weights must be positive")])
        if self.total_bound() >= 1:
            raise ValidationError([(
                "weights", 0,
                f"sum of weights is {self.total_bound()}, must be < 1",
            )])

    @classmethod
    def geometric(cls, c, r, N: int = DEFAULT_N) -> WeightSequence:
        c, r = Fraction(c), Fraction(r)
        if not (0 < r < 1) or c <= 0:
            raise ValidationError([("weights", 0, "need c > 0 and 0 < r < 1")])
        if N < 1:
            raise ValidationError([("weights.N", 0, "need N >= 1")])
        prefix = tuple(c * r**k for k in range(N))
        return cls("geometric", prefix, c, r)

    @classmethod
    def explicit(cls, values) -> WeightSequence:
        values = tuple(Fraction(v) for v in values)
        if not values:
            raise ValidationError([("weights.values", 0, "empty weight list")])
        return cls("explicit", values)

    @classmethod
    def default(cls, N: int = DEFAULT_N) -> WeightSequence:
        """``a_k = 2**(-k-1)``, so ``a_1 = 1/4`` and the total is 1/2."""
        return cls.geometric(Fraction(1, 4), Fraction(1, 2), N)

    @property
    def N(self) -> int:
        return len(self.prefix)

    def total_bound(self) -> Fraction:
        """Exact value of ``sum_{k>=1} a_k`` (geometric) or of the prefix sum."""
        if self.kind == "geometric":
            return self.c / (1 - self.r)
        return sum(self.prefix, Fraction(0))

    def a(self, j: int) -> Fraction:
        if not 1 <= j <= len(self.prefix):
            raise IndexOutOfRange(f"weight a_{j} not materialized (N={self.N})")
        return self.prefix[j - 1]

    def sigma(self, j: int) -> Fraction:
        return 2 * self.a(j) ** 2

    def floats(self, n: int) -> np.ndarray:
        if n > self.N:
            raise IndexOutOfRange(f"need {n} weights, have {self.N}")
        return np.array([float(a) for a in self.prefix[:n]])


def monomial_moment(p: int, q: int, j: int, w: WeightSequence) -> QI:
    """``E[z_j**p * conj(z_j)**q]``: zero unless ``p == q``, else ``p! sigma_j**p``."""
    sig = w.sigma(j)
    if p != q:
        return QI(0)
    return QI(math.factorial(p) * sig**p)


# -- sampling ---------------------------------------------------------------

def _chunk(seed: int, stream: int, index: int, count: int, scales: np.ndarray):
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, stream, index])
    u1 = 1.0 - rng.random((count, scales.size))  # (0, 1]
    u2 = rng.random((count, scales.size))
    # Box-Muller in polar form: radius and phase of a standard complex normal
    rad = np.sqrt(-2.0 * np.log(u1))
    return scales * rad * np.exp(2j * np.pi * u2)


def sample(n: int, count: int, seed: int, w: WeightSequence, stream: int = 0,
           jobs: int = 1) -> np.ndarray:
    """Draw ``count`` points of the ``n``-dimensional marginal.

    Returns a complex array of shape ``(count, n)``; row ``k`` is one sample
    point. Work is split into fixed-size chunks whose generator is seeded by
    ``(seed, stream, chunk index)``, so the output is independent of ``jobs``.
    """
    if count < 0:
        raise InvalidArg("count must be nonnegative")
    scales = w.floats(n)
    if count == 0:
        return np.empty((0, n), dtype=complex)
    sizes = [min(CHUNK, count - s) for s in range(0, count, CHUNK)]
    args = [(seed, stream, i, m, scales) for i, m in enumerate(sizes)]
    if jobs > 1 and len(args) > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(lambda a: _chunk(*a), args))
    else:
        parts = [_chunk(*a) for a in args]
    return np.concatenate(parts, axis=0)


def abs_moment_constant(p: float) -> float:
    """``E(|x|**p + |y|**p) / a**p`` for one coordinate."""
    return 2 ** (p / 2 + 1) * math.gamma((1 + p) / 2) / math.sqrt(math.pi)


@dataclass(frozen=True)
class MomentReport:
    p: float
    n: int
    count: int
    empirical: float
    exact: float
    stderr: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.empirical == self.exact else math.inf
        return abs(self.empirical - self.exact) / self.stderr

    def within(self, k: float = 5.0) -> bool:
        return abs(self.empirical - self.exact) <= k * self.stderr

    def to_dict(self) -> dict:
        return {"p": self.p, "n": self.n, "count": self.count,
                "empirical": self.empirical, "exact": self.exact,
                "stderr": self.stderr, "z_score": self.z_score}


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    m = float(values.mean())
    if values.size < 2:
        return m, 0.0
    return m, float(values.std(ddof=1) / math.sqrt(values.size))


def moment_sum_check(p: float, n: int, count: int, seed: int, w: WeightSequence,
                     jobs: int = 1) -> MomentReport:
    """Empirical ``E sum_{i<=n} (|Re z_i|**p + |Im z_i|**p)`` against the
    Gamma-function closed form ``C(p) * sum a_i**p``."""
    if p < 1:
        raise InvalidArg("p must be >= 1")
    z = sample(n, count, seed, w, jobs=jobs)
    vals = (np.abs(z.real) ** p + np.abs(z.imag) ** p).sum(axis=1)
    emp, se = _mean_se(vals) if count else (0.0, 0.0)
    exact = abs_moment_constant(p) * float(sum(float(a) ** p for a in w.floats(n)))
    return MomentReport(p, n, count, emp, exact, se)


@dataclass(frozen=True)
class FerniqueReport:
    n: int
    count: int
    empirical_l1: float
    stderr_l1: float
    exact_l1: float
    bound: float
    empirical_phi: float
    stderr_phi: float
    phi_norm_bound: float

    def passed(self, k: float = 5.0) -> bool:
        return (self.empirical_l1 <= self.bound + k * self.stderr_l1
                and self.empirical_phi <= self.empirical_l1 + k * self.stderr_l1)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["passed"] = self.passed()
        return d


def fernique_bound(w: WeightSequence, n: int) -> float:
    """``exp(sum_{k<=n} (a_k**2 + (2 sqrt 2 / sqrt pi) a_k))``."""
    a = w.floats(n)
    return math.exp(float(np.sum(a**2 + 2 * math.sqrt(2) / math.sqrt(math.pi) * a)))


def fernique_exact(w: WeightSequence, n: int) -> float:
    """Closed form of ``E exp(sum_{k<=n} |x_k| + |y_k|)``:
    ``prod_k [exp(a_k**2/2) (1 + erf(a_k/sqrt 2))]**2``."""
    a = w.floats(n)
    return float(np.prod([(math.exp(x * x / 2) * (1 + math.erf(x / math.sqrt(2)))) ** 2
                          for x in a]))


def fernique_check(phi_norm_bound, count: int, seed: int, w: WeightSequence, n: int,
                   jobs: int = 1) -> FerniqueReport:
    """Monte Carlo check of the exponential-integrability bound.

    Besides ``E exp(||z||_1)`` (truncated to ``n`` coordinates) the report
    carries ``E exp(eps |phi(z)|)`` for ``phi(z) = b * z_1`` with
    ``b = phi_norm_bound`` and ``eps = 1/b``, which is dominated pointwise.
    """
    b = float(phi_norm_bound)
    if b <= 0:
        raise InvalidArg("phi_norm_bound must be positive")
    z = sample(n, count, seed, w, jobs=jobs)
    l1 = np.exp((np.abs(z.real) + np.abs(z.imag)).sum(axis=1))
    phi = np.exp(np.abs(b * z[:, 0]) / b) if n else np.ones(count)
    if count:
        e1, s1 = _mean_se(l1)
        e2, s2 = _mean_se(phi)
    else:
        e1 = s1 = e2 = s2 = 0.0
    return FerniqueReport(n, count, e1, s1, fernique_exact(w, n), fernique_bound(w, n),
                          e2, s2, b)
