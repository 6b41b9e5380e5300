"""Strictly increasing multi-indices and their sign calculus.

A multi-index is a plain ``tuple`` of positive ints in strictly increasing
order; ``()`` is the empty index. Indices are unbounded here; truncation to
``1..n`` is the form layer's business.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Tuple

from .errors import InvalidArg

MultiIndex = Tuple[int, ...]

__all__ = [
    "MultiIndex",
    "multi_index",
    "is_multi_index",
    "eps_sign",
    "insert",
    "remove",
    "weight_aIJ",
    "enumerate_indices",
]


def is_multi_index(entries) -> bool:
    prev = 0
    for e in entries:
        if not isinstance(e, int) or e <= prev:
            return False
        prev = e
    return True


def multi_index(entries: Sequence[int] = ()) -> MultiIndex:
    """Validate and return ``entries`` as a multi-index tuple."""
    t = tuple(entries)
    if not is_multi_index(t):
        raise InvalidArg(f"not a strictly increasing tuple of positive ints: {t!r}")
    return t


def insert(j: int, J: MultiIndex) -> Optional[Tuple[int, MultiIndex]]:
    """Insert ``j`` into ``J``.

    Returns ``(sign, K)`` with ``K`` the sorted union and ``sign`` the sign of
    the permutation taking ``(j, *J)`` to ``K``, or ``None`` if ``j`` is
    already in ``J``. Moving ``j`` past each smaller entry is one
    transposition, so the sign is ``(-1)**#{k in J : k < j}``.
    """
    pos = 0
    for k in J:
        if k == j:
            return None
        if k > j:
            break
        pos += 1
    K = J[:pos] + (j,) + J[pos:]
    return (-1 if pos & 1 else 1), K


def remove(j: int, K: MultiIndex) -> Optional[Tuple[int, MultiIndex]]:
    """Inverse of :func:`insert`: ``(sign, J)`` with ``insert(j, J) == (sign, K)``."""
    try:
        pos = K.index(j)
    except ValueError:
        return None
    return (-1 if pos & 1 else 1), K[:pos] + K[pos + 1:]


def eps_sign(j: int, J: MultiIndex, K: MultiIndex) -> int:
    """Sign of the permutation taking ``(j, j_1, ..., j_t)`` to ``K``; 0 if
    ``K`` is not the disjoint union ``{j} | J``."""
    if len(K) != len(J) + 1:
        return 0
    res = insert(j, J)
    if res is None or res[1] != tuple(K):
        return 0
    return res[0]


def weight_aIJ(I: MultiIndex, J: MultiIndex, w) -> Fraction:
    """``prod a_i**2 over I`` times ``prod a_j**2 over J`` (empty product is 1)."""
    out = Fraction(1)
    for k in I:
        out *= w.a(k) ** 2
    for k in J:
        out *= w.a(k) ** 2
    return out


def enumerate_indices(card: int, n: int) -> list:
    """All multi-indices of cardinality ``card`` inside ``1..n``, lexicographic."""
    if card < 0 or n < 0:
        raise InvalidArg("card and n must be nonnegative")
    if card > n:
        raise InvalidArg(f"cannot choose {card} indices from 1..{n}")
    return list(combinations(range(1, n + 1), card))
