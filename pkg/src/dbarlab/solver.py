"""Minimal-norm solutions of ``dbar u = f`` for closed polynomial forms.

Work happens in the tensor Hermite basis, where the form Gram matrix is
diagonal. Writing a basis element of ``u`` as ``H_{alpha,beta} dz^I ^ dconj(z)^K``,
``dbar`` sends it to ``sum_j +-beta_j H_{alpha,beta-e_j} dz^I ^ dconj(z)^{K+j}``,
so ``alpha``, ``I`` and ``gamma = beta + 1_K`` are conserved. Each
``(I, alpha, gamma)`` block is a small independent linear system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .errors import AnsatzInsufficient, DbarError, InvalidArg, InvalidDegree, NotClosed
from .forms import Form, dbar, dbar_adjoint, norm_sq
from .hermite import HermiteExpansion, expand, hermite_norm_sq, reconstruct
from .multiindex import insert, weight_aIJ
from .polyalg import PolyFn, d_zbar
from .qi import QI, format_rational

__all__ = [
    "AnsatzSpec",
    "SolveReport",
    "check_closed",
    "solve_minimal",
    "ortho_defect",
    "energy_identity_defect",
    "is_separable",
]


@dataclass(frozen=True)
class AnsatzSpec:
    """Per-coordinate Hermite degree caps for the unknown ``u``.

    ``None`` caps are filled from the data: ``(P, Q + 1)`` where ``P``/``Q``
    are the largest per-coordinate z / conj(z) degrees of ``f``.
    """

    max_z_degree: Optional[int] = None
    max_zbar_degree: Optional[int] = None
    retry_limit: int = 2

    def __post_init__(self):
        for v in (self.max_z_degree, self.max_zbar_degree):
            if v is not None and v < 0:
                raise InvalidArg("degree caps must be nonnegative")
        if self.retry_limit < 0:
            raise InvalidArg("retry_limit must be nonnegative")

    @staticmethod
    def data_degrees(f: Form) -> Tuple[int, int]:
        P = Q = 0
        for g in f.coeffs.values():
            for p, q in g.bidegrees().values():
                P, Q = max(P, p), max(Q, q)
        return P, Q

    def resolve(self, f: Form) -> Tuple[int, int]:
        P, Q = self.data_degrees(f)
        return (P if self.max_z_degree is None else self.max_z_degree,
                Q + 1 if self.max_zbar_degree is None else self.max_zbar_degree)


@dataclass
class SolveReport:
    u: Form
    residual_norm_sq: Fraction
    norm_u_sq: Fraction
    norm_f_sq: Fraction
    ortho_defect: Fraction
    bound_satisfied: bool
    method: str = "generic"
    caps: Tuple[int, int] = (0, 0)
    retries: int = 0

    @property
    def ratio_sq(self) -> Optional[Fraction]:
        return self.norm_u_sq / self.norm_f_sq if self.norm_f_sq else None

    def to_dict(self) -> dict:
        from .forms import form_to_json

        r = self.ratio_sq
        return {
            "u": form_to_json(self.u),
            "residual_norm_sq": format_rational(self.residual_norm_sq),
            "norm_u_sq": format_rational(self.norm_u_sq),
            "norm_f_sq": format_rational(self.norm_f_sq),
            "ratio_sq": None if r is None else format_rational(r),
            "ratio_float": None if r is None else math.sqrt(r),
            "ortho_defect": format_rational(self.ortho_defect),
            "bound_satisfied": self.bound_satisfied,
            "method": self.method,
            "caps": list(self.caps),
            "retries": self.retries,
        }


def check_closed(f: Form, w=None) -> bool:
    """``S f = 0``; vacuously true when ``S`` has no target (``t + 2 > n``)."""
    if f.t + 1 > f.n:
        return True
    return dbar(f).is_zero()


# -- exact linear algebra ---------------------------------------------------

def _solve_consistent(N: List[List[Fraction]], rhs: List[List[Fraction]]):
    """One solution of ``N x = b`` for each right-hand side column.

    Rows are scaled to integers and reduced by fraction-free (Bareiss)
    elimination; free variables are set to zero. Returns ``None`` if some
    system is inconsistent.
    """
    m = len(N)
    k = len(rhs)
    width = m + k
    M = []
    for i in range(m):
        row = list(N[i]) + [rhs[c][i] for c in range(k)]
        den = math.lcm(*(Fraction(x).denominator for x in row))
        M.append([int(Fraction(x) * den) for x in row])
    prev = 1
    r = 0
    pivots = []
    for c in range(m):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        pc = pr[c]
        for i in range(r + 1, m):
            row = M[i]
            lead = row[c]
            for col in range(c + 1, width):
                row[col] = (pc * row[col] - lead * pr[col]) // prev
            row[c] = 0
        prev = pc
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if any(M[i][m + c] for c in range(k)):
            return None
    sols = []
    for c in range(k):
        x = [Fraction(0)] * m
        for ri in range(r - 1, -1, -1):
            pc = pivots[ri]
            acc = Fraction(M[ri][m + c])
            for col in pivots[ri + 1:]:
                if M[ri][col]:
                    acc -= M[ri][col] * x[col]
            x[pc] = acc / M[ri][pc]
        sols.append(x)
    return sols


# -- generic path -----------------------------------------------------------

def _block_data(f: Form, w):
    """Group the Hermite coefficients of ``f`` into ``(I, alpha, gamma)`` blocks."""
    n = f.n
    blocks: Dict[tuple, Dict[tuple, QI]] = {}
    for (I, J), g in f.coeffs.items():
        for key, c in expand(g, w).coeffs.items():
            alpha = [0] * n
            gamma = [0] * n
            for j, p, q in key:
                alpha[j - 1] = p
                gamma[j - 1] = q
            for j in J:
                gamma[j - 1] += 1
            blocks.setdefault((I, tuple(alpha), tuple(gamma)), {})[J] = c
    return blocks


def _solve_block(I, alpha, gamma, y: Dict[tuple, QI], t: int, s: int, w, caps):
    """Minimal-norm solution inside one block, or ``None`` if inconsistent.

    Returns ``{(K, beta): coefficient}``.
    """
    n = len(gamma)
    zcap, zbcap = caps
    if any(a > zcap for a in alpha):
        return None
    support = [j for j in range(1, n + 1) if gamma[j - 1] > 0]
    cols = []
    for K in combinations(support, t):
        beta = list(gamma)
        for j in K:
            beta[j - 1] -= 1
        if any(b > zbcap for b in beta):
            continue
        cols.append((K, tuple(beta)))
    row_keys = list(combinations(support, t + 1))
    if any(J not in set(row_keys) for J in y):
        return None
    row_of = {J: i for i, J in enumerate(row_keys)}
    sgn_s = -1 if s & 1 else 1
    base = Fraction(1)
    for j in range(1, n + 1):
        base *= math.factorial(alpha[j - 1]) * w.sigma(j) ** alpha[j - 1]
    # column data: gram weight and the sparse column of the dbar matrix
    col_gram = []
    col_entries = []
    for K, beta in cols:
        g = base * 2 ** (s + t) * weight_aIJ(I, K, w)
        for j in range(1, n + 1):
            g *= math.factorial(beta[j - 1]) * w.sigma(j) ** beta[j - 1]
        col_gram.append(g)
        ent = []
        for j in support:
            if beta[j - 1] == 0:
                continue
            ins = insert(j, K)
            if ins is None:
                continue
            eps, M = ins
            ent.append((row_of[M], sgn_s * eps * beta[j - 1]))
        col_entries.append(ent)
    m = len(row_keys)
    N = [[Fraction(0)] * m for _ in range(m)]
    for g, ent in zip(col_gram, col_entries):
        for r1, v1 in ent:
            for r2, v2 in ent:
                N[r1][r2] += Fraction(v1 * v2) / g
    yr = [Fraction(0)] * m
    yi = [Fraction(0)] * m
    for J, c in y.items():
        yr[row_of[J]] = c.re
        yi[row_of[J]] = c.im
    sol = _solve_consistent(N, [yr, yi])
    if sol is None:
        return None
    lr, li = sol
    out = {}
    for (K, beta), g, ent in zip(cols, col_gram, col_entries):
        xr = sum((v * lr[r] for r, v in ent), Fraction(0)) / g
        xi = sum((v * li[r] for r, v in ent), Fraction(0)) / g
        if xr or xi:
            out[(K, beta)] = QI(xr, xi)
    return out


def _generic(f: Form, w, caps) -> Optional[Form]:
    t = f.t - 1
    pieces: Dict[tuple, Dict[tuple, QI]] = {}
    for (I, alpha, gamma), y in sorted(_block_data(f, w).items()):
        x = _solve_block(I, alpha, gamma, y, t, f.s, w, caps)
        if x is None:
            return None
        for (K, beta), c in x.items():
            key = tuple((j, alpha[j - 1], beta[j - 1]) for j in range(1, f.n + 1)
                        if alpha[j - 1] or beta[j - 1])
            pieces.setdefault((I, K), {})[key] = c
    coeffs = {ik: reconstruct(HermiteExpansion(h, w)) for ik, h in pieces.items()}
    return Form(f.s, t, f.n, coeffs, check=False)


# -- separable path ---------------------------------------------------------

def is_separable(f: Form) -> bool:
    """(0,1)-form whose ``dconj(z_k)`` coefficient depends on ``z_k`` alone."""
    if f.s != 0 or f.t != 1:
        return False
    return all(g.coords() <= {J[0]} for (_, J), g in f.coeffs.items())


def _separable(f: Form, w) -> Form:
    herm: Dict[tuple, QI] = {}
    for (_, (k,)), g in f.coeffs.items():
        for key, c in expand(g, w).coeffs.items():
            p, q = (key[0][1], key[0][2]) if key else (0, 0)
            new = ((k, p, q + 1),)
            herm[new] = herm.get(new, QI(0)) + c / (q + 1)
    u = reconstruct(HermiteExpansion(herm, w))
    return Form(0, 0, f.n, {((), ()): u} if u else {}, check=False)


# -- public entry points ----------------------------------------------------

def solve_minimal(f: Form, w, ansatz: AnsatzSpec | None = None,
                  method: str = "auto") -> SolveReport:
    """Minimal-norm ``u`` with ``dbar u = f`` inside the Hermite ansatz.

    ``method`` is ``"auto"``, ``"generic"`` or ``"separable"``.
    """
    if f.t == 0:
        raise InvalidDegree("the right-hand side must have t-degree >= 1")
    if method not in ("auto", "generic", "separable"):
        raise InvalidArg(f"unknown method {method!r}")
    if not check_closed(f, w):
        raise NotClosed("dbar f is nonzero")
    ansatz = ansatz or AnsatzSpec()
    caps = ansatz.resolve(f)
    retries = 0
    if method == "separable" or (method == "auto" and is_separable(f)):
        if not is_separable(f):
            raise InvalidArg("form is not coordinate-separable")
        method = "separable"
        u = _separable(f, w)
    else:
        method = "generic"
        while True:
            u = _generic(f, w, caps)
            if u is not None:
                break
            if retries >= ansatz.retry_limit:
                raise AnsatzInsufficient(
                    f"no exact solution within caps {caps} after {retries} enlargements")
            retries += 1
            caps = (caps[0] + 1, caps[1] + 1)
    res = norm_sq(dbar(u) - f, w) if u.t + 1 <= u.n else norm_sq(f, w)
    if res:
        raise AnsatzInsufficient(f"nonzero residual {res} after solve")
    nu, nf = norm_sq(u, w), norm_sq(f, w)
    report = SolveReport(u, res, nu, nf, ortho_defect(u, w, caps[0]), nu <= nf,
                         method, caps, retries)
    if not report.bound_satisfied:
        raise DbarError(f"norm bound violated: {nu} > {nf}")
    return report


def ortho_defect(u: Form, w, degree_cap: int) -> Fraction:
    """Largest ``|<u, v>|**2`` over test forms ``v = H_{alpha,0} dz^I ^ dconj(z)^J``
    with every ``alpha_j <= degree_cap``; zero means ``u`` is orthogonal to
    that slice of the analytic sector."""
    best = Fraction(0)
    for (I, J), g in u.coeffs.items():
        wt = 2 ** (u.s + u.t) * weight_aIJ(I, J, w)
        for key, c in expand(g, w).coeffs.items():
            if any(q for _, _, q in key) or any(p > degree_cap for _, p, _ in key):
                continue
            val = c.abs2() * (wt * hermite_norm_sq(key, w)) ** 2
            best = max(best, val)
    return best


def _scalar_dbar_norm_sq(g: PolyFn, w) -> Fraction:
    """``sum_i 2 a_i**2 ||d g / dconj(z_i)||**2``: norm of ``dbar g`` as a (0,1)-form."""
    from .polyalg import norm_sq as poly_norm_sq

    return sum((w.sigma(i) * poly_norm_sq(d_zbar(i, g), w) for i in sorted(g.coords())),
               Fraction(0))


def energy_identity_defect(f: Form, w) -> Fraction:
    """``||T* f||**2 + ||S f||**2 - (t+1)||f||**2 - 2**(s+t+1) sum' a^{I,K} ||dbar f_{I,K}||**2``."""
    tstar = dbar_adjoint(f, w)
    sf = norm_sq(dbar(f), w) if f.t + 1 <= f.n else Fraction(0)
    grad = sum((weight_aIJ(I, K, w) * _scalar_dbar_norm_sq(g, w)
                for (I, K), g in f.coeffs.items()), Fraction(0))
    return norm_sq(tstar, w) + sf - f.t * norm_sq(f, w) - 2 ** (f.s + f.t) * grad
