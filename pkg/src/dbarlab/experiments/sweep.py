"""Solve the same kind of data at increasing truncation dimension."""
from __future__ import annotations

import math
import random
from fractions import Fraction

from ..forms import Form, dbar, format_form, truncate
from ..polyalg import PolyFn
from ..solver import check_closed, solve_minimal
from .config import ExperimentConfig
from .generators import random_form

CSV_COLUMNS = ("n", "norm_f_sq_num", "norm_f_sq_den", "norm_u_sq_num", "norm_u_sq_den",
               "ratio_float")


def diagonal_family(n: int) -> Form:
    """``sum_{k<=n} conj(z_k) dconj(z_k)``, closed at every ``n``."""
    return Form(0, 1, n, {((), (k,)): PolyFn.zb(k) for k in range(1, n + 1)})


def _row(n: int, rep) -> dict:
    nf, nu = rep.norm_f_sq, rep.norm_u_sq
    return {"n": n, "norm_f_sq_num": nf.numerator, "norm_f_sq_den": nf.denominator,
            "norm_u_sq_num": nu.numerator, "norm_u_sq_den": nu.denominator,
            "ratio_float": math.sqrt(nu / nf) if nf else 0.0}


def dimension_sweep(cfg: ExperimentConfig) -> dict:
    """Built-in diagonal family and truncations ``M_n`` of one random closed form.

    The random closed form is ``dbar u`` for a seeded random function ``u`` on
    ``max(n_range)`` coordinates.
    """
    w = cfg.weights
    builtin = []
    for n in cfg.n_range:
        rep = solve_minimal(diagonal_family(n), w)
        row = _row(n, rep)
        row["ratio_sq"] = str(rep.ratio_sq)
        row["ratio_sq_is_half"] = rep.ratio_sq == Fraction(1, 2)
        row["bound_satisfied"] = rep.bound_satisfied
        builtin.append(row)

    rng = random.Random(cfg.seed)
    nmax = cfg.n_range[-1]
    u0 = random_form(rng, 0, 0, nmax, cfg.degree_cap)
    f_full = dbar(u0)
    truncated = []
    for n in cfg.n_range:
        fn = truncate(f_full, n, w)
        closed = check_closed(fn, w)
        row = {"n": n, "closed": closed}
        if closed:
            rep = solve_minimal(fn, w)
            row.update(_row(n, rep))
            row["bound_satisfied"] = rep.bound_satisfied
        truncated.append(row)

    passed = (all(r["ratio_sq_is_half"] and r["bound_satisfied"] for r in builtin)
              and all(r["closed"] and r.get("bound_satisfied", False) for r in truncated))
    return {"experiment": "sweep", "seed": cfg.seed, "n_range": list(cfg.n_range),
            "builtin": builtin, "truncated": truncated,
            "random_closed_form": format_form(f_full), "passed": passed}
