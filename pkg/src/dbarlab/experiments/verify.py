"""Exact property sweeps over seeded random polynomial forms."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Dict, List

from ..forms import Form, dbar, dbar_adjoint, format_form, inner_forms, norm_sq
from ..polyalg import PolyFn, d_zbar, delta, format_poly, inner
from ..solver import check_closed, energy_identity_defect
from .config import ExperimentConfig
from .generators import random_form, random_poly

MAX_DUMPS = 3


def dbar_squared_vanishes(f: Form) -> bool:
    return dbar(dbar(f)).is_zero()


def adjoint_holds(u: Form, f: Form, w) -> bool:
    return inner_forms(dbar(u), f, w) == inner_forms(u, dbar_adjoint(f, w), w)


def basic_estimate_holds(f: Form, w) -> bool:
    lhs = norm_sq(dbar_adjoint(f, w), w)
    if f.t + 1 <= f.n:
        lhs += norm_sq(dbar(f), w)
    return norm_sq(f, w) <= lhs


class _Property:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures: List[dict] = []

    def record(self, ok: bool, dump: Callable[[], dict]):
        self.cases += 1
        if not ok and len(self.failures) < MAX_DUMPS:
            self.failures.append(dump())
        elif not ok:
            self.failures.append({})

    def to_dict(self) -> dict:
        return {"cases": self.cases, "passed": not self.failures,
                "failure_count": len(self.failures),
                "counterexamples": [d for d in self.failures if d]}


def _pick_n(rng, cfg, lo: int):
    ok = [n for n in cfg.n_range if n >= lo]
    return rng.choice(ok) if ok else None


def verify_suite(cfg: ExperimentConfig) -> dict:
    """Run every exact identity on ``cfg.case_count`` random cases per degree
    combination; ``n`` is drawn per case from the admissible part of
    ``cfg.n_range``. Failures are collected, never raised."""
    w = cfg.weights
    rng = random.Random(cfg.seed)
    deg = cfg.degree_cap
    props: Dict[str, _Property] = {k: _Property(k) for k in (
        "dbar_squared", "integration_by_parts", "commutator", "adjointness",
        "energy_identity", "basic_estimate", "analytic_kernel", "sentinel_not_closed")}

    for s in range(cfg.s + 1):
        for t in range(cfg.t + 1):
            for _ in range(cfg.case_count):
                n = _pick_n(rng, cfg, max(s, t + 2))
                if n is None:
                    break
                f = random_form(rng, s, t, n, deg)
                props["dbar_squared"].record(
                    dbar_squared_vanishes(f), lambda: {"f": format_form(f)})
            for _ in range(cfg.case_count):
                n = _pick_n(rng, cfg, max(s, t + 1))
                if n is None:
                    break
                u = random_form(rng, s, t, n, deg)
                f = random_form(rng, s, t + 1, n, deg)
                props["adjointness"].record(
                    adjoint_holds(u, f, w),
                    lambda: {"u": format_form(u), "f": format_form(f)})
                d = energy_identity_defect(f, w)
                props["energy_identity"].record(
                    d == 0, lambda: {"f": format_form(f), "defect": str(d)})
                props["basic_estimate"].record(
                    basic_estimate_holds(f, w), lambda: {"f": format_form(f)})
            for _ in range(cfg.case_count):
                n = _pick_n(rng, cfg, max(s, t + 1))
                if n is None:
                    break
                h = random_form(rng, s, t, n, deg, holomorphic=True)
                props["analytic_kernel"].record(
                    dbar(h).is_zero(), lambda: {"f": format_form(h)})

    nmax = cfg.n_range[-1] if cfg.n_range else 1
    for _ in range(cfg.case_count):
        n = rng.randint(1, nmax)
        phi = random_poly(rng, n, deg)
        psi = random_poly(rng, n, deg)
        j = rng.randint(1, n)
        k = rng.randint(1, n)
        ok = inner(d_zbar(j, phi), psi, w) == -inner(phi, delta(j, psi, w), w)
        props["integration_by_parts"].record(
            ok, lambda: {"phi": format_poly(phi), "psi": format_poly(psi), "j": j})
        lhs = delta(k, d_zbar(j, phi), w) - d_zbar(j, delta(k, phi, w))
        rhs = phi.scale(1 / w.sigma(k)) if j == k else phi.scale(0)
        props["commutator"].record(
            lhs == rhs, lambda: {"phi": format_poly(phi), "j": j, "k": k})

    if nmax >= 2 and cfg.case_count:
        sentinel = Form(0, 1, 2, {((), (1,)): PolyFn.zb(2)})
        props["sentinel_not_closed"].record(
            not check_closed(sentinel, w), lambda: {"f": format_form(sentinel)})

    out = {name: p.to_dict() for name, p in props.items() if p.cases}
    return {"experiment": "verify", "seed": cfg.seed, "case_count": cfg.case_count,
            "properties": out, "passed": all(p["passed"] for p in out.values())}
