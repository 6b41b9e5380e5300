"""Monte Carlo identification of the form norm with an ambient L2 norm."""
from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidArg
from ..forms import Form, ambient_eval, norm_sq
from ..gaussian import sample
from .config import ExperimentConfig


def mc_norm_check(cfg: ExperimentConfig, f: Form) -> dict:
    """Empirical ``E |f(z, z^1, ..., z^{s+t})|**2`` against ``norm_sq(f)``.

    ``z`` and the ``s + t`` wedge arguments are independent draws from the
    same product Gaussian, taken from separate random streams.
    """
    deg = f.s + f.t
    if deg > 3:
        raise InvalidArg("Monte Carlo check supports s + t <= 3")
    w = cfg.weights
    exact = norm_sq(f, w)
    count = cfg.samples
    if f.is_zero() or count == 0:
        emp, se = 0.0, 0.0
    else:
        z = sample(f.n, count, cfg.seed, w, stream=0, jobs=cfg.jobs)
        args = [sample(f.n, count, cfg.seed, w, stream=i + 1, jobs=cfg.jobs)
                for i in range(deg)]
        vals = np.abs(ambient_eval(f, z, args)) ** 2
        emp = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    ex = float(exact)
    k = cfg.tolerances.mc_sigma
    passed = emp == ex if se == 0 else abs(emp - ex) <= k * se
    return {"experiment": "mc", "s": f.s, "t": f.t, "n": f.n, "samples": count,
            "seed": cfg.seed, "exact": str(exact), "exact_float": ex, "empirical": emp,
            "stderr": se, "z_score": abs(emp - ex) / se if se else 0.0,
            "passed": passed}
