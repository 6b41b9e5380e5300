import math
import random
from fractions import Fraction

import numpy as np
import pytest

from dbarlab.errors import InvalidArg, QuadratureFailure, ValidationError
from dbarlab.experiments import (ExperimentConfig, QuadratureConfig, Tolerances,
                                 diagonal_family, dimension_sweep, lempert_example,
                                 mc_norm_check, psi, random_form, verify_suite)
from dbarlab.experiments import lempert as lempert_mod
from dbarlab.forms import Form, parse_form
from dbarlab.gaussian import WeightSequence
from dbarlab.hermite import hermite_norm_sq
from dbarlab.polyalg import PolyFn

W = WeightSequence.default()


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(n_range=())
    with pytest.raises(ValidationError):
        ExperimentConfig(n_range=(2, 1))
    with pytest.raises(ValidationError):
        ExperimentConfig(quadrature=QuadratureConfig(cutoff_radius=Fraction(1)))
    with pytest.raises(ValidationError):
        ExperimentConfig(n_range=(1, 100))
    with pytest.raises(ValidationError):
        ExperimentConfig(tolerances=Tolerances(mc_sigma=0))


def test_random_form_shape_and_determinism():
    a = random_form(random.Random(4), 1, 2, 3, 4)
    b = random_form(random.Random(4), 1, 2, 3, 4)
    assert a == b and a.shape == (1, 2, 3) and not a.is_zero()
    assert random_form(random.Random(0), 3, 0, 2, 2).is_zero()


def test_verify_suite_empty():
    rep = verify_suite(ExperimentConfig(case_count=0))
    assert rep["passed"] and rep["properties"] == {}


def test_verify_suite_small():
    rep = verify_suite(ExperimentConfig(case_count=5, seed=3))
    assert rep["passed"]
    props = rep["properties"]
    for name in ("dbar_squared", "adjointness", "energy_identity", "basic_estimate",
                 "integration_by_parts", "commutator", "analytic_kernel",
                 "sentinel_not_closed"):
        assert props[name]["passed"] and props[name]["cases"] > 0


def test_verify_suite_deterministic():
    cfg = ExperimentConfig(case_count=3, seed=8)
    assert verify_suite(cfg) == verify_suite(cfg)


def test_diagonal_family_norms():
    for n in (1, 3):
        f = diagonal_family(n)
        assert f.shape == (0, 1, n) and len(f.coeffs) == n


def test_dimension_sweep_values():
    rep = dimension_sweep(ExperimentConfig(n_range=(1, 2, 3, 4, 5)))
    assert rep["passed"]
    for row in rep["builtin"]:
        n = row["n"]
        s4 = sum(W.a(k) ** 4 for k in range(1, n + 1))
        assert Fraction(row["norm_f_sq_num"], row["norm_f_sq_den"]) == 4 * s4
        assert Fraction(row["norm_u_sq_num"], row["norm_u_sq_den"]) == 2 * s4
        assert row["ratio_sq_is_half"]
    assert all(r["closed"] for r in rep["truncated"])


def test_dimension_sweep_single_n():
    row = dimension_sweep(ExperimentConfig(n_range=(1,)))["builtin"][0]
    assert (row["norm_f_sq_num"], row["norm_f_sq_den"]) == (1, 64)
    assert (row["norm_u_sq_num"], row["norm_u_sq_den"]) == (1, 128)


def test_mc_norm_check_examples():
    cfg = ExperimentConfig(samples=20_000, seed=1)
    rep = mc_norm_check(cfg, parse_form("[|1] 1"))
    assert rep["passed"] and rep["exact"] == "1/8"
    zero = mc_norm_check(cfg, Form(0, 1, 2))
    assert zero["empirical"] == 0 and zero["passed"]
    with pytest.raises(InvalidArg):
        mc_norm_check(cfg, Form(2, 2, 4))


def test_mc_norm_check_mixed_form():
    cfg = ExperimentConfig(samples=40_000, seed=2)
    f = parse_form("[1|2] zb1 + 1/2\n[2|1] z2")
    assert mc_norm_check(cfg, f)["passed"]


# -- Lempert pieces ---------------------------------------------------------

def test_psi_formula_and_support():
    z = np.array([0.3 * np.exp(0.4j), 0.9, 0.0, 0.6j])
    vals = psi(z, 2)
    r = 0.3
    want = r * np.exp(3 * 0.4j) / (2 * math.log(r))
    assert abs(vals[0] - want) < 1e-14
    assert vals[1] == 0 and vals[2] == 0
    assert 0 < abs(vals[3]) < 0.6


def test_radial_panels_cover_interval():
    panels = lempert_mod._radial_panels(5.0, [1.5, 2.0])
    assert panels[0][0] == 0.0 and panels[-1][1] == 5.0
    assert all(b > a for a, b in panels)
    edges = {x for p in panels for x in p}
    assert 1.5 in edges and 2.0 in edges


def test_quadrature_reproduces_gaussian_moments():
    # E|zeta|^2 = 1 and E|zeta|^4 = 2 for the standard complex Gaussian
    zeta, wgt = lempert_mod._polar_grid(1e-6, 0.75, 24, 16)
    assert abs(np.sum(wgt) - 1) < 1e-12
    assert abs(np.sum(wgt * np.abs(zeta) ** 2) - 1) < 1e-12
    assert abs(np.sum(wgt * np.abs(zeta) ** 4) - 2) < 1e-12


def test_projection_of_a_polynomial_is_exact(monkeypatch):
    # swap psi for H_{2,1} = z^2 conj(z) - 2 sigma z; sigma small so the
    # whole Gaussian bulk sits inside the integration disk
    sigma = 1e-4
    monkeypatch.setattr(lempert_mod, "psi",
                        lambda z, p, r0=0.75: z**2 * np.conj(z) - sigma * 2 * z)
    res = lempert_mod.project_coordinate(1, sigma, 4, 0.75, 24, 32)
    c = res["coef"] / math.sqrt(sigma) ** 3
    assert abs(c[2, 1] - 1) < 1e-10
    mask = np.ones_like(c, dtype=bool)
    mask[2, 1] = False
    assert np.max(np.abs(res["coef"][mask])) < 1e-12


def test_two_grid_failure(monkeypatch):
    monkeypatch.setattr(lempert_mod, "TWO_GRID_REL", 0.0)
    monkeypatch.setattr(lempert_mod, "psi",
                        lambda z, p, r0=0.75: np.sqrt(np.abs(z)) * (np.abs(z) < 0.6))
    with pytest.raises(QuadratureFailure):
        lempert_mod.project_coordinate(1, 0.125, 2, 0.75, 3, 8)


def test_lempert_small():
    rep = lempert_example(ExperimentConfig(n_range=(1, 2)), 2, cap=6)
    assert rep["passed"], rep["checks"]
    assert rep["diagonal"] == 3
    assert rep["ratio"] <= 1
    for c in rep["coordinates"]:
        assert c["off_diagonal_modes"] == [] and c["nonzero_modes"] > 0


def test_lempert_p1_and_errors():
    rep = lempert_example(ExperimentConfig(n_range=(1,)), 1, cap=5)
    assert rep["checks"]["structural_diagonal"] and rep["checks"]["psi_bound"]
    with pytest.raises(InvalidArg):
        lempert_example(ExperimentConfig(), 0)
