import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from dbarlab.errors import AnsatzInsufficient, InvalidArg, InvalidDegree, NotClosed
from dbarlab.experiments.generators import random_form
from dbarlab.forms import Form, dbar, format_form, inner_forms, norm_sq
from dbarlab.gaussian import WeightSequence
from dbarlab.hermite import expand, hermite_norm_sq
from dbarlab.multiindex import weight_aIJ
from dbarlab.polyalg import PolyFn
from dbarlab.solver import (AnsatzSpec, check_closed, energy_identity_defect, is_separable,
                            ortho_defect, solve_minimal)

from strategies import forms

W = WeightSequence.default()
zb1, zb2, z1 = PolyFn.zb(1), PolyFn.zb(2), PolyFn.z(1)
ONE = PolyFn.const(1)


# -- oracles ----------------------------------------------------------------

def _sym(x: Fraction):
    return sp.Rational(x.numerator, x.denominator)


def least_squares_oracle(f: Form, w, max_deg: int) -> Fraction:
    """Minimal ``norm_sq(u)`` over all ``(s, t)``-forms whose coefficients are
    monomials of total degree ``<= max_deg``, subject to ``dbar u = f``.

    Solution set = particular solution + null space of the constraint matrix;
    the null-space component is removed by exact weighted projection.
    """
    s, t, n = f.s, f.t - 1, f.n
    monos = []
    for d in range(max_deg + 1):
        for exps in _exponents(n, d):
            monos.append(tuple((j + 1, p, q) for j, (p, q) in enumerate(exps) if p or q))
    basis = [Form(s, t, n, {(I, J): PolyFn.monomial(m)})
             for I in combinations(range(1, n + 1), s)
             for J in combinations(range(1, n + 1), t) for m in monos]
    images = [dbar(b) for b in basis]
    rows = sorted({(k, m) for im in images + [f] for k, g in im.coeffs.items()
                   for m in g.terms})
    def col(form):
        out = []
        for k, m in rows:
            c = form.coeffs.get(k)
            v = c.terms.get(m) if c is not None else None
            out.append(0 if v is None else _sym(v.re) + sp.I * _sym(v.im))
        return out
    A = sp.Matrix([col(im) for im in images]).T
    y = sp.Matrix(col(f))
    G = sp.Matrix(len(basis), len(basis),
                  lambda i, j: _sym(inner_forms(basis[j], basis[i], w).re))
    sol, params = A.gauss_jordan_solve(y)
    x0 = sol.subs({p: 0 for p in params})
    N = A.nullspace()
    if N:
        Nm = sp.Matrix.hstack(*N)
        coef = (Nm.H * G * Nm).solve(Nm.H * G * x0)
        x0 = x0 - Nm * coef
    val = sp.nsimplify(sp.expand((x0.H * G * x0)[0]))
    return Fraction(int(sp.numer(val)), int(sp.denom(val)))


def _exponents(n, d):
    if n == 0:
        if d == 0:
            yield ()
        return
    for p in range(d + 1):
        for q in range(d + 1 - p):
            for rest in _exponents(n - 1, d - p - q):
                yield ((p, q),) + rest


def box_inverse_oracle(f: Form, w) -> Fraction:
    """``<f, Box^{-1} f>``: the Laplacian acts on ``H_{alpha,beta} dz^I ^ dconj(z)^J``
    (an ``(s, t+1)``-form) by the scalar ``t + 1 + |beta|``."""
    total = Fraction(0)
    for (I, J), g in f.coeffs.items():
        wt = 2 ** (f.s + f.t) * weight_aIJ(I, J, w)
        for key, c in expand(g, w).coeffs.items():
            beta = sum(q for _, _, q in key)
            total += c.abs2() * wt * hermite_norm_sq(key, w) / (f.t + beta)
    return total


# -- worked examples --------------------------------------------------------

def test_worked_single_coordinate():
    f = Form(0, 1, 1, {((), (1,)): zb1})
    rep = solve_minimal(f, W)
    assert rep.u == Form(0, 0, 1, {((), ()): (zb1**2).scale(Fraction(1, 2))})
    assert rep.norm_u_sq == Fraction(1, 128)
    assert rep.norm_f_sq == Fraction(1, 64)
    assert rep.ratio_sq == Fraction(1, 2)
    assert rep.residual_norm_sq == 0 and rep.ortho_defect == 0 and rep.bound_satisfied
    assert least_squares_oracle(f, W, 3) == Fraction(1, 128)


def test_worked_two_form():
    f = Form(0, 2, 2, {((), (1, 2)): ONE})
    rep = solve_minimal(f, W)
    half = Fraction(1, 2)
    assert rep.u == Form(0, 1, 2, {((), (1,)): zb2.scale(-half), ((), (2,)): zb1.scale(half)})
    a1, a2 = W.a(1), W.a(2)
    assert rep.norm_u_sq == 2 * a1**2 * a2**2
    assert rep.norm_f_sq == 4 * a1**2 * a2**2
    assert least_squares_oracle(f, W, 2) == rep.norm_u_sq


def test_zero_form():
    rep = solve_minimal(Form(0, 1, 2), W)
    assert rep.u.is_zero() and rep.u.shape == (0, 0, 2)
    assert rep.norm_f_sq == 0 and rep.ratio_sq is None


def test_check_closed():
    assert check_closed(Form(0, 1, 1, {((), (1,)): zb1}), W)
    assert not check_closed(Form(0, 1, 2, {((), (1,)): zb2}), W)
    # S has no target when t + 2 > n
    assert check_closed(Form(0, 1, 1, {((), (1,)): z1 * zb1}), W)


def test_errors():
    with pytest.raises(NotClosed):
        solve_minimal(Form(0, 1, 2, {((), (1,)): zb2}), W)
    with pytest.raises(InvalidDegree):
        solve_minimal(Form(0, 0, 1, {((), ()): ONE}), W)
    with pytest.raises(InvalidArg):
        solve_minimal(Form(0, 1, 1, {((), (1,)): zb1}), W, method="nope")
    with pytest.raises(InvalidArg):
        solve_minimal(Form(0, 2, 2, {((), (1, 2)): ONE}), W, method="separable")
    with pytest.raises(InvalidArg):
        AnsatzSpec(max_z_degree=-1)


def test_ansatz_too_small_raises_then_retries():
    f = Form(0, 1, 1, {((), (1,)): zb1**2})
    with pytest.raises(AnsatzInsufficient):
        solve_minimal(f, W, AnsatzSpec(0, 1, retry_limit=0), method="generic")
    rep = solve_minimal(f, W, AnsatzSpec(0, 1, retry_limit=2), method="generic")
    assert rep.retries == 2 and rep.caps == (2, 3)  # needs H_{0,3}
    assert rep.norm_u_sq == solve_minimal(f, W).norm_u_sq


def test_default_ansatz_degrees():
    f = Form(0, 1, 2, {((), (1,)): z1**3 * zb1 + zb2**2})
    assert AnsatzSpec().resolve(f) == (3, 3)
    assert AnsatzSpec(5, 7).resolve(f) == (5, 7)


# -- randomized oracles -----------------------------------------------------

@pytest.mark.parametrize("s,t,n", [(0, 0, 1), (0, 0, 2), (0, 1, 2), (1, 0, 2), (1, 1, 3),
                                   (0, 2, 3), (2, 0, 2)])
@given(data=st.data())
def test_solver_against_box_oracle(s, t, n, data):
    u = data.draw(forms(s, t, n, max_deg=3))
    f = dbar(u)
    rep = solve_minimal(f, W, method="generic")
    assert dbar(rep.u) == f
    assert rep.norm_u_sq == box_inverse_oracle(f, W)
    assert rep.norm_u_sq <= norm_sq(u, W)
    assert rep.norm_u_sq <= rep.norm_f_sq


@pytest.mark.parametrize("seed", range(4))
def test_solver_against_least_squares_oracle(seed):
    rng = random.Random(seed)
    s, t = [(0, 0), (0, 1), (1, 0), (0, 0)][seed]
    u = random_form(rng, s, t, 2, 2, max_blocks=2)
    f = dbar(u)
    rep = solve_minimal(f, W)
    assert rep.norm_u_sq == least_squares_oracle(f, W, 3)


@given(forms(0, 0, 3, max_deg=3))
def test_solution_orthogonal_to_kernel(u):
    rep = solve_minimal(dbar(u), W)
    for p in range(4):
        for j in (1, 2, 3):
            v = Form(0, 0, 3, {((), ()): PolyFn.z(j, p)})
            assert inner_forms(rep.u, v, W) == 0
    assert ortho_defect(rep.u, W, 4) == 0


@given(forms(0, 1, 3, max_deg=3), forms(0, 0, 3, max_deg=2))
def test_higher_degree_solution_orthogonal_to_exact_forms(u, v):
    rep = solve_minimal(dbar(u), W)
    assert inner_forms(rep.u, dbar(v), W) == 0


def test_separable_matches_generic():
    rng = random.Random(3)
    for _ in range(20):
        coeffs = {}
        for k in (1, 2, 3):
            if rng.random() < 0.7:
                g = PolyFn()
                for _ in range(3):
                    g = g + PolyFn.monomial([(k, rng.randint(0, 3), rng.randint(0, 3))],
                                            Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
                if g:
                    coeffs[((), (k,))] = g
        f = Form(0, 1, 3, coeffs)
        assert is_separable(f)
        a = solve_minimal(f, W, method="separable")
        b = solve_minimal(f, W, method="generic")
        assert a.u == b.u and a.norm_u_sq == b.norm_u_sq
        assert a.method == "separable" and b.method == "generic"


def test_deterministic():
    rng = random.Random(9)
    f = dbar(random_form(rng, 1, 1, 3, 3))
    assert solve_minimal(f, W).to_dict() == solve_minimal(f, W).to_dict()


def test_report_dict():
    d = solve_minimal(Form(0, 1, 1, {((), (1,)): zb1}), W).to_dict()
    assert d["norm_u_sq"] == "1/128" and d["norm_f_sq"] == "1/64"
    assert d["residual_norm_sq"] == "0" and d["bound_satisfied"] is True


# -- ortho defect and energy identity --------------------------------------

def test_ortho_defect_examples():
    u = Form(0, 0, 1, {((), ()): (zb1**2).scale(Fraction(1, 2))})
    assert ortho_defect(u, W, 4) == 0
    v = Form(0, 0, 1, {((), ()): z1})
    assert ortho_defect(v, W, 4) == W.sigma(1) ** 2
    assert ortho_defect(v, W, 0) == 0
    assert ortho_defect(Form(0, 0, 1), W, 3) == 0


def test_energy_identity_examples():
    assert energy_identity_defect(Form(0, 1, 1, {((), (1,)): zb1}), W) == 0
    assert energy_identity_defect(Form(0, 1, 1, {((), (1,)): ONE}), W) == 0
    assert energy_identity_defect(Form(0, 1, 3), W) == 0


@pytest.mark.parametrize("s,t1,n", [(0, 1, 2), (1, 1, 2), (2, 1, 3), (0, 2, 3), (1, 2, 3),
                                    (0, 3, 3), (2, 3, 4)])
@given(data=st.data())
def test_energy_identity_random(s, t1, n, data):
    f = data.draw(forms(s, t1, n, max_deg=3))
    for w in (W, WeightSequence.explicit([Fraction(1, 3), Fraction(1, 5), Fraction(1, 7),
                                          Fraction(1, 11)])):
        assert energy_identity_defect(f, w) == 0
