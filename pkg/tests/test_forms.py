"""Differential forms: wedge, d, pull-back, group action, trace descent."""

import random
from fractions import Fraction

import pytest

from orbint.arith import QQ
from orbint.budgets import Budget
from orbint.errors import AnsatzExhausted, ChartMismatch
from orbint.forms import (DiffForm, act_form, default_denominators,
                          downstairs_equal, exterior_d, q_pullback, symmetrize,
                          trace_form, verify_direct_factor, wedge)
from orbint.poly import MultiPoly, RationalFn


def d_up(model, name):
    return DiffForm.d_var(model.field, model.uvars, name)


def d_down(model, name):
    return DiffForm.d_var(model.field, model.yvars, name)


def upoly(model, name):
    return MultiPoly.var(model.field, model.uvars, name)


def dpoly(model, name):
    return MultiPoly.var(model.field, model.yvars, name)


def over(form, poly):
    return form.scale(RationalFn(MultiPoly.const(poly.field, poly.vars, 1), poly))


def test_wedge_antisymmetry(a1):
    du, dv = d_up(a1, "u"), d_up(a1, "v")
    assert wedge(du, dv) == -wedge(dv, du)
    assert wedge(du, du).is_zero()


def test_leibniz(a1):
    u, v = upoly(a1, "u"), upoly(a1, "v")
    f = DiffForm.function(RationalFn(u * v))
    df = exterior_d(f)
    du, dv = d_up(a1, "u"), d_up(a1, "v")
    assert df == du.scale(RationalFn(v)) + dv.scale(RationalFn(u))


def test_d_squared_zero(a1):
    u, v = upoly(a1, "u"), upoly(a1, "v")
    for f in (u * v, u ** 3 - v, u * v ** 2 + 1):
        assert exterior_d(exterior_d(DiffForm.function(RationalFn(f)))).is_zero()
    w = d_up(a1, "u").scale(RationalFn(u * v ** 2))
    assert exterior_d(exterior_d(w)).is_zero()


def test_chart_mismatch(a1):
    with pytest.raises(ChartMismatch):
        wedge(d_up(a1, "u"), d_down(a1, "x"))


def test_q_pullback_dx(a1):
    u = upoly(a1, "u")
    got = q_pullback(a1, d_down(a1, "x"))
    assert got == d_up(a1, "u").scale(RationalFn(u * 2))


def test_q_pullback_logarithmic(a1):
    # q^(dx/x) = d(u^2)/u^2 = 2 du/u
    u = upoly(a1, "u")
    x = dpoly(a1, "x")
    got = q_pullback(a1, over(d_down(a1, "x"), x))
    expected = over(d_up(a1, "u").scale(2), u)
    assert got == expected


def test_q_pullback_dz(a1):
    u, v = upoly(a1, "u"), upoly(a1, "v")
    got = q_pullback(a1, d_down(a1, "z"))
    assert got == d_up(a1, "u").scale(RationalFn(v)) + \
        d_up(a1, "v").scale(RationalFn(u))


def test_q_pullback_wedge_homomorphism(a1):
    x, y = dpoly(a1, "x"), dpoly(a1, "y")
    a = over(d_down(a1, "x"), x)
    b = d_down(a1, "y").scale(RationalFn(y))
    lhs = q_pullback(a1, wedge(a, b))
    rhs = wedge(q_pullback(a1, a), q_pullback(a1, b))
    assert lhs == rhs


def test_symmetrize_invariant(a1):
    u, v = upoly(a1, "u"), upoly(a1, "v")
    w = d_up(a1, "u").scale(RationalFn(u * v + v))
    sym = symmetrize(a1, w)
    for el in a1.group:
        assert act_form(a1, el, sym) == sym


def test_default_denominators(a1):
    dens = default_denominators(a1)
    reprs = {repr(d) for d in dens}
    assert reprs == {"1", "x", "y", "x*y"}


def test_trace_of_pullback_is_degree(a1):
    dx = d_down(a1, "x")
    traced = trace_form(a1, q_pullback(a1, dx))
    assert downstairs_equal(a1, traced, dx.scale(2))


def test_trace_logarithmic_identity(a1):
    # Trace[du/u] = [dx/x]
    u = upoly(a1, "u")
    x = dpoly(a1, "x")
    traced = trace_form(a1, over(d_up(a1, "u"), u))
    assert downstairs_equal(a1, traced, over(d_down(a1, "x"), x))


def test_trace_volume_identity(a1):
    # Trace[du/u ^ dv/v] = (1/2)[dx/x ^ dy/y]
    u, v = upoly(a1, "u"), upoly(a1, "v")
    x, y = dpoly(a1, "x"), dpoly(a1, "y")
    w = wedge(over(d_up(a1, "u"), u), over(d_up(a1, "v"), v))
    traced = trace_form(a1, w)
    target = wedge(over(d_down(a1, "x"), x),
                   over(d_down(a1, "y"), y)).scale(Fraction(1, 2))
    assert downstairs_equal(a1, traced, target)


def test_trace_volume_form(a1):
    # du ^ dv is already invariant; oracle: q^(dx^dy/(2z)) = 2 du^dv
    u, v = upoly(a1, "u"), upoly(a1, "v")
    z = dpoly(a1, "z")
    w = wedge(d_up(a1, "u"), d_up(a1, "v"))
    cand = over(wedge(d_down(a1, "x"), d_down(a1, "y")), z * 2)
    assert q_pullback(a1, cand) == symmetrize(a1, w)
    traced = trace_form(a1, w)
    assert downstairs_equal(a1, traced, cand)


def test_trace_symmetrized_differential(a1):
    # u dv + v du = d(uv) descends to dz; symmetrization doubles
    u, v = upoly(a1, "u"), upoly(a1, "v")
    w = d_up(a1, "v").scale(RationalFn(u)) + d_up(a1, "u").scale(RationalFn(v))
    traced = trace_form(a1, w)
    assert downstairs_equal(a1, traced, d_down(a1, "z").scale(2))


def test_trace_polynomial_zero_form(a1):
    u = upoly(a1, "u")
    f = DiffForm.function(RationalFn(u ** 2))
    traced = trace_form(a1, f)
    x = dpoly(a1, "x")
    assert downstairs_equal(a1, traced, DiffForm.function(RationalFn(x * 2)))


def test_trace_commutes_with_d(a1):
    u, v = upoly(a1, "u"), upoly(a1, "v")
    samples = [
        d_up(a1, "u").scale(RationalFn(u ** 2 * v)),
        DiffForm.function(RationalFn(u * v)),
        d_up(a1, "v").scale(RationalFn(u * v ** 2 + v)),
    ]
    for w in samples:
        lhs = exterior_d(trace_form(a1, w))
        rhs = trace_form(a1, exterior_d(w))
        assert downstairs_equal(a1, lhs, rhs)


def test_direct_factor_report(a1):
    x, y, z = (dpoly(a1, n) for n in a1.yvars)
    samples = [
        d_down(a1, "x"),
        over(d_down(a1, "x"), x),
        over(d_down(a1, "y"), y),
        over(wedge(d_down(a1, "x"), d_down(a1, "y")), z),
    ]
    rows = verify_direct_factor(a1, samples)
    assert all(ok for _, ok in rows)
    assert len(rows) == 4


def test_direct_factor_randomized(a1, rng):
    # randomized suite of invariant-denominator forms
    x, y, z = (dpoly(a1, n) for n in a1.yvars)
    dens = default_denominators(a1)
    basis = [d_down(a1, n) for n in a1.yvars]
    for _ in range(6):
        num = MultiPoly.const(QQ, a1.yvars, rng.randint(1, 3)) \
            + x * rng.randint(-2, 2) + y * rng.randint(-2, 2) \
            + z * rng.randint(-2, 2)
        den = dens[rng.randrange(len(dens))]
        alpha = basis[rng.randrange(3)].scale(RationalFn(num, den))
        traced = trace_form(a1, q_pullback(a1, alpha))
        assert downstairs_equal(a1, traced, alpha.scale(a1.k))


def test_ansatz_exhausted(a1):
    # a symmetrized form needing a denominator outside the default set
    u, v = upoly(a1, "u"), upoly(a1, "v")
    weird = over(d_up(a1, "u"), (v - 1) * u)
    with pytest.raises(AnsatzExhausted):
        trace_form(a1, weird, budget=Budget(ansatz_degree=2))


def test_trace_rejects_downstairs_input(a1):
    with pytest.raises(ChartMismatch):
        trace_form(a1, d_down(a1, "x"))


def test_trace_identities_on_cyclotomic_model(a2):
    # degree-3 trace: trace(q^ alpha) = 3 alpha, and the volume form
    # du^dv descends to dx^dy/(3 z^2) since q^ of that is
    # (3u^2 du)^(3v^2 dv)/(3 (uv)^2) = 3 du^dv = symmetrize(du^dv)
    one = MultiPoly.const(a2.field, a2.yvars, 1)
    x = MultiPoly.var(a2.field, a2.yvars, "x")
    z = MultiPoly.var(a2.field, a2.yvars, "z")
    dx = DiffForm.d_var(a2.field, a2.yvars, "x")
    dy = DiffForm.d_var(a2.field, a2.yvars, "y")
    traced = trace_form(a2, q_pullback(a2, dx))
    assert downstairs_equal(a2, traced, dx.scale(3))
    dxox = dx.scale(RationalFn(one, x))
    assert downstairs_equal(a2, trace_form(a2, q_pullback(a2, dxox)),
                            dxox.scale(3))
    du = DiffForm.d_var(a2.field, a2.uvars, "u")
    dv = DiffForm.d_var(a2.field, a2.uvars, "v")
    vol = wedge(du, dv)
    cand = wedge(dx, dy).scale(RationalFn(one, z * z * 3))
    assert q_pullback(a2, cand) == symmetrize(a2, vol)
    assert downstairs_equal(a2, trace_form(a2, vol), cand)
