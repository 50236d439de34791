"""Groebner kernel: bases, normal forms, elimination, dimension, quotients."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbint.arith import QQ, char_poly
from orbint.budgets import Budget
from orbint.errors import EffortExceeded, NotZeroDimensional, UnitIdeal
from orbint.poly import (GREVLEX, LEX, Ideal, MultiPoly, RationalFn,
                         buchberger, mp_factor, mp_gcd, normal_form_list,
                         poly_div_exact)

XY = ("x", "y")
XYZ = ("x", "y", "z")


def var(name, ring=XYZ):
    return MultiPoly.var(QQ, ring, name)


def ideal(gens, ring=XYZ):
    return Ideal(QQ, ring, gens)


x, y, z = (var(n) for n in XYZ)
x2, y2 = (var(n, XY) for n in XY)


# --- groebner ---------------------------------------------------------------

def test_groebner_principal():
    assert ideal([x]).groebner() == (x,)


def test_groebner_hand_buchberger():
    # S-poly of (y - x^2, y) is x^2, done by hand
    gb = ideal([y2 - x2 ** 2, y2], XY).groebner()
    assert gb == (y2, x2 ** 2)


def test_groebner_spoly_reduction():
    gb = ideal([x * y - z ** 2, x]).groebner()
    assert gb == (x, z ** 2)


def test_groebner_determinism_under_permutation():
    gens = [x * y - z ** 2, x - y ** 2, z * x - 1]
    base = buchberger(gens)
    rng = random.Random(3)
    for _ in range(5):
        shuffled = gens[:]
        rng.shuffle(shuffled)
        assert buchberger(shuffled) == base


def test_groebner_spolys_reduce_to_zero():
    gb = list(ideal([x * y - z ** 2, x - y ** 2]).groebner())
    for i in range(len(gb)):
        for j in range(i + 1, len(gb)):
            li, _ = gb[i].leading(GREVLEX)
            lj, _ = gb[j].leading(GREVLEX)
            lcm = tuple(max(a, b) for a, b in zip(li, lj))
            mi = MultiPoly(QQ, XYZ, {tuple(l - a for l, a in zip(lcm, li)): 1})
            mj = MultiPoly(QQ, XYZ, {tuple(l - a for l, a in zip(lcm, lj)): 1})
            s = mi * gb[i] - mj * gb[j]
            assert normal_form_list(s, gb).is_zero()


def test_effort_budget():
    tiny = Budget(max_pairs=1)
    gens = [x ** 3 - y * z, y ** 3 - x * z, z ** 3 - x * y, x * y * z - 1]
    with pytest.raises(EffortExceeded):
        buchberger(gens, budget=tiny)


# --- normal form ------------------------------------------------------------

def test_normal_form_membership():
    i = ideal([x])
    assert i.normal_form(x ** 2).is_zero()
    assert i.normal_form(x + 1) == MultiPoly.const(QQ, XYZ, 1)


def test_normal_form_single_step():
    # z^2 against (xy - z^2) with z > x, y: one division step gives xy
    order = LEX  # under lex with x > y > z the LT of xy - z^2 is xy; use
    # an order where z^2 leads instead: grevlex ranks xy (deg 2) vs z^2
    # equal-degree, and reversed-exponent comparison makes xy lead.
    i = Ideal(QQ, ("z", "x", "y"),
              [MultiPoly.var(QQ, ("z", "x", "y"), "x")
               * MultiPoly.var(QQ, ("z", "x", "y"), "y")
               - MultiPoly.var(QQ, ("z", "x", "y"), "z") ** 2])
    zz = MultiPoly.var(QQ, ("z", "x", "y"), "z") ** 2
    nf = i.normal_form(zz, LEX)
    xy = (MultiPoly.var(QQ, ("z", "x", "y"), "x")
          * MultiPoly.var(QQ, ("z", "x", "y"), "y"))
    assert nf == xy


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_normal_form_linearity(coeffs):
    i = ideal([x * y - z ** 2, x - y ** 2])
    a, b, c, d = coeffs
    f = x * a + (y ** 2) * b
    g = z * c + (x * z) * d
    lhs = i.normal_form(f + g)
    rhs = i.normal_form(f) + i.normal_form(g)
    assert lhs == rhs


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=2, max_size=2))
def test_membership_of_random_combinations(coeffs):
    gens = [x * y - z ** 2, x - y ** 2]
    i = ideal(gens)
    combo = gens[0] * (x * coeffs[0] + 1) + gens[1] * (z * coeffs[1] - y)
    assert i.contains(combo)
    assert i.normal_form(combo).is_zero()


# --- elimination -------------------------------------------------------------

def test_elimination_quadric_cone():
    ring = ("u", "v", "x", "y", "z")
    u, v, X, Y, Z = (MultiPoly.var(QQ, ring, n) for n in ring)
    graph = Ideal(QQ, ring, [X - u ** 2, Y - v ** 2, Z - u * v])
    out = graph.eliminate(["x", "y", "z"])
    xe, ye, ze = (MultiPoly.var(QQ, XYZ, n) for n in XYZ)
    assert out.groebner() == (xe * ye - ze ** 2,)


def test_elimination_surjection():
    ring = ("u", "x")
    u, X = (MultiPoly.var(QQ, ring, n) for n in ring)
    out = Ideal(QQ, ring, [X - u]).eliminate(["x"])
    assert out.groebner() == ()


def test_elimination_cubic():
    # hand oracle: substituting uv = z, u^3 = x, v^3 = y gives xy = z^3
    ring = ("u", "v", "x", "y", "z")
    u, v, X, Y, Z = (MultiPoly.var(QQ, ring, n) for n in ring)
    graph = Ideal(QQ, ring, [X - u ** 3, Y - v ** 3, Z - u * v])
    out = graph.eliminate(["x", "y", "z"])
    xe, ye, ze = (MultiPoly.var(QQ, XYZ, n) for n in XYZ)
    assert out.groebner() == ((ze ** 3 - xe * ye).monic(),)


# --- dimension ---------------------------------------------------------------

def test_dimension_point():
    assert ideal([x2, y2], XY).dimension() == 0


def test_dimension_curve():
    assert ideal([y2 - x2 ** 2], XY).dimension() == 1


def test_dimension_surface():
    # leading-term oracle: LT ideal of (xy - z^2) is (xy) under grevlex;
    # {x, z} and {y, z} are independent sets of size 2, none of size 3
    assert ideal([x * y - z ** 2]).dimension() == 2


def test_dimension_unit_ideal():
    with pytest.raises(UnitIdeal):
        ideal([x, x + 1]).dimension()


def test_dimension_zero_ideal():
    assert ideal([]).dimension() == 3


# --- quotient basis / multiplication matrices --------------------------------

def test_quotient_basis_point():
    basis = ideal([x2, y2], XY).quotient_basis()
    assert basis == [(0, 0)]


def test_quotient_basis_tangency():
    i = ideal([y2 - x2 ** 2, y2], XY)
    basis = i.quotient_basis()
    assert basis == [(0, 0), (1, 0)]
    assert len(basis) == 2


def test_quotient_basis_order_independent_cardinality():
    i = ideal([x2 ** 2 - 1, y2 ** 3 - x2], XY)
    grevlex_basis = i.quotient_basis(GREVLEX)
    lex_basis = i.quotient_basis(LEX)
    assert len(grevlex_basis) == len(lex_basis) == 6


def test_quotient_basis_requires_dimension_zero():
    with pytest.raises(NotZeroDimensional):
        ideal([y2 - x2 ** 2], XY).quotient_basis()


def test_multiplication_matrix_char_poly():
    i = ideal([x2 ** 2 - 1, y2], XY)
    m = i.multiplication_matrix(x2)
    assert char_poly(QQ, m).coeffs == (Fraction(-1), Fraction(0), Fraction(1))
    i2 = ideal([x2 ** 2, y2], XY)
    m2 = i2.multiplication_matrix(x2)
    assert char_poly(QQ, m2).coeffs == (Fraction(0), Fraction(0), Fraction(1))


def test_multiplication_matrix_point():
    i = ideal([x2, y2], XY)
    assert i.multiplication_matrix(x2) == [[Fraction(0)]]


# --- saturation ---------------------------------------------------------------

def test_saturate_strips_component():
    assert ideal([x2 * y2], XY).saturate(x2).groebner() == (y2,)


def test_saturate_unit():
    out = ideal([x2 ** 2], XY).saturate(x2)
    assert out.is_unit()


def test_saturate_curve():
    out = ideal([x2 * (y2 - x2 ** 2)], XY).saturate(x2)
    assert out.groebner() == ((x2 ** 2 - y2).monic(),)


# --- multivariate gcd / factorization ----------------------------------------

def test_mp_gcd():
    a = (x + y) * (x - y)
    b = (x + y) * (x + z)
    assert mp_gcd(a, b) == (x + y)


def test_mp_factor():
    p = (x + y) * (x - y) * (x + z) ** 2
    fac = mp_factor(p)
    assert sorted((f.total_degree(), m) for f, m in fac) == [(1, 1), (1, 1), (1, 2)]
    acc = MultiPoly.const(QQ, XYZ, 1)
    for f, m in fac:
        for _ in range(m):
            acc = acc * f
    assert acc.monic() == p.monic()


def test_mp_factor_univariate_embedded():
    p = x ** 2 - 1
    fac = mp_factor(p)
    assert {repr(f) for f, _ in fac} == {"x - 1", "x + 1"}


def test_poly_div_exact():
    assert poly_div_exact((x + y) * (x - z), x + y) == x - z
    assert poly_div_exact(x * y + 1, x) is None


# --- rational functions --------------------------------------------------------

def test_rational_fn_reduction():
    r = RationalFn(x * y, x)
    assert r.num == y
    assert r.den.is_constant()


def test_rational_fn_arithmetic():
    half = RationalFn(x, x * 2)
    assert half + half == RationalFn(MultiPoly.const(QQ, XYZ, 1))
    q = RationalFn(MultiPoly.const(QQ, XYZ, 1), x)
    assert (q * x) == RationalFn(MultiPoly.const(QQ, XYZ, 1))


def test_rational_fn_derivative():
    q = RationalFn(MultiPoly.const(QQ, XYZ, 1), x)
    dq = q.derivative(0)
    assert dq == RationalFn(MultiPoly.const(QQ, XYZ, -1), x ** 2)


# --- radical / minimal polynomials ---------------------------------------------

def test_zero_dim_radical():
    i = ideal([x2 ** 2, y2 - 1], XY)
    rad = i.radical_zero_dim()
    assert rad.groebner() == ((y2 - 1).monic(), x2)


def test_minimal_polynomial():
    i = ideal([x2 ** 2 - 2, y2], XY)
    mp = i.minimal_polynomial_of(x2)
    assert mp.coeffs == (Fraction(-2), Fraction(0), Fraction(1))
